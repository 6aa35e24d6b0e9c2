//! Cells of `W` modulo a congruence subgroup `Γ`, and of `W_F` modulo
//! `Γ ∩ P_F`.
//!
//! With `Ω = Γ\GL_n(Z)` (a finite right `GL_n(Z)`-set with base point `ω₀`
//! and transversal `ω₀ · t_ω = ω`), the `Γ`-classes of cells `g·C` in the
//! `GL_n(Z)`-orbit of a representative `C` are the orbits of `Stab(C)` on `Ω`
//! via `g ↦ ω₀ g`. For `W_F`, a cell `g·C` respects `F` iff `C` respects
//! `F″ = g⁻¹F`, and its `(Γ∩P_F)`-class is recorded by the decoration
//! `(ω₀ g, F″)` modulo `Stab(C)` acting by `s·(ω, F″) = (ω s⁻¹, s F″)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::exactla::IntMatrix;
use crate::flags::{FlagOrbitIndex, RationalFlag};
use crate::lattice::{CosetSpace, GramForm, GroupSpec, VectorConfig};

use super::atlas::{atlas, Atlas};

/// Options for building complexes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Reseeds both the cell representatives and the coset transversal.
    pub seed: Option<u64>,
    /// Allows `n = 4` (slow; structural checks only).
    pub experimental: bool,
}

/// The atlas of `GL_n(Z)`-classes together with the coset space of `Γ`,
/// and the action tables both need.
#[derive(Debug)]
pub struct GroupContext {
    pub group: GroupSpec,
    pub seed: Option<u64>,
    pub atlas: Arc<Atlas>,
    pub omega: CosetSpace,
    /// `omega_action[c][s][ω] = ω · stabilizer[s]⁻¹` for class `c`.
    omega_action: Vec<Vec<Vec<usize>>>,
    /// `inverse_index[c][s]` is the index of `stabilizer[s]⁻¹`.
    inverse_index: Vec<Vec<usize>>,
    /// `face_inverses[c][f] = faces[f].to_rep⁻¹`.
    face_inverses: Vec<Vec<IntMatrix>>,
    flag_indices: std::sync::Mutex<HashMap<Vec<usize>, Arc<FlagOrbitIndex>>>,
}

impl GroupContext {
    pub fn new(group: &GroupSpec, opts: EnumerationOptions) -> Result<Arc<Self>> {
        let n = group.n;
        if n == 4 && !opts.experimental {
            return Err(Error::DimensionUnsupported(4));
        }
        let atlas = atlas(n, opts.seed)?;
        let omega = CosetSpace::new(*group, opts.seed);
        let omega_action = atlas
            .classes
            .iter()
            .map(|c| {
                c.stabilizer_inverses
                    .iter()
                    .map(|si| (0..omega.len()).map(|w| omega.act(w, si)).collect())
                    .collect()
            })
            .collect();
        let inverse_index = atlas
            .classes
            .iter()
            .map(|c| {
                let pos: HashMap<&IntMatrix, usize> = c
                    .stabilizer
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (m, i))
                    .collect();
                c.stabilizer_inverses.iter().map(|m| pos[m]).collect()
            })
            .collect();
        let face_inverses = atlas
            .classes
            .iter()
            .map(|c| {
                c.faces
                    .iter()
                    .map(|f| f.to_rep.unimodular_inverse().expect("unimodular"))
                    .collect()
            })
            .collect();
        Ok(Arc::new(GroupContext {
            group: *group,
            seed: opts.seed,
            atlas,
            omega,
            omega_action,
            inverse_index,
            face_inverses,
            flag_indices: std::sync::Mutex::new(HashMap::new()),
        }))
    }

    /// `ω · s⁻¹` for the `s`-th stabilizer element of class `c`.
    pub fn act_inverse(&self, c: usize, s: usize, w: usize) -> usize {
        self.omega_action[c][s][w]
    }

    /// Index of the inverse of the `s`-th stabilizer element of class `c`.
    pub fn inverse_index(&self, c: usize, s: usize) -> usize {
        self.inverse_index[c][s]
    }

    /// The decoration of the face `faces[f]` of class `c`, seen from its own
    /// class: a cell `g·C` with decoration `d` has this face equal to
    /// `(g U⁻¹)·C′` where `U` carries the face to its representative `C′`.
    pub fn face_decoration(&self, c: usize, f: usize, d: Decoration) -> Decoration {
        let cls = &self.atlas.classes[c];
        let link = &cls.faces[f];
        let target = &self.atlas.classes[link.class];
        Decoration {
            omega: self.omega.act(d.omega, &self.face_inverses[c][f]),
            flag: d
                .flag
                .map(|k| target.flag_index[&cls.flags[k].transform(&link.to_rep)]),
        }
    }

    /// Cached flag-class lookup for one flag type.
    pub fn flag_index(&self, dims: &[usize]) -> Result<Arc<FlagOrbitIndex>> {
        let mut g = self
            .flag_indices
            .lock()
            .map_err(|_| Error::Invariant("flag index cache poisoned".into()))?;
        if let Some(x) = g.get(dims) {
            return Ok(x.clone());
        }
        let idx = Arc::new(FlagOrbitIndex::new(&self.omega, dims)?);
        g.insert(dims.to_vec(), idx.clone());
        Ok(idx)
    }

    /// Class (within its type) of the flag `t_ω · flags[f]` of cell class `c`.
    pub fn flag_class(&self, c: usize, w: usize, f: usize) -> Result<usize> {
        let cls = &self.atlas.classes[c];
        let idx = self.flag_index(&cls.flags[f].dims())?;
        Ok(idx.class_of_point(self.omega.act(w, &cls.flag_bases[f])))
    }
}

/// A decoration `(ω, F″)` of a representative cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decoration {
    pub omega: usize,
    pub flag: Option<usize>,
}

/// Which decorations are admissible.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub flag: RationalFlag,
    pub dims: Vec<usize>,
    pub class: usize,
}

impl Constraint {
    pub fn new(ctx: &GroupContext, flag: &RationalFlag) -> Result<Self> {
        if flag.n() != ctx.group.n {
            return Err(Error::DimensionMismatch(
                "flag and group dimensions differ".into(),
            ));
        }
        if flag.is_empty() {
            return Err(Error::InvalidFlag(
                "constraint flag needs a proper member".into(),
            ));
        }
        let dims = flag.dims();
        let class = ctx.flag_index(&dims)?.class_of(&ctx.omega, flag);
        Ok(Constraint {
            flag: flag.clone(),
            dims,
            class,
        })
    }
}

impl GroupContext {
    /// `s · d` for the `s`-th stabilizer element of class `c`.
    pub fn act_decoration(&self, c: usize, s: usize, d: Decoration) -> Decoration {
        let cls = &self.atlas.classes[c];
        Decoration {
            omega: self.act_inverse(c, s, d.omega),
            flag: d.flag.map(|f| cls.flag_perm[s][f]),
        }
    }

    /// Admissible decorations of class `c`, sorted.
    pub fn decorations(
        &self,
        c: usize,
        constraint: Option<&Constraint>,
    ) -> Result<Vec<Decoration>> {
        let cls = &self.atlas.classes[c];
        let mut out = Vec::new();
        match constraint {
            None => out.extend((0..self.omega.len()).map(|w| Decoration {
                omega: w,
                flag: None,
            })),
            Some(k) => {
                let fs: Vec<usize> = (0..cls.flags.len())
                    .filter(|&f| cls.flags[f].dims() == k.dims)
                    .collect();
                for w in 0..self.omega.len() {
                    for &f in &fs {
                        if self.flag_class(c, w, f)? == k.class {
                            out.push(Decoration {
                                omega: w,
                                flag: Some(f),
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Orbits of `Stab(C)` on admissible decorations: for every decoration,
    /// its orbit root (the smallest member) and an `s` with `s · root = d`.
    pub fn decoration_orbits(
        &self,
        c: usize,
        constraint: Option<&Constraint>,
    ) -> Result<(Vec<Decoration>, HashMap<Decoration, (Decoration, usize)>)> {
        let decs = self.decorations(c, constraint)?;
        let stab = self.atlas.classes[c].stabilizer.len();
        let mut map: HashMap<Decoration, (Decoration, usize)> = HashMap::with_capacity(decs.len());
        let mut roots = Vec::new();
        for &d in &decs {
            if map.contains_key(&d) {
                continue;
            }
            roots.push(d);
            for s in 0..stab {
                map.entry(self.act_decoration(c, s, d)).or_insert((d, s));
            }
        }
        Ok((roots, map))
    }

    /// A `g ∈ GL_n(Z)` realizing a decoration: `ω₀ g = ω` and, with a
    /// constraint, `g · F″ = F`.
    pub fn realize(
        &self,
        c: usize,
        d: Decoration,
        constraint: Option<&Constraint>,
    ) -> Result<IntMatrix> {
        let t = self.omega.transversal(d.omega).clone();
        let (Some(k), Some(f)) = (constraint, d.flag) else {
            return Ok(t);
        };
        let idx = self.flag_index(&k.dims)?;
        let actual = self.atlas.classes[c].flags[f].transform(&t);
        let (class, gamma) = idx.classify(&self.omega, &actual);
        let (class_f, gamma_f) = idx.classify(&self.omega, &k.flag);
        ensure!(
            class == class_f,
            "decoration lies over a different flag class"
        );
        let back = gamma_f.unimodular_inverse().expect("unimodular");
        Ok(&(&back * &gamma) * &t)
    }
}

/// Orbit bookkeeping for the admissible decorations of every class.
#[derive(Debug)]
pub struct DecorationIndex {
    pub constraint: Option<Constraint>,
    /// Per class: decoration ↦ (orbit root, `s` with `s · root = decoration`).
    pub orbit_maps: Vec<HashMap<Decoration, (Decoration, usize)>>,
    /// Per class: the orbit roots in increasing order.
    pub roots: Vec<Vec<Decoration>>,
    /// Stabilizer indices fixing each root.
    pub root_stabilizers: HashMap<(usize, Decoration), Vec<usize>>,
    /// Orbit cell id of each root.
    pub ids: HashMap<(usize, Decoration), usize>,
}

impl DecorationIndex {
    /// Root of the orbit of `d` and the index of an `s` with `s · d = root`.
    pub fn normalize(&self, ctx: &GroupContext, c: usize, d: Decoration) -> (Decoration, usize) {
        let (root, s) = self.orbit_maps[c][&d];
        (root, ctx.inverse_index(c, s))
    }

    /// Orbit cell id of the cell with decoration `d` in class `c`.
    pub fn cell_id(&self, c: usize, d: Decoration) -> usize {
        self.ids[&(c, self.orbit_maps[c][&d].0)]
    }
}

/// One orbit of cells.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitCell {
    pub id: usize,
    pub dim: usize,
    pub config: VectorConfig,
    pub witness: GramForm,
    /// Index of the `GL_n(Z)`-class.
    #[serde(rename = "glClass")]
    pub gl_class: usize,
    /// `transport · (class representative) = this cell`.
    pub transport: IntMatrix,
    /// Order of the stabilizer of the cell in the acting group.
    #[serde(rename = "stabilizerOrder")]
    pub stabilizer_order: usize,
    #[serde(skip)]
    pub decoration: Decoration,
}

/// A codimension-one face of a cell: `via · (face of cell) = cells[face]`.
#[derive(Clone, Debug, Serialize)]
pub struct Incidence {
    pub cell: usize,
    pub face: usize,
    pub via: IntMatrix,
}

/// Orbit representatives of cells with incidences, over `Γ` (no
/// constraint) or over `Γ ∩ P_F` (restricted to cells respecting `F`).
#[derive(Clone, Debug, Serialize)]
pub struct OrbitComplex {
    pub group: GroupSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<RationalFlag>,
    pub cells: Vec<OrbitCell>,
    pub incidences: Vec<Incidence>,
    #[serde(skip)]
    pub ctx: Arc<GroupContext>,
    #[serde(skip)]
    pub index: Arc<DecorationIndex>,
}

impl OrbitComplex {
    /// Number of orbits in each dimension `0..=dim W`.
    pub fn counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.ctx.atlas.dim() + 1];
        for c in &self.cells {
            out[c.dim] += 1;
        }
        out
    }

    /// Orbit representatives of one dimension.
    pub fn cells_of_dim(&self, d: usize) -> Vec<&OrbitCell> {
        self.cells.iter().filter(|c| c.dim == d).collect()
    }
}

/// Cells of `W` modulo `Γ`.
#[allow(non_snake_case)]
pub fn enumerate_W(group: &GroupSpec) -> Result<OrbitComplex> {
    enumerate_with(group, EnumerationOptions::default())
}

/// [`enumerate_W`] with options.
pub fn enumerate_with(group: &GroupSpec, opts: EnumerationOptions) -> Result<OrbitComplex> {
    let ctx = GroupContext::new(group, opts)?;
    orbit_complex(ctx, None)
}

/// The subcomplex `W_F` modulo `Γ ∩ P_F`.
#[allow(non_snake_case)]
pub fn subcomplex_WF(complex: &OrbitComplex, f: &RationalFlag) -> Result<OrbitComplex> {
    orbit_complex(complex.ctx.clone(), Some(f))
}

fn orbit_complex(ctx: Arc<GroupContext>, flag: Option<&RationalFlag>) -> Result<OrbitComplex> {
    let constraint = flag.map(|f| Constraint::new(&ctx, f)).transpose()?;
    let atlas = ctx.atlas.clone();
    let group = ctx.group;
    let mut cells = Vec::new();
    let mut orbit_maps = Vec::with_capacity(atlas.classes.len());
    let mut all_roots = Vec::with_capacity(atlas.classes.len());
    let mut root_stabilizers = HashMap::new();
    let mut ids: HashMap<(usize, Decoration), usize> = HashMap::new();
    for (c, cls) in atlas.classes.iter().enumerate() {
        let (roots, map) = ctx.decoration_orbits(c, constraint.as_ref())?;
        for &d in &roots {
            let g = ctx.realize(c, d, constraint.as_ref())?;
            let fixers: Vec<usize> = (0..cls.stabilizer.len())
                .filter(|&s| ctx.act_decoration(c, s, d) == d)
                .collect();
            let fixers_len = fixers.len();
            root_stabilizers.insert((c, d), fixers);
            ids.insert((c, d), cells.len());
            cells.push(OrbitCell {
                id: cells.len(),
                dim: cls.cell.dim,
                config: cls.cell.config.transform(&g),
                witness: cls.cell.witness.act(&g),
                gl_class: c,
                transport: g,
                stabilizer_order: fixers_len,
                decoration: d,
            });
        }
        orbit_maps.push(map);
        all_roots.push(roots);
    }
    let mut incidences = Vec::new();
    for cell in &cells {
        let c = cell.gl_class;
        let cls = &atlas.classes[c];
        let g_inv = cell.transport.unimodular_inverse().expect("unimodular");
        for (fi, face) in cls
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.dim + 1 == cls.cell.dim)
        {
            let target = &atlas.classes[face.class];
            let moved = ctx.face_decoration(c, fi, cell.decoration);
            let (root, s) = orbit_maps[face.class][&moved];
            let id = ids[&(face.class, root)];
            let via =
                &(&(&cells[id].transport * &target.stabilizer_inverses[s]) * &face.to_rep) * &g_inv;
            ensure!(
                group.contains(&via),
                "incidence element is not in the group"
            );
            ensure!(
                face.config.transform(&cell.transport).transform(&via) == cells[id].config,
                "incidence does not match"
            );
            if let Some(k) = &constraint {
                ensure!(
                    k.flag.is_stabilized_by(&via),
                    "incidence element does not fix the flag"
                );
            }
            incidences.push(Incidence {
                cell: cell.id,
                face: id,
                via,
            });
        }
    }
    let index = Arc::new(DecorationIndex {
        constraint,
        orbit_maps,
        roots: all_roots,
        root_stabilizers,
        ids,
    });
    Ok(OrbitComplex {
        group,
        constraint: flag.cloned(),
        cells,
        incidences,
        ctx,
        index,
    })
}
