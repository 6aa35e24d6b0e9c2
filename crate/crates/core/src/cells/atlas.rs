//! The cells of `W` up to `GL_n(Z)`: one representative per orbit with its
//! stabilizer, its faces (each transported to its own representative), the
//! flags it respects, and the chains of faces used by barycentric models.
//!
//! Every closed cell is a compact polytope, so every cell has a vertex in its
//! closure. Enumeration therefore walks the vertex orbits (starting from the
//! root-lattice form and crossing edges) and collects the cells near each
//! vertex representative.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::exactla::{int, IntMatrix, RatMatrix, Rational};
use crate::flags::RationalFlag;
use crate::lattice::group::gl_generators;
use crate::lattice::{
    config_equiv, config_key, config_stabilizer, ConfigKey, GramForm, GroupSpec, VectorConfig,
};

use super::cell::{
    flags_respected_by, geometry, local_cells, shoot, tight_set, Cell, CellGeometry,
};

/// A face of a representative cell and how to carry it to its own
/// representative.
#[derive(Clone, Debug)]
pub struct FaceLink {
    pub config: VectorConfig,
    pub dim: usize,
    /// Index of the representative of the face's orbit.
    pub class: usize,
    /// `to_rep · config = classes[class].cell.config`.
    pub to_rep: IntMatrix,
}

/// One `GL_n(Z)`-orbit of cells.
#[derive(Clone, Debug)]
pub struct CellClass {
    pub cell: Cell,
    /// All of `Stab_{GL_n(Z)}(±config)`, sorted; element 0 is the identity.
    pub stabilizer: Vec<IntMatrix>,
    pub stabilizer_inverses: Vec<IntMatrix>,
    pub stabilizer_generators: Vec<IntMatrix>,
    /// Faces of the closed cell; `faces[0]` is the cell itself.
    pub faces: Vec<FaceLink>,
    pub face_index: HashMap<VectorConfig, usize>,
    /// `face_perm[s][i]` is the index of `stabilizer[s] · faces[i]`.
    pub face_perm: Vec<Vec<usize>>,
    /// Every flag respected by the cell.
    pub flags: Vec<RationalFlag>,
    pub flag_index: HashMap<RationalFlag, usize>,
    /// Adapted bases of the flags: `flag_bases[f] · standard = flags[f]`.
    pub flag_bases: Vec<IntMatrix>,
    /// `flag_perm[s][f]` is the index of `stabilizer[s] · flags[f]`.
    pub flag_perm: Vec<Vec<usize>>,
    /// Chains of faces `σ_0 < … < σ_k = cell`, listed from the smallest
    /// cell up; entries index `faces`.
    pub chains: Vec<Vec<usize>>,
}

/// All `GL_n(Z)`-orbits of cells of `W`, sorted by dimension.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub n: usize,
    pub seed: Option<u64>,
    pub classes: Vec<CellClass>,
}

impl Atlas {
    /// Index of the class of `config` and a `U` with `U · config = rep`.
    pub fn locate(&self, config: &VectorConfig) -> Option<(usize, IntMatrix)> {
        let key = config_key(config);
        let gl = GroupSpec::gl(self.n);
        self.classes.iter().enumerate().find_map(|(i, c)| {
            if config_key(&c.cell.config) != key {
                return None;
            }
            config_equiv(config, &c.cell.config, &gl, None).map(|u| (i, u))
        })
    }

    /// Top dimension of a cell.
    pub fn dim(&self) -> usize {
        self.classes.iter().map(|c| c.cell.dim).max().unwrap_or(0)
    }

    /// Number of classes per dimension.
    pub fn counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim() + 1];
        for c in &self.classes {
            out[c.cell.dim] += 1;
        }
        out
    }
}

/// Cached atlas for `n`; a seed conjugates every representative by a random
/// element of `GL_n(Z)`, giving an equally valid but different choice.
pub fn atlas(n: usize, seed: Option<u64>) -> Result<Arc<Atlas>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Option<u64>), Arc<Atlas>>>> = OnceLock::new();
    if !(2..=4).contains(&n) {
        return Err(Error::DimensionUnsupported(n));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache
        .lock()
        .map_err(|_| Error::Invariant("atlas cache poisoned".into()))?;
    if let Some(a) = guard.get(&(n, seed)) {
        return Ok(a.clone());
    }
    let a = Arc::new(build(n, seed)?);
    guard.insert((n, seed), a.clone());
    Ok(a)
}

/// The form with 1 on the diagonal and 1/2 off it: the root lattice `A_n`,
/// whose minimal vectors give a vertex of `W`.
pub fn root_form(n: usize) -> GramForm {
    let half = Rational::new(1.into(), 2.into());
    GramForm::new_unchecked(RatMatrix::from_fn(n, n, |i, j| {
        if i == j {
            int(1)
        } else {
            half.clone()
        }
    }))
}

struct Dictionary {
    n: usize,
    by_key: BTreeMap<ConfigKey, Vec<usize>>,
    configs: Vec<VectorConfig>,
}

impl Dictionary {
    fn new(n: usize) -> Self {
        Dictionary {
            n,
            by_key: BTreeMap::new(),
            configs: Vec::new(),
        }
    }

    fn find(&self, s: &VectorConfig) -> Option<usize> {
        let gl = GroupSpec::gl(self.n);
        self.by_key
            .get(&config_key(s))?
            .iter()
            .copied()
            .find(|&i| config_equiv(s, &self.configs[i], &gl, None).is_some())
    }

    /// Inserts unless an equivalent configuration is present; returns
    /// whether it was new.
    fn insert(&mut self, s: &VectorConfig) -> bool {
        if self.find(s).is_some() {
            return false;
        }
        self.by_key
            .entry(config_key(s))
            .or_default()
            .push(self.configs.len());
        self.configs.push(s.clone());
        true
    }
}

fn midpoint(a: &GramForm, b: &GramForm) -> GramForm {
    GramForm::new_unchecked((a.matrix() + b.matrix()).map(|x| x / int(2)))
}

fn random_gl(n: usize, rng: &mut rand::rngs::StdRng) -> IntMatrix {
    let gens = gl_generators(n);
    let mut g = IntMatrix::identity(n);
    for _ in 0..8 {
        g = &g * &gens[rng.gen_range(0..gens.len())];
    }
    g
}

fn build(n: usize, seed: Option<u64>) -> Result<Atlas> {
    let gl = GroupSpec::gl(n);
    let seed_form = root_form(n);
    let seed_config = tight_set(&seed_form)?;
    ensure!(
        seed_config.cell_dim() == 0,
        "root-lattice form is not a vertex of W"
    );

    // Vertex orbits, by crossing edges.
    let mut vertices: Vec<GramForm> = vec![seed_form];
    let mut vdict = Dictionary::new(n);
    vdict.insert(&seed_config);
    let mut head = 0;
    while head < vertices.len() {
        let v = vertices[head].clone();
        head += 1;
        let sv = tight_set(&v)?;
        let empty = VectorConfig::from_primitive(n, Vec::new());
        for lc in local_cells(&v, &sv, &empty, &sv) {
            if lc.config.cell_dim() != 1 {
                continue;
            }
            let e = shoot(&v, lc.direction.as_ref().expect("edge direction"))?;
            if vdict.insert(&tight_set(&e)?) {
                vertices.push(e);
            }
        }
    }

    // Cells near each vertex representative.
    let mut cdict = Dictionary::new(n);
    let mut points: Vec<GramForm> = Vec::new();
    for v in &vertices {
        let sv = tight_set(v)?;
        let empty = VectorConfig::from_primitive(n, Vec::new());
        for lc in local_cells(v, &sv, &empty, &sv) {
            if cdict.insert(&lc.config) {
                let p = match &lc.direction {
                    None => v.clone(),
                    Some(d) => midpoint(v, &shoot(v, d)?),
                };
                points.push(p);
            }
        }
    }
    if let Some(s) = seed {
        let mut rng = rand::rngs::StdRng::seed_from_u64(s);
        for p in points.iter_mut() {
            *p = p.act(&random_gl(n, &mut rng));
        }
    }
    let mut geos: Vec<(Cell, CellGeometry)> = Vec::with_capacity(points.len());
    for p in &points {
        let g = geometry(p)?;
        geos.push((g.cell(&g.config)?, g));
    }
    geos.sort_by(|a, b| (a.0.dim, &a.0.config).cmp(&(b.0.dim, &b.0.config)));

    let reps: Vec<VectorConfig> = geos.iter().map(|(c, _)| c.config.clone()).collect();
    let keys: Vec<ConfigKey> = reps.iter().map(config_key).collect();
    let locate = |s: &VectorConfig| -> Result<(usize, IntMatrix)> {
        let k = config_key(s);
        (0..reps.len())
            .filter(|&i| keys[i] == k)
            .find_map(|i| config_equiv(s, &reps[i], &gl, None).map(|u| (i, u)))
            .ok_or_else(|| {
                Error::Invariant(format!(
                    "face {:?} lies in no enumerated orbit",
                    s.vectors()
                ))
            })
    };

    // Classes are independent once the representatives are fixed.
    let classes = geos
        .into_par_iter()
        .enumerate()
        .map(|(idx, (cell, geo))| -> Result<CellClass> {
            let mut faces = vec![FaceLink {
                config: cell.config.clone(),
                dim: cell.dim,
                class: idx,
                to_rep: IntMatrix::identity(n),
            }];
            for f in geo.proper_faces() {
                let (class, to_rep) = locate(f)?;
                faces.push(FaceLink {
                    config: f.clone(),
                    dim: f.cell_dim(),
                    class,
                    to_rep,
                });
            }
            let face_index: HashMap<VectorConfig, usize> = faces
                .iter()
                .enumerate()
                .map(|(i, f)| (f.config.clone(), i))
                .collect();

            let stab = config_stabilizer(&cell.config, &gl);
            let id = IntMatrix::identity(n);
            let mut stabilizer = stab.elements;
            stabilizer.retain(|s| *s != id);
            stabilizer.insert(0, id);
            let stabilizer_inverses: Vec<IntMatrix> = stabilizer
                .iter()
                .map(|s| s.unimodular_inverse().expect("unimodular"))
                .collect();

            let face_perm = stabilizer
                .iter()
                .map(|s| {
                    faces
                        .iter()
                        .map(|f| {
                            face_index
                                .get(&f.config.transform(s))
                                .copied()
                                .ok_or_else(|| {
                                    Error::Invariant("stabilizer does not permute faces".into())
                                })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;

            let flags = flags_respected_by(&cell.config);
            let flag_index: HashMap<RationalFlag, usize> = flags
                .iter()
                .enumerate()
                .map(|(i, f)| (f.clone(), i))
                .collect();
            let flag_bases = flags.iter().map(RationalFlag::adapted_basis).collect();
            let flag_perm = stabilizer
                .iter()
                .map(|s| {
                    flags
                        .iter()
                        .map(|f| {
                            flag_index.get(&f.transform(s)).copied().ok_or_else(|| {
                                Error::Invariant("stabilizer does not permute flags".into())
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;

            let chains = face_chains(&faces);
            Ok(CellClass {
                cell,
                stabilizer,
                stabilizer_inverses,
                stabilizer_generators: stab.generators,
                faces,
                face_index,
                face_perm,
                flags,
                flag_index,
                flag_bases,
                flag_perm,
                chains,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let atlas = Atlas { n, seed, classes };
    // dim W = dim X − (n − 1) with dim X = n(n+1)/2 − 1.
    ensure!(
        atlas.dim() == n * (n + 1) / 2 - n,
        "top cell dimension {} is not dim X − (n − 1)",
        atlas.dim()
    );
    Ok(atlas)
}

/// Chains of faces ending at `faces[0]`, smallest cell first.
fn face_chains(faces: &[FaceLink]) -> Vec<Vec<usize>> {
    // `a` precedes `b` in a chain iff config(a) ⊋ config(b).
    let below: Vec<Vec<usize>> = faces
        .iter()
        .map(|b| {
            (0..faces.len())
                .filter(|&a| faces[a].dim < b.dim && b.config.is_subset_of(&faces[a].config))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![0]];
    while let Some(chain) = stack.pop() {
        for &a in &below[chain[0]] {
            let mut c = Vec::with_capacity(chain.len() + 1);
            c.push(a);
            c.extend_from_slice(&chain);
            stack.push(c);
        }
        out.push(chain);
    }
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}
