//! Δ-complex models of `W/Γ` and `W_F/(Γ∩P)` from the first barycentric
//! subdivision.
//!
//! A simplex of the subdivision is a chain `σ_0 < … < σ_k` of cells, with
//! vertices the barycenters in that order. Its orbit is recorded on the
//! top cell's class `C`: a chain of faces of `C`, plus the decoration of the
//! top cell, modulo `Stab(C)`. An element fixing a chain fixes every member
//! (their dimensions differ), hence every barycenter, so simplices are never
//! flipped onto themselves and the orbit Δ-complex computes the homology of
//! the quotient space with any coefficients.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::cells::{subcomplex_WF, Decoration, DecorationIndex, GroupContext, OrbitComplex};
use crate::error::{ensure, Result};
use crate::exactla::SparseMatrix;
use crate::flags::RationalFlag;
use crate::lattice::GroupSpec;

use super::homology::{Coefficients, GradedComplex, HomologyResult};

/// A simplex orbit: a chain of faces of the class `class`, with the top
/// cell's decoration, in canonical (lexicographically least) position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexKey {
    pub class: usize,
    pub decoration: Decoration,
    pub chain: Vec<usize>,
}

/// Provenance of a simplex: the cell orbits of its chain, smallest first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplexLabel {
    pub cells: Vec<usize>,
}

/// A finite Δ-complex with integral boundary matrices.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientComplex {
    pub group: GroupSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<RationalFlag>,
    #[serde(rename = "simplicesByDim")]
    pub simplices: Vec<Vec<SimplexLabel>>,
    /// `boundaries[k] : C_k → C_{k−1}`; `boundaries[0]` has no rows.
    pub boundaries: Vec<SparseMatrix>,
    #[serde(skip)]
    pub keys: Vec<Vec<SimplexKey>>,
    #[serde(skip)]
    lookup: Vec<HashMap<SimplexKey, usize>>,
    #[serde(skip)]
    pub ctx: Arc<GroupContext>,
    #[serde(skip)]
    pub index: Arc<DecorationIndex>,
}

/// Canonicalization of chains and decorations inside one orbit complex.
pub(crate) struct Canon<'a> {
    pub ctx: &'a GroupContext,
    pub index: &'a DecorationIndex,
}

impl Canon<'_> {
    /// The canonical key of the simplex `(c, d, chain)`.
    pub fn key(&self, c: usize, d: Decoration, chain: &[usize]) -> SimplexKey {
        let cls = &self.ctx.atlas.classes[c];
        let (root, s) = self.index.normalize(self.ctx, c, d);
        let moved: Vec<usize> = chain.iter().map(|&f| cls.face_perm[s][f]).collect();
        let best = self.index.root_stabilizers[&(c, root)]
            .iter()
            .map(|&t| {
                moved
                    .iter()
                    .map(|&f| cls.face_perm[t][f])
                    .collect::<Vec<_>>()
            })
            .min()
            .expect("stabilizer contains the identity");
        SimplexKey {
            class: c,
            decoration: root,
            chain: best,
        }
    }

    /// Face `i` (delete the `i`-th vertex) of a simplex, canonicalized.
    pub fn face(&self, key: &SimplexKey, i: usize) -> SimplexKey {
        let k = key.chain.len() - 1;
        if i < k {
            let mut ch = key.chain.clone();
            ch.remove(i);
            return self.key(key.class, key.decoration, &ch);
        }
        let (c, d) = (key.class, key.decoration);
        let cls = &self.ctx.atlas.classes[c];
        let top = key.chain[k - 1];
        let link = &cls.faces[top];
        let target = &self.ctx.atlas.classes[link.class];
        let ch: Vec<usize> = key.chain[..k]
            .iter()
            .map(|&f| target.face_index[&cls.faces[f].config.transform(&link.to_rep)])
            .collect();
        self.key(link.class, self.ctx.face_decoration(c, top, d), &ch)
    }

    /// The class and decoration of the `j`-th member of the chain.
    pub fn member(&self, key: &SimplexKey, j: usize) -> (usize, Decoration) {
        let f = key.chain[j];
        (
            self.ctx.atlas.classes[key.class].faces[f].class,
            self.ctx.face_decoration(key.class, f, key.decoration),
        )
    }
}

impl QuotientComplex {
    /// Highest simplex dimension with room reserved (`dim W`).
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Simplex counts per dimension.
    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.iter().all(Vec::is_empty)
    }

    /// Alternating count of simplices.
    pub fn euler_characteristic(&self) -> i64 {
        self.as_graded().euler_characteristic()
    }

    /// Position of a canonical key.
    pub fn position(&self, key: &SimplexKey) -> Option<usize> {
        self.lookup.get(key.chain.len() - 1)?.get(key).copied()
    }

    pub(crate) fn canon(&self) -> Canon<'_> {
        Canon {
            ctx: &self.ctx,
            index: &self.index,
        }
    }

    /// The chain complex of simplicial chains.
    pub fn as_graded(&self) -> GradedComplex {
        GradedComplex::chains(self.counts(), self.boundaries.clone())
    }

    /// `∂_{k−1} ∂_k = 0` exactly in every degree.
    pub fn check(&self) -> Result<()> {
        self.as_graded().check()
    }

    pub fn homology(&self, coeff: Coefficients) -> Result<HomologyResult> {
        self.as_graded().groups(coeff)
    }

    pub fn cohomology(&self, coeff: Coefficients) -> Result<HomologyResult> {
        self.as_graded().dual().groups(coeff)
    }

    /// The 0-simplices (barycenters) of simplex `i` of dimension `k`.
    pub fn vertices(&self, k: usize, i: usize) -> Vec<usize> {
        let canon = self.canon();
        let key = &self.keys[k][i];
        (0..=k)
            .map(|j| {
                let (c, d) = canon.member(key, j);
                self.lookup[0][&canon.key(c, d, &[0])]
            })
            .collect()
    }

    /// No simplex has two vertices identified in the quotient.
    pub fn is_regular(&self) -> bool {
        (1..self.simplices.len()).all(|k| {
            (0..self.simplices[k].len()).all(|i| {
                let v = self.vertices(k, i);
                v.iter().collect::<BTreeSet<_>>().len() == v.len()
            })
        })
    }
}

/// The Δ-complex model of `W/Γ` (no flag) or `W_F/(Γ∩P)` (with `F`).
///
/// With a flag different from the complex's own constraint, the flag
/// subcomplex is built first.
pub fn barycentric_quotient(
    complex: &OrbitComplex,
    constraint: Option<&RationalFlag>,
) -> Result<QuotientComplex> {
    if let Some(f) = constraint.filter(|&f| Some(f) != complex.constraint.as_ref()) {
        return from_orbits(&subcomplex_WF(complex, f)?);
    }
    from_orbits(complex)
}

fn from_orbits(complex: &OrbitComplex) -> Result<QuotientComplex> {
    let ctx = complex.ctx.clone();
    let index = complex.index.clone();
    let canon = Canon {
        ctx: &ctx,
        index: &index,
    };
    let top = ctx.atlas.dim();
    let mut sets: Vec<BTreeSet<SimplexKey>> = vec![BTreeSet::new(); top + 1];
    for (c, cls) in ctx.atlas.classes.iter().enumerate() {
        for &root in &index.roots[c] {
            for chain in &cls.chains {
                sets[chain.len() - 1].insert(canon.key(c, root, chain));
            }
        }
    }
    let keys: Vec<Vec<SimplexKey>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
    let lookup: Vec<HashMap<SimplexKey, usize>> = keys
        .iter()
        .map(|ks| ks.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect())
        .collect();
    let mut boundaries = vec![SparseMatrix::zeros(0, keys[0].len())];
    for k in 1..=top {
        let mut cols = Vec::with_capacity(keys[k].len());
        for key in &keys[k] {
            let mut col = Vec::with_capacity(k + 1);
            for i in 0..=k {
                let face = canon.face(key, i);
                let row = *lookup[k - 1].get(&face).ok_or_else(|| {
                    crate::error::Error::Invariant(format!(
                        "face {i} of a {k}-simplex is not a listed simplex"
                    ))
                })?;
                col.push((row, if i % 2 == 0 { 1 } else { -1 }));
            }
            cols.push(col);
        }
        boundaries.push(SparseMatrix::from_columns(keys[k - 1].len(), cols));
    }
    let simplices = keys
        .iter()
        .map(|ks| {
            ks.iter()
                .map(|key| SimplexLabel {
                    cells: (0..key.chain.len())
                        .map(|j| {
                            let (c, d) = canon.member(key, j);
                            index.cell_id(c, d)
                        })
                        .collect(),
                })
                .collect()
        })
        .collect();
    let q = QuotientComplex {
        group: complex.group,
        constraint: complex.constraint.clone(),
        simplices,
        boundaries,
        keys,
        lookup,
        ctx: ctx.clone(),
        index: index.clone(),
    };
    q.check()?;
    ensure!(
        q.counts()
            .iter()
            .zip(complex.counts())
            .all(|(s, c)| *s >= c),
        "fewer simplices than cells"
    );
    Ok(q)
}
