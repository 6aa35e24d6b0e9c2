//! Chain maps between Δ-complex models induced by the inclusions
//! `W_{F′} ⊆ W_F ⊆ W`.
//!
//! A simplex of `W_{F′}/(Γ∩P′)` carries the decoration `(ω, F‴)` with
//! `g F‴ = F′` for a realizing `g`. Its image in `W_F/(Γ∩P)` for a subflag
//! type `F ⊆ F′` is obtained by keeping the members of `F‴` whose
//! dimensions occur in `F`; its image in `W/Γ` forgets `F‴`. When the
//! subflag of `F′` is only `Γ`-equivalent to `F` (via `γ`), the realizing
//! element `γg` has the same coset `ω`, so the translation by `γ` leaves the
//! decoration unchanged and needs no bookkeeping.

use serde::Serialize;

use crate::cells::Decoration;
use crate::error::{Error, Result};
use crate::exactla::SparseMatrix;
use crate::flags::RationalFlag;

use super::complex::QuotientComplex;
use super::homology::{induced_matrix, induced_rank, with_field, Coefficients};

/// Degree-wise matrices `C_k(source) → C_k(target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainMap {
    pub matrices: Vec<SparseMatrix>,
}

/// Induced maps of one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedMap {
    pub degree: usize,
    /// Rows: target classes; columns: source classes (field bases of the
    /// representatives reported by homology/cohomology).
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
}

fn incompatible(msg: impl Into<String>) -> Error {
    Error::IncompatibleComplexes(msg.into())
}

/// The chain map of the inclusion `sub → sup` of flag subcomplexes (or of
/// `W_F` into `W`). Both complexes must come from the same enumeration.
pub fn induced_map(sub: &QuotientComplex, sup: &QuotientComplex) -> Result<ChainMap> {
    if sub.group != sup.group
        || sub.ctx.seed != sup.ctx.seed
        || sub.counts().len() != sup.counts().len()
    {
        return Err(incompatible("complexes come from different enumerations"));
    }
    let keep_dims: Option<Vec<usize>> = sup.constraint.as_ref().map(RationalFlag::dims);
    if let (Some(k), src) = (&keep_dims, &sub.constraint) {
        let src = src
            .as_ref()
            .ok_or_else(|| incompatible("cannot map W into a flag subcomplex"))?;
        if !k.iter().all(|d| src.dims().contains(d)) {
            return Err(incompatible(
                "target flag type is not a subtype of the source flag type",
            ));
        }
    }
    let n = sub.group.n;
    let canon = sup.canon();
    let mut matrices = Vec::with_capacity(sub.keys.len());
    for (k, keys) in sub.keys.iter().enumerate() {
        let mut cols = Vec::with_capacity(keys.len());
        for key in keys {
            let cls = &sub.ctx.atlas.classes[key.class];
            let flag = match (&keep_dims, key.decoration.flag) {
                (None, _) => None,
                (Some(dims), Some(f)) => {
                    let src = &cls.flags[f];
                    let members = src
                        .members()
                        .iter()
                        .filter(|m| dims.contains(&m.cols()))
                        .cloned()
                        .collect::<Vec<_>>();
                    let sub_flag = RationalFlag::new(n, members)?;
                    Some(
                        *cls.flag_index
                            .get(&sub_flag)
                            .ok_or_else(|| incompatible("subflag is not respected"))?,
                    )
                }
                (Some(_), None) => {
                    return Err(incompatible("source simplex has no flag decoration"))
                }
            };
            let dec = Decoration {
                omega: key.decoration.omega,
                flag,
            };
            if !sup.index.orbit_maps[key.class].contains_key(&dec) {
                return Err(incompatible(
                    "a source simplex does not lie over the target flag class",
                ));
            }
            let image = canon.key(key.class, dec, &key.chain);
            let row = sup
                .position(&image)
                .ok_or_else(|| incompatible("image simplex missing from target"))?;
            cols.push(vec![(row, 1)]);
        }
        matrices.push(SparseMatrix::from_columns(sup.keys[k].len(), cols));
    }
    let map = ChainMap { matrices };
    map.check(sub, sup)?;
    Ok(map)
}

impl ChainMap {
    /// `∂ f = f ∂` exactly.
    pub fn check(&self, src: &QuotientComplex, tgt: &QuotientComplex) -> Result<()> {
        for k in 1..self.matrices.len() {
            let left = tgt.boundaries[k].compose(&self.matrices[k]);
            let right = self.matrices[k - 1].compose(&src.boundaries[k]);
            if left != right {
                return Err(Error::Invariant(format!(
                    "chain map does not commute with boundaries in degree {k}"
                )));
            }
        }
        Ok(())
    }

    /// The transposed (cochain) map `C^k(target) → C^k(source)`.
    pub fn dual(&self) -> ChainMap {
        ChainMap {
            matrices: self.matrices.iter().map(SparseMatrix::transpose).collect(),
        }
    }

    /// Rank of `H_k(source) → H_k(target)` over a field (Z via Q).
    pub fn homology_rank(
        &self,
        src: &QuotientComplex,
        tgt: &QuotientComplex,
        k: usize,
        coeff: Coefficients,
    ) -> Result<usize> {
        let (s, t) = (src.as_graded(), tgt.as_graded());
        let zero = SparseMatrix::zeros(t.sizes[k], 0);
        let inc = t.incoming(k).unwrap_or(&zero);
        with_field!(coeff, |f| Ok(induced_rank(
            &f,
            &self.matrices[k],
            &s.out[k],
            inc
        )))
    }

    /// Rank of `H^k(target) → H^k(source)` over a field (Z via Q).
    pub fn cohomology_rank(
        &self,
        src: &QuotientComplex,
        tgt: &QuotientComplex,
        k: usize,
        coeff: Coefficients,
    ) -> Result<usize> {
        let (s, t) = (src.as_graded().dual(), tgt.as_graded().dual());
        let zero = SparseMatrix::zeros(s.sizes[k], 0);
        let inc = s.incoming(k).unwrap_or(&zero);
        with_field!(coeff, |f| Ok(induced_rank(
            &f,
            &self.matrices[k].transpose(),
            &t.out[k],
            inc
        )))
    }

    /// Matrices and ranks of the induced maps on homology, every degree.
    pub fn on_homology(
        &self,
        src: &QuotientComplex,
        tgt: &QuotientComplex,
        coeff: Coefficients,
    ) -> Result<Vec<InducedMap>> {
        let (s, t) = (src.as_graded(), tgt.as_graded());
        (0..self.matrices.len())
            .map(|k| {
                let zs = SparseMatrix::zeros(s.sizes[k], 0);
                let zt = SparseMatrix::zeros(t.sizes[k], 0);
                let (matrix, rank) = with_field!(coeff, |f| induced_matrix(
                    &f,
                    &self.matrices[k],
                    (&s.out[k], s.incoming(k).unwrap_or(&zs)),
                    (&t.out[k], t.incoming(k).unwrap_or(&zt)),
                )?);
                Ok(InducedMap {
                    degree: k,
                    matrix,
                    rank,
                })
            })
            .collect()
    }

    /// Matrices and ranks of the induced maps on cohomology (target to
    /// source), every degree.
    pub fn on_cohomology(
        &self,
        src: &QuotientComplex,
        tgt: &QuotientComplex,
        coeff: Coefficients,
    ) -> Result<Vec<InducedMap>> {
        let (s, t) = (src.as_graded().dual(), tgt.as_graded().dual());
        (0..self.matrices.len())
            .map(|k| {
                let zs = SparseMatrix::zeros(s.sizes[k], 0);
                let zt = SparseMatrix::zeros(t.sizes[k], 0);
                let (matrix, rank) = with_field!(coeff, |f| induced_matrix(
                    &f,
                    &self.matrices[k].transpose(),
                    (&t.out[k], t.incoming(k).unwrap_or(&zt)),
                    (&s.out[k], s.incoming(k).unwrap_or(&zs)),
                )?);
                Ok(InducedMap {
                    degree: k,
                    matrix,
                    rank,
                })
            })
            .collect()
    }
}
