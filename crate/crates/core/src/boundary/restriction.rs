//! The restriction `ψ : C^*(W/Γ) → 𝒲^{0,*}` into the total complex, its
//! homology dual, and the single-face maps `W_F/(Γ∩P) → W/Γ`.
//!
//! `ψ` pulls a cochain back to every `W_F` with `F` a one-member flag. It is
//! a cochain map into the total complex: the horizontal differential of a
//! pulled-back cochain is an alternating sum of two equal pullbacks for each
//! two-member flag.

use serde::Serialize;

use crate::cells::EnumerationOptions;
use crate::error::{ensure, Result};
use crate::exactla::SparseMatrix;
use crate::flags::RationalFlag;
use crate::lattice::GroupSpec;
use crate::quotient::homology::{induced_rank, with_field, Coefficients};
use crate::quotient::{barycentric_quotient, induced_map, InducedMap};

use super::double::{build_double_complex, coboundary, DoubleComplex};

/// Cohomological restriction data in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionDegree {
    pub degree: usize,
    /// `dim H^q(W/Γ)`.
    #[serde(rename = "dimWhole")]
    pub dim_whole: usize,
    /// `dim H^q` of the total complex (the boundary).
    #[serde(rename = "dimBoundary")]
    pub dim_boundary: usize,
    /// Rank of `ψ*`.
    pub rank: usize,
    /// `dim ker ψ*`: the interior cohomology.
    pub interior: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    pub group: GroupSpec,
    pub coefficients: Coefficients,
    pub degrees: Vec<RestrictionDegree>,
}

/// Homological inclusion data in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionDegree {
    pub degree: usize,
    #[serde(rename = "dimBoundary")]
    pub dim_boundary: usize,
    #[serde(rename = "dimWhole")]
    pub dim_whole: usize,
    /// Rank of `H_q(boundary) → H_q(W/Γ)`.
    #[serde(rename = "imageRank")]
    pub image_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryHomologyReport {
    pub group: GroupSpec,
    pub coefficients: Coefficients,
    pub degrees: Vec<InclusionDegree>,
}

/// Induced maps of one face `W_F/(Γ∩P) → W/Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceMapReport {
    pub group: GroupSpec,
    pub flag: RationalFlag,
    pub coefficients: Coefficients,
    /// `H_q(W_F/(Γ∩P)) → H_q(W/Γ)`.
    pub homology: Vec<InducedMap>,
    /// `H^q(W/Γ) → H^q(W_F/(Γ∩P))`.
    pub cohomology: Vec<InducedMap>,
}

/// `ψ^q : C^q(W/Γ) → Tot^q`, for every `q`.
pub fn psi(dc: &DoubleComplex) -> Result<Vec<SparseMatrix>> {
    let total = dc.total();
    let whole = &dc.whole;
    let mut out = Vec::with_capacity(dc.height);
    for q in 0..dc.height {
        let mut cols: Vec<Vec<(usize, i64)>> = vec![Vec::new(); whole.counts()[q]];
        // Column 0 comes first in every total degree.
        for (j, s) in dc.columns[0].iter().enumerate() {
            let pull = induced_map(&s.complex, whole)?.dual();
            let off = dc.summand_offset(0, j, q);
            for (c, col) in pull.matrices[q].columns.iter().enumerate() {
                cols[c].extend(col.iter().map(|&(r, x)| (off + r, x)));
            }
        }
        out.push(SparseMatrix::from_columns(total.sizes[q], cols));
    }
    // D ψ = ψ δ.
    for q in 0..dc.height {
        let left = total.out[q].compose(&out[q]);
        let delta = coboundary(whole, q);
        let right = match out.get(q + 1) {
            Some(m) => m.compose(&delta),
            None => SparseMatrix::zeros(total.out[q].rows, whole.counts()[q]),
        };
        ensure!(
            left.rows == right.rows && left.columns == right.columns,
            "ψ is not a cochain map in degree {q}"
        );
    }
    Ok(out)
}

/// [`restriction`] for a built double complex.
pub fn restriction_of(dc: &DoubleComplex, coeff: Coefficients) -> Result<RestrictionReport> {
    let total = dc.total();
    let whole = dc.whole.as_graded().dual();
    let psi = psi(dc)?;
    let dims_whole = whole.dims(coeff)?;
    let dims_total = total.dims(coeff)?;
    let mut degrees = Vec::new();
    for q in 0..dc.height {
        let zero = SparseMatrix::zeros(total.sizes[q], 0);
        let inc = total.incoming(q).unwrap_or(&zero);
        let rank = with_field!(coeff, |f| induced_rank(&f, &psi[q], &whole.out[q], inc));
        ensure!(
            rank <= dims_whole[q].min(dims_total[q]),
            "ψ* rank exceeds its domain or target"
        );
        degrees.push(RestrictionDegree {
            degree: q,
            dim_whole: dims_whole[q],
            dim_boundary: dims_total[q],
            rank,
            interior: dims_whole[q] - rank,
        });
    }
    Ok(RestrictionReport {
        group: dc.group,
        coefficients: coeff,
        degrees,
    })
}

/// Ranks of `ψ* : H^q(W/Γ) → H^q(∂)` and the interior cohomology.
pub fn restriction(group: &GroupSpec, coeff: Coefficients) -> Result<RestrictionReport> {
    let dc = build_double_complex(group, EnumerationOptions::default())?;
    restriction_of(&dc, coeff)
}

/// [`boundary_homology`] for a built double complex.
pub fn boundary_homology_of(
    dc: &DoubleComplex,
    coeff: Coefficients,
) -> Result<BoundaryHomologyReport> {
    let chains = dc.total().dual();
    let whole = dc.whole.as_graded();
    let psi = psi(dc)?;
    let dims_whole = whole.dims(coeff)?;
    let dims_total = chains.dims(coeff)?;
    let mut degrees = Vec::new();
    for q in 0..dc.height {
        let zero = SparseMatrix::zeros(whole.sizes[q], 0);
        let inc = whole.incoming(q).unwrap_or(&zero);
        let image_rank = with_field!(coeff, |f| induced_rank(
            &f,
            &psi[q].transpose(),
            &chains.out[q],
            inc
        ));
        degrees.push(InclusionDegree {
            degree: q,
            dim_boundary: dims_total[q],
            dim_whole: dims_whole[q],
            image_rank,
        });
    }
    Ok(BoundaryHomologyReport {
        group: dc.group,
        coefficients: coeff,
        degrees,
    })
}

/// Homology of the boundary and the rank of its inclusion into `W/Γ`.
pub fn boundary_homology(group: &GroupSpec, coeff: Coefficients) -> Result<BoundaryHomologyReport> {
    let dc = build_double_complex(group, EnumerationOptions::default())?;
    boundary_homology_of(&dc, coeff)
}

/// Induced maps of the inclusion of one face.
pub fn face_map(f: &RationalFlag, group: &GroupSpec, coeff: Coefficients) -> Result<FaceMapReport> {
    let w = crate::cells::enumerate_W(group)?;
    let whole = barycentric_quotient(&w, None)?;
    let face = barycentric_quotient(&w, Some(f))?;
    let map = induced_map(&face, &whole)?;
    Ok(FaceMapReport {
        group: *group,
        flag: f.clone(),
        coefficients: coeff,
        homology: map.on_homology(&face, &whole, coeff)?,
        cohomology: map.on_cohomology(&face, &whole, coeff)?,
    })
}
