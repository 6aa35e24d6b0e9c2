//! Exact LDLᵀ factorization, the positive-definiteness test used everywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::RatMatrix;
use super::rational::Rational;
use crate::error::{Error, Result};

/// `A = L · diag(pivots) · Lᵀ` with `L` unit lower-triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ldlt {
    pub l: RatMatrix,
    pub pivots: Vec<Rational>,
}

impl Ldlt {
    /// Rebuilds `L D Lᵀ`.
    pub fn reconstruct(&self) -> RatMatrix {
        let d = RatMatrix::diagonal(&self.pivots);
        &(&self.l * &d) * &self.l.transpose()
    }
}

/// Factors a symmetric matrix, failing at the first nonpositive pivot.
///
/// The error index is 1-based, so `[[1,2],[2,1]]` reports pivot 2.
pub fn ldlt(a: &RatMatrix) -> Result<Ldlt> {
    match ldlt_or_witness(a) {
        Ok(f) => Ok(f),
        Err((k, _)) => Err(Error::NotPositiveDefinite(k + 1)),
    }
}

/// Like [`ldlt`] but on failure returns the 0-based pivot index together with
/// a primitive integer vector `w` with `wᵀ A w <= 0`.
pub fn ldlt_or_witness(a: &RatMatrix) -> std::result::Result<Ldlt, (usize, Vec<BigInt>)> {
    assert!(a.is_symmetric(), "ldlt requires a symmetric matrix");
    let n = a.rows();
    let mut l = RatMatrix::identity(n);
    let mut d: Vec<Rational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = a[(j, j)].clone();
        for k in 0..j {
            dj -= &l[(j, k)] * &l[(j, k)] * &d[k];
        }
        if !dj.is_positive() {
            return Err((j, failure_vector(&l, j)));
        }
        for i in j + 1..n {
            let mut s = a[(i, j)].clone();
            for k in 0..j {
                s -= &l[(i, k)] * &l[(j, k)] * &d[k];
            }
            l[(i, j)] = s / &dj;
        }
        d.push(dj);
    }
    Ok(Ldlt { l, pivots: d })
}

/// For a failing pivot `j`, `x = L_j^{-T} e_j` (zero beyond `j`) has
/// `xᵀ A x = d_j <= 0`. Returned scaled to a primitive integer vector.
fn failure_vector(l: &RatMatrix, j: usize) -> Vec<BigInt> {
    let n = l.rows();
    // Solve L_jᵀ x = e_j by back substitution on the leading (j+1) block.
    let mut x = vec![Rational::zero(); n];
    x[j] = Rational::one();
    for i in (0..j).rev() {
        let mut s = Rational::zero();
        for k in i + 1..=j {
            s += &l[(k, i)] * &x[k];
        }
        x[i] = -s;
    }
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x
        .iter()
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    ints.into_iter().map(|v| v / &g).collect()
}

/// True iff the symmetric matrix is positive definite.
pub fn is_positive_definite(a: &RatMatrix) -> bool {
    a.is_symmetric() && ldlt_or_witness(a).is_ok()
}
