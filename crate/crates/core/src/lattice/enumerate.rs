//! Exact Fincke–Pohst enumeration of short lattice vectors.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::config::{is_primitive, sign_canonical, VectorConfig};
use super::form::GramForm;
use crate::error::{Error, Result};
use crate::exactla::rational::{ceil, floor, isqrt_floor};
use crate::exactla::{ldlt, RatMatrix, Rational};

/// Arithmetic minimum (squared) and the minimal vectors of a form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimaResult {
    #[serde(rename = "minSq", with = "crate::exactla::rational::serde_rational")]
    pub min_sq: Rational,
    pub vectors: VectorConfig,
}

/// All nonzero integer vectors `v` with `vᵀ A v <= bound`, one per `±` pair
/// (first nonzero entry positive), each with its value. Includes
/// non-primitive vectors.
pub fn enumerate_below(a: &RatMatrix, bound: &Rational) -> Result<Vec<(Vec<i64>, Rational)>> {
    let n = a.rows();
    let f = ldlt(a)?;
    let mut out = Vec::new();
    if !bound.is_positive() {
        return Ok(out);
    }
    let mut x = vec![0i64; n];
    search(&f.l, &f.pivots, bound, n, &mut x, bound.clone(), &mut out);
    out.retain(|(v, _)| sign_canonical(v) == *v && v.iter().any(|&c| c != 0));
    Ok(out)
}

/// Depth-first search over coordinates `n−1, …, 0`; `remaining` is the
/// unused part of the bound after fixing coordinates `> i`.
fn search(
    l: &RatMatrix,
    d: &[Rational],
    bound: &Rational,
    i: usize,
    x: &mut Vec<i64>,
    remaining: Rational,
    out: &mut Vec<(Vec<i64>, Rational)>,
) {
    if i == 0 {
        out.push((x.clone(), bound - &remaining));
        return;
    }
    let i = i - 1;
    // Center c = −Σ_{j>i} L_{ji} x_j;  need d_i (x_i − c)^2 <= remaining.
    let mut c = Rational::zero();
    for j in i + 1..x.len() {
        if x[j] != 0 {
            c -= &l[(j, i)] * Rational::from_integer(BigInt::from(x[j]));
        }
    }
    let t = &remaining / &d[i];
    let r: num_bigint::BigInt = isqrt_floor(&t) + 1;
    let lo = ceil(&(&c - Rational::from_integer(r.clone())));
    let hi = floor(&(&c + Rational::from_integer(r)));
    let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
        panic!("enumeration range exceeds i64");
    };
    for k in lo..=hi {
        let diff = Rational::from_integer(BigInt::from(k)) - &c;
        let used = &d[i] * &diff * &diff;
        if used <= remaining {
            x[i] = k;
            search(l, d, bound, i, x, &remaining - &used, out);
        }
    }
    x[i] = 0;
}

/// Every `±` class of nonzero vectors with value `<= bound`, including
/// non-primitive ones (raw mode).
pub fn vectors_below_raw(a: &GramForm, bound: &Rational) -> Result<Vec<Vec<i64>>> {
    Ok(enumerate_below(a.matrix(), bound)?
        .into_iter()
        .map(|(v, _)| v)
        .collect())
}

/// Primitive `±` classes with value `<= bound` (configuration mode).
pub fn vectors_below(a: &GramForm, bound: &Rational) -> Result<VectorConfig> {
    if !bound.is_positive() {
        return Err(Error::NotApplicable(
            "enumeration bound must be positive".into(),
        ));
    }
    let vs = vectors_below_raw(a, bound)?
        .into_iter()
        .filter(|v| is_primitive(v))
        .collect();
    Ok(VectorConfig::from_primitive(a.n(), vs))
}

/// Primitive vectors with value `<= bound` together with their values.
pub fn values_below(a: &GramForm, bound: &Rational) -> Result<Vec<(Vec<i64>, Rational)>> {
    Ok(enumerate_below(a.matrix(), bound)?
        .into_iter()
        .filter(|(v, _)| is_primitive(v))
        .collect())
}

/// The arithmetic minimum and the exact set of minimal vectors.
pub fn minimal_vectors(a: &GramForm) -> Result<MinimaResult> {
    let n = a.n();
    // Some basis vector has value min_i A_ii, so the minimum is at most that.
    let bound = (0..n)
        .map(|i| a.matrix()[(i, i)].clone())
        .min()
        .expect("n >= 1");
    let all = enumerate_below(a.matrix(), &bound)?;
    let min_sq = all
        .iter()
        .map(|(_, v)| v.clone())
        .min()
        .expect("basis vectors are within bound");
    let vectors = all
        .into_iter()
        .filter(|(_, v)| *v == min_sq)
        .map(|(v, _)| v)
        .collect();
    Ok(MinimaResult {
        min_sq,
        vectors: VectorConfig::from_primitive(n, vectors),
    })
}

/// True iff the minimal vectors span Q^n.
pub fn is_well_rounded(a: &GramForm) -> Result<bool> {
    Ok(minimal_vectors(a)?.vectors.spans())
}

/// Rescales so that the arithmetic minimum is 1.
pub fn normalize(a: &GramForm) -> Result<GramForm> {
    let m = minimal_vectors(a)?.min_sq;
    Ok(a.scaled(&m.recip()))
}

/// Shortest nonzero value of the form (arithmetic minimum, squared).
pub fn min_sq(a: &GramForm) -> Result<Rational> {
    Ok(minimal_vectors(a)?.min_sq)
}
