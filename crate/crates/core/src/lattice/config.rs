//! Vector configurations: sets of primitive integer vectors up to sign.

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::{int, IntMatrix, RatMatrix, Rational};

/// Primitive integer vectors, one per `±` pair, each with its first nonzero
/// entry positive, sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorConfig {
    n: usize,
    vectors: Vec<Vec<i64>>,
}

/// Flips the sign so that the first nonzero entry is positive.
pub fn sign_canonical(v: &[i64]) -> Vec<i64> {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => v.iter().map(|y| -y).collect(),
        _ => v.to_vec(),
    }
}

pub fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// Number of coordinates of a symmetric `n × n` matrix.
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Coefficients of the linear functional `A ↦ vᵀ A v` on the upper-triangle
/// coordinates `(i <= j)` of a symmetric matrix, in row-major order.
pub fn value_functional(v: &[i64]) -> Vec<Rational> {
    let n = v.len();
    let mut out = Vec::with_capacity(sym_dim(n));
    for i in 0..n {
        for j in i..n {
            let c = if i == j { v[i] * v[i] } else { 2 * v[i] * v[j] };
            out.push(int(c));
        }
    }
    out
}

/// Symmetric matrix from upper-triangle coordinates.
pub fn sym_from_coords(n: usize, x: &[Rational]) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = x[k].clone();
            m[(j, i)] = x[k].clone();
            k += 1;
        }
    }
    m
}

/// Upper-triangle coordinates of a symmetric matrix.
pub fn sym_coords(a: &RatMatrix) -> Vec<Rational> {
    let n = a.rows();
    let mut out = Vec::with_capacity(sym_dim(n));
    for i in 0..n {
        for j in i..n {
            out.push(a[(i, j)].clone());
        }
    }
    out
}

impl VectorConfig {
    /// Canonicalizes signs, sorts and deduplicates; rejects non-primitive
    /// or wrongly sized vectors.
    pub fn new(n: usize, vectors: Vec<Vec<i64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "vector {v:?} is not in Z^{n}"
                )));
            }
            if !is_primitive(&v) {
                return Err(Error::Parse(format!("vector {v:?} is not primitive")));
            }
            out.push(sign_canonical(&v));
        }
        out.sort();
        out.dedup();
        Ok(VectorConfig { n, vectors: out })
    }

    /// Builds from vectors already known to be primitive.
    pub(crate) fn from_primitive(n: usize, vectors: Vec<Vec<i64>>) -> Self {
        VectorConfig::new(n, vectors).expect("primitive vectors")
    }

    /// Convenience constructor from literal rows; panics on invalid input.
    pub fn of(vectors: &[&[i64]]) -> Self {
        let n = vectors.first().map_or(0, |v| v.len());
        VectorConfig::new(n, vectors.iter().map(|v| v.to_vec()).collect())
            .expect("valid configuration")
    }

    /// Columns of an integer matrix as a configuration.
    pub fn from_columns(m: &IntMatrix) -> Result<Self> {
        VectorConfig::new(m.rows(), m.to_columns())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.vectors.binary_search(&sign_canonical(v)).is_ok()
    }

    /// Rank over Q of the vectors.
    pub fn rank(&self) -> usize {
        if self.vectors.is_empty() {
            return 0;
        }
        let m = RatMatrix::from_rows(
            self.vectors
                .iter()
                .map(|v| v.iter().map(|&x| int(x)).collect())
                .collect(),
        );
        m.rank()
    }

    pub fn spans(&self) -> bool {
        self.rank() == self.n
    }

    /// Rank of `{v vᵀ : v ∈ S}` in the space of symmetric matrices.
    pub fn outer_rank(&self) -> usize {
        if self.vectors.is_empty() {
            return 0;
        }
        RatMatrix::from_rows(self.vectors.iter().map(|v| value_functional(v)).collect()).rank()
    }

    /// Dimension of the cell of the well-rounded retract with these minimal
    /// vectors: `n(n+1)/2 − rank{v vᵀ}`.
    pub fn cell_dim(&self) -> usize {
        sym_dim(self.n) - self.outer_rank()
    }

    /// `U · S` (sign-canonicalized).
    pub fn transform(&self, u: &IntMatrix) -> VectorConfig {
        let vs = self.vectors.iter().map(|v| u.mul_vec(v)).collect();
        VectorConfig::from_primitive(self.n, vs)
    }

    /// `Σ v vᵀ`, the characteristic form of the configuration.
    pub fn characteristic_form(&self) -> RatMatrix {
        let n = self.n;
        let mut q = RatMatrix::zeros(n, n);
        for v in &self.vectors {
            for i in 0..n {
                for j in 0..n {
                    q[(i, j)] += int(v[i] * v[j]);
                }
            }
        }
        q
    }

    /// Vectors lying in the column span of `basis` (a rational subspace).
    pub fn in_subspace(&self, basis: &IntMatrix) -> Vec<Vec<i64>> {
        let b = basis.to_rat();
        let r = b.rank();
        self.vectors
            .iter()
            .filter(|v| {
                let col = RatMatrix::from_columns(self.n, &[v.iter().map(|&x| int(x)).collect()]);
                b.hstack(&col).rank() == r
            })
            .cloned()
            .collect()
    }

    /// Subconfiguration selected by a bitmask over the sorted vectors.
    pub fn subset(&self, mask: u64) -> VectorConfig {
        let vs = self
            .vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v.clone())
            .collect();
        VectorConfig {
            n: self.n,
            vectors: vs,
        }
    }

    /// Union of two configurations.
    pub fn union(&self, other: &VectorConfig) -> VectorConfig {
        let mut vs = self.vectors.clone();
        vs.extend(other.vectors.iter().cloned());
        VectorConfig::from_primitive(self.n, vs)
    }

    pub fn is_subset_of(&self, other: &VectorConfig) -> bool {
        self.vectors.iter().all(|v| other.contains(v))
    }

    /// Bitmask of `self` inside the sorted vectors of `sup`.
    pub fn mask_in(&self, sup: &VectorConfig) -> Option<u64> {
        let mut m = 0u64;
        for v in &self.vectors {
            let i = sup.vectors.binary_search(v).ok()?;
            m |= 1 << i;
        }
        Some(m)
    }
}

impl Serialize for VectorConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vectors.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VectorConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let vs = Vec::<Vec<i64>>::deserialize(d)?;
        let n = vs.first().map_or(0, Vec::len);
        VectorConfig::new(n, vs).map_err(serde::de::Error::custom)
    }
}
