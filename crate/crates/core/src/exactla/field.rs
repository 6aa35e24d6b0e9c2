//! Sparse linear algebra over a field (Q or F_p) and sparse integer matrices.
//!
//! The workhorse is [`Echelon`], an incrementally built semi-echelon basis
//! that can also track how each basis row was assembled from tagged input
//! vectors. That one structure gives ranks, kernels, membership tests and
//! coordinates modulo a subspace, which is everything (co)homology and
//! spectral-sequence pages need.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;

/// A field whose elements are manipulated through a context value.
pub trait Field: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, x: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn describe(&self) -> String;
}

/// The rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_i64(&self, x: i64) -> Rational {
        Rational::from_integer(BigInt::from(x))
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Rational {
        a.recip()
    }
    fn describe(&self) -> String {
        "Q".into()
    }
}

/// The prime field F_p, `p < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Returns `None` unless `p` is a prime below 2^32.
    pub fn new(p: u64) -> Option<Self> {
        let prime = (2..1 << 32).contains(&p) && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0);
        prime.then_some(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in F_p");
        // Fermat: a^(p−2).
        let (mut base, mut e, mut acc) = (*a, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
    fn describe(&self) -> String {
        format!("F_{}", self.p)
    }
}

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec<E> = Vec<(usize, E)>;

/// `x + c·y` for sparse vectors.
pub fn axpy<F: Field>(
    f: &F,
    x: &SparseVec<F::Elem>,
    c: &F::Elem,
    y: &SparseVec<F::Elem>,
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let xi = x.get(i).map(|e| e.0);
        let yj = y.get(j).map(|e| e.0);
        match (xi, yj) {
            (Some(a), Some(b)) if a == b => {
                let v = f.add(&x[i].1, &f.mul(c, &y[j].1));
                if !f.is_zero(&v) {
                    out.push((a, v));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                out.push(x[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(x[i].clone());
                i += 1;
            }
            (_, Some(b)) => {
                let v = f.mul(c, &y[j].1);
                if !f.is_zero(&v) {
                    out.push((b, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

pub fn scale_vec<F: Field>(f: &F, c: &F::Elem, x: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    if f.is_zero(c) {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, f.mul(c, v))).collect()
}

/// Dense → sparse.
pub fn sparsify<F: Field>(f: &F, dense: &[F::Elem]) -> SparseVec<F::Elem> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, v)| !f.is_zero(v))
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

/// Sparse → dense of the given length.
pub fn densify<F: Field>(f: &F, x: &SparseVec<F::Elem>, len: usize) -> Vec<F::Elem> {
    let mut d = vec![f.zero(); len];
    for (i, v) in x {
        d[*i] = v.clone();
    }
    d
}

#[derive(Clone, Debug)]
struct EchelonRow<E> {
    /// Leading entry normalized to 1 at the pivot index.
    vec: SparseVec<E>,
    /// Combination of tagged inputs that produced this row.
    tags: SparseVec<E>,
}

/// Incrementally built semi-echelon basis of a subspace.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    rows: BTreeMap<usize, EchelonRow<F::Elem>>,
}

/// Result of reducing a vector against an [`Echelon`].
pub struct Reduction<E> {
    /// Remainder; zero iff the vector lies in the span.
    pub residual: SparseVec<E>,
    /// Tag combination `c` with `v − residual ≡ Σ c_t · input_t` modulo the
    /// untagged part of the span.
    pub tags: SparseVec<E>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F) -> Self {
        Echelon {
            field,
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Eliminates every pivot position of `v`.
    pub fn reduce(&self, v: &SparseVec<F::Elem>) -> Reduction<F::Elem> {
        let f = &self.field;
        let mut res = v.clone();
        let mut tags: SparseVec<F::Elem> = Vec::new();
        let mut cursor = 0;
        loop {
            let hit = res
                .iter()
                .skip_while(|(i, _)| *i < cursor)
                .find(|(i, _)| self.rows.contains_key(i))
                .map(|(i, a)| (*i, a.clone()));
            let Some((i, a)) = hit else { break };
            let row = &self.rows[&i];
            let neg = f.neg(&a);
            res = axpy(f, &res, &neg, &row.vec);
            if !row.tags.is_empty() {
                tags = axpy(f, &tags, &a, &row.tags);
            }
            cursor = i + 1;
        }
        Reduction {
            residual: res,
            tags,
        }
    }

    pub fn contains(&self, v: &SparseVec<F::Elem>) -> bool {
        self.reduce(v).residual.is_empty()
    }

    /// Adds `v` (optionally tagged) to the span. Returns true iff it was
    /// independent of the current span.
    pub fn insert(&mut self, v: &SparseVec<F::Elem>, tag: Option<usize>) -> bool {
        let own: SparseVec<F::Elem> = tag.map(|t| vec![(t, self.field.one())]).unwrap_or_default();
        self.insert_with_tags(v, own)
    }

    /// Adds `v` whose tag combination is `own`.
    pub fn insert_with_tags(&mut self, v: &SparseVec<F::Elem>, own: SparseVec<F::Elem>) -> bool {
        let f = self.field.clone();
        let red = self.reduce(v);
        if red.residual.is_empty() {
            return false;
        }
        let lead = red.residual[0].1.clone();
        let inv = f.inv(&lead);
        let minus_one = f.neg(&f.one());
        let tags = axpy(&f, &own, &minus_one, &red.tags);
        let row = EchelonRow {
            vec: scale_vec(&f, &inv, &red.residual),
            tags: scale_vec(&f, &inv, &tags),
        };
        self.rows.insert(red.residual[0].0, row);
        true
    }

    /// Coordinates of `v` over the tagged inputs, modulo the untagged span.
    /// `None` if `v` is outside the span.
    pub fn express(&self, v: &SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        let red = self.reduce(v);
        red.residual.is_empty().then_some(red.tags)
    }
}

/// Rank of the span of the given vectors.
pub fn rank_of<F: Field>(f: &F, vecs: &[SparseVec<F::Elem>]) -> usize {
    let mut e = Echelon::new(f.clone());
    vecs.iter().filter(|v| e.insert(v, None)).count()
}

/// Basis of the kernel of the linear map sending basis vector `j` to
/// `images[j]`, in domain coordinates.
pub fn kernel_basis<F: Field>(f: &F, images: &[SparseVec<F::Elem>]) -> Vec<SparseVec<F::Elem>> {
    let mut e = Echelon::new(f.clone());
    let mut out = Vec::new();
    for (j, img) in images.iter().enumerate() {
        let red = e.reduce(img);
        if red.residual.is_empty() {
            // img = Σ c_t img_t  ⇒  e_j − Σ c_t e_t ∈ ker.
            let minus_one = f.neg(&f.one());
            let k = axpy(f, &vec![(j, f.one())], &minus_one, &red.tags);
            out.push(k);
        } else {
            e.insert(img, Some(j));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sparse integer matrices
// ---------------------------------------------------------------------------

/// Sparse integer matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `columns[j]` lists `(row, value)` with increasing rows, no zeros.
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Builds from unsorted column entries, summing duplicates.
    pub fn from_columns(rows: usize, raw: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = raw.len();
        let columns = raw
            .into_iter()
            .map(|c| {
                let mut m: BTreeMap<usize, i64> = BTreeMap::new();
                for (i, x) in c {
                    assert!(i < rows, "row index out of range");
                    *m.entry(i).or_insert(0) += x;
                }
                m.into_iter().filter(|(_, x)| *x != 0).collect()
            })
            .collect();
        SparseMatrix {
            rows,
            cols,
            columns,
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| vec![(i, 1)]).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut raw = vec![Vec::new(); self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, x) in c {
                raw[i].push((j, x));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: raw,
        }
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "composition dimension mismatch");
        let raw = rhs
            .columns
            .iter()
            .map(|c| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for &(k, y) in c {
                    for &(i, x) in &self.columns[k] {
                        *acc.entry(i).or_insert(0) += x * y;
                    }
                }
                acc.into_iter().filter(|(_, v)| *v != 0).collect()
            })
            .collect();
        SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            columns: raw,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Columns as field vectors.
    pub fn field_columns<F: Field>(&self, f: &F) -> Vec<SparseVec<F::Elem>> {
        self.columns
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&(i, x)| (i, f.from_i64(x)))
                    .filter(|(_, v)| !f.is_zero(v))
                    .collect()
            })
            .collect()
    }

    /// Image of a field vector (domain coordinates) under the matrix.
    pub fn apply<F: Field>(&self, f: &F, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
        for (j, a) in v {
            for &(i, x) in &self.columns[*j] {
                let e = acc.entry(i).or_insert_with(|| f.zero());
                *e = f.add(e, &f.mul(a, &f.from_i64(x)));
            }
        }
        acc.into_iter().filter(|(_, v)| !f.is_zero(v)).collect()
    }

    pub fn rank<F: Field>(&self, f: &F) -> usize {
        rank_of(f, &self.field_columns(f))
    }

    /// Dense row-major copy (for reports on small matrices).
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, x) in c {
                d[i][j] = x;
            }
        }
        d
    }
}
