//! Dense matrices over exact rings: rationals, machine integers, big integers.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, int, Rational, RawRational};
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Matrix of exact rationals.
pub type RatMatrix = Matrix<Rational>;
/// Matrix of machine integers (unimodular transforms, configurations).
pub type IntMatrix = Matrix<i64>;
/// Matrix of big integers (Smith/Hermite normal form work).
pub type BigMatrix = Matrix<BigInt>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == rows), "ragged columns");
        Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Submatrix of the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc = acc + a * b;
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x * c)
    }
}

impl<'a, T> Mul<&'a Matrix<T>> for &'a Matrix<T>
where
    T: Clone + Zero,
    for<'b> &'b T: Mul<&'b T, Output = T>,
{
    type Output = Matrix<T>;
    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * &rhs[(k, j)];
                    let slot: &mut T = &mut out[(i, j)];
                    *slot = slot.clone() + prod;
                }
            }
        }
        out
    }
}

impl<'a, T> Add<&'a Matrix<T>> for &'a Matrix<T>
where
    T: Clone,
    for<'b> &'b T: Add<&'b T, Output = T>,
{
    type Output = Matrix<T>;
    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a, T> Sub<&'a Matrix<T>> for &'a Matrix<T>
where
    T: Clone,
    for<'b> &'b T: Sub<&'b T, Output = T>,
{
    type Output = Matrix<T>;
    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<T: Clone + Neg<Output = T>> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Rational matrices
// ---------------------------------------------------------------------------

impl RatMatrix {
    pub fn from_int(m: &IntMatrix) -> Self {
        m.map(|&x| int(x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Quadratic form value `vᵀ A v` on an integer vector.
    pub fn quad_int(&self, v: &[i64]) -> Rational {
        let n = self.rows;
        let mut acc = Rational::zero();
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            let mut row = Rational::zero();
            for j in 0..n {
                if v[j] != 0 {
                    row += &self[(i, j)] * Rational::from_integer(BigInt::from(v[j]));
                }
            }
            acc += row * Rational::from_integer(BigInt::from(v[i]));
        }
        acc
    }

    /// Bilinear form value `vᵀ A w` on rational vectors.
    pub fn bilinear(&self, v: &[Rational], w: &[Rational]) -> Rational {
        let aw = self.mul_vec(w);
        v.iter().zip(&aw).map(|(a, b)| a * b).sum()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let d = &f * &m[(r, j)];
                        m[(i, j)] -= d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            det *= &m[(c, c)];
            let inv = m[(c, c)].recip();
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] * &inv;
                    for j in c..n {
                        let d = &f * &m[(c, j)];
                        m[(i, j)] -= d;
                    }
                }
            }
        }
        det
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = self.hstack(&RatMatrix::identity(n));
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Basis of the right null space `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, piv) = self.rref();
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|c| !piv.contains(c)) {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = -r[(row, f)].clone();
            }
            out.push(v);
        }
        out
    }

    /// Solves `A x = b` for one solution, or `None` if inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let bm = Matrix::from_fn(self.rows, 1, |i, _| b[i].clone());
        let (r, piv) = self.hstack(&bm).rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &pc) in piv.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Integer matrix if every entry is integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in &self.data {
            if !x.is_integer() {
                return None;
            }
            data.push(x.to_integer().to_i64()?);
        }
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

// ---------------------------------------------------------------------------
// Integer matrices
// ---------------------------------------------------------------------------

impl IntMatrix {
    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::from_int(self)
    }

    pub fn to_big(&self) -> BigMatrix {
        self.map(|&x| BigInt::from(x))
    }

    /// Exact determinant.
    pub fn det(&self) -> BigInt {
        self.to_rat().det().to_integer()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        self.to_rat().inverse()?.to_int()
    }

    /// Elementary matrix `I + c·E_ij`.
    pub fn elementary(n: usize, i: usize, j: usize, c: i64) -> Self {
        let mut m = IntMatrix::identity(n);
        m[(i, j)] += c;
        m
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    acc = acc.checked_add(self[(i, k)].checked_mul(rhs[(k, j)])?)?;
                }
                out[(i, j)] = acc;
            }
        }
        Some(out)
    }

    pub fn mul_int_vec(&self, v: &[i64]) -> Vec<i64> {
        self.mul_vec(v)
    }
}

impl BigMatrix {
    pub fn to_i64(&self) -> Option<IntMatrix> {
        let data: Option<Vec<i64>> = self.data.iter().map(ToPrimitive::to_i64).collect();
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: data?,
        })
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }
}

// ---------------------------------------------------------------------------
// JSON: matrices as row-major arrays
// ---------------------------------------------------------------------------

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Vec<RawRational>>::deserialize(d)?;
        let rows: Result<Vec<Vec<Rational>>> = raw
            .into_iter()
            .map(|r| r.into_iter().map(RawRational::into_rational).collect())
            .collect();
        let rows = rows.map_err(serde::de::Error::custom)?;
        check_rect(&rows).map_err(serde::de::Error::custom)?;
        Ok(Matrix::from_rows(rows))
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        check_rect(&rows).map_err(serde::de::Error::custom)?;
        Ok(Matrix::from_rows(rows))
    }
}

fn check_rect<T>(rows: &[Vec<T>]) -> Result<()> {
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rational::rat;

    fn q(rows: &[&[i64]]) -> RatMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn inverse_and_det() {
        let a = q(&[&[2, 1], &[1, 2]]);
        assert_eq!(a.det(), int(3));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, RatMatrix::identity(2));
        assert_eq!(inv[(0, 1)], rat(-1, 3));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nullspace_and_solve() {
        let a = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert_eq!(
            a.solve(&[int(1), int(2)]).unwrap(),
            vec![int(1), int(0), int(0)]
        );
        assert!(a.solve(&[int(1), int(3)]).is_none());
    }

    #[test]
    fn json_round_trip() {
        let a = Matrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), int(1)]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["1","1/2"],["1/2","1"]]"#);
        let b: RatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        let u = IntMatrix::from_rows(vec![vec![0, -1], vec![1, 0]]);
        let t: IntMatrix = serde_json::from_str(&serde_json::to_string(&u).unwrap()).unwrap();
        assert_eq!(u, t);
        assert!(serde_json::from_str::<IntMatrix>("[[1],[1,2]]").is_err());
    }

    #[test]
    fn unimodular_inverse() {
        let u = IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]]);
        assert!(u.is_unimodular());
        let v = u.unimodular_inverse().unwrap();
        assert_eq!(&u * &v, IntMatrix::identity(2));
    }
}
