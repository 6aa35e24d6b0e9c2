//! Gram matrices: points of the symmetric space modulo homothety.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::{int, is_positive_definite, IntMatrix, RatMatrix, Rational};

/// A rational symmetric positive-definite matrix `A`; the squared length of
/// an integer vector `v` is `vᵀ A v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GramForm {
    a: RatMatrix,
}

impl GramForm {
    /// Validates symmetry and positive definiteness.
    pub fn new(a: RatMatrix) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::DimensionMismatch(
                "Gram matrix must be square and nonempty".into(),
            ));
        }
        if !a.is_symmetric() {
            return Err(Error::DimensionMismatch(
                "Gram matrix must be symmetric".into(),
            ));
        }
        crate::exactla::ldlt(&a)?;
        Ok(GramForm { a })
    }

    /// Skips validation; callers guarantee positive definiteness.
    pub(crate) fn new_unchecked(a: RatMatrix) -> Self {
        debug_assert!(is_positive_definite(&a));
        GramForm { a }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        GramForm::new(RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        ))
    }

    pub fn from_rationals(rows: Vec<Vec<Rational>>) -> Result<Self> {
        GramForm::new(RatMatrix::from_rows(rows))
    }

    pub fn identity(n: usize) -> Self {
        GramForm {
            a: RatMatrix::identity(n),
        }
    }

    pub fn diagonal(d: &[Rational]) -> Result<Self> {
        GramForm::new(RatMatrix::diagonal(d))
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.a
    }

    pub fn into_matrix(self) -> RatMatrix {
        self.a
    }

    /// Squared length `vᵀ A v`.
    pub fn value(&self, v: &[i64]) -> Rational {
        self.a.quad_int(v)
    }

    /// `c · A` for a positive rational `c`.
    pub fn scaled(&self, c: &Rational) -> GramForm {
        assert!(c.is_positive(), "homothety factor must be positive");
        GramForm {
            a: self.a.map(|x| x * c),
        }
    }

    /// Change of basis `Uᵀ A U`: the same lattice read in new coordinates.
    /// Minimal vectors transform by `U⁻¹`.
    pub fn pullback(&self, u: &IntMatrix) -> GramForm {
        let ur = u.to_rat();
        GramForm {
            a: &(&ur.transpose() * &self.a) * &ur,
        }
    }

    /// Action of `g ∈ GL_n(Z)` on points: `g·A = g⁻ᵀ A g⁻¹`, whose minimal
    /// vectors are `g · M(A)`.
    pub fn act(&self, g: &IntMatrix) -> GramForm {
        let gi = g
            .unimodular_inverse()
            .expect("acting matrix must be unimodular");
        self.pullback(&gi)
    }

    pub fn is_zero_offdiagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.a[(i, j)].is_zero()))
    }

    pub fn trace(&self) -> Rational {
        (0..self.n()).map(|i| self.a[(i, i)].clone()).sum()
    }

    /// True iff `self` is a positive rational multiple of `other`.
    pub fn homothetic(&self, other: &GramForm) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let c = &self.a[(0, 0)] / &other.a[(0, 0)];
        self.a == other.a.map(|x| x * &c)
    }

    pub fn is_identity(&self) -> bool {
        self.a == RatMatrix::identity(self.n())
    }

    pub fn one_entry(&self) -> bool {
        self.a.entries().iter().all(|x| x.is_one() || x.is_zero())
    }
}

impl std::fmt::Debug for GramForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GramForm{:?}", self.a)
    }
}

#[derive(Serialize, Deserialize)]
struct GramFormJson {
    n: usize,
    rows: RatMatrix,
}

impl Serialize for GramForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GramFormJson {
            n: self.n(),
            rows: self.a.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GramFormJson::deserialize(d)?;
        if j.rows.rows() != j.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but {} rows given",
                j.n,
                j.rows.rows()
            )));
        }
        GramForm::new(j.rows).map_err(serde::de::Error::custom)
    }
}
