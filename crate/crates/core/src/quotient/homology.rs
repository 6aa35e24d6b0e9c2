//! (Co)homology of finite complexes of free modules over Z, Q and F_p.
//!
//! Every group is computed at one degree from the map leaving that degree
//! (`out`) and the map entering it (`inc`): the group is `ker out / im inc`.
//! Over a field that is rank arithmetic plus an echelon basis of the image
//! for representatives; over Z the free rank comes from Q and the torsion
//! from the invariant factors of `inc`.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure, Error, Result};
use crate::exactla::field::{kernel_basis, Field, SparseVec};
use crate::exactla::normal_forms::invariant_factors;
use crate::exactla::{format_rational, Echelon, PrimeField, Rational, Rationals, SparseMatrix};

/// Coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Z,
    Q,
    /// The prime field with this many elements.
    Fp(u64),
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Z => f.write_str("Z"),
            Coefficients::Q => f.write_str("Q"),
            Coefficients::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Coefficients {
    type Err = Error;

    /// Accepts `Z`, `Q`, `Fp:5`, `F5` and `F_5` (case-insensitive prefix).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_uppercase().as_str() {
            "Z" => return Ok(Coefficients::Z),
            "Q" => return Ok(Coefficients::Q),
            _ => {}
        }
        let rest = ["Fp:", "fp:", "FP:", "F_", "f_", "F", "f"]
            .iter()
            .find_map(|p| t.strip_prefix(p));
        let p: u64 = rest.and_then(|r| r.parse().ok()).ok_or_else(|| {
            Error::Parse(format!(
                "unknown coefficients {s:?} (use Z, Q or Fp:<prime>)"
            ))
        })?;
        PrimeField::new(p).ok_or_else(|| Error::Parse(format!("{p} is not a prime below 2^32")))?;
        Ok(Coefficients::Fp(p))
    }
}

impl Serialize for Coefficients {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coefficients {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Fields whose elements can be written into reports.
pub trait ReportField: Field {
    fn show(&self, e: &Self::Elem) -> String;
}

impl ReportField for Rationals {
    fn show(&self, e: &Rational) -> String {
        format_rational(e)
    }
}

impl ReportField for PrimeField {
    fn show(&self, e: &u64) -> String {
        e.to_string()
    }
}

/// Runs `body` with the field for `coeff`; Z is computed over Q.
macro_rules! with_field {
    ($coeff:expr, |$f:ident| $body:expr) => {
        match $coeff {
            $crate::quotient::homology::Coefficients::Fp(p) => {
                let $f = $crate::exactla::PrimeField::new(p).ok_or_else(|| {
                    $crate::error::Error::Parse(format!("{p} is not a prime below 2^32"))
                })?;
                $body
            }
            _ => {
                let $f = $crate::exactla::Rationals;
                $body
            }
        }
    };
}
pub(crate) use with_field;

/// One degree of a (co)homology computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeGroup {
    pub degree: usize,
    /// Betti number (free rank) or dimension over the field.
    pub rank: usize,
    /// Invariant factors `> 1` of the torsion part (Z coefficients only).
    pub torsion: Vec<u64>,
    /// Cycles (cocycles) whose classes form a basis of the field group, or
    /// of the free part over Q for Z; sparse, in simplex coordinates.
    pub representatives: Vec<Vec<(usize, String)>>,
}

/// (Co)homology in every degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub coefficients: Coefficients,
    pub cohomology: bool,
    pub degrees: Vec<DegreeGroup>,
}

impl HomologyResult {
    /// Ranks per degree.
    pub fn ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.rank).collect()
    }

    pub fn rank(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.rank)
    }

    /// Alternating sum of ranks.
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees
            .iter()
            .map(|d| {
                if d.degree % 2 == 0 {
                    d.rank as i64
                } else {
                    -(d.rank as i64)
                }
            })
            .sum()
    }
}

/// A finite graded complex: `sizes[k]` generators in degree `k` and
/// `out[k]` the differential leaving degree `k` (a `? × sizes[k]` matrix).
/// `cohomological` says whether it raises (`true`) or lowers the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    pub sizes: Vec<usize>,
    pub out: Vec<SparseMatrix>,
    pub cohomological: bool,
}

impl GradedComplex {
    /// Chain complex from boundaries `∂_k : C_k → C_{k−1}` (`∂_0` may be
    /// any matrix with `sizes[0]` columns).
    pub fn chains(sizes: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Self {
        GradedComplex {
            sizes,
            out: boundaries,
            cohomological: false,
        }
    }

    /// Cochain complex from coboundaries `δ^k : C^k → C^{k+1}`.
    pub fn cochains(sizes: Vec<usize>, coboundaries: Vec<SparseMatrix>) -> Self {
        GradedComplex {
            sizes,
            out: coboundaries,
            cohomological: true,
        }
    }

    /// The dual complex (transposed differentials).
    pub fn dual(&self) -> Self {
        let k = self.sizes.len();
        let mut out = Vec::with_capacity(k);
        for d in 0..k {
            out.push(match self.incoming(d) {
                Some(m) => m.transpose(),
                None => SparseMatrix::zeros(0, self.sizes[d]),
            });
        }
        GradedComplex {
            sizes: self.sizes.clone(),
            out,
            cohomological: !self.cohomological,
        }
    }

    /// The differential entering degree `d`, if any.
    pub fn incoming(&self, d: usize) -> Option<&SparseMatrix> {
        let src = if self.cohomological {
            d.checked_sub(1)
        } else {
            Some(d + 1)
        };
        src.and_then(|s| self.out.get(s))
    }

    /// `out[d+1]·out[d] = 0` (resp. `out[d−1]·out[d]`) exactly.
    pub fn check(&self) -> Result<()> {
        for d in 0..self.sizes.len() {
            ensure!(
                self.out[d].cols == self.sizes[d],
                "differential from degree {d} has the wrong width"
            );
            if let Some(m) = self.incoming(d) {
                ensure!(
                    m.rows == self.sizes[d],
                    "differential into degree {d} has the wrong height"
                );
                ensure!(
                    self.out[d].compose(m).is_zero(),
                    "differential squares to a nonzero map at degree {d}"
                );
            }
        }
        Ok(())
    }

    /// The group at every degree.
    pub fn groups(&self, coeff: Coefficients) -> Result<HomologyResult> {
        let degrees = (0..self.sizes.len())
            .map(|d| self.group_at(d, coeff))
            .collect::<Result<_>>()?;
        Ok(HomologyResult {
            coefficients: coeff,
            cohomology: self.cohomological,
            degrees,
        })
    }

    pub fn group_at(&self, d: usize, coeff: Coefficients) -> Result<DegreeGroup> {
        let zero = SparseMatrix::zeros(self.sizes[d], 0);
        let inc = self.incoming(d).unwrap_or(&zero);
        let (rank, representatives) = with_field!(coeff, |f| field_group(&f, &self.out[d], inc));
        let torsion = if coeff == Coefficients::Z {
            invariant_factors(inc.rows, &inc.columns)
                .into_iter()
                .filter(|x| *x > num_bigint::BigInt::from(1))
                .map(|x| {
                    x.to_u64()
                        .ok_or_else(|| Error::Invariant("torsion coefficient overflow".into()))
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(DegreeGroup {
            degree: d,
            rank,
            torsion,
            representatives,
        })
    }

    /// Dimension at every degree over a field (no representatives).
    pub fn dims(&self, coeff: Coefficients) -> Result<Vec<usize>> {
        with_field!(coeff, |f| Ok((0..self.sizes.len())
            .map(|d| {
                let r_out = self.out[d].rank(&f);
                let r_in = self.incoming(d).map_or(0, |m| m.rank(&f));
                self.sizes[d] - r_out - r_in
            })
            .collect()))
    }

    /// Euler characteristic from generator counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.sizes
            .iter()
            .enumerate()
            .map(|(d, &s)| if d % 2 == 0 { s as i64 } else { -(s as i64) })
            .sum()
    }
}

/// Dimension of `ker out / im inc` and cycles representing a basis.
pub fn field_group<F: ReportField>(
    f: &F,
    out: &SparseMatrix,
    inc: &SparseMatrix,
) -> (usize, Vec<Vec<(usize, String)>>) {
    let mut e = Echelon::new(f.clone());
    for c in inc.field_columns(f) {
        e.insert(&c, None);
    }
    let mut reps = Vec::new();
    for z in kernel_basis(f, &out.field_columns(f)) {
        if e.insert(&z, None) {
            reps.push(z.iter().map(|(i, x)| (*i, f.show(x))).collect());
        }
    }
    (reps.len(), reps)
}

/// Kernel of `out` (basis) as field vectors.
pub fn cycles<F: Field>(f: &F, out: &SparseMatrix) -> Vec<SparseVec<F::Elem>> {
    kernel_basis(f, &out.field_columns(f))
}

/// Rank of the map induced on `ker out_src / im inc_src → ker out_tgt /
/// im inc_tgt` by `map` (from source generators to target generators).
pub fn induced_rank<F: Field>(
    f: &F,
    map: &SparseMatrix,
    out_src: &SparseMatrix,
    inc_tgt: &SparseMatrix,
) -> usize {
    let mut e = Echelon::new(f.clone());
    for c in inc_tgt.field_columns(f) {
        e.insert(&c, None);
    }
    let base = e.dim();
    for z in cycles(f, out_src) {
        e.insert(&map.apply(f, &z), None);
    }
    e.dim() - base
}

/// Matrix of the induced map in the bases returned by [`field_group`]
/// (rows: target classes, columns: source classes), plus its rank.
pub fn induced_matrix<F: ReportField>(
    f: &F,
    map: &SparseMatrix,
    (out_src, inc_src): (&SparseMatrix, &SparseMatrix),
    (out_tgt, inc_tgt): (&SparseMatrix, &SparseMatrix),
) -> Result<(Vec<Vec<String>>, usize)> {
    // Source basis: kernel vectors independent modulo the source image.
    let mut es = Echelon::new(f.clone());
    for c in inc_src.field_columns(f) {
        es.insert(&c, None);
    }
    let src_basis: Vec<_> = cycles(f, out_src)
        .into_iter()
        .filter(|z| es.insert(z, None))
        .collect();
    // Target basis tagged by class index, modulo the target image.
    let mut et = Echelon::new(f.clone());
    for c in inc_tgt.field_columns(f) {
        et.insert(&c, None);
    }
    let mut k = 0;
    for z in cycles(f, out_tgt) {
        if et.insert(&z, Some(k)) {
            k += 1;
        }
    }
    let mut cols = Vec::with_capacity(src_basis.len());
    for z in &src_basis {
        let img = map.apply(f, z);
        let coords = et
            .express(&img)
            .ok_or_else(|| Error::Invariant("image of a cycle is not a cycle".into()))?;
        let mut col = vec![f.show(&f.zero()); k];
        for (i, x) in coords {
            col[i] = f.show(&x);
        }
        cols.push(col);
    }
    let rows: Vec<Vec<String>> = (0..k)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let rank = induced_rank(f, map, out_src, inc_tgt);
    Ok((rows, rank))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> GradedComplex {
        // Two vertices, two edges both running from vertex 0 to vertex 1.
        let d1 = SparseMatrix::from_columns(2, vec![vec![(0, -1), (1, 1)], vec![(0, -1), (1, 1)]]);
        GradedComplex::chains(vec![2, 2], vec![SparseMatrix::zeros(0, 2), d1])
    }

    #[test]
    fn circle_homology() {
        let c = circle();
        c.check().unwrap();
        for coeff in [Coefficients::Z, Coefficients::Q, Coefficients::Fp(3)] {
            let h = c.groups(coeff).unwrap();
            assert_eq!(h.ranks(), vec![1, 1]);
            assert_eq!(h.euler_characteristic(), c.euler_characteristic());
        }
        let co = c.dual().groups(Coefficients::Q).unwrap();
        assert!(co.cohomology);
        assert_eq!(co.ranks(), vec![1, 1]);
    }

    #[test]
    fn projective_plane_torsion() {
        // Cellular chains of the real projective plane: Z ←0− Z ←2− Z.
        let d1 = SparseMatrix::zeros(1, 1);
        let d2 = SparseMatrix::from_columns(1, vec![vec![(0, 2)]]);
        let c = GradedComplex::chains(vec![1, 1, 1], vec![SparseMatrix::zeros(0, 1), d1, d2]);
        c.check().unwrap();
        let z = c.groups(Coefficients::Z).unwrap();
        assert_eq!(z.ranks(), vec![1, 0, 0]);
        assert_eq!(z.degrees[1].torsion, vec![2]);
        assert_eq!(c.dims(Coefficients::Fp(2)).unwrap(), vec![1, 1, 1]);
        assert_eq!(c.dims(Coefficients::Q).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!("Q".parse::<Coefficients>().unwrap(), Coefficients::Q);
        assert_eq!("Fp:5".parse::<Coefficients>().unwrap(), Coefficients::Fp(5));
        assert_eq!("F_7".parse::<Coefficients>().unwrap(), Coefficients::Fp(7));
        assert!("Fp:6".parse::<Coefficients>().is_err());
        assert!("R".parse::<Coefficients>().is_err());
        assert_eq!(
            serde_json::to_string(&Coefficients::Fp(5)).unwrap(),
            "\"Fp:5\""
        );
    }

    #[test]
    fn induced_rank_of_identity() {
        let c = circle();
        let id = SparseMatrix::identity(2);
        assert_eq!(
            induced_rank(&Rationals, &id, &c.out[1], &SparseMatrix::zeros(2, 0)),
            1
        );
        let (m, r) = induced_matrix(
            &Rationals,
            &id,
            (&c.out[1], &SparseMatrix::zeros(2, 0)),
            (&c.out[1], &SparseMatrix::zeros(2, 0)),
        )
        .unwrap();
        assert_eq!((m, r), (vec![vec!["1".to_string()]], 1));
    }
}
