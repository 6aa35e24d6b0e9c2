//! Rational flags: canonical forms, parabolic membership, orbits under
//! congruence subgroups, and Čech-signed deletions.
//!
//! A flag `0 ⊊ V_1 ⊊ … ⊊ V_{l−1} ⊊ Q^n` is stored by its proper members, each
//! as the column Hermite normal form of the saturated lattice `V_j ∩ Z^n`.
//! Two flags are equal iff their stored forms are identical.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::{hnf_basis, saturate, snf_i64, IntMatrix, RatMatrix};
use crate::lattice::{CosetSpace, GroupSpec};

/// A rational flag given by its proper members.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalFlag {
    n: usize,
    members: Vec<IntMatrix>,
}

impl RationalFlag {
    /// Saturates and canonicalizes each member, and checks nesting and
    /// strictly increasing dimensions `0 < d_1 < … < d_{l−1} < n`.
    pub fn new(n: usize, members: Vec<IntMatrix>) -> Result<Self> {
        let mut out: Vec<IntMatrix> = Vec::with_capacity(members.len());
        for m in members {
            if m.rows() != n {
                return Err(Error::InvalidFlag(format!(
                    "member has {} rows, expected {n}",
                    m.rows()
                )));
            }
            let s = saturate(&m);
            let d = s.cols();
            if d == 0 || d >= n {
                return Err(Error::InvalidFlag(format!(
                    "member of dimension {d} is not proper"
                )));
            }
            if let Some(prev) = out.last() {
                if prev.cols() >= d {
                    return Err(Error::InvalidFlag(
                        "member dimensions must strictly increase".into(),
                    ));
                }
                if prev.to_rat().hstack(&s.to_rat()).rank() != d {
                    return Err(Error::InvalidFlag("members are not nested".into()));
                }
            }
            out.push(s);
        }
        Ok(RationalFlag { n, members: out })
    }

    /// Flag from members given as lists of spanning vectors.
    pub fn from_spans(n: usize, members: &[Vec<Vec<i64>>]) -> Result<Self> {
        let ms = members
            .iter()
            .map(|vs| {
                if vs.iter().any(|v| v.len() != n) {
                    return Err(Error::InvalidFlag("vector of wrong length".into()));
                }
                Ok(IntMatrix::from_fn(n, vs.len(), |i, j| vs[j][i]))
            })
            .collect::<Result<Vec<_>>>()?;
        RationalFlag::new(n, ms)
    }

    /// The improper flag (no proper members).
    pub fn trivial(n: usize) -> Self {
        RationalFlag {
            n,
            members: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of proper members (`l − 1`).
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[IntMatrix] {
        &self.members
    }

    /// Dimensions of the proper members (the flag type).
    pub fn dims(&self) -> Vec<usize> {
        self.members.iter().map(IntMatrix::cols).collect()
    }

    /// `g · F`.
    pub fn transform(&self, g: &IntMatrix) -> RationalFlag {
        let members = self.members.iter().map(|m| hnf_basis(&(g * m))).collect();
        RationalFlag { n: self.n, members }
    }

    /// True iff `g V_j = V_j` for every member.
    pub fn is_stabilized_by(&self, g: &IntMatrix) -> bool {
        self.members.iter().all(|m| hnf_basis(&(g * m)) == *m)
    }

    /// The flag with member `i` removed.
    pub fn delete(&self, i: usize) -> RationalFlag {
        let mut members = self.members.clone();
        members.remove(i);
        RationalFlag { n: self.n, members }
    }

    /// True iff the integer vector lies in member `j`.
    pub fn member_contains(&self, j: usize, v: &[i64]) -> bool {
        let m = self.members[j].to_rat();
        let col = RatMatrix::from_fn(self.n, 1, |i, _| crate::exactla::int(v[i]));
        m.hstack(&col).rank() == m.cols()
    }

    /// A unimodular `h` whose first `d_j` columns span `V_j ∩ Z^n` for every
    /// member, so that `h · standard_flag(dims) = F`.
    pub fn adapted_basis(&self) -> IntMatrix {
        let n = self.n;
        let mut h = IntMatrix::identity(n);
        let mut done = 0;
        for m in &self.members {
            let hinv = h.unimodular_inverse().expect("unimodular");
            let local = &hinv * m;
            // Rows `done..` describe the member modulo the previous one.
            let rest = IntMatrix::from_fn(n - done, local.cols(), |i, j| local[(i + done, j)]);
            let s = snf_i64(&rest);
            let completion = s
                .left
                .to_rat()
                .inverse()
                .expect("unimodular")
                .to_int()
                .expect("integral");
            let mut block = IntMatrix::identity(n);
            for i in 0..n - done {
                for j in 0..n - done {
                    block[(i + done, j + done)] = completion[(i, j)];
                }
            }
            h = &h * &block;
            done = m.cols();
        }
        debug_assert!(
            standard_flag(n, &self.dims())
                .expect("valid dims")
                .transform(&h)
                == *self
        );
        h
    }

    /// Generators of the stabilizer `P_F ∩ GL_n(Z)`.
    pub fn parabolic_generators(&self) -> Vec<IntMatrix> {
        let h = self.adapted_basis();
        let hi = h.unimodular_inverse().expect("unimodular");
        standard_parabolic_generators(self.n, &self.dims())
            .iter()
            .map(|p| &(&h * p) * &hi)
            .collect()
    }
}

/// The coordinate flag with members `span(e_1, …, e_d)` for `d` in `dims`.
pub fn standard_flag(n: usize, dims: &[usize]) -> Result<RationalFlag> {
    if dims.windows(2).any(|w| w[0] >= w[1]) || dims.iter().any(|&d| d == 0 || d >= n) {
        return Err(Error::InvalidFlag(format!(
            "bad flag type {dims:?} for n = {n}"
        )));
    }
    let members = dims
        .iter()
        .map(|&d| IntMatrix::from_fn(n, d, |i, j| i64::from(i == j)))
        .collect();
    Ok(RationalFlag { n, members })
}

/// Recomputes the canonical representation (idempotent).
pub fn flag_canonical(f: &RationalFlag) -> RationalFlag {
    RationalFlag::new(f.n, f.members.clone()).expect("valid flag stays valid")
}

/// True iff `γ` stabilizes every member of `F`.
pub fn in_parabolic(gamma: &IntMatrix, f: &RationalFlag) -> bool {
    f.is_stabilized_by(gamma)
}

/// Generators of the standard parabolic of the given type in `GL_n(Z)`:
/// sign changes and `I + E_ij` whenever `e_i` lies in every member that
/// contains `e_j`.
pub fn standard_parabolic_generators(n: usize, dims: &[usize]) -> Vec<IntMatrix> {
    let block = |i: usize| dims.iter().filter(|&&d| d <= i).count();
    let mut gens = Vec::new();
    for i in 0..n {
        let mut d = IntMatrix::identity(n);
        d[(i, i)] = -1;
        gens.push(d);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && block(i) <= block(j) {
                gens.push(IntMatrix::elementary(n, i, j, 1));
            }
        }
    }
    gens
}

/// All one-member deletions of `F` with Čech signs `(−1)^position`.
pub fn subflags_with_signs(f: &RationalFlag) -> Result<Vec<(RationalFlag, i64)>> {
    if f.len() < 2 {
        return Err(Error::NotApplicable(
            "a single-member flag has no proper subflag in the Čech cover".into(),
        ));
    }
    Ok((0..f.len())
        .map(|i| (f.delete(i), if i % 2 == 0 { 1 } else { -1 }))
        .collect())
}

/// Representatives of the `Γ`-classes of flags of one type.
#[derive(Clone, Debug, Serialize)]
pub struct FlagOrbitSet {
    pub n: usize,
    pub group: GroupSpec,
    #[serde(rename = "type")]
    pub dims: Vec<usize>,
    pub reps: Vec<RationalFlag>,
    pub count: usize,
    /// `transversals[k] · standard_flag = reps[k]`.
    #[serde(skip)]
    pub transversals: Vec<IntMatrix>,
}

/// `Γ`-orbits of flags of the given type.
///
/// Flags of a type form `GL_n(Z)/P`, so their `Γ`-classes are the orbits of
/// the standard parabolic `P` on `Ω = Γ\GL_n(Z)`; a root `ω = ω₀ t` of an
/// orbit gives the representative `t · standard_flag`.
pub fn flag_orbits(group: &GroupSpec, dims: &[usize]) -> Result<FlagOrbitSet> {
    flag_orbits_in(&CosetSpace::new(*group, None), dims)
}

/// [`flag_orbits`] on a prebuilt coset space (which fixes the transversal).
pub fn flag_orbits_in(omega: &CosetSpace, dims: &[usize]) -> Result<FlagOrbitSet> {
    Ok(FlagOrbitIndex::new(omega, dims)?.orbit_set(omega))
}

/// Lookup structure identifying the `Γ`-class of any flag of one type.
#[derive(Clone, Debug)]
pub struct FlagOrbitIndex {
    dims: Vec<usize>,
    /// Orbit root of each point of `Ω` under the standard parabolic.
    labels: Vec<usize>,
    /// `root · tracks[ω] = ω`.
    tracks: Vec<IntMatrix>,
    roots: Vec<usize>,
    reps: Vec<RationalFlag>,
}

impl FlagOrbitIndex {
    pub fn new(omega: &CosetSpace, dims: &[usize]) -> Result<Self> {
        let n = omega.group().n;
        let std = standard_flag(n, dims)?;
        let (labels, tracks) = omega.orbits(&standard_parabolic_generators(n, dims));
        let mut roots: Vec<usize> = labels.clone();
        roots.sort_unstable();
        roots.dedup();
        let reps = roots
            .iter()
            .map(|&r| std.transform(omega.transversal(r)))
            .collect();
        Ok(FlagOrbitIndex {
            dims: dims.to_vec(),
            labels,
            tracks,
            roots,
            reps,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[RationalFlag] {
        &self.reps
    }

    /// The class index of `f` and a `γ ∈ Γ` with `γ · f = reps[class]`.
    ///
    /// With `h` the adapted basis of `f`, the class is the parabolic orbit
    /// of `ω₀ h`; if `root · p = ω₀ h` then `γ = t_root p h⁻¹`.
    pub fn classify(&self, omega: &CosetSpace, f: &RationalFlag) -> (usize, IntMatrix) {
        debug_assert_eq!(f.dims(), self.dims);
        let h = f.adapted_basis();
        let w = omega.act(0, &h);
        let root = self.labels[w];
        let class = self.roots.binary_search(&root).expect("root is listed");
        let hinv = h.unimodular_inverse().expect("unimodular");
        let gamma = &(omega.transversal(root) * &self.tracks[w]) * &hinv;
        (class, gamma)
    }

    /// Class of the flag `g · standard_flag` given the point `ω₀ g`.
    pub fn class_of_point(&self, w: usize) -> usize {
        self.roots
            .binary_search(&self.labels[w])
            .expect("root is listed")
    }

    /// Class index only.
    pub fn class_of(&self, omega: &CosetSpace, f: &RationalFlag) -> usize {
        let w = omega.act(0, &f.adapted_basis());
        self.roots
            .binary_search(&self.labels[w])
            .expect("root is listed")
    }

    pub fn orbit_set(&self, omega: &CosetSpace) -> FlagOrbitSet {
        let group = *omega.group();
        FlagOrbitSet {
            n: group.n,
            group,
            dims: self.dims.clone(),
            reps: self.reps.clone(),
            count: self.reps.len(),
            transversals: self
                .roots
                .iter()
                .map(|&r| omega.transversal(r).clone())
                .collect(),
        }
    }
}

/// All flag types `d_1 < … < d_k` in `1..n` with `k` proper members.
pub fn flag_types(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for d in start..n {
            cur.push(d);
            rec(d + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

impl Serialize for RationalFlag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct J<'a> {
            n: usize,
            members: &'a [IntMatrix],
        }
        J {
            n: self.n,
            members: &self.members,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFlag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct J {
            n: usize,
            members: Vec<IntMatrix>,
        }
        let j = J::deserialize(d)?;
        RationalFlag::new(j.n, j.members).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_saturation() {
        let f = RationalFlag::from_spans(2, &[vec![vec![2, 4]]]).unwrap();
        assert_eq!(f, RationalFlag::from_spans(2, &[vec![vec![1, 2]]]).unwrap());
        let p = RationalFlag::from_spans(3, &[vec![vec![1, 1, 0], vec![0, 1, 0]]]).unwrap();
        let q = RationalFlag::from_spans(3, &[vec![vec![0, 1, 0], vec![1, 0, 0]]]).unwrap();
        assert_eq!(p, q);
        assert_eq!(flag_canonical(&p), p);
    }

    #[test]
    fn rejects_bad_flags() {
        assert!(standard_flag(3, &[2, 1]).is_err());
        assert!(standard_flag(3, &[3]).is_err());
        assert!(RationalFlag::from_spans(
            3,
            &[vec![vec![0, 0, 1]], vec![vec![1, 0, 0], vec![0, 1, 0]]]
        )
        .is_err());
    }

    #[test]
    fn parabolic_membership() {
        let f = standard_flag(2, &[1]).unwrap();
        assert!(in_parabolic(&IntMatrix::identity(2), &f));
        assert!(in_parabolic(
            &IntMatrix::from_rows(vec![vec![1, 1], vec![0, 1]]),
            &f
        ));
        assert!(!in_parabolic(
            &IntMatrix::from_rows(vec![vec![0, -1], vec![1, 0]]),
            &f
        ));
    }

    #[test]
    fn adapted_basis_maps_standard_flag() {
        let f = RationalFlag::from_spans(
            3,
            &[vec![vec![1, 2, 3]], vec![vec![1, 2, 3], vec![0, 1, 1]]],
        )
        .unwrap();
        let h = f.adapted_basis();
        assert!(h.is_unimodular());
        assert_eq!(standard_flag(3, &[1, 2]).unwrap().transform(&h), f);
        for g in f.parabolic_generators() {
            assert!(f.is_stabilized_by(&g));
        }
    }

    #[test]
    fn cech_signs() {
        let f = standard_flag(3, &[1, 2]).unwrap();
        let subs = subflags_with_signs(&f).unwrap();
        assert_eq!(subs[0], (standard_flag(3, &[2]).unwrap(), 1));
        assert_eq!(subs[1], (standard_flag(3, &[1]).unwrap(), -1));
        assert!(matches!(
            subflags_with_signs(&standard_flag(2, &[1]).unwrap()),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(flag_orbits(&GroupSpec::sl(2), &[1]).unwrap().count, 1);
        assert_eq!(
            flag_orbits(&GroupSpec::gamma0(2, 11), &[1]).unwrap().count,
            2
        );
        for dims in [vec![1], vec![2], vec![1, 2]] {
            assert_eq!(flag_orbits(&GroupSpec::gl(3), &dims).unwrap().count, 1);
        }
    }

    #[test]
    fn classify_returns_carrying_element() {
        let omega = CosetSpace::new(GroupSpec::gamma0(2, 11), None);
        let idx = FlagOrbitIndex::new(&omega, &[1]).unwrap();
        assert_eq!(idx.count(), 2);
        for v in [[1, 0], [0, 1], [1, 3], [2, 11], [5, 7]] {
            let f = RationalFlag::from_spans(2, &[vec![v.to_vec()]]).unwrap();
            let (k, g) = idx.classify(&omega, &f);
            assert!(omega.group().contains(&g));
            assert_eq!(f.transform(&g), idx.reps()[k]);
        }
    }

    #[test]
    fn types() {
        assert_eq!(flag_types(3, 1), vec![vec![1], vec![2]]);
        assert_eq!(flag_types(4, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(flag_types(2, 2), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn json_round_trip() {
        let f = standard_flag(3, &[1, 2]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"n":3,"members":[[[1],[0],[0]],[[1,0],[0,1],[0,0]]]}"#
        );
        assert_eq!(serde_json::from_str::<RationalFlag>(&s).unwrap(), f);
    }
}
