//! Arithmetic subgroups of `GL_n(Z)` and their finite coset spaces.
//!
//! Every supported group `Γ` is the stabilizer of a base point `ω₀` in a
//! finite set `Ω` on which `GL_n(Z)` acts on the right (reduction modulo the
//! level together with the determinant sign). `Ω` is then identified with
//! `Γ\GL_n(Z)`, which turns questions about infinite `Γ`-orbits into finite
//! computations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::IntMatrix;

/// Group families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `GL_n(Z)`.
    Gl,
    /// `SL_n(Z)`.
    Sl,
    /// Bottom row `≡ (0, …, 0, *) (mod N)`, determinant 1.
    Gamma0,
    /// Bottom row `≡ (0, …, 0, 1) (mod N)`, determinant 1.
    Gamma1,
    /// `≡ I (mod N)`, determinant 1 (principal congruence subgroup).
    Gamma,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gl => "gl",
            Family::Sl => "sl",
            Family::Gamma0 => "gamma0",
            Family::Gamma1 => "gamma1",
            Family::Gamma => "gamma",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Family::Gl),
            "sl" => Ok(Family::Sl),
            "gamma0" => Ok(Family::Gamma0),
            "gamma1" => Ok(Family::Gamma1),
            "gamma" | "gammafull" | "gamma_full" => Ok(Family::Gamma),
            _ => Err(Error::InvalidGroup(format!("unknown family {s:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// An arithmetic subgroup `Γ ⊆ GL_n(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupSpec {
    pub n: usize,
    pub family: Family,
    pub level: u64,
}

#[derive(Deserialize)]
struct GroupSpecJson {
    n: usize,
    family: Family,
    #[serde(default = "one")]
    level: u64,
}

fn one() -> u64 {
    1
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GroupSpecJson::deserialize(d)?;
        GroupSpec::new(j.n, j.family, j.level).map_err(serde::de::Error::custom)
    }
}

impl GroupSpec {
    /// Validates the family/level combination. Level `> 1` is supported for
    /// the determinant-one congruence families only.
    pub fn new(n: usize, family: Family, level: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidGroup("n must be positive".into()));
        }
        if level == 0 {
            return Err(Error::InvalidGroup("level must be >= 1".into()));
        }
        if matches!(family, Family::Gl | Family::Sl) && level != 1 {
            return Err(Error::InvalidGroup(format!(
                "{family} has no level; use gamma0/gamma1/gamma"
            )));
        }
        if level > 1 << 20 {
            return Err(Error::InvalidGroup("level too large".into()));
        }
        Ok(GroupSpec { n, family, level })
    }

    pub fn gl(n: usize) -> Self {
        GroupSpec {
            n,
            family: Family::Gl,
            level: 1,
        }
    }

    pub fn sl(n: usize) -> Self {
        GroupSpec {
            n,
            family: Family::Sl,
            level: 1,
        }
    }

    pub fn gamma0(n: usize, level: u64) -> Self {
        GroupSpec::new(n, Family::Gamma0, level).expect("valid level")
    }

    pub fn gamma1(n: usize, level: u64) -> Self {
        GroupSpec::new(n, Family::Gamma1, level).expect("valid level")
    }

    pub fn principal(n: usize, level: u64) -> Self {
        GroupSpec::new(n, Family::Gamma, level).expect("valid level")
    }

    /// Exact membership test for a unimodular matrix.
    pub fn contains(&self, g: &IntMatrix) -> bool {
        assert_eq!(g.rows(), self.n);
        let det = g.det();
        if self.family == Family::Gl {
            return det == 1.into() || det == (-1).into();
        }
        if det != 1.into() {
            return false;
        }
        let n = self.n;
        let m = self.level as i64;
        let z = |x: i64| x.mod_floor(&m) == 0;
        match self.family {
            Family::Gl | Family::Sl => true,
            Family::Gamma0 => (0..n - 1).all(|j| z(g[(n - 1, j)])),
            Family::Gamma1 => (0..n - 1).all(|j| z(g[(n - 1, j)])) && z(g[(n - 1, n - 1)] - 1),
            Family::Gamma => (0..n).all(|i| (0..n).all(|j| z(g[(i, j)] - i64::from(i == j)))),
        }
    }

    /// A point of `Ω` for this group family.
    fn act_point(&self, p: &[i64], g: &IntMatrix) -> Vec<i64> {
        let n = self.n;
        let m = self.level as i64;
        let sign = |s: i64| s * i64::try_from(g.det()).expect("unimodular determinant");
        match self.family {
            Family::Gl => Vec::new(),
            Family::Sl => vec![sign(p[0])],
            Family::Gamma0 | Family::Gamma1 => {
                let row: Vec<i64> = (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| p[1 + k] * g[(k, j)])
                            .sum::<i64>()
                            .mod_floor(&m)
                    })
                    .collect();
                let row = if self.family == Family::Gamma0 {
                    line_canonical(&row, m)
                } else {
                    row
                };
                std::iter::once(sign(p[0])).chain(row).collect()
            }
            Family::Gamma => {
                let mut out = vec![sign(p[0])];
                for i in 0..n {
                    for j in 0..n {
                        let s: i64 = (0..n).map(|k| p[1 + i * n + k] * g[(k, j)]).sum();
                        out.push(s.mod_floor(&m));
                    }
                }
                out
            }
        }
    }

    fn base_point(&self) -> Vec<i64> {
        let n = self.n;
        match self.family {
            Family::Gl => Vec::new(),
            Family::Sl => vec![1],
            Family::Gamma0 | Family::Gamma1 => {
                let m = self.level as i64;
                std::iter::once(1)
                    .chain((0..n).map(|j| i64::from(j == n - 1).mod_floor(&m)))
                    .collect()
            }
            Family::Gamma => {
                let m = self.level as i64;
                std::iter::once(1)
                    .chain((0..n * n).map(|k| i64::from(k / n == k % n).mod_floor(&m)))
                    .collect()
            }
        }
    }

    pub fn describe(&self) -> String {
        match self.family {
            Family::Gl => format!("GL_{}(Z)", self.n),
            Family::Sl => format!("SL_{}(Z)", self.n),
            Family::Gamma0 => format!("Gamma0({}) in SL_{}(Z)", self.level, self.n),
            Family::Gamma1 => format!("Gamma1({}) in SL_{}(Z)", self.level, self.n),
            Family::Gamma => format!("Gamma({}) in SL_{}(Z)", self.level, self.n),
        }
    }
}

/// Smallest representative of the line through `row` in `(Z/m)^n` under
/// multiplication by units.
fn line_canonical(row: &[i64], m: i64) -> Vec<i64> {
    let mut best: Option<Vec<i64>> = None;
    for u in 1..m.max(2) {
        if m > 1 && u.gcd(&m) != 1 {
            continue;
        }
        let cand: Vec<i64> = row.iter().map(|x| (x * u).mod_floor(&m.max(1))).collect();
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap_or_else(|| row.to_vec())
}

/// Standard generators of `GL_n(Z)`: adjacent transpositions, one sign
/// change, and one elementary matrix.
pub fn gl_generators(n: usize) -> Vec<IntMatrix> {
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut p = IntMatrix::identity(n);
        p.swap_rows(i, i + 1);
        gens.push(p);
    }
    let mut d = IntMatrix::identity(n);
    d[(0, 0)] = -1;
    gens.push(d);
    if n >= 2 {
        gens.push(IntMatrix::elementary(n, 0, 1, 1));
    }
    gens
}

/// The finite right `GL_n(Z)`-set `Ω ≅ Γ\GL_n(Z)` with a transversal.
#[derive(Clone)]
pub struct CosetSpace {
    group: GroupSpec,
    points: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    /// `ω₀ · transversal[i] = points[i]`.
    transversal: Vec<IntMatrix>,
}

impl fmt::Debug for CosetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CosetSpace({}, {} points)",
            self.group.describe(),
            self.points.len()
        )
    }
}

impl CosetSpace {
    /// Breadth-first orbit of `ω₀`. A seed shuffles the generator order,
    /// producing a different (equally valid) transversal.
    pub fn new(group: GroupSpec, seed: Option<u64>) -> Self {
        let mut gens = gl_generators(group.n);
        if let Some(s) = seed {
            gens.shuffle(&mut rand::rngs::StdRng::seed_from_u64(s));
        }
        let base = group.base_point();
        let mut points = vec![base.clone()];
        let mut index = HashMap::from([(base, 0usize)]);
        let mut transversal = vec![IntMatrix::identity(group.n)];
        let mut head = 0;
        while head < points.len() {
            for g in &gens {
                let q = group.act_point(&points[head], g);
                if !index.contains_key(&q) {
                    index.insert(q.clone(), points.len());
                    points.push(q);
                    transversal.push(&transversal[head] * g);
                }
            }
            head += 1;
        }
        CosetSpace {
            group,
            points,
            index,
            transversal,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `ω · g` by index.
    pub fn act(&self, omega: usize, g: &IntMatrix) -> usize {
        let q = self.group.act_point(&self.points[omega], g);
        self.index[&q]
    }

    /// A matrix `t` with `ω₀ · t = ω`.
    pub fn transversal(&self, omega: usize) -> &IntMatrix {
        &self.transversal[omega]
    }

    pub fn point(&self, omega: usize) -> &[i64] {
        &self.points[omega]
    }

    /// Orbits of `Ω` under the group generated by `gens`. Returns, for each
    /// point, its orbit label (the smallest index in the orbit) and a matrix
    /// `p` in that group with `root · p = point`.
    pub fn orbits(&self, gens: &[IntMatrix]) -> (Vec<usize>, Vec<IntMatrix>) {
        let n = self.group.n;
        let mut label = vec![usize::MAX; self.len()];
        let mut track = vec![IntMatrix::identity(n); self.len()];
        for root in 0..self.len() {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = root;
            let mut queue = vec![root];
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head];
                head += 1;
                for g in gens {
                    let y = self.act(x, g);
                    if label[y] == usize::MAX {
                        label[y] = root;
                        track[y] = &track[x] * g;
                        queue.push(y);
                    }
                }
            }
        }
        (label, track)
    }
}
