//! Equivalence and stabilizers of vector configurations under `GL_n(Z)` and
//! its subgroups, by exhaustive backtracking over basis images.

use std::collections::HashSet;

use num_traits::Signed;

use super::config::{sign_canonical, VectorConfig};
use super::group::GroupSpec;
use crate::exactla::{int, IntMatrix, RatMatrix, Rational};
use crate::flags::RationalFlag;

/// Invariant data for fast rejection and for orbit dictionaries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigKey {
    pub size: usize,
    pub dim: usize,
    /// Sorted `|vᵀ G w|` over pairs, with `G = (Σ v vᵀ)⁻¹`.
    pub gram_profile: Vec<Rational>,
}

/// `(Σ_{v ∈ S} v vᵀ)⁻¹`; preserved by any `U` with `U(±S) = ±S'`.
fn inverse_characteristic(s: &VectorConfig) -> Option<RatMatrix> {
    s.characteristic_form().inverse()
}

fn ratvec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// Invariant key of a spanning configuration.
pub fn config_key(s: &VectorConfig) -> ConfigKey {
    let g = inverse_characteristic(s).expect("spanning configuration");
    let vs: Vec<Vec<Rational>> = s.vectors().iter().map(|v| ratvec(v)).collect();
    let mut prof = Vec::with_capacity(vs.len() * (vs.len() + 1) / 2);
    for i in 0..vs.len() {
        for j in i..vs.len() {
            prof.push(g.bilinear(&vs[i], &vs[j]).abs());
        }
    }
    prof.sort();
    ConfigKey {
        size: s.len(),
        dim: s.cell_dim(),
        gram_profile: prof,
    }
}

/// Calls `visit` on every `U ∈ GL_n(Z)` with `U(±S) = ±T`, until it
/// returns `true`. Returns whether the visit was stopped early.
pub fn for_each_isometry(
    s: &VectorConfig,
    t: &VectorConfig,
    mut visit: impl FnMut(&IntMatrix) -> bool,
) -> bool {
    let n = s.n();
    if s.len() != t.len() || s.n() != t.n() {
        return false;
    }
    let (Some(gs), Some(gt)) = (inverse_characteristic(s), inverse_characteristic(t)) else {
        return false;
    };
    // Greedy basis of S.
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for v in s.vectors() {
        let mut trial = basis.clone();
        trial.push(v.clone());
        let m = RatMatrix::from_rows(trial.iter().map(|w| ratvec(w)).collect());
        if m.rank() == trial.len() {
            basis = trial;
        }
        if basis.len() == n {
            break;
        }
    }
    if basis.len() < n {
        return false;
    }
    let b = RatMatrix::from_columns(n, &basis.iter().map(|v| ratvec(v)).collect::<Vec<_>>());
    let b_inv = b.inverse().expect("basis is independent");
    let bq: Vec<Vec<Rational>> = basis.iter().map(|v| ratvec(v)).collect();
    let gb: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| gs.bilinear(&bq[i], &bq[j])).collect())
        .collect();

    // Candidate images: ±T.
    let cands: Vec<Vec<i64>> = t
        .vectors()
        .iter()
        .flat_map(|v| [v.clone(), v.iter().map(|x| -x).collect()])
        .collect();
    let cq: Vec<Vec<Rational>> = cands.iter().map(|v| ratvec(v)).collect();
    let m = cands.len();
    let gc: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|j| gt.bilinear(&cq[i], &cq[j])).collect())
        .collect();
    let per_level: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..m).filter(|&c| gc[c][c] == gb[i][i]).collect())
        .collect();
    let tset: HashSet<&Vec<i64>> = t.vectors().iter().collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        level: usize,
        chosen: &mut Vec<usize>,
        ctx: &Ctx<'_>,
        visit: &mut dyn FnMut(&IntMatrix) -> bool,
    ) -> bool {
        let n = ctx.n;
        if level == n {
            let c = RatMatrix::from_columns(
                n,
                &chosen
                    .iter()
                    .map(|&k| ctx.cq[k].clone())
                    .collect::<Vec<_>>(),
            );
            let Some(u) = (&c * ctx.b_inv).to_int() else {
                return false;
            };
            if !u.is_unimodular() {
                return false;
            }
            let maps = ctx
                .s
                .vectors()
                .iter()
                .all(|v| ctx.tset.contains(&sign_canonical(&u.mul_vec(v))));
            return maps && visit(&u);
        }
        for &c in &ctx.per_level[level] {
            if chosen
                .iter()
                .enumerate()
                .all(|(j, &k)| ctx.gc[c][k] == ctx.gb[level][j])
            {
                chosen.push(c);
                if rec(level + 1, chosen, ctx, visit) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    struct Ctx<'a> {
        n: usize,
        s: &'a VectorConfig,
        b_inv: &'a RatMatrix,
        cq: &'a [Vec<Rational>],
        gc: &'a [Vec<Rational>],
        gb: &'a [Vec<Rational>],
        per_level: &'a [Vec<usize>],
        tset: &'a HashSet<&'a Vec<i64>>,
    }
    let ctx = Ctx {
        n,
        s,
        b_inv: &b_inv,
        cq: &cq,
        gc: &gc,
        gb: &gb,
        per_level: &per_level,
        tset: &tset,
    };
    rec(0, &mut chosen, &ctx, &mut visit)
}

/// A `U ∈ Γ` with `U(±S) = ±S'` (and `U·F = F` when a constraint flag is
/// given), or `None` if none exists. The search is exhaustive.
pub fn config_equiv(
    s: &VectorConfig,
    t: &VectorConfig,
    group: &GroupSpec,
    constraint: Option<&RationalFlag>,
) -> Option<IntMatrix> {
    let mut found = None;
    for_each_isometry(s, t, |u| {
        let ok = group.contains(u) && constraint.is_none_or(|f| f.is_stabilized_by(u));
        if ok {
            found = Some(u.clone());
        }
        ok
    });
    found
}

/// Finite stabilizer `{U ∈ Γ : U(±S) = ±S}` of a configuration.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub elements: Vec<IntMatrix>,
    pub generators: Vec<IntMatrix>,
}

impl Stabilizer {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// All elements of `Γ` stabilizing `±S`, with a small generating set.
pub fn config_stabilizer(s: &VectorConfig, group: &GroupSpec) -> Stabilizer {
    let mut elements = Vec::new();
    for_each_isometry(s, s, |u| {
        if group.contains(u) {
            elements.push(u.clone());
        }
        false
    });
    elements.sort();
    let generators = generating_subset(&elements);
    Stabilizer {
        elements,
        generators,
    }
}

/// Greedy generating set of a finite matrix group given by its elements.
pub fn generating_subset(elements: &[IntMatrix]) -> Vec<IntMatrix> {
    let Some(first) = elements.first() else {
        return Vec::new();
    };
    let n = first.rows();
    let id = IntMatrix::identity(n);
    let mut gens: Vec<IntMatrix> = Vec::new();
    let mut span: HashSet<IntMatrix> = HashSet::from([id.clone()]);
    for g in elements {
        if span.contains(g) {
            continue;
        }
        gens.push(g.clone());
        // Close the span under right multiplication by the generators.
        let mut frontier: Vec<IntMatrix> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = &x * h;
                if span.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}
