//! Acceptance run: one PASS/FAIL line per criterion, with timings against
//! the budget.
//!
//! Two criteria cannot hold as literally stated. They are listed in
//! `KNOWN_UNATTAINABLE` and are printed as FAIL. The run still succeeds
//! only if the measured values match the analysis: for the orthant bound,
//! the recurrence fails on a known counterexample while the certified bound
//! passes everywhere; for the level-11 boundary package, every clause holds
//! except the boundary image rank, which is 1 instead of 2. Any other
//! failure makes the process exit nonzero.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};

use common::{
    betti_over_q, brute_minimum, cusps_gamma0, product_vanishes, random_flag, random_form, rank, respects,
    unit_rational, Q,
};
use wellround::boundary::{
    boundary_homology_of, build_double_complex, restriction_of, spectral_sequence, total_cohomology, DoubleComplex,
};
use wellround::cells::{cell_from_config, enumerate_W, enumerate_with, is_small_enough, EnumerationOptions};
use wellround::exactla::{parse_rational, IntMatrix};
use wellround::flags::{flag_orbits, standard_flag, RationalFlag};
use wellround::lattice::{config_equiv, GramForm, GroupSpec, VectorConfig};
use wellround::quotient::{barycentric_quotient, Coefficients, QuotientComplex};
use wellround::retraction::{orthant_bound, retract, scale_along_flag, ScalingVector};

/// Criteria that fail as literally stated, with the reason.
const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[
    (3, "the closed-form recurrence can leave deeper flag members outside the minima flag"),
    (6, "the two cusp loops of X_0(11) sum to a boundary, so their image in H_1 has rank 1"),
];

struct Outcome {
    pass: bool,
    /// For a known-unattainable criterion: whether the measured failure is
    /// the analysed one.
    as_analysed: bool,
    detail: String,
}

impl Outcome {
    fn from_checks(checks: &[(&str, bool)]) -> Outcome {
        let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
        Outcome {
            pass: failed.is_empty(),
            as_analysed: false,
            detail: if failed.is_empty() {
                format!("{} checks", checks.len())
            } else {
                format!("failed: {}", failed.join(", "))
            },
        }
    }
}

fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}

fn scaled_image(a: &GramForm, f: &RationalFlag, rho: &[Q]) -> GramForm {
    let scaled = scale_along_flag(a, f, &ScalingVector::from_root_coords(rho).unwrap()).unwrap();
    retract(&scaled).unwrap().final_form
}

fn quotient(group: &GroupSpec) -> QuotientComplex {
    barycentric_quotient(&enumerate_W(group).unwrap(), None).unwrap()
}

fn squares_to_zero(c: &QuotientComplex) -> bool {
    (2..c.boundaries.len()).all(|k| product_vanishes(&c.boundaries[k - 1], &c.boundaries[k]))
}

fn total_squares_to_zero(dc: &DoubleComplex) -> bool {
    let t = dc.total();
    (1..t.out.len()).all(|k| t.out[k].cols == 0 || product_vanishes(&t.out[k], &t.out[k - 1]))
}

fn retraction_soundness() -> Outcome {
    let mut checks = Vec::new();
    for n in 2..=4 {
        let mut r = rng(100 + n as u64);
        let (mut sound, mut idempotent, mut rebuilt) = (true, true, true);
        for _ in 0..200 {
            let a = random_form(n, &mut r);
            let t = retract(&a).unwrap();
            let (min, vecs) = brute_minimum(&t.final_form);
            sound &= min.is_one() && rank(&vecs) == n;
            idempotent &= retract(&t.final_form).unwrap().final_form == t.final_form;
            rebuilt &= scale_along_flag(&t.normalized, &t.irredundant, &t.composite_scaling()).unwrap() == t.final_form;
        }
        checks.push((format!("well-rounded n={n}"), sound));
        checks.push((format!("idempotent n={n}"), idempotent));
        checks.push((format!("reconstruction n={n}"), rebuilt));
    }
    let named: Vec<(&str, bool)> = checks.iter().map(|(s, b)| (s.as_str(), *b)).collect();
    let mut o = Outcome::from_checks(&named);
    o.detail = format!("200 forms for each n in 2..=4; {}", o.detail);
    o
}

fn orthant_invariance() -> Outcome {
    let mut r = rng(200);
    let mut agree = 0;
    let total = 120;
    for i in 0..total {
        let n = 2 + i % 3;
        let a = random_form(n, &mut r);
        let t = retract(&a).unwrap();
        let members: Vec<_> = t.irredundant.members().iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
        let sub = RationalFlag::new(n, members).unwrap();
        let rho: Vec<Q> = (0..sub.len()).map(|_| unit_rational(&mut r)).collect();
        if scaled_image(&a, &sub, &rho) == t.final_form {
            agree += 1;
        }
    }
    Outcome {
        pass: agree == total,
        as_analysed: false,
        detail: format!("{agree}/{total} triples with r(ρ·f) = r(f)"),
    }
}

/// Whether every sampled `ρ <= t` gives one image, respecting the flag.
fn single_image_below(a: &GramForm, f: &RationalFlag, t: &[Q], r: &mut rand::rngs::StdRng) -> bool {
    let at_t = scaled_image(a, f, t);
    let below_ok = (0..3).all(|_| {
        let rho: Vec<Q> = t.iter().map(|x| x * unit_rational(r)).collect();
        scaled_image(a, f, &rho) == at_t
    });
    below_ok && respects(&brute_minimum(&at_t).1, f)
}

fn orthant_bound_criterion() -> Outcome {
    let mut r = rng(300);
    let mut pairs: Vec<(GramForm, RationalFlag)> = (0..60)
        .map(|i| {
            let n = 2 + i % 2;
            (random_form(n, &mut r), random_flag(n, &mut r))
        })
        .collect();
    // A pair on which the recurrence is known to be too large.
    pairs.push((
        GramForm::from_ints(&[&[3, 1, -2], &[1, 5, -1], &[-2, -1, 9]]).unwrap(),
        RationalFlag::from_spans(3, &[vec![vec![2, 1, -3]], vec![vec![2, 0, -3], vec![0, 1, 0]]]).unwrap(),
    ));
    let (mut recurrence_ok, mut certified_ok) = (0, 0);
    let mut counterexample_fails = false;
    for (i, (a, f)) in pairs.iter().enumerate() {
        let b = orthant_bound(a, f).unwrap();
        let literal = single_image_below(a, f, &b.t_sq, &mut r);
        recurrence_ok += literal as usize;
        certified_ok += single_image_below(a, f, &b.certified_t_sq, &mut r) as usize;
        if i == pairs.len() - 1 {
            counterexample_fails = !literal;
        }
    }
    let total = pairs.len();
    Outcome {
        pass: recurrence_ok == total,
        as_analysed: counterexample_fails && certified_ok == total,
        detail: format!(
            "recurrence bound: {recurrence_ok}/{total} pairs with one image (counterexample {}); certified bound: {certified_ok}/{total}",
            if counterexample_fails { "fails" } else { "passes" }
        ),
    }
}

fn modular_group_structure() -> Outcome {
    let w = enumerate_W(&GroupSpec::sl(2)).unwrap();
    let q = barycentric_quotient(&w, None).unwrap();
    let h = q.homology(Coefficients::Z).unwrap();
    let face = barycentric_quotient(&w, Some(&standard_flag(2, &[1]).unwrap())).unwrap();
    let hf = face.homology(Coefficients::Z).unwrap();
    let free = |h: &wellround::quotient::HomologyResult| h.degrees.iter().all(|d| d.torsion.is_empty());
    Outcome::from_checks(&[
        ("one vertex and one edge orbit", w.counts() == vec![1, 1]),
        ("H_*(W/Γ; Z) = Z, 0", h.ranks() == vec![1, 0] && free(&h)),
        ("W_F/(Γ∩P) is a circle", hf.ranks() == vec![1, 1] && free(&hf)),
    ])
}

fn cusp_counts() -> Outcome {
    let mismatches: Vec<u64> =
        (1..=30).filter(|&n| flag_orbits(&GroupSpec::gamma0(2, n), &[1]).unwrap().count as u64 != cusps_gamma0(n)).collect();
    Outcome {
        pass: mismatches.is_empty(),
        as_analysed: false,
        detail: if mismatches.is_empty() {
            "N = 1..30 match the divisor sum".into()
        } else {
            format!("mismatched levels {mismatches:?}")
        },
    }
}

fn level_eleven_package() -> Outcome {
    let group = GroupSpec::gamma0(2, 11);
    let dc = build_double_complex(&group, EnumerationOptions::default()).unwrap();
    let total = total_cohomology(&dc, Coefficients::Q).unwrap().ranks();
    let r = restriction_of(&dc, Coefficients::Q).unwrap();
    let h = boundary_homology_of(&dc, Coefficients::Q).unwrap();
    let d1 = &r.degrees[1];
    let image = h.degrees[1].image_rank;
    let mut o = Outcome::from_checks(&[
        ("H^*(total) = Q², Q²", total == vec![2, 2]),
        ("dim H^1(W/Γ) = 3", d1.dim_whole == 3),
        ("rank ψ* = 1", d1.rank == 1),
        ("interior = 2", d1.interior == 2),
        ("image of H_1(∂) has rank 2", image == 2),
    ]);
    let others_hold = total == vec![2, 2] && d1.dim_whole == 3 && d1.rank == 1 && d1.interior == 2;
    o.as_analysed = others_hold && image == 1;
    o.detail = format!("{}; measured image rank {image}", o.detail);
    o
}

fn columns(rows: [[i64; 6]; 3]) -> VectorConfig {
    VectorConfig::from_columns(&IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())).unwrap()
}

fn worked_example() -> Outcome {
    let s = columns([[1, 0, 1, 0, 0, -1], [0, 1, 1, 0, 1, 0], [0, 0, 0, 1, 1, 1]]);
    let t = columns([[1, 0, 0, 1, 1, 0], [0, 1, 0, 0, 1, 1], [0, 0, 1, 1, 1, 1]]);
    let plane = RationalFlag::from_spans(3, &[vec![vec![1, 0, 0], vec![0, 1, 0]]]).unwrap();
    let u = config_equiv(&s, &t, &GroupSpec::gl(3), None);
    let gl3 = is_small_enough(&GroupSpec::gl(3)).unwrap();
    let witness_ok = gl3.counterexample.as_ref().is_some_and(|w| {
        w.flag != w.other_flag
            && w.flag.transform(&w.gamma) == w.other_flag
            && respects(w.cell.vectors(), &w.flag)
            && respects(w.cell.vectors(), &w.other_flag)
    });
    Outcome::from_checks(&[
        ("GL_3(Z) carries one configuration to the other", u.is_some_and(|u| s.transform(&u) == t)),
        ("no equivalence fixing the plane", config_equiv(&s, &t, &GroupSpec::gl(3), Some(&plane)).is_none()),
        ("both are 0-cells", cell_from_config(&s).unwrap().dim == 0 && cell_from_config(&t).unwrap().dim == 0),
        ("GL_3(Z) is not small enough, with a witness", !gl3.small_enough && witness_ok),
        ("Γ(3) ⊂ SL_2(Z) is small enough", is_small_enough(&GroupSpec::principal(2, 3)).unwrap().small_enough),
    ])
}

/// Whether every composable pair of page differentials composes to zero.
fn differentials_square_to_zero(page: &wellround::boundary::SpectralPage) -> bool {
    let parse = |m: &Vec<Vec<String>>| -> Vec<Vec<Q>> {
        m.iter().map(|row| row.iter().map(|x| parse_rational(x).unwrap()).collect()).collect()
    };
    page.differentials.iter().all(|first| {
        page.differentials.iter().filter(|second| second.from == first.to).all(|second| {
            let (a, b) = (parse(&second.matrix), parse(&first.matrix));
            a.iter().all(|row| {
                (0..b.first().map_or(0, Vec::len)).all(|j| {
                    row.iter().enumerate().fold(Q::zero(), |acc, (k, x)| acc + x * &b[k][j]).is_zero()
                })
            })
        })
    })
}

fn rank_three_global() -> Outcome {
    let group = GroupSpec::sl(3);
    let q = quotient(&group);
    let cohomology = q.cohomology(Coefficients::Q).unwrap().ranks();
    let dc = build_double_complex(&group, EnumerationOptions::default()).unwrap();
    let ss = spectral_sequence(&dc, Coefficients::Q).unwrap();
    let e1 = &ss.pages[0];
    let e2 = ss.pages.iter().find(|p| p.r == 2).map_or(&e1.entries, |p| &p.entries);
    Outcome::from_checks(&[
        ("dim W = 3", q.dim() == 3),
        ("H^*(W/Γ; Q) = Q, 0, 0, 0", cohomology == vec![1, 0, 0, 0]),
        ("D² = 0", total_squares_to_zero(&dc)),
        ("d_1² = 0", differentials_square_to_zero(e1)),
        ("E_2 = E_∞", *e2 == ss.infinity),
        ("χ(E_1) = χ(total)", e1.euler_characteristic() == dc.total().euler_characteristic()),
    ])
}

fn structural_identities() -> Outcome {
    let groups = [GroupSpec::sl(2), GroupSpec::gamma0(2, 11), GroupSpec::principal(2, 4), GroupSpec::sl(3), GroupSpec::gamma0(3, 2)];
    let mut boundaries = true;
    let mut squares = true;
    let mut abutment = true;
    let mut reseeded = true;
    for group in groups {
        let q = quotient(&group);
        boundaries &= squares_to_zero(&q);
        let dc = build_double_complex(&group, EnumerationOptions::default()).unwrap();
        squares &= total_squares_to_zero(&dc);
        let ss = spectral_sequence(&dc, Coefficients::Q).unwrap();
        let direct = betti_over_q(&dc.total());
        let mut sums = vec![0; direct.len()];
        for (p, col) in ss.infinity.iter().enumerate() {
            for (k, &d) in col.iter().enumerate() {
                if p + k < sums.len() {
                    sums[p + k] += d;
                }
            }
        }
        abutment &= sums == direct && ss.abutment == direct;
        let homology = q.homology(Coefficients::Q).unwrap().ranks();
        let restriction = restriction_of(&dc, Coefficients::Q).unwrap().degrees;
        for seed in [17, 18] {
            let opts = EnumerationOptions { seed: Some(seed), experimental: false };
            let w = enumerate_with(&group, opts).unwrap();
            let other = build_double_complex(&group, opts).unwrap();
            reseeded &= barycentric_quotient(&w, None).unwrap().homology(Coefficients::Q).unwrap().ranks() == homology
                && spectral_sequence(&other, Coefficients::Q).unwrap().infinity == ss.infinity
                && restriction_of(&other, Coefficients::Q).unwrap().degrees == restriction;
        }
    }
    Outcome::from_checks(&[
        ("∂² = 0", boundaries),
        ("D² = 0", squares),
        ("Σ dim E_∞ = dim H(total)", abutment),
        ("ranks independent of representatives", reseeded),
    ])
}

fn main() {
    let criteria: Vec<(usize, &str, u64, fn() -> Outcome)> = vec![
        (1, "retraction soundness", 120, retraction_soundness),
        (2, "orthant invariance", 120, orthant_invariance),
        (3, "orthant bound", 120, orthant_bound_criterion),
        (4, "modular group structure", 10, modular_group_structure),
        (5, "cusp counts", 30, cusp_counts),
        (6, "level 11 boundary package", 60, level_eleven_package),
        (7, "worked rank-three example and smallness", 120, worked_example),
        (8, "SL_3(Z) global check", 600, rank_three_global),
        (9, "structural identities", 300, structural_identities),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            pass: false,
            as_analysed: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
            ),
        });
        let elapsed = start.elapsed();
        let in_budget = elapsed <= Duration::from_secs(budget);
        let pass = outcome.pass && in_budget;
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id);
        println!(
            "criterion {id} {}: {name} — {} [{:.1} s of {budget} s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
        match known {
            Some((_, why)) if !pass && outcome.as_analysed && in_budget => {
                println!("    known unattainable as stated: {why}");
            }
            _ if pass => {}
            _ => unexpected.push(id),
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: every criterion passes or fails exactly as analysed");
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}
