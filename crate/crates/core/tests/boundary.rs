//! The boundary double complex, its spectral sequence and the restriction
//! to the boundary, against the topology of surfaces with boundary circles
//! and recomputation by dense elimination.

mod common;

use common::{betti_over_q, genus_gamma0, product_vanishes};
use wellround::boundary::{
    boundary_homology_of, build_double_complex, restriction_of, spectral_sequence, total_cohomology, DoubleComplex,
    SpectralSequence,
};
use wellround::cells::EnumerationOptions;
use wellround::lattice::GroupSpec;
use wellround::quotient::Coefficients;

fn double_complex(group: &GroupSpec, seed: Option<u64>) -> DoubleComplex {
    build_double_complex(group, EnumerationOptions { seed, experimental: false }).unwrap()
}

fn total_squares_to_zero(dc: &DoubleComplex) -> bool {
    let t = dc.total();
    (1..t.out.len()).all(|k| t.out[k].cols == 0 || product_vanishes(&t.out[k], &t.out[k - 1]))
}

/// `Σ_p dim E_∞^{p, k−p}` for every total degree `k`.
fn diagonal_sums(ss: &SpectralSequence, degrees: usize) -> Vec<usize> {
    let mut out = vec![0; degrees];
    for (p, col) in ss.infinity.iter().enumerate() {
        for (q, &d) in col.iter().enumerate() {
            if p + q < degrees {
                out[p + q] += d;
            }
        }
    }
    out
}

#[test]
fn boundary_of_a_modular_curve_is_a_union_of_cusp_circles() {
    for level in [1, 2, 5, 6, 11, 14] {
        let group = GroupSpec::gamma0(2, level);
        let dc = double_complex(&group, None);
        dc.check().unwrap();
        assert!(total_squares_to_zero(&dc));
        let (g, c) = genus_gamma0(level);
        let c = c as usize;
        let total = total_cohomology(&dc, Coefficients::Q).unwrap().ranks();
        assert_eq!(total, vec![c, c], "level {level}");
        assert_eq!(betti_over_q(&dc.total()), vec![c, c]);
        // H^1(Y) → H^1(∂Y) → H^2(Y, ∂Y) = Q → 0 gives rank c − 1; the kernel
        // is the 2g-dimensional interior cohomology.
        let r = restriction_of(&dc, Coefficients::Q).unwrap();
        assert_eq!((r.degrees[0].rank, r.degrees[0].interior), (1, 0));
        assert_eq!(r.degrees[1].dim_whole, 2 * g as usize + c - 1);
        assert_eq!((r.degrees[1].rank, r.degrees[1].interior), (c - 1, 2 * g as usize), "level {level}");
        // Dually, the cusp loops span a (c − 1)-dimensional image in H_1.
        let h = boundary_homology_of(&dc, Coefficients::Q).unwrap();
        assert_eq!(h.degrees[1].image_rank, c - 1);
        assert_eq!(h.degrees[0].image_rank, 1);
    }
}

#[test]
fn level_eleven_boundary_package() {
    let dc = double_complex(&GroupSpec::gamma0(2, 11), None);
    let ss = spectral_sequence(&dc, Coefficients::Q).unwrap();
    assert_eq!(ss.pages[0].entries, vec![vec![2, 2]]);
    assert_eq!(ss.abutment, vec![2, 2]);
    let r = restriction_of(&dc, Coefficients::Q).unwrap();
    assert_eq!((r.degrees[1].dim_whole, r.degrees[1].rank, r.degrees[1].interior), (3, 1, 2));
    // Same answer over a prime field not dividing any stabilizer order.
    let r5 = restriction_of(&dc, Coefficients::Fp(5)).unwrap();
    assert_eq!(r5.degrees, r.degrees);
}

/// The literal expectation that the image of `H_1(∂)` in `H_1(W/Γ_0(11))`
/// has rank 2. The two cusp loops sum to the boundary of the curve minus
/// cusp discs, so the image has rank 1; kept to document the discrepancy.
#[test]
#[ignore = "the image of the two cusp loops has rank 1, not 2"]
fn level_eleven_boundary_image_of_rank_two() {
    let dc = double_complex(&GroupSpec::gamma0(2, 11), None);
    assert_eq!(boundary_homology_of(&dc, Coefficients::Q).unwrap().degrees[1].image_rank, 2);
}

#[test]
fn rank_three_spectral_sequence() {
    let dc = double_complex(&GroupSpec::sl(3), None);
    dc.check().unwrap();
    assert!(total_squares_to_zero(&dc));
    let ss = spectral_sequence(&dc, Coefficients::Q).unwrap();
    let e1 = &ss.pages[0];
    assert_eq!(e1.r, 1);
    assert_eq!(e1.entries, vec![vec![2, 0, 0, 0], vec![1, 0, 0, 1]]);
    // Degenerates at E_2.
    let e2 = ss.pages.iter().find(|p| p.r == 2).map_or(&e1.entries, |p| &p.entries);
    assert_eq!(e2, &ss.infinity);
    assert_eq!(ss.infinity, vec![vec![1, 0, 0, 0], vec![0, 0, 0, 1]]);
    // The boundary is a closed orientable 4-dimensional rational homology
    // manifold, so its cohomology is palindromic.
    assert_eq!(ss.abutment, vec![1, 0, 0, 0, 1]);
    let direct = betti_over_q(&dc.total());
    assert_eq!(direct, ss.abutment);
    assert_eq!(diagonal_sums(&ss, direct.len()), direct);
    assert_eq!(e1.euler_characteristic(), dc.total().euler_characteristic());
    // SL_3(Z) is rationally acyclic, so only degree 0 restricts.
    let r = restriction_of(&dc, Coefficients::Q).unwrap();
    assert_eq!(r.degrees.iter().map(|d| d.rank).collect::<Vec<_>>(), vec![1, 0, 0, 0]);
}

#[test]
fn reported_ranks_do_not_depend_on_representatives() {
    for group in [GroupSpec::gamma0(2, 11), GroupSpec::sl(3), GroupSpec::gamma0(3, 2)] {
        let reference = double_complex(&group, None);
        let ss = spectral_sequence(&reference, Coefficients::Q).unwrap();
        let r = restriction_of(&reference, Coefficients::Q).unwrap();
        for seed in [5, 6] {
            let dc = double_complex(&group, Some(seed));
            let other = spectral_sequence(&dc, Coefficients::Q).unwrap();
            assert_eq!(other.infinity, ss.infinity, "{group:?} seed {seed}");
            assert_eq!(other.abutment, ss.abutment);
            assert_eq!(other.pages[0].entries, ss.pages[0].entries);
            assert_eq!(restriction_of(&dc, Coefficients::Q).unwrap().degrees, r.degrees);
        }
    }
}

#[test]
fn level_two_in_rank_three_has_consistent_abutment() {
    let dc = double_complex(&GroupSpec::gamma0(3, 2), None);
    dc.check().unwrap();
    assert!(total_squares_to_zero(&dc));
    let ss = spectral_sequence(&dc, Coefficients::Q).unwrap();
    let direct = betti_over_q(&dc.total());
    assert_eq!(ss.abutment, direct);
    assert_eq!(diagonal_sums(&ss, direct.len()), direct);
    let rev: Vec<usize> = direct.iter().rev().copied().collect();
    assert_eq!(direct, rev, "Poincaré duality of the boundary");
}
