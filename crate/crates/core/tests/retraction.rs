//! The retraction onto the well-rounded retract: soundness, equivariance,
//! orthant invariance and the orthant bound, with well-roundedness and flag
//! membership decided by independent box searches.

mod common;

use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use common::{brute_minimum, q, Q, random_flag, random_form, random_unimodular, rank, respects, unit_rational};
use wellround::flags::RationalFlag;
use wellround::lattice::GramForm;
use wellround::retraction::{flag_in_minima_flag, orthant_bound, retract, scale_along_flag, ScalingVector};

fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retraction_lands_on_normalized_well_rounded_forms(seed in any::<u64>(), n in 2usize..=4) {
        let a = random_form(n, &mut rng(seed));
        let t = retract(&a).unwrap();
        let (min, vecs) = brute_minimum(&t.final_form);
        prop_assert!(min.is_one());
        prop_assert_eq!(rank(&vecs), n);
        // Idempotent: a well-rounded normalized form is fixed.
        prop_assert_eq!(&retract(&t.final_form).unwrap().final_form, &t.final_form);
        // The image lies in the subcomplex of the flag of successive minima.
        prop_assert!(respects(&vecs, &t.irredundant));
    }

    #[test]
    fn retraction_is_a_composite_scaling(seed in any::<u64>(), n in 2usize..=4) {
        let a = random_form(n, &mut rng(seed));
        let t = retract(&a).unwrap();
        let rebuilt = scale_along_flag(&t.normalized, &t.irredundant, &t.composite_scaling()).unwrap();
        prop_assert_eq!(rebuilt, t.final_form);
    }

    #[test]
    fn retraction_commutes_with_change_of_basis(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let a = random_form(n, &mut r);
        let u = random_unimodular(n, &mut r);
        let left = retract(&a.pullback(&u)).unwrap().final_form;
        let right = retract(&a).unwrap().final_form.pullback(&u);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn scalings_compose(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let a = random_form(n, &mut r);
        let f = random_flag(n, &mut r);
        let mut draw = || ScalingVector::from_block_factors((0..=f.len()).map(|_| unit_rational(&mut r)).collect()).unwrap();
        let (s, s2) = (draw(), draw());
        let twice = scale_along_flag(&scale_along_flag(&a, &f, &s).unwrap(), &f, &s2).unwrap();
        prop_assert_eq!(twice, scale_along_flag(&a, &f, &s.compose(&s2)).unwrap());
    }

    #[test]
    fn retraction_is_constant_on_the_minima_orthant(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let a = random_form(n, &mut r);
        let t = retract(&a).unwrap();
        let members: Vec<_> = t.irredundant.members().iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
        let sub = RationalFlag::new(n, members).unwrap();
        let rho: Vec<_> = (0..sub.len()).map(|_| unit_rational(&mut r)).collect();
        let scaled = scale_along_flag(&a, &sub, &ScalingVector::from_root_coords(&rho).unwrap()).unwrap();
        prop_assert_eq!(retract(&scaled).unwrap().final_form, t.final_form);
    }

    #[test]
    fn certified_orthant_bound_gives_one_image_in_the_flag_subcomplex(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let a = random_form(n, &mut r);
        let f = random_flag(n, &mut r);
        let b = orthant_bound(&a, &f).unwrap();
        prop_assert!(b.certified_t_sq.iter().zip(&b.t_sq).all(|(c, t)| c <= t));
        let mut images = Vec::new();
        for k in 0..4 {
            let rho: Vec<_> = b.certified_t_sq.iter().map(|t| if k == 0 { t.clone() } else { t * unit_rational(&mut r) }).collect();
            let scaled = scale_along_flag(&a, &f, &ScalingVector::from_root_coords(&rho).unwrap()).unwrap();
            images.push(retract(&scaled).unwrap().final_form);
        }
        prop_assert!(images.windows(2).all(|w| w[0] == w[1]));
        prop_assert!(respects(&brute_minimum(&images[0]).1, &f));
    }

    #[test]
    fn recurrence_bound_suffices_for_a_single_member(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let a = random_form(n, &mut r);
        let f = RationalFlag::new(n, vec![random_flag(n, &mut r).members()[0].clone()]).unwrap();
        let b = orthant_bound(&a, &f).unwrap();
        let image = |rho: &[Q]| retract(&scale_along_flag(&a, &f, &ScalingVector::from_root_coords(rho).unwrap()).unwrap()).unwrap().final_form;
        let at_t = image(&b.t_sq);
        let below: Vec<Q> = b.t_sq.iter().map(|t| t * unit_rational(&mut r)).collect();
        prop_assert_eq!(image(&below), at_t.clone());
        prop_assert!(respects(&brute_minimum(&at_t).1, &f));
    }
}

/// The closed-form recurrence is not enough for the second member of a
/// three-dimensional flag: below it the retraction takes two different
/// values, and at it the flag is not part of the minima flag.
#[test]
fn recurrence_bound_can_be_too_large_for_deeper_members() {
    let a = GramForm::from_ints(&[&[3, 1, -2], &[1, 5, -1], &[-2, -1, 9]]).unwrap();
    let f = RationalFlag::from_spans(3, &[vec![vec![2, 1, -3]], vec![vec![2, 0, -3], vec![0, 1, 0]]]).unwrap();
    let b = orthant_bound(&a, &f).unwrap();
    assert_eq!(b.t_sq, vec![q(29, 23232), q(38841, 113680)]);
    let image = |rho: Vec<Q>| {
        retract(&scale_along_flag(&a, &f, &ScalingVector::from_root_coords(&rho).unwrap()).unwrap()).unwrap().final_form
    };
    let at_t = image(b.t_sq.clone());
    let below = image(vec![b.t_sq[0].clone(), &b.t_sq[1] * q(9, 25)]);
    assert_ne!(at_t, below);
    assert!(!flag_in_minima_flag(&a, &f, &b.t_sq).unwrap());
    // The certified bound repairs it.
    assert!(flag_in_minima_flag(&a, &f, &b.certified_t_sq).unwrap());
    let c = &b.certified_t_sq;
    assert_eq!(image(c.clone()), image(vec![&c[0] * q(1, 3), &c[1] * q(2, 7)]));
}
