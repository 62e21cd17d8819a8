use proptest::prelude::*;
use rearrkit_core::functionals::{comonotonicity_check, hl_functional, hl_omega_functional, riesz_functional, verify_hl, Kernel};
use rearrkit_core::measure::{distribution, enumerate_reflections, Domain, DomainKind, GridFunction};
use rearrkit_core::rearrange::{is_radially_ordered, is_symmetric_decreasing, polarize, symmetric_decreasing_rearrangement};
use rearrkit_core::supermodular::{random_supermodular, uniform_axes, Family};

fn domain_strategy() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (2usize..=40).prop_map(|n| Domain::interval(1.5, n).unwrap()),
        (2usize..=40).prop_map(|n| Domain::circle(3.0, n).unwrap()),
        (2usize..=7).prop_map(|n| Domain::square(1.0, n).unwrap()),
    ]
}

/// Values on a coarse lattice so that ties are common.
fn function_on(domain: Domain) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(prop_oneof![Just(0.0), (0u8..=8).prop_map(|k| k as f64 / 8.0)], domain.len())
        .prop_map(move |v| GridFunction::new(domain, v).unwrap())
}

fn function() -> impl Strategy<Value = GridFunction> {
    domain_strategy().prop_flat_map(function_on)
}

fn pair() -> impl Strategy<Value = (GridFunction, GridFunction)> {
    domain_strategy().prop_flat_map(|d| (function_on(d), function_on(d)))
}

proptest! {
    #[test]
    fn rearrangement_is_equimeasurable(u in function()) {
        let star = symmetric_decreasing_rearrangement(&u);
        prop_assert_eq!(distribution(&u), distribution(&star));
        prop_assert_eq!(u.sorted_values(), star.sorted_values());
    }

    #[test]
    fn rearrangement_is_idempotent_and_radial(u in function()) {
        let star = symmetric_decreasing_rearrangement(&u);
        prop_assert_eq!(symmetric_decreasing_rearrangement(&star), star.clone());
        prop_assert!(is_radially_ordered(&star));
        prop_assert!(is_symmetric_decreasing(&star));
    }

    #[test]
    fn rearrangement_preserves_order((u, v) in pair()) {
        let lower = GridFunction::new(*u.domain(), u.values().iter().zip(v.values()).map(|(a, b)| a.min(*b)).collect()).unwrap();
        let (ls, us) = (symmetric_decreasing_rearrangement(&lower), symmetric_decreasing_rearrangement(&u));
        prop_assert!(ls.values().iter().zip(us.values()).all(|(a, b)| a <= b));
    }

    #[test]
    fn rearrangement_contracts_l1((u, v) in pair()) {
        let d = symmetric_decreasing_rearrangement(&u).l1_distance(&symmetric_decreasing_rearrangement(&v)).unwrap();
        prop_assert!(d <= u.l1_distance(&v).unwrap() + 1e-12);
    }

    #[test]
    fn polarization_is_equimeasurable_and_contracts((u, v) in pair(), pick in any::<prop::sample::Index>()) {
        let family = enumerate_reflections(u.domain());
        prop_assume!(!family.is_empty());
        let sigma = &family[pick.index(family.len())];
        let (up, vp) = (polarize(&u, sigma).unwrap(), polarize(&v, sigma).unwrap());
        prop_assert_eq!(up.sorted_values(), u.sorted_values());
        prop_assert_eq!(polarize(&up, sigma).unwrap(), up.clone());
        prop_assert!(up.l1_distance(&vp).unwrap() <= u.l1_distance(&v).unwrap() + 1e-12);
        let star = symmetric_decreasing_rearrangement(&u);
        prop_assert!(up.l1_distance(&star).unwrap() <= u.l1_distance(&star).unwrap() + 1e-12);
    }

    #[test]
    fn hl_inequality_and_omega_identity((u, v) in pair(), seed in any::<u64>(), fam in 0usize..3) {
        let f = random_supermodular(seed, 2, &uniform_axes(2, 5, 1.0), Family::ALL[fam]);
        let us = [u, v];
        let r = verify_hl(&f, &us, 1e-9).unwrap();
        prop_assert!(r.holds, "{:?}", r);
        let stars: Vec<_> = us.iter().map(symmetric_decreasing_rearrangement).collect();
        let steps: Vec<_> = us.iter().map(GridFunction::to_step).collect();
        let omega = hl_omega_functional(&f, &steps).unwrap();
        prop_assert!((hl_functional(&f, &stars).unwrap() - omega).abs() <= 1e-12 * (1.0 + omega.abs()));
    }

    #[test]
    fn strict_equality_forces_comonotone((u, v) in pair()) {
        let f = random_supermodular(1, 2, &uniform_axes(2, 2, 1.0), Family::ProductSum);
        let us = [u.clone(), v.clone()];
        let r = verify_hl(&f, &us, 1e-9).unwrap();
        // A bilinear product has Delta_12 > 0 on its single box.
        if r.slack <= 1e-12 {
            prop_assert!(comonotonicity_check(&u, &v, 0).unwrap().holds);
        }
    }

    #[test]
    fn riesz_inequality_on_the_circle((u, v) in (2usize..=16).prop_flat_map(|n| {
        let d = Domain::circle(2.0, n).unwrap();
        (function_on(d), function_on(d))
    }), seed in any::<u64>(), fam in 0usize..3, alpha in 0.1f64..3.0) {
        prop_assume!(u.domain().kind() == DomainKind::Circle);
        let f = random_supermodular(seed, 2, &uniform_axes(2, 5, 1.0), Family::ALL[fam]);
        let k = [Kernel::exp(alpha).unwrap()];
        let us = [u, v];
        let stars: Vec<_> = us.iter().map(symmetric_decreasing_rearrangement).collect();
        let (lhs, rhs) = (riesz_functional(&f, &us, &k).unwrap(), riesz_functional(&f, &stars, &k).unwrap());
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()));
    }
}
