use medianshape::chain::{apply_boundary, mass};
use medianshape::complex::build_grid_2d;
use medianshape::flatnorm::{brute_force_flat_norm, flat_norm};
use medianshape::{rationalize, Chain, Complex, LpScalar, Rational};
use proptest::prelude::*;

/// Grids with at most eight triangles.
fn small_grid() -> impl Strategy<Value = Complex> {
    prop_oneof![Just((1, 1)), Just((2, 1)), Just((1, 2)), Just((3, 1)), Just((2, 2)), Just((4, 1))]
        .prop_map(|(nx, ny)| build_grid_2d(nx, ny, 1.0, 0.75).unwrap())
}

fn grid_and_chain(range: i64) -> impl Strategy<Value = (Complex, Chain)> {
    small_grid().prop_flat_map(move |k| {
        let m = k.count(1);
        (Just(k), proptest::collection::vec(-range..=range, m).prop_map(|c| Chain::new(1, c)))
    })
}

fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.05), Just(0.5), Just(1.0), Just(2.5), Just(10.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn value_is_monotone_in_lambda((k, t) in grid_and_chain(2), a in lambda(), b in lambda()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(flat_norm(&k, &t, lo).unwrap().value <= flat_norm(&k, &t, hi).unwrap().value);
    }

    #[test]
    fn value_bounded_by_mass_and_symmetric((k, t) in grid_and_chain(2), lam in lambda()) {
        let d = flat_norm(&k, &t, lam).unwrap();
        let w: Vec<Rational> = k.volumes(1).iter().map(|v| rationalize(*v, 12).unwrap()).collect();
        let m: Rational = t.nonzeros().map(|(i, c)| &w[i] * Rational::from_integer(c.abs().into())).sum();
        prop_assert!(d.value <= m);
        prop_assert!(LpScalar::to_f64(&d.value) <= mass(&k, &t).unwrap() + 1e-9);
        prop_assert_eq!(flat_norm(&k, &t.scaled(-1), lam).unwrap().value, d.value.clone());
        // decomposition identity
        let bs = apply_boundary(&k, &d.s).unwrap();
        prop_assert_eq!(d.x.add(&bs), t);
    }

    #[test]
    fn matches_exhaustive_search((k, t) in grid_and_chain(1), lam in lambda()) {
        let lp = flat_norm(&k, &t, lam).unwrap();
        let brute = brute_force_flat_norm(&k, &t, lam, 2, 12).unwrap();
        prop_assert!(brute.value >= lp.value);
        if lp.s.coeffs().iter().all(|c| c.abs() <= 2) {
            prop_assert_eq!(brute.value, lp.value);
        }
    }
}

#[test]
fn boundary_of_region_switches_regime_at_isoperimetric_ratio() {
    // Two triangles forming the unit square: perimeter 4, area 1.
    let k: Complex = build_grid_2d(1, 1, 1.0, 1.0).unwrap();
    let t = apply_boundary(&k, &Chain::new(2, vec![1, 1])).unwrap();
    assert_eq!(flat_norm(&k, &t, 3.9).unwrap().s.coeffs(), &[1, 1]);
    assert!(flat_norm(&k, &t, 4.1).unwrap().s.is_zero());
    let at = flat_norm(&k, &t, 4.0).unwrap();
    assert_eq!(at.value, Rational::from_integer(4.into()));
}
