use medianshape::chain::{mass, shares_boundary, snap_polyline};
use medianshape::complex::build_grid_2d;
use medianshape::flatnorm::flat_norm;
use medianshape::lp::SolveOptions;
use medianshape::median::{
    brute_force_median, envelope_containment, evaluate_objective, interpolation_sweep, solve_median, MedianProblem,
};
use medianshape::{Chain, Complex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_chain(rng: &mut ChaCha8Rng, len: usize) -> Chain {
    Chain::new(1, (0..len).map(|_| [0, 0, 1, -1][rng.gen_range(0..4)]).collect())
}

#[test]
fn lp_matches_exhaustive_oracle_on_tiny_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let shapes = [(1, 1), (2, 1), (1, 2)];
    for round in 0..24 {
        let (nx, ny) = shapes[round % shapes.len()];
        let k: Complex = build_grid_2d(nx, ny, 1.0, 0.8).unwrap();
        assert!(k.count(1) <= 12 && k.count(2) <= 6);
        let n_inputs = 2 + round % 2;
        let inputs: Vec<Chain> = (0..n_inputs).map(|_| random_chain(&mut rng, k.count(1))).collect();
        let lambda = [0.1, 0.5, 1.0, 2.0][rng.gen_range(0..4)];
        let mu = [0.0, 0.05][rng.gen_range(0..2)];
        let prob = MedianProblem::new(&k, inputs).with_lambda(lambda).with_mu(mu);
        let lp = solve_median(&prob).expect("integral optimum");
        let brute = brute_force_median(&prob, 1, 12).unwrap();
        assert!(brute.objective >= lp.objective);
        if lp.per_input.iter().all(|(_, s)| s.coeffs().iter().all(|c| c.abs() <= 1)) {
            assert_eq!(brute.objective, lp.objective, "round {round}");
        }
        assert_eq!(evaluate_objective(&prob, &lp.t_hat, &lp.per_input, 12).unwrap(), lp.objective);
    }
}

#[test]
fn permuting_inputs_keeps_the_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k: Complex = build_grid_2d(3, 3, 1.0, 1.0).unwrap();
    for _ in 0..6 {
        let inputs: Vec<Chain> = (0..3).map(|_| random_chain(&mut rng, k.count(1))).collect();
        let alpha = vec![0.2, 0.3, 0.5];
        let prob = MedianProblem::new(&k, inputs.clone()).with_lambda(0.4).with_alpha(alpha.clone());
        let rev = MedianProblem::new(&k, inputs.into_iter().rev().collect())
            .with_lambda(0.4)
            .with_alpha(alpha.into_iter().rev().collect());
        assert_eq!(solve_median(&prob).unwrap().objective, solve_median(&rev).unwrap().objective);
    }
}

#[test]
fn larger_mu_never_increases_median_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let k: Complex = build_grid_2d(3, 3, 1.0, 1.0).unwrap();
    for _ in 0..4 {
        let inputs: Vec<Chain> = (0..2).map(|_| random_chain(&mut rng, k.count(1))).collect();
        let mut last = f64::INFINITY;
        for mu in [0.0, 0.01, 0.1, 0.5, 2.0] {
            let prob = MedianProblem::new(&k, inputs.clone()).with_lambda(0.5).with_mu(mu);
            let m = mass(&k, &solve_median(&prob).unwrap().t_hat).unwrap();
            assert!(m <= last + 1e-12, "mu {mu}: {m} > {last}");
            last = m;
        }
    }
}

#[test]
fn anchor_point_bounds_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let k: Complex = build_grid_2d(3, 2, 1.0, 1.0).unwrap();
    for _ in 0..6 {
        let inputs: Vec<Chain> = (0..3).map(|_| random_chain(&mut rng, k.count(1))).collect();
        let prob = MedianProblem::new(&k, inputs.clone()).with_lambda(0.3).with_mu(0.01);
        let sol = solve_median(&prob).unwrap();
        let zero_s = Chain::zero(2, k.count(2));
        let anchor: Vec<(Chain, Chain)> = inputs.iter().map(|t| (inputs[0].sub(t), zero_s.clone())).collect();
        assert!(sol.objective <= evaluate_objective(&prob, &inputs[0], &anchor, 12).unwrap());
    }
}

fn boundary_sharing_pair(rng: &mut ChaCha8Rng, k: &Complex, size: f64) -> (Chain, Chain) {
    let start = [0.0, rng.gen_range(0.2..0.8) * size];
    let end = [size, rng.gen_range(0.2..0.8) * size];
    let mut curve = |lo: f64, hi: f64| {
        let mid: Vec<[f64; 2]> = (1..4)
            .map(|i| [size * i as f64 / 4.0, rng.gen_range(lo..hi) * size])
            .collect();
        let mut pts = vec![start];
        pts.extend(mid);
        pts.push(end);
        snap_polyline(k, &pts).unwrap()
    };
    (curve(0.0, 0.45), curve(0.55, 1.0))
}

#[test]
fn medians_of_boundary_sharing_curves_stay_in_the_envelope() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let k: Complex = build_grid_2d(5, 5, 5.0, 5.0).unwrap();
    for _ in 0..6 {
        let (a, b) = boundary_sharing_pair(&mut rng, &k, 5.0);
        assert!(shares_boundary(&k, &a, &b).unwrap());
        for (lambda, mu) in [(1e-3, 1e-5), (0.2, 0.0), (1.0, 0.01)] {
            let prob = MedianProblem::new(&k, vec![a.clone(), b.clone()]).with_lambda(lambda).with_mu(mu);
            let sol = solve_median(&prob).unwrap();
            let inside = envelope_containment(&prob, &sol.t_hat, &SolveOptions::default()).unwrap();
            assert_eq!(inside, vec![true, true], "lambda {lambda} mu {mu}");
        }
    }
}

#[test]
fn sweep_endpoints_and_intermediate_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let k: Complex = build_grid_2d(4, 4, 4.0, 4.0).unwrap();
    let (a, b) = boundary_sharing_pair(&mut rng, &k, 4.0);
    let prob = MedianProblem::new(&k, vec![a.clone(), b.clone()]).with_lambda(0.25).with_mu(0.0);
    let steps = 6;
    let sweep = interpolation_sweep(&prob, steps, &SolveOptions::default()).unwrap();
    assert_eq!(sweep.len(), steps + 1);
    assert_eq!(sweep[0].1.t_hat, a);
    assert_eq!(sweep[steps].1.t_hat, b);
    let zero_s = Chain::zero(2, k.count(2));
    let ab = flat_norm(&k, &a.sub(&b), 0.25).unwrap();
    let ba = flat_norm(&k, &b.sub(&a), 0.25).unwrap();
    for (alpha, sol) in &sweep {
        let p = prob.clone().with_alpha(alpha.clone());
        let at_a = evaluate_objective(&p, &a, &[(Chain::zero(1, a.len()), zero_s.clone()), (ab.x.clone(), ab.s.clone())], 12)
            .unwrap();
        let at_b = evaluate_objective(&p, &b, &[(ba.x.clone(), ba.s.clone()), (Chain::zero(1, a.len()), zero_s.clone())], 12)
            .unwrap();
        assert!(sol.objective <= at_a.max(at_b));
    }
}
