//! Simplicial multiscale flat norm.
//!
//! For a p-chain `t` the flat norm at scale `lambda` is the minimum of
//! `mass(x) + lambda * mass(s)` over integer decompositions `t = x + B s`,
//! where `B` is the (p+1)-boundary matrix. The absolute values are linearized
//! by splitting `x` and `s` into nonnegative parts, giving the program
//!
//! ```text
//! min  [w w lv lv] . [x+ x- s+ s-]
//! s.t. x+ - x- + B s+ - B s- = t
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::chain::Chain;
use crate::complex::SimplicialComplex;
use crate::error::{FlatNormError, FractionalOptimum};
use crate::lp::{is_integral, solve_lp_with, LpSolution, LpStatus, SolveOptions, StandardFormLp};
use crate::scalar::{rationalize, LpScalar, Real};
use crate::Rational;

/// Optimal decomposition `t = x + B s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatNormDecomposition<S> {
    pub x: Chain,
    pub s: Chain,
    /// `mass(x) + lambda * mass(s)` with rationalized volumes.
    pub value: S,
    pub lambda: f64,
}

/// Volumes of the q-simplices as LP scalars, rounded to `sig_digits`.
pub(crate) fn lp_volumes<R: Real, S: LpScalar>(
    k: &SimplicialComplex<R>,
    q: usize,
    sig_digits: u32,
) -> Result<Vec<S>, crate::error::RationalizeError> {
    k.volumes(q)
        .iter()
        .map(|v| Ok(S::from_rational(&rationalize(v.to_f64().unwrap_or(f64::NAN), sig_digits)?)))
        .collect()
}

pub(crate) fn lp_param<S: LpScalar>(v: f64, sig_digits: u32) -> Result<S, crate::error::RationalizeError> {
    Ok(S::from_rational(&rationalize(v, sig_digits)?))
}

pub(crate) fn fractional<S: LpScalar>(sol: &LpSolution<S>) -> Box<FractionalOptimum> {
    Box::new(FractionalOptimum {
        x: sol.x.iter().map(LpScalar::to_rational).collect(),
        objective: sol.objective.to_rational(),
    })
}

/// Splits `[plus.. minus..]` variables starting at `offset` into an integer
/// vector `plus - minus`.
pub(crate) fn recombine<S: LpScalar>(x: &[S], offset: usize, len: usize) -> Vec<i64> {
    (0..len)
        .map(|i| x[offset + i].round_to_i64() - x[offset + len + i].round_to_i64())
        .collect()
}

fn check_lambda(lambda: f64) -> Result<(), FlatNormError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(FlatNormError::BadLambda(lambda));
    }
    Ok(())
}

/// Assembles the flat norm program for the p-chain `t`.
pub fn assemble_flat_norm_lp<R: Real, S: LpScalar>(
    k: &SimplicialComplex<R>,
    t: &Chain,
    lambda: f64,
    sig_digits: u32,
) -> Result<StandardFormLp<S>, FlatNormError> {
    check_lambda(lambda)?;
    t.check_on(k)?;
    let p = t.dim();
    let b = k
        .boundary_matrix(p)
        .map_err(|_| crate::error::ChainError::MissingDimension(p + 1))?;
    let (m, n) = (b.rows(), b.cols());
    let w: Vec<S> = lp_volumes(k, p, sig_digits)?;
    let lam: S = lp_param(lambda, sig_digits)?;
    let v: Vec<S> = lp_volumes::<R, S>(k, p + 1, sig_digits)?
        .into_iter()
        .map(|x| lam.clone() * x)
        .collect();

    let mut c = Vec::with_capacity(2 * m + 2 * n);
    c.extend(w.iter().cloned());
    c.extend(w.iter().cloned());
    c.extend(v.iter().cloned());
    c.extend(v.iter().cloned());

    let mut columns: Vec<Vec<(usize, S)>> = Vec::with_capacity(2 * m + 2 * n);
    columns.extend((0..m).map(|i| vec![(i, S::one())]));
    columns.extend((0..m).map(|i| vec![(i, -S::one())]));
    for sign in [1i64, -1] {
        for col in b.columns() {
            columns.push(col.iter().map(|&(i, e)| (i, S::from_i64(sign * i64::from(e)))).collect());
        }
    }
    let rhs: Vec<S> = t.coeffs().iter().map(|&v| S::from_i64(v)).collect();
    Ok(StandardFormLp::new(m, c, columns, rhs)?)
}

/// Exact flat norm decomposition with default options.
pub fn flat_norm<R: Real>(
    k: &SimplicialComplex<R>,
    t: &Chain,
    lambda: f64,
) -> Result<FlatNormDecomposition<Rational>, FlatNormError> {
    flat_norm_with(k, t, lambda, &SolveOptions::default())
}

/// Solves the flat norm program over the scalar `S`. A fractional optimum is
/// reported as [`FlatNormError::Fractional`], never rounded.
pub fn flat_norm_with<R: Real, S: LpScalar>(
    k: &SimplicialComplex<R>,
    t: &Chain,
    lambda: f64,
    opts: &SolveOptions,
) -> Result<FlatNormDecomposition<S>, FlatNormError> {
    let lp: StandardFormLp<S> = assemble_flat_norm_lp(k, t, lambda, opts.sig_digits)?;
    let sol = solve_lp_with(&lp, &opts.simplex)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(FlatNormError::Unexpected("infeasible")),
        LpStatus::Unbounded => return Err(FlatNormError::Unexpected("unbounded")),
    }
    if !is_integral(&sol)? {
        return Err(FlatNormError::Fractional(fractional(&sol)));
    }
    let (m, n) = (k.count(t.dim()), k.count(t.dim() + 1));
    let x = Chain::new(t.dim(), recombine(&sol.x, 0, m));
    let s = Chain::new(t.dim() + 1, recombine(&sol.x, 2 * m, n));
    Ok(FlatNormDecomposition { x, s, value: sol.objective, lambda })
}

/// Largest search space the exhaustive oracle accepts.
pub const BRUTE_FORCE_GUARD: f64 = 1e7;

/// Integer accumulator for the exhaustive searches: costs are rescaled to a
/// common denominator so that candidates are compared without rational
/// arithmetic.
pub(crate) struct ScaledCosts {
    pub denom: BigInt,
    pub weights: Vec<i128>,
}

impl ScaledCosts {
    /// Rescales rationals to integers over their common denominator; `None`
    /// when the numerators times `headroom` would not fit in an `i128`.
    pub fn new(values: &[Rational], headroom: u64) -> Option<Self> {
        let denom = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let limit = BigInt::from(i128::MAX) / BigInt::from(headroom.max(1));
        let mut weights = Vec::with_capacity(values.len());
        for v in values {
            let scaled = v.numer() * (&denom / v.denom());
            if scaled.abs() > limit {
                return None;
            }
            weights.push(scaled.to_i128()?);
        }
        Some(Self { denom, weights })
    }

    pub fn to_rational(&self, total: i128) -> Rational {
        Rational::new(BigInt::from(total), self.denom.clone())
    }
}

/// Exhaustive minimum over all `s` with `|s_j| <= coeff_bound`; `x` is then
/// determined as `t - B s`. Exact rational result.
pub fn brute_force_flat_norm<R: Real>(
    k: &SimplicialComplex<R>,
    t: &Chain,
    lambda: f64,
    coeff_bound: i64,
    sig_digits: u32,
) -> Result<FlatNormDecomposition<Rational>, FlatNormError> {
    check_lambda(lambda)?;
    t.check_on(k)?;
    let p = t.dim();
    let b = k
        .boundary_matrix(p)
        .map_err(|_| crate::error::ChainError::MissingDimension(p + 1))?;
    let (m, n) = (b.rows(), b.cols());
    let width = 2 * coeff_bound.max(0) + 1;
    let space = (width as f64).powi(n as i32);
    if space > BRUTE_FORCE_GUARD {
        return Err(FlatNormError::SearchTooLarge(space));
    }

    let w: Vec<Rational> = lp_volumes(k, p, sig_digits)?;
    let lam: Rational = lp_param(lambda, sig_digits)?;
    let v: Vec<Rational> = lp_volumes::<R, Rational>(k, p + 1, sig_digits)?
        .into_iter()
        .map(|x| &lam * x)
        .collect();
    let all: Vec<Rational> = w.iter().chain(&v).cloned().collect();
    let max_coeff = t.coeffs().iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
        + (coeff_bound.unsigned_abs() * (p as u64 + 2));
    let headroom = (m + n) as u64 * (max_coeff + 1).max(coeff_bound.unsigned_abs() + 1);
    let costs = ScaledCosts::new(&all, headroom).ok_or(FlatNormError::SearchTooLarge(space))?;
    let (wi, vi) = costs.weights.split_at(m);

    let mut s = vec![-coeff_bound; n];
    let mut best: Option<(i128, Vec<i64>)> = None;
    loop {
        let mut x = t.coeffs().to_vec();
        let mut total: i128 = 0;
        for (j, &sj) in s.iter().enumerate() {
            if sj == 0 {
                continue;
            }
            total += vi[j] * i128::from(sj.abs());
            for &(i, e) in b.column(j) {
                x[i] -= i64::from(e) * sj;
            }
        }
        total += x.iter().zip(wi).map(|(&xi, &wv)| wv * i128::from(xi.abs())).sum::<i128>();
        if best.as_ref().is_none_or(|(bv, _)| total < *bv) {
            best = Some((total, s.clone()));
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == n {
                let (total, s) = best.expect("at least one candidate");
                let s_chain = Chain::new(p + 1, s);
                let x = t.sub(&Chain::new(p, b.apply(s_chain.coeffs())));
                return Ok(FlatNormDecomposition { x, s: s_chain, value: costs.to_rational(total), lambda });
            }
            if s[pos] < coeff_bound {
                s[pos] += 1;
                break;
            }
            s[pos] = -coeff_bound;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{apply_boundary, mass};
    use crate::complex::{build_grid_2d, ComplexBuilder};
    use crate::Complex;
    use num_traits::Zero;

    fn one_triangle() -> Complex {
        let mut b = ComplexBuilder::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        b.add(&[0, 1, 2]);
        b.build(true).unwrap()
    }

    fn r(v: f64) -> Rational {
        rationalize(v, 12).unwrap()
    }

    #[test]
    fn zero_chain_has_zero_norm() {
        let k = build_grid_2d(2, 2, 1.0, 1.0).unwrap();
        let t = Chain::zero(1, k.count(1));
        let d = flat_norm(&k, &t, 0.5).unwrap();
        assert!(d.x.is_zero() && d.s.is_zero());
        assert!(d.value.is_zero());
        assert!(brute_force_flat_norm(&k, &t, 0.5, 1, 12).unwrap().value.is_zero());
    }

    #[test]
    fn triangle_boundary_in_both_regimes() {
        let k = one_triangle();
        let t = apply_boundary(&k, &Chain::new(2, vec![1])).unwrap();
        let perimeter = r(1.0) + r(1.0) + r(2f64.sqrt());
        let area = r(0.5);
        // perimeter / area = 4 + 2 sqrt 2 ~ 6.83
        let big = flat_norm(&k, &t, 10.0).unwrap();
        assert_eq!(big.x, t);
        assert!(big.s.is_zero());
        assert_eq!(big.value, perimeter);

        let small = flat_norm(&k, &t, 2.0).unwrap();
        assert!(small.x.is_zero());
        assert_eq!(small.s.coeffs(), &[1]);
        assert_eq!(small.value, r(2.0) * area);

        for lambda in [10.0, 2.0] {
            let brute = brute_force_flat_norm(&k, &t, lambda, 2, 12).unwrap();
            assert_eq!(brute.value, flat_norm(&k, &t, lambda).unwrap().value);
        }
    }

    #[test]
    fn decomposition_identity_and_mass_bound() {
        let k = build_grid_2d(3, 2, 1.0, 1.0).unwrap();
        let coeffs: Vec<i64> = (0..k.count(1)).map(|i| [0, 1, -1, 0, 2][i % 5]).collect();
        let t = Chain::new(1, coeffs);
        let d = flat_norm(&k, &t, 0.3).unwrap();
        let b = k.boundary_matrix(1).unwrap();
        assert_eq!(d.x.add(&Chain::new(1, b.apply(d.s.coeffs()))), t);
        let m: Rational = lp_volumes::<f64, Rational>(&k, 1, 12)
            .unwrap()
            .iter()
            .zip(t.coeffs())
            .map(|(w, c)| w * Rational::from_integer(c.abs().into()))
            .sum();
        assert!(d.value <= m);
        assert!((LpScalar::to_f64(&d.value) - mass(&k, &d.x).unwrap() - 0.3 * mass(&k, &d.s).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let k = one_triangle();
        let t = Chain::zero(1, 3);
        assert!(matches!(flat_norm(&k, &t, -1.0), Err(FlatNormError::BadLambda(_))));
        assert!(matches!(flat_norm(&k, &Chain::zero(1, 2), 1.0), Err(FlatNormError::Chain(_))));
        // no 3-simplices to fill with
        assert!(matches!(flat_norm(&k, &Chain::zero(2, 1), 1.0), Err(FlatNormError::Chain(_))));
        let big = build_grid_2d(4, 4, 1.0, 1.0).unwrap();
        assert!(matches!(
            brute_force_flat_norm(&big, &Chain::zero(1, big.count(1)), 1.0, 2, 12),
            Err(FlatNormError::SearchTooLarge(_))
        ));
    }

    #[test]
    fn float_scalar_matches_exact() {
        let k = build_grid_2d(2, 2, 1.0, 1.0).unwrap();
        let t = apply_boundary(&k, &Chain::new(2, vec![1, 1, 0, 0, 0, 0, 1, 1])).unwrap();
        let exact = flat_norm(&k, &t, 1.0).unwrap();
        let float: FlatNormDecomposition<f64> = flat_norm_with(&k, &t, 1.0, &SolveOptions::default()).unwrap();
        assert!((LpScalar::to_f64(&exact.value) - float.value).abs() < 1e-9);
    }
}
