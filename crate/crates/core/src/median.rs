//! Median shapes of integer chains.
//!
//! Given input p-chains `t_1..t_N`, the median `t` minimizes
//! `mu mass(t) + sum_h alpha_h F(t - t_h)`, where `F` is the flat norm at
//! scale `lambda`. Writing `t - t_h = r_h + B s_h` and splitting every chain
//! into nonnegative parts gives one standard-form program with variables
//!
//! ```text
//! [t+ t- | r1+ r1- s1+ s1- | ... | rN+ rN- sN+ sN-]
//! ```
//!
//! and, for each input `h`, the block of rows
//! `t+ - t- - r_h+ + r_h- - B s_h+ + B s_h- = t_h`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::chain::{shares_boundary, Chain};
use crate::complex::{BoundaryMatrix, SimplicialComplex};
use crate::error::{ChainError, MedianError};
use crate::flatnorm::{self, fractional, lp_param, lp_volumes, recombine, ScaledCosts, BRUTE_FORCE_GUARD};
use crate::lp::{is_integral, solve_lp_with, LpStatus, SolveOptions, StandardFormLp};
use crate::scalar::{LpScalar, Real};
use crate::Rational;

/// Default flat norm scale.
pub const DEFAULT_LAMBDA: f64 = 1e-3;
/// Default mass regularization weight.
pub const DEFAULT_MU: f64 = 1e-5;
/// How many times the envelope search halves `lambda` before giving up.
pub const ENVELOPE_HALVINGS: usize = 40;

/// Inputs and parameters of a median problem.
#[derive(Debug, Clone)]
pub struct MedianProblem<'a, R> {
    pub complex: &'a SimplicialComplex<R>,
    pub inputs: Vec<Chain>,
    pub lambda: f64,
    pub mu: f64,
    pub alpha: Vec<f64>,
}

/// Solved median with the per-input decompositions `t_hat - t_h = r_h + B s_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianSolution<S> {
    pub t_hat: Chain,
    /// `(r_h, s_h)` for each input.
    pub per_input: Vec<(Chain, Chain)>,
    pub objective: S,
    pub integral: bool,
}

impl<'a, R: Real> MedianProblem<'a, R> {
    /// Problem with default `lambda`, `mu` and unit weights.
    pub fn new(complex: &'a SimplicialComplex<R>, inputs: Vec<Chain>) -> Self {
        let n = inputs.len();
        Self { complex, inputs, lambda: DEFAULT_LAMBDA, mu: DEFAULT_MU, alpha: vec![1.0; n] }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_alpha(mut self, alpha: Vec<f64>) -> Self {
        self.alpha = alpha;
        self
    }

    /// Dimension of the input chains.
    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Chain::dim)
    }

    pub fn validate(&self) -> Result<(), MedianError> {
        let first = self.inputs.first().ok_or(MedianError::NoInputs)?;
        for t in &self.inputs {
            if t.dim() != first.dim() {
                return Err(ChainError::DimensionMismatch(first.dim(), t.dim()).into());
            }
            t.check_on(self.complex)?;
        }
        if self.complex.count(first.dim() + 1) == 0 {
            return Err(ChainError::MissingDimension(first.dim() + 1).into());
        }
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu)] {
            if !v.is_finite() || v < 0.0 {
                return Err(MedianError::BadParameter(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if self.alpha.len() != self.inputs.len() {
            return Err(MedianError::AlphaCount { expected: self.inputs.len(), got: self.alpha.len() });
        }
        if let Some(a) = self.alpha.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(MedianError::BadParameter(format!("weights must be finite and nonnegative, got {a}")));
        }
        Ok(())
    }

    fn boundary(&self) -> BoundaryMatrix {
        self.complex.boundary_matrix(self.dim()).expect("validated dimension")
    }
}

/// Rationalized objective data shared by the solver, the evaluator and the
/// oracle.
struct Weights<S> {
    /// `mu w_i`
    t: Vec<S>,
    /// `alpha_h w_i`
    r: Vec<Vec<S>>,
    /// `alpha_h lambda v_j`
    s: Vec<Vec<S>>,
}

fn weights<R: Real, S: LpScalar>(prob: &MedianProblem<'_, R>, sig: u32) -> Result<Weights<S>, MedianError> {
    let p = prob.dim();
    let w: Vec<S> = lp_volumes(prob.complex, p, sig)?;
    let v: Vec<S> = lp_volumes(prob.complex, p + 1, sig)?;
    let mu: S = lp_param(prob.mu, sig)?;
    let lambda: S = lp_param(prob.lambda, sig)?;
    let mut r = Vec::with_capacity(prob.inputs.len());
    let mut s = Vec::with_capacity(prob.inputs.len());
    for &a in &prob.alpha {
        let a: S = lp_param(a, sig)?;
        let al = a.clone() * lambda.clone();
        r.push(w.iter().map(|x| a.clone() * x.clone()).collect());
        s.push(v.iter().map(|x| al.clone() * x.clone()).collect());
    }
    Ok(Weights { t: w.iter().map(|x| mu.clone() * x.clone()).collect(), r, s })
}

/// Builds the standard-form median program.
pub fn assemble_median_lp<R: Real, S: LpScalar>(
    prob: &MedianProblem<'_, R>,
    sig_digits: u32,
) -> Result<StandardFormLp<S>, MedianError> {
    prob.validate()?;
    let b = prob.boundary();
    let (m, n) = (b.rows(), b.cols());
    let big_n = prob.inputs.len();
    let wts: Weights<S> = weights(prob, sig_digits)?;

    let n_vars = 2 * m + big_n * (2 * m + 2 * n);
    let mut c = Vec::with_capacity(n_vars);
    let mut columns: Vec<Vec<(usize, S)>> = Vec::with_capacity(n_vars);
    let one = S::one();

    for sign in [1i64, -1] {
        c.extend(wts.t.iter().cloned());
        let e = S::from_i64(sign);
        columns.extend((0..m).map(|i| (0..big_n).map(|h| (h * m + i, e.clone())).collect()));
    }
    for h in 0..big_n {
        let row0 = h * m;
        c.extend(wts.r[h].iter().cloned());
        c.extend(wts.r[h].iter().cloned());
        c.extend(wts.s[h].iter().cloned());
        c.extend(wts.s[h].iter().cloned());
        columns.extend((0..m).map(|i| vec![(row0 + i, -one.clone())]));
        columns.extend((0..m).map(|i| vec![(row0 + i, one.clone())]));
        for sign in [-1i64, 1] {
            for col in b.columns() {
                columns.push(col.iter().map(|&(i, e)| (row0 + i, S::from_i64(sign * i64::from(e)))).collect());
            }
        }
    }
    let rhs: Vec<S> = prob
        .inputs
        .iter()
        .flat_map(|t| t.coeffs().iter().map(|&v| S::from_i64(v)))
        .collect();
    Ok(StandardFormLp::new(big_n * m, c, columns, rhs)?)
}

/// Exact median with default solver options.
pub fn solve_median<R: Real>(prob: &MedianProblem<'_, R>) -> Result<MedianSolution<Rational>, MedianError> {
    solve_median_with(prob, &SolveOptions::default())
}

/// Solves the median program over the scalar `S`. Fractional optima are
/// reported as [`MedianError::Fractional`] with the full vertex solution.
pub fn solve_median_with<R: Real, S: LpScalar>(
    prob: &MedianProblem<'_, R>,
    opts: &SolveOptions,
) -> Result<MedianSolution<S>, MedianError> {
    let lp: StandardFormLp<S> = assemble_median_lp(prob, opts.sig_digits)?;
    let sol = solve_lp_with(&lp, &opts.simplex)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(MedianError::Unexpected("infeasible")),
        LpStatus::Unbounded => return Err(MedianError::Unexpected("unbounded")),
    }
    if !is_integral(&sol)? {
        return Err(MedianError::Fractional(fractional(&sol)));
    }
    let p = prob.dim();
    let (m, n) = (prob.complex.count(p), prob.complex.count(p + 1));
    let t_hat = Chain::new(p, recombine(&sol.x, 0, m));
    let per_input = (0..prob.inputs.len())
        .map(|h| {
            let base = 2 * m + h * (2 * m + 2 * n);
            (Chain::new(p, recombine(&sol.x, base, m)), Chain::new(p + 1, recombine(&sol.x, base + 2 * m, n)))
        })
        .collect();
    let out = MedianSolution { t_hat, per_input, objective: sol.objective, integral: true };
    check_constraints(prob, &out.t_hat, &out.per_input)?;
    Ok(out)
}

fn check_constraints<R: Real>(
    prob: &MedianProblem<'_, R>,
    t_hat: &Chain,
    per_input: &[(Chain, Chain)],
) -> Result<(), MedianError> {
    if per_input.len() != prob.inputs.len() {
        return Err(MedianError::AlphaCount { expected: prob.inputs.len(), got: per_input.len() });
    }
    t_hat.check_on(prob.complex)?;
    let b = prob.boundary();
    for (h, ((r, s), t)) in per_input.iter().zip(&prob.inputs).enumerate() {
        r.check_on(prob.complex)?;
        s.check_on(prob.complex)?;
        let bs = b.apply(s.coeffs());
        let ok = (0..t.len()).all(|i| t_hat.coeffs()[i] - t.coeffs()[i] - r.coeffs()[i] - bs[i] == 0);
        if !ok {
            return Err(MedianError::ConstraintViolation(h));
        }
    }
    Ok(())
}

fn weighted_abs<S: LpScalar>(w: &[S], c: &Chain) -> S {
    c.nonzeros()
        .fold(S::zero(), |acc, (i, v)| acc + w[i].clone() * S::from_i64(v.abs()))
}

/// Exact objective `mu sum w|t| + sum_h alpha_h (sum w|r_h| + lambda sum v|s_h|)`
/// after checking the homology constraints.
pub fn evaluate_objective<R: Real>(
    prob: &MedianProblem<'_, R>,
    t_hat: &Chain,
    per_input: &[(Chain, Chain)],
    sig_digits: u32,
) -> Result<Rational, MedianError> {
    evaluate_objective_with(prob, t_hat, per_input, sig_digits)
}

pub fn evaluate_objective_with<R: Real, S: LpScalar>(
    prob: &MedianProblem<'_, R>,
    t_hat: &Chain,
    per_input: &[(Chain, Chain)],
    sig_digits: u32,
) -> Result<S, MedianError> {
    prob.validate()?;
    check_constraints(prob, t_hat, per_input)?;
    let wts: Weights<S> = weights(prob, sig_digits)?;
    let mut total = weighted_abs(&wts.t, t_hat);
    for (h, (r, s)) in per_input.iter().enumerate() {
        total = total + weighted_abs(&wts.r[h], r) + weighted_abs(&wts.s[h], s);
    }
    Ok(total)
}

/// Exhaustive oracle: every `s_h` with entries in `[-coeff_bound, coeff_bound]`
/// is tried jointly, and for each choice the optimal `t_hat` is found
/// coordinatewise. With the `s_h` fixed the objective separates over
/// p-simplices into convex piecewise-linear functions of `t_i` whose
/// breakpoints are integers, so the minimum over all integers is attained at
/// one of them. The result is exact over every `t_hat`, with only the fillings
/// bounded.
pub fn brute_force_median<R: Real>(
    prob: &MedianProblem<'_, R>,
    coeff_bound: i64,
    sig_digits: u32,
) -> Result<MedianSolution<Rational>, MedianError> {
    prob.validate()?;
    let b = prob.boundary();
    let (m, n) = (b.rows(), b.cols());
    let big_n = prob.inputs.len();
    let cb = coeff_bound.max(0);
    let space = ((2 * cb + 1) as f64).powi((n * big_n) as i32);
    if space > BRUTE_FORCE_GUARD {
        return Err(MedianError::SearchTooLarge(space));
    }

    let wts: Weights<Rational> = weights(prob, sig_digits)?;
    let mut all: Vec<Rational> = wts.t.clone();
    for h in 0..big_n {
        all.extend(wts.r[h].iter().cloned());
        all.extend(wts.s[h].iter().cloned());
    }
    let max_t = prob
        .inputs
        .iter()
        .flat_map(|t| t.coeffs().iter().map(|c| c.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let coeff_cap = 2 * (max_t + cb.unsigned_abs() * (prob.dim() as u64 + 2)) + 1;
    let headroom = (all.len() as u64).saturating_mul(coeff_cap);
    let costs = ScaledCosts::new(&all, headroom).ok_or(MedianError::SearchTooLarge(space))?;
    let tw = &costs.weights[..m];
    let block = m + n;
    let rw = |h: usize| &costs.weights[m + h * block..m + h * block + m];
    let sw = |h: usize| &costs.weights[m + h * block + m..m + (h + 1) * block];

    // Candidate breakpoints for t_i are 0 and t_{h,i} + (B s_h)_i.
    let mut s = vec![vec![-cb; n]; big_n];
    let mut bs: Vec<Vec<i64>> = s.iter().map(|sh| b.apply(sh)).collect();
    let mut best: Option<(i128, Vec<i64>, Vec<Vec<i64>>)> = None;
    let mut targets = vec![0i64; big_n];
    loop {
        let mut total: i128 = 0;
        for h in 0..big_n {
            total += s[h].iter().zip(sw(h)).map(|(&x, &w)| w * i128::from(x.abs())).sum::<i128>();
        }
        let mut t_hat = vec![0i64; m];
        for i in 0..m {
            for h in 0..big_n {
                targets[h] = prob.inputs[h].coeffs()[i] + bs[h][i];
            }
            let cost = |t: i64| -> i128 {
                let mut c = tw[i] * i128::from(t.abs());
                for h in 0..big_n {
                    c += rw(h)[i] * i128::from((t - targets[h]).abs());
                }
                c
            };
            let mut best_t = 0i64;
            let mut best_c = cost(0);
            for &cand in &targets {
                let c = cost(cand);
                if c < best_c || (c == best_c && (cand.abs(), cand) < (best_t.abs(), best_t)) {
                    best_t = cand;
                    best_c = c;
                }
            }
            t_hat[i] = best_t;
            total += best_c;
        }
        if best.as_ref().is_none_or(|(bv, _, _)| total < *bv) {
            best = Some((total, t_hat, s.clone()));
        }

        // odometer over (h, j)
        let mut pos = 0;
        loop {
            if pos == big_n * n {
                let (total, t_hat, s_best) = best.expect("at least one candidate");
                let p = prob.dim();
                let t_hat = Chain::new(p, t_hat);
                let per_input = s_best
                    .into_iter()
                    .zip(&prob.inputs)
                    .map(|(sh, t)| {
                        let bsh = b.apply(&sh);
                        let r: Vec<i64> = (0..m).map(|i| t_hat.coeffs()[i] - t.coeffs()[i] - bsh[i]).collect();
                        (Chain::new(p, r), Chain::new(p + 1, sh))
                    })
                    .collect();
                return Ok(MedianSolution { t_hat, per_input, objective: costs.to_rational(total), integral: true });
            }
            let (h, j) = (pos / n, pos % n);
            let step = if s[h][j] < cb {
                s[h][j] += 1;
                1
            } else {
                let back = -2 * cb;
                s[h][j] = -cb;
                back
            };
            for &(i, e) in b.column(j) {
                bs[h][i] += i64::from(e) * step;
            }
            if step == 1 {
                break;
            }
            pos += 1;
        }
    }
}

/// Discrete envelope: the union over input pairs of the supports of minimal
/// fillings of their differences. The flat norm scale starts at the problem's
/// `lambda` and is halved until the decomposition has no residual part.
pub fn envelope_support<R: Real>(prob: &MedianProblem<'_, R>, opts: &SolveOptions) -> Result<BTreeSet<usize>, MedianError> {
    prob.validate()?;
    let mut out = BTreeSet::new();
    let inputs = &prob.inputs;
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            if !shares_boundary(prob.complex, &inputs[i], &inputs[j])? {
                return Err(MedianError::BoundaryMismatch(i, j));
            }
            let d = inputs[i].sub(&inputs[j]);
            if d.is_zero() {
                continue;
            }
            let mut lambda = prob.lambda;
            let mut filled = None;
            for _ in 0..=ENVELOPE_HALVINGS {
                let dec = flatnorm::flat_norm_with::<R, Rational>(prob.complex, &d, lambda, opts)?;
                if dec.x.is_zero() {
                    filled = Some(dec.s);
                    break;
                }
                lambda /= 2.0;
            }
            let s = filled.ok_or(MedianError::Unfillable(i, j))?;
            out.extend(s.support());
        }
    }
    Ok(out)
}

/// p-simplices allowed to carry `t_hat - t_h`: faces of envelope simplices
/// together with simplices in the support of every input.
pub fn envelope_closure<R: Real>(prob: &MedianProblem<'_, R>, envelope: &BTreeSet<usize>) -> BTreeSet<usize> {
    let p = prob.dim();
    let k = prob.complex;
    let mut out = BTreeSet::new();
    for &j in envelope {
        let simplex = &k.simplices(p + 1)[j];
        for skip in 0..simplex.len() {
            let face: Vec<usize> = simplex.iter().enumerate().filter(|&(x, _)| x != skip).map(|(_, &v)| v).collect();
            if let Some(idx) = k.index_of(&face) {
                out.insert(idx);
            }
        }
    }
    if let Some(first) = prob.inputs.first() {
        out.extend(
            first
                .support()
                .into_iter()
                .filter(|&i| prob.inputs.iter().all(|t| t.coeffs()[i] != 0)),
        );
    }
    out
}

/// For each input, whether the support of `t_hat - t_h` lies in the envelope
/// closure.
pub fn envelope_containment<R: Real>(
    prob: &MedianProblem<'_, R>,
    t_hat: &Chain,
    opts: &SolveOptions,
) -> Result<Vec<bool>, MedianError> {
    let closure = envelope_closure(prob, &envelope_support(prob, opts)?);
    Ok(prob
        .inputs
        .iter()
        .map(|t| t_hat.sub(t).support().iter().all(|i| closure.contains(i)))
        .collect())
}

/// One point of a sweep: the weights and the median solved with them.
pub type SweepStep = (Vec<f64>, MedianSolution<Rational>);

/// Weighted medians for `alpha = (1 - k/steps, k/steps)`, `k = 0..=steps`,
/// solved in parallel.
pub fn interpolation_sweep<R: Real>(
    prob: &MedianProblem<'_, R>,
    steps: usize,
    opts: &SolveOptions,
) -> Result<Vec<SweepStep>, MedianError> {
    if prob.inputs.len() != 2 {
        return Err(MedianError::SweepArity(prob.inputs.len()));
    }
    if steps == 0 {
        return Err(MedianError::BadParameter("sweep needs at least one step".into()));
    }
    (0..=steps)
        .into_par_iter()
        .map(|k| {
            let a2 = k as f64 / steps as f64;
            let alpha = vec![1.0 - a2, a2];
            let p = prob.clone().with_alpha(alpha.clone());
            solve_median_with(&p, opts).map(|sol| (alpha, sol))
        })
        .collect()
}

impl<S: LpScalar> MedianSolution<S> {
    /// Exact objective as a rational.
    pub fn objective_rational(&self) -> Rational {
        self.objective.to_rational()
    }
}
