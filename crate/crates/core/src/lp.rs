//! Standard-form linear programs and a two-phase revised simplex solver.
//!
//! The solver is generic over [`LpScalar`]; with [`BigRational`] it runs in
//! exact arithmetic, so feasibility, optimality and integrality of a returned
//! vertex are certified without tolerances.
//!
//! [`BigRational`]: num_rational::BigRational

use std::cmp::Ordering;

use crate::error::LpError;
use crate::scalar::LpScalar;

/// `min c.x  s.t.  A x = b, x >= 0`, with `A` stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormLp<S> {
    n_cons: usize,
    c: Vec<S>,
    columns: Vec<Vec<(usize, S)>>,
    b: Vec<S>,
}

impl<S: LpScalar> StandardFormLp<S> {
    /// Builds a program from sparse columns. Zero entries are dropped and
    /// entries are sorted by row; duplicate rows within a column are an error.
    pub fn new(n_cons: usize, c: Vec<S>, columns: Vec<Vec<(usize, S)>>, b: Vec<S>) -> Result<Self, LpError> {
        if c.len() != columns.len() {
            return Err(LpError::Malformed(format!(
                "objective has {} entries for {} columns",
                c.len(),
                columns.len()
            )));
        }
        if b.len() != n_cons {
            return Err(LpError::Malformed(format!("rhs has {} entries for {} rows", b.len(), n_cons)));
        }
        let mut cleaned = Vec::with_capacity(columns.len());
        for (j, mut col) in columns.into_iter().enumerate() {
            col.retain(|(_, v)| !v.is_zero());
            col.sort_by_key(|(i, _)| *i);
            if col.iter().any(|(i, _)| *i >= n_cons) {
                return Err(LpError::Malformed(format!("column {j} has a row index out of range")));
            }
            if col.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(LpError::Malformed(format!("column {j} repeats a row")));
            }
            cleaned.push(col);
        }
        Ok(Self { n_cons, c, columns: cleaned, b })
    }

    /// Builds a program from a dense row-major constraint matrix.
    pub fn from_dense(c: Vec<S>, a: &[Vec<S>], b: Vec<S>) -> Result<Self, LpError> {
        let n = c.len();
        let mut columns = vec![Vec::new(); n];
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::Malformed(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, v) in row.iter().enumerate() {
                columns[j].push((i, v.clone()));
            }
        }
        Self::new(a.len(), c, columns, b)
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn n_cons(&self) -> usize {
        self.n_cons
    }

    pub fn objective(&self) -> &[S] {
        &self.c
    }

    pub fn rhs(&self) -> &[S] {
        &self.b
    }

    pub fn column(&self, j: usize) -> &[(usize, S)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, S)>] {
        &self.columns
    }

    /// `c . x`
    pub fn evaluate(&self, x: &[S]) -> S {
        self.c
            .iter()
            .zip(x)
            .filter(|(_, v)| !v.is_zero())
            .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    /// `A x - b`
    pub fn residual(&self, x: &[S]) -> Vec<S> {
        let mut r: Vec<S> = self.b.iter().map(|v| -v.clone()).collect();
        for (j, col) in self.columns.iter().enumerate() {
            if x[j].is_zero() {
                continue;
            }
            for (i, a) in col {
                r[*i] = r[*i].clone() + a.clone() * x[j].clone();
            }
        }
        r
    }

    /// True when `x` satisfies `A x = b` and `x >= 0` (exactly for exact scalars).
    pub fn is_feasible(&self, x: &[S]) -> bool {
        x.len() == self.n_vars()
            && x.iter().all(|v| !v.is_negative_strict())
            && self.residual(x).iter().all(|r| r.is_zero_tol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`]. `x` and `objective` are meaningful only when the
/// status is [`LpStatus::Optimal`]; otherwise `x` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    pub x: Vec<S>,
    pub objective: S,
    /// Basic structural columns, ordered by constraint row.
    pub basis: Vec<usize>,
    pub iterations: usize,
}

/// Entering-variable rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pricing {
    /// Lowest-index improving column; never cycles.
    #[default]
    Bland,
    /// Most negative reduced cost, falling back to Bland's rule after a run of
    /// degenerate pivots.
    Dantzig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexOptions {
    pub pricing: Pricing,
    /// Watchdog on the total pivot count of both phases.
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { pricing: Pricing::Bland, max_iterations: 5_000_000 }
    }
}

/// Options shared by the chain-level solvers (flat norm, median).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Significant digits kept when volumes and parameters become rationals.
    pub sig_digits: u32,
    pub simplex: SimplexOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { sig_digits: crate::DEFAULT_SIG_DIGITS, simplex: SimplexOptions::default() }
    }
}

/// Solves with default options (Bland's rule).
pub fn solve_lp<S: LpScalar>(lp: &StandardFormLp<S>) -> Result<LpSolution<S>, LpError> {
    solve_lp_with(lp, &SimplexOptions::default())
}

pub fn solve_lp_with<S: LpScalar>(lp: &StandardFormLp<S>, opts: &SimplexOptions) -> Result<LpSolution<S>, LpError> {
    let mut tab = Revised::new(lp, *opts);
    tab.run()
}

/// True iff every coordinate of an optimal solution is an integer.
pub fn is_integral<S: LpScalar>(sol: &LpSolution<S>) -> Result<bool, LpError> {
    if sol.status != LpStatus::Optimal {
        return Err(LpError::NotOptimal);
    }
    Ok(sol.x.iter().all(LpScalar::is_integer))
}

/// After this many consecutive degenerate pivots Dantzig pricing switches to
/// Bland's rule until the objective strictly improves again.
const DEGENERATE_SWITCH: usize = 50;

/// Recompute duals and basic values this often when arithmetic is inexact.
const FLOAT_REFRESH: usize = 64;

type SparseRow<S> = Vec<(usize, S)>;

/// `v * a`, skipping the multiplication for the unit coefficients that make up
/// most constraint matrices.
fn times<S: LpScalar>(v: &S, a: &S) -> S {
    if a.is_one() {
        v.clone()
    } else if (-a.clone()).is_one() {
        -v.clone()
    } else {
        v.clone() * a.clone()
    }
}

struct Revised<'a, S> {
    lp: &'a StandardFormLp<S>,
    opts: SimplexOptions,
    m: usize,
    n: usize,
    rhs: Vec<S>,
    /// Structural columns after row sign normalization, followed by one unit
    /// column per artificial variable.
    cols: Vec<SparseRow<S>>,
    n_total: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Rows of the basis inverse.
    binv: Vec<SparseRow<S>>,
    xb: Vec<S>,
    duals: Vec<S>,
    iterations: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl<'a, S: LpScalar> Revised<'a, S> {
    fn new(lp: &'a StandardFormLp<S>, opts: SimplexOptions) -> Self {
        let m = lp.n_cons;
        let n = lp.n_vars();
        let row_sign: Vec<bool> = lp.b.iter().map(|v| v.is_negative_strict()).collect();
        let rhs: Vec<S> = lp
            .b
            .iter()
            .zip(&row_sign)
            .map(|(v, &neg)| if neg { -v.clone() } else { v.clone() })
            .collect();
        let mut cols: Vec<SparseRow<S>> = lp
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(i, v)| (*i, if row_sign[*i] { -v.clone() } else { v.clone() }))
                    .collect()
            })
            .collect();

        // Crash basis: a positive singleton column per row where available.
        let mut basis = vec![usize::MAX; m];
        for (j, col) in cols.iter().enumerate() {
            if let [(i, v)] = col.as_slice() {
                if basis[*i] == usize::MAX && v.is_positive_strict() {
                    basis[*i] = j;
                }
            }
        }
        let mut n_total = n;
        for (i, slot) in basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                cols.push(vec![(i, S::one())]);
                *slot = n_total;
                n_total += 1;
            }
        }
        let mut is_basic = vec![false; n_total];
        let mut binv = Vec::with_capacity(m);
        let mut xb = Vec::with_capacity(m);
        for (i, &j) in basis.iter().enumerate() {
            is_basic[j] = true;
            let pivot = cols[j][0].1.clone();
            binv.push(vec![(i, S::one() / pivot.clone())]);
            xb.push(rhs[i].clone() / pivot);
        }
        Self {
            lp,
            opts,
            m,
            n,
            rhs,
            cols,
            n_total,
            basis,
            is_basic,
            binv,
            xb,
            duals: vec![S::zero(); m],
            iterations: 0,
        }
    }

    fn has_artificials(&self) -> bool {
        self.n_total > self.n
    }

    fn run(&mut self) -> Result<LpSolution<S>, LpError> {
        if self.has_artificials() {
            let cost: Vec<S> = (0..self.n_total)
                .map(|j| if j >= self.n { S::one() } else { S::zero() })
                .collect();
            match self.phase(&cost, true)? {
                PhaseOutcome::Optimal => {}
                PhaseOutcome::Unbounded => unreachable!("phase one is bounded below by zero"),
            }
            let infeasibility = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(j, _)| **j >= self.n)
                .fold(S::zero(), |acc, (_, v)| acc + v.clone());
            if infeasibility.is_positive_strict() {
                return Ok(self.non_optimal(LpStatus::Infeasible));
            }
            self.drive_out_artificials();
        }
        let mut cost: Vec<S> = self.lp.c.clone();
        cost.resize(self.n_total, S::zero());
        match self.phase(&cost, false)? {
            PhaseOutcome::Unbounded => Ok(self.non_optimal(LpStatus::Unbounded)),
            PhaseOutcome::Optimal => {
                let mut x = vec![S::zero(); self.n];
                for (r, &j) in self.basis.iter().enumerate() {
                    if j < self.n {
                        x[j] = self.xb[r].clone();
                    }
                }
                let objective = self.lp.evaluate(&x);
                Ok(LpSolution {
                    status: LpStatus::Optimal,
                    x,
                    objective,
                    basis: self.basis.iter().copied().filter(|&j| j < self.n).collect(),
                    iterations: self.iterations,
                })
            }
        }
    }

    fn non_optimal(&self, status: LpStatus) -> LpSolution<S> {
        LpSolution { status, x: Vec::new(), objective: S::zero(), basis: Vec::new(), iterations: self.iterations }
    }

    /// Entry `(B^-1)[r][i]`.
    fn binv_at(&self, r: usize, i: usize) -> Option<&S> {
        let row = &self.binv[r];
        row.binary_search_by_key(&i, |(k, _)| *k).ok().map(|p| &row[p].1)
    }

    /// `B^-1 a_j` as a dense vector.
    fn direction(&self, j: usize) -> Vec<S> {
        let col = &self.cols[j];
        (0..self.m)
            .map(|r| {
                let mut acc = S::zero();
                for (i, a) in col {
                    if let Some(v) = self.binv_at(r, *i) {
                        acc = acc + times(v, a);
                    }
                }
                acc
            })
            .collect()
    }

    fn reduced_cost(&self, cost: &[S], j: usize) -> S {
        self.cols[j]
            .iter()
            .fold(cost[j].clone(), |acc, (i, a)| acc - times(&self.duals[*i], a))
    }

    fn refresh(&mut self, cost: &[S]) {
        let mut duals = vec![S::zero(); self.m];
        for (r, &j) in self.basis.iter().enumerate() {
            if cost[j].is_zero() {
                continue;
            }
            for (k, v) in &self.binv[r] {
                duals[*k] = duals[*k].clone() + cost[j].clone() * v.clone();
            }
        }
        self.duals = duals;
        if !S::EXACT {
            self.xb = self
                .binv
                .iter()
                .map(|row| {
                    row.iter()
                        .fold(S::zero(), |acc, (k, v)| acc + v.clone() * self.rhs[*k].clone())
                })
                .collect();
        }
    }

    fn phase(&mut self, cost: &[S], phase_one: bool) -> Result<PhaseOutcome, LpError> {
        self.refresh(cost);
        let mut degenerate_run = 0usize;
        let mut since_refresh = 0usize;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(LpError::IterationLimit(self.opts.max_iterations));
            }
            if !S::EXACT && since_refresh >= FLOAT_REFRESH {
                self.refresh(cost);
                since_refresh = 0;
            }
            let use_bland = self.opts.pricing == Pricing::Bland || degenerate_run >= DEGENERATE_SWITCH;
            let eligible = |j: usize| phase_one || j < self.n;
            let mut entering: Option<(usize, S)> = None;
            for j in 0..self.n_total {
                if self.is_basic[j] || !eligible(j) {
                    continue;
                }
                let d = self.reduced_cost(cost, j);
                if !d.is_negative_strict() {
                    continue;
                }
                if use_bland {
                    entering = Some((j, d));
                    break;
                }
                match &entering {
                    Some((_, best)) if d >= *best => {}
                    _ => entering = Some((j, d)),
                }
            }
            let Some((q, dq)) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };

            let dir = self.direction(q);
            let mut leave: Option<(usize, S)> = None;
            for (r, d) in dir.iter().enumerate() {
                if !d.is_positive_strict() {
                    continue;
                }
                let ratio = self.xb[r].clone() / d.clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        let diff = ratio.clone() - best.clone();
                        diff.is_negative_strict() || (diff.is_zero_tol() && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, theta)) = leave else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if theta.is_zero_tol() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(q, r, &dir, theta, dq);
            self.iterations += 1;
            since_refresh += 1;
        }
    }

    fn pivot(&mut self, q: usize, r: usize, dir: &[S], theta: S, reduced: S) {
        let dr = dir[r].clone();
        for (i, d) in dir.iter().enumerate() {
            if i != r && !d.is_zero() {
                self.xb[i] = self.xb[i].clone() - theta.clone() * d.clone();
            }
        }
        self.xb[r] = theta;

        let pivot_row: SparseRow<S> = self.binv[r]
            .iter()
            .map(|(k, v)| (*k, v.clone() / dr.clone()))
            .collect();
        let factor = reduced;
        for (k, v) in &pivot_row {
            self.duals[*k] = self.duals[*k].clone() + factor.clone() * v.clone();
        }
        for (i, d) in dir.iter().enumerate() {
            if i == r || d.is_zero() {
                continue;
            }
            let row = std::mem::take(&mut self.binv[i]);
            self.binv[i] = axpy_sparse(&row, &pivot_row, d);
        }
        self.binv[r] = pivot_row;

        self.is_basic[self.basis[r]] = false;
        self.basis[r] = q;
        self.is_basic[q] = true;
    }

    /// Pivots zero-valued artificials out of the basis; rows where no
    /// structural column can replace them are redundant and keep their
    /// artificial (fixed at zero).
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            let replacement = (0..self.n).filter(|&j| !self.is_basic[j]).find(|&j| {
                let entry = self.cols[j].iter().fold(S::zero(), |acc, (i, a)| match self.binv_at(r, *i) {
                    Some(v) => acc + v.clone() * a.clone(),
                    None => acc,
                });
                !entry.is_zero_tol()
            });
            if let Some(j) = replacement {
                let dir = self.direction(j);
                let theta = self.xb[r].clone() / dir[r].clone();
                self.pivot(j, r, &dir, theta, S::zero());
                self.iterations += 1;
            }
        }
        // Artificials still basic sit on redundant rows: their row of B^-1 A is
        // zero, so they stay at zero for the rest of the solve.
    }
}

/// `row - scale * pivot` on sorted sparse rows.
fn axpy_sparse<S: LpScalar>(row: &[(usize, S)], pivot: &[(usize, S)], scale: &S) -> SparseRow<S> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < pivot.len() {
        let ka = row.get(a).map_or(usize::MAX, |e| e.0);
        let kb = pivot.get(b).map_or(usize::MAX, |e| e.0);
        match ka.cmp(&kb) {
            Ordering::Less => {
                out.push(row[a].clone());
                a += 1;
            }
            Ordering::Greater => {
                out.push((kb, -times(scale, &pivot[b].1)));
                b += 1;
            }
            Ordering::Equal => {
                let v = row[a].1.clone() - times(scale, &pivot[b].1);
                if !(if S::EXACT { v.is_zero() } else { v.is_zero_tol() }) {
                    out.push((ka, v));
                }
                a += 1;
                b += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(n: i64) -> BigRational {
        q(n, 1)
    }

    fn dense(c: &[BigRational], a: &[&[BigRational]], b: &[BigRational]) -> StandardFormLp<BigRational> {
        let rows: Vec<Vec<BigRational>> = a.iter().map(|r| r.to_vec()).collect();
        StandardFormLp::from_dense(c.to_vec(), &rows, b.to_vec()).unwrap()
    }

    #[test]
    fn single_equality() {
        let lp = dense(&[qi(1)], &[&[qi(1)]], &[qi(1)]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, vec![qi(1)]);
        assert_eq!(sol.objective, qi(1));
        assert!(is_integral(&sol).unwrap());
    }

    #[test]
    fn unbounded_ray() {
        let lp = dense(&[qi(-1), qi(0)], &[&[qi(1), qi(-1)]], &[qi(0)]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(is_integral(&sol), Err(LpError::NotOptimal));
    }

    #[test]
    fn infeasible_system() {
        // x + y = 1 and x + y = 2
        let lp = dense(&[qi(0), qi(0)], &[&[qi(1), qi(1)], &[qi(1), qi(1)]], &[qi(1), qi(2)]);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        // x = -1
        let lp = dense(&[qi(1)], &[&[qi(1)]], &[qi(-1)]);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // x + y = 2 twice, x - y = 0
        let lp = dense(
            &[qi(1), qi(2)],
            &[&[qi(1), qi(1)], &[qi(1), qi(1)], &[qi(1), qi(-1)]],
            &[qi(2), qi(2), qi(0)],
        );
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, vec![qi(1), qi(1)]);
        assert_eq!(sol.objective, qi(3));
        assert!(lp.is_feasible(&sol.x));
    }

    #[test]
    fn fractional_vertex_detected() {
        // 2x = 1
        let lp = dense(&[qi(1)], &[&[qi(2)]], &[qi(1)]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.x, vec![q(1, 2)]);
        assert!(!is_integral(&sol).unwrap());
    }

    #[test]
    fn integral_check_on_given_vectors() {
        let mk = |x: Vec<BigRational>| LpSolution {
            status: LpStatus::Optimal,
            objective: qi(0),
            x,
            basis: vec![],
            iterations: 0,
        };
        assert!(is_integral(&mk(vec![qi(1), qi(0), qi(3)])).unwrap());
        assert!(!is_integral(&mk(vec![q(1, 2), q(1, 2)])).unwrap());
    }

    fn beale() -> StandardFormLp<BigRational> {
        let z = qi(0);
        let o = qi(1);
        dense(
            &[z.clone(), z.clone(), z.clone(), q(-3, 4), qi(20), q(-1, 2), qi(6)],
            &[
                &[o.clone(), z.clone(), z.clone(), q(1, 4), qi(-8), qi(-1), qi(9)],
                &[z.clone(), o.clone(), z.clone(), q(1, 2), qi(-12), q(-1, 2), qi(3)],
                &[z.clone(), z.clone(), o.clone(), z.clone(), z.clone(), o.clone(), z.clone()],
            ],
            &[z.clone(), z.clone(), o.clone()],
        )
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        for pricing in [Pricing::Bland, Pricing::Dantzig] {
            let opts = SimplexOptions { pricing, max_iterations: 1000 };
            let sol = solve_lp_with(&beale(), &opts).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            assert_eq!(sol.objective, q(-5, 4));
        }
    }

    #[test]
    fn float_scalar_agrees() {
        let lp = StandardFormLp::<f64>::from_dense(
            vec![0.0, 0.0, 0.0, -0.75, 20.0, -0.5, 6.0],
            &[
                vec![1.0, 0.0, 0.0, 0.25, -8.0, -1.0, 9.0],
                vec![0.0, 1.0, 0.0, 0.5, -12.0, -0.5, 3.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
            ],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective + 1.25).abs() < 1e-12);
    }

    #[test]
    fn malformed_inputs() {
        assert!(StandardFormLp::new(1, vec![qi(1)], vec![], vec![qi(0)]).is_err());
        assert!(StandardFormLp::new(1, vec![qi(1)], vec![vec![(3, qi(1))]], vec![qi(0)]).is_err());
        assert!(StandardFormLp::new(2, vec![qi(1)], vec![vec![(0, qi(1))]], vec![qi(0)]).is_err());
    }

    #[test]
    fn repeated_solves_are_identical() {
        let lp = beale();
        assert_eq!(solve_lp(&lp).unwrap(), solve_lp(&lp).unwrap());
    }
}
