//! Optimistic robust LPs with per-row budgets of uncertainty `k_j` and optimism `r_j`.
//!
//! Robust row `j` reads
//!
//! ```text
//! a_jᵀw + ρ_{k_j}(y_j) − ρ_{r_j}(y_j) ≤ b_j,    y_j = (ā_ij·w_i)_{i : ā_ij > 0}
//! ```
//!
//! The concave part `−ρ_r` is handled by DCA: at the current point a maximizer
//! `δ̂_j` of `wᵀδ` over the optimistic set is fixed, and the row becomes the
//! convex restriction `a_jᵀw + ρ_k(y_j) − δ̂_jᵀw ≤ b_j`, an LP after the usual
//! epigraph of `ρ_k`. Every restriction contains the previous iterate, so the
//! objective never increases.

use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::lp::{solve_lp, LinearRow, LpSolution, LpStatus, NominalLp, SimplexConfig};
use crate::norms::{largest_sum_subgradient_unchecked, largest_sum_unchecked};

/// Uncertainty data for one inequality row of the nominal LP.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustRow {
    /// Index into `NominalLp::ineq`.
    pub row: usize,
    /// `ā_ij ≥ 0` per column; zero marks a certain coefficient.
    pub deviations: Vec<f64>,
    /// Budget of uncertainty over the nonzero-deviation support.
    pub k: f64,
    /// Budget of optimism, `0 ≤ r < k`.
    pub r: f64,
}

impl RobustRow {
    /// Columns with a nonzero deviation.
    pub fn support(&self) -> Vec<usize> {
        self.deviations.iter().enumerate().filter(|(_, a)| **a > 0.0).map(|(i, _)| i).collect()
    }

    /// `y = (ā_i w_i)` over the support.
    fn scaled(&self, support: &[usize], w: &[f64]) -> Vec<f64> {
        support.iter().map(|&i| self.deviations[i] * w[i]).collect()
    }

    fn validate(&self, n: usize) -> Result<()> {
        check_dim(n, self.deviations.len())?;
        if let Some(a) = self.deviations.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::Domain(format!("row {}: deviation {a} must be finite and >= 0", self.row)));
        }
        let beta = self.support().len() as f64;
        let (k, r) = (self.k, self.r);
        if k == 0.0 && r == 0.0 {
            return Ok(());
        }
        if !(k.is_finite() && k >= 1.0 && k <= beta) {
            return Err(Error::Domain(format!("row {}: budget k = {k} outside [1, {beta}]", self.row)));
        }
        if !(r.is_finite() && r >= 0.0 && r < k) {
            return Err(Error::Domain(format!("row {}: optimism r = {r} outside [0, k = {k})", self.row)));
        }
        Ok(())
    }

    /// Maximizer of `δᵀw` over `{‖Āδ‖₁ ≤ r, ‖Āδ‖∞ ≤ 1}`, as a full-length vector.
    pub fn optimistic_argsup(&self, w: &[f64]) -> Vec<f64> {
        let support = self.support();
        let y = self.scaled(&support, w);
        let g = largest_sum_subgradient_unchecked(&y, self.r);
        let mut delta = vec![0.0; self.deviations.len()];
        for (&i, gi) in support.iter().zip(g) {
            delta[i] = self.deviations[i] * gi;
        }
        delta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrlpProblem {
    pub nominal: NominalLp,
    pub robust_rows: Vec<RobustRow>,
}

impl OrlpProblem {
    pub fn validate(&self) -> Result<()> {
        self.nominal.validate()?;
        let n = self.nominal.num_cols();
        let mut seen = vec![false; self.nominal.ineq.len()];
        for row in &self.robust_rows {
            if row.row >= seen.len() {
                return Err(Error::Domain(format!("robust row index {} out of range", row.row)));
            }
            if std::mem::replace(&mut seen[row.row], true) {
                return Err(Error::Domain(format!("robust row index {} repeated", row.row)));
            }
            row.validate(n)?;
        }
        Ok(())
    }

    pub fn has_optimism(&self) -> bool {
        self.robust_rows.iter().any(|r| r.r > 0.0)
    }

    /// Largest violation `robust_constraint_value − b_j` over robust rows.
    pub fn robust_violation(&self, w: &[f64]) -> f64 {
        self.robust_rows
            .iter()
            .map(|row| {
                let nominal = &self.nominal.ineq[row.row];
                robust_value_unchecked(w, row, &nominal.coeffs) - nominal.rhs
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn zero_shift(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.nominal.num_cols()]; self.robust_rows.len()]
    }
}

/// Left-hand side `a_jᵀw + ρ_k(y) − ρ_r(y)` of a robust row.
pub fn robust_constraint_value(w: &[f64], row: &RobustRow, a_j: &[f64]) -> Result<f64> {
    check_dim(a_j.len(), w.len())?;
    row.validate(w.len())?;
    Ok(robust_value_unchecked(w, row, a_j))
}

fn robust_value_unchecked(w: &[f64], row: &RobustRow, a_j: &[f64]) -> f64 {
    let support = row.support();
    let y = row.scaled(&support, w);
    let nominal: f64 = a_j.iter().zip(w).map(|(a, x)| a * x).sum();
    nominal + largest_sum_unchecked(&y, row.k) - largest_sum_unchecked(&y, row.r)
}

/// The convex restriction with the optimistic disturbance fixed to `shift[j]`.
///
/// Columns are `w`, then per robust row `ζ_j` followed by one `s_ij` per support
/// index. Robust row `j` becomes `(a_j + shift_j)ᵀw + k_jζ_j + Σ_i s_ij ≤ b_j`
/// with `s_ij ≥ ±ā_ij w_i − ζ_j`; the `−` side is dropped when `w_i ≥ 0` is a
/// bound, since `ζ, s ≥ 0` already imply it.
pub fn build_convex_subproblem(problem: &OrlpProblem, shift: &[Vec<f64>]) -> Result<NominalLp> {
    problem.validate()?;
    check_dim(problem.robust_rows.len(), shift.len())?;
    let nom = &problem.nominal;
    let n = nom.num_cols();
    for s in shift {
        check_dim(n, s.len())?;
    }
    let supports: Vec<Vec<usize>> = problem.robust_rows.iter().map(RobustRow::support).collect();
    let total = n + supports.iter().map(|s| 1 + s.len()).sum::<usize>();

    let pad = |coeffs: &[f64]| -> Vec<f64> {
        let mut v = coeffs.to_vec();
        v.resize(total, 0.0);
        v
    };
    let mut lp = NominalLp::new(pad(&nom.objective));
    lp.name = nom.name.clone();
    lp.objective_offset = nom.objective_offset;
    lp.lower[..n].copy_from_slice(&nom.lower);
    lp.upper[..n].copy_from_slice(&nom.upper);
    lp.col_names[..n].clone_from_slice(&nom.col_names);
    lp.ineq = nom.ineq.iter().map(|r| LinearRow::new(&r.name, pad(&r.coeffs), r.rhs)).collect();
    lp.eq = nom.eq.iter().map(|r| LinearRow::new(&r.name, pad(&r.coeffs), r.rhs)).collect();

    let mut col = n;
    for ((row, support), delta) in problem.robust_rows.iter().zip(&supports).zip(shift) {
        let zeta = col;
        let row_name = nom.ineq[row.row].name.clone();
        lp.col_names[zeta] = format!("{row_name}_zeta");
        let target = &mut lp.ineq[row.row].coeffs;
        for (t, d) in target.iter_mut().zip(delta) {
            *t += d;
        }
        target[zeta] = row.k;
        for (offset, &i) in support.iter().enumerate() {
            let s = zeta + 1 + offset;
            lp.col_names[s] = format!("{row_name}_s{i}");
            lp.ineq[row.row].coeffs[s] = 1.0;
            let a = row.deviations[i];
            let mut plus = vec![0.0; total];
            plus[i] = a;
            plus[zeta] = -1.0;
            plus[s] = -1.0;
            lp.ineq.push(LinearRow::new(format!("{row_name}_ep{i}"), plus, 0.0));
            if nom.lower[i] < 0.0 {
                let mut minus = vec![0.0; total];
                minus[i] = -a;
                minus[zeta] = -1.0;
                minus[s] = -1.0;
                lp.ineq.push(LinearRow::new(format!("{row_name}_em{i}"), minus, 0.0));
            }
        }
        col += 1 + support.len();
    }
    Ok(lp)
}

/// How each convex subproblem is solved. Both routes solve the same LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubproblemMethod {
    /// The full epigraph LP from [`build_convex_subproblem`].
    Epigraph,
    /// Constraint generation over vertices of the budget polytope, in `w` only.
    CuttingPlane,
    /// Epigraph while the expanded LP has at most `AUTO_EPIGRAPH_ROWS` rows.
    Auto,
}

const AUTO_EPIGRAPH_ROWS: usize = 1000;
const CUT_TOL: f64 = 1e-9;
const MAX_CUT_ROUNDS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct DcaConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Extra runs from random optimistic vertices; the best result is kept.
    pub multistart: usize,
    pub seed: u64,
    pub method: SubproblemMethod,
    pub simplex: SimplexConfig,
}

impl Default for DcaConfig {
    fn default() -> Self {
        DcaConfig {
            max_iters: 50,
            rel_tol: 1e-8,
            multistart: 0,
            seed: 0,
            method: SubproblemMethod::Auto,
            simplex: SimplexConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcaStatus {
    Converged,
    IterLimit,
    SubproblemInfeasible,
}

impl DcaStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DcaStatus::Converged => "converged",
            DcaStatus::IterLimit => "iter_limit",
            DcaStatus::SubproblemInfeasible => "subproblem_infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcaIterate {
    pub iteration: usize,
    pub objective: f64,
    /// The `δ̂_j` selected for this solve, one full-length vector per robust row.
    pub deltas: Vec<Vec<f64>>,
    pub status: LpStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcaTrace {
    pub iterates: Vec<DcaIterate>,
    pub status: DcaStatus,
}

impl DcaTrace {
    /// Optimism iterations after the initial solve.
    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.iterates.iter().map(|it| it.objective).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcaOutcome {
    /// Solution in the original columns only.
    pub solution: LpSolution,
    pub trace: DcaTrace,
}

impl DcaOutcome {
    pub fn status(&self) -> DcaStatus {
        self.trace.status
    }
}

/// Solves the convex restriction for a fixed shift, returning `w` in the
/// original columns.
pub fn solve_subproblem(
    problem: &OrlpProblem,
    shift: &[Vec<f64>],
    method: SubproblemMethod,
    simplex: &SimplexConfig,
) -> Result<LpSolution> {
    let method = match method {
        SubproblemMethod::Auto => {
            let extra: usize = problem
                .robust_rows
                .iter()
                .map(|r| {
                    let support = r.support();
                    support.iter().map(|&i| if problem.nominal.lower[i] < 0.0 { 2 } else { 1 }).sum::<usize>()
                })
                .sum();
            if problem.nominal.ineq.len() + problem.nominal.eq.len() + extra <= AUTO_EPIGRAPH_ROWS {
                SubproblemMethod::Epigraph
            } else {
                SubproblemMethod::CuttingPlane
            }
        }
        m => m,
    };
    match method {
        SubproblemMethod::CuttingPlane => solve_cutting_plane(problem, shift, simplex),
        _ => {
            let lp = build_convex_subproblem(problem, shift)?;
            let mut sol = solve_lp(&lp, simplex)?;
            sol.w.truncate(problem.nominal.num_cols());
            sol.reduced_costs.truncate(problem.nominal.num_cols());
            Ok(sol)
        }
    }
}

fn solve_cutting_plane(problem: &OrlpProblem, shift: &[Vec<f64>], simplex: &SimplexConfig) -> Result<LpSolution> {
    problem.validate()?;
    check_dim(problem.robust_rows.len(), shift.len())?;
    let mut lp = problem.nominal.clone();
    for (row, delta) in problem.robust_rows.iter().zip(shift) {
        check_dim(lp.num_cols(), delta.len())?;
        for (t, d) in lp.ineq[row.row].coeffs.iter_mut().zip(delta) {
            *t += d;
        }
    }
    let supports: Vec<Vec<usize>> = problem.robust_rows.iter().map(RobustRow::support).collect();
    let mut iterations = 0;
    for round in 0..MAX_CUT_ROUNDS {
        let sol = solve_lp(&lp, simplex)?;
        iterations += sol.iterations;
        if !sol.is_optimal() {
            if sol.status == LpStatus::Unbounded {
                // The relaxation may be unbounded where the robust LP is not.
                debug!("cutting-plane relaxation unbounded, falling back to the epigraph LP");
                return solve_subproblem(problem, shift, SubproblemMethod::Epigraph, simplex);
            }
            return Ok(LpSolution { iterations, ..sol });
        }
        let mut added = 0;
        for ((row, support), delta) in problem.robust_rows.iter().zip(&supports).zip(shift) {
            if row.k == 0.0 {
                continue;
            }
            let base = &problem.nominal.ineq[row.row];
            let y = row.scaled(support, &sol.w);
            let lhs: f64 = base.coeffs.iter().zip(delta).zip(&sol.w).map(|((a, d), x)| (a + d) * x).sum::<f64>()
                + largest_sum_unchecked(&y, row.k);
            if lhs - base.rhs > CUT_TOL * (1.0 + base.rhs.abs()) {
                let u = largest_sum_subgradient_unchecked(&y, row.k);
                let mut coeffs: Vec<f64> = base.coeffs.iter().zip(delta).map(|(a, d)| a + d).collect();
                for (&i, ui) in support.iter().zip(u) {
                    coeffs[i] += row.deviations[i] * ui;
                }
                lp.ineq.push(LinearRow::new(format!("{}_cut{round}", base.name), coeffs, base.rhs));
                added += 1;
            }
        }
        if added == 0 {
            return Ok(LpSolution { iterations, ..sol });
        }
    }
    Err(Error::Solver(format!("cutting planes did not close within {MAX_CUT_ROUNDS} rounds")))
}

/// Single solve with no optimism: the budget-of-uncertainty robust LP.
pub fn solve_bertsimas_sim(problem: &OrlpProblem, config: &DcaConfig) -> Result<LpSolution> {
    problem.validate()?;
    solve_subproblem(problem, &problem.zero_shift(), config.method, &config.simplex)
}

/// DCA from `δ^O = 0`, plus `config.multistart` random restarts.
pub fn dca_solve(problem: &OrlpProblem, config: &DcaConfig) -> Result<DcaOutcome> {
    problem.validate()?;
    let mut best = dca_solve_from(problem, &problem.zero_shift(), config)?;
    if config.multistart > 0 && problem.has_optimism() {
        for start in 0..config.multistart {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(start as u64);
            let shift = random_optimistic_vertices(problem, &mut rng);
            let run = dca_solve_from(problem, &shift, config)?;
            let better = run.solution.is_optimal()
                && (!best.solution.is_optimal() || run.solution.objective < best.solution.objective);
            if better {
                best = run;
            }
        }
    }
    Ok(best)
}

/// `−δ` for a random vertex `δ` of each row's optimistic set: `⌊r⌋` random
/// coordinates at full deviation with random signs, one more at the fractional part.
pub fn random_optimistic_vertices<R: Rng>(problem: &OrlpProblem, rng: &mut R) -> Vec<Vec<f64>> {
    let n = problem.nominal.num_cols();
    problem
        .robust_rows
        .iter()
        .map(|row| {
            let mut support = row.support();
            let mut delta = vec![0.0; n];
            let whole = (row.r.floor() as usize).min(support.len());
            let frac = row.r - row.r.floor();
            let picks = if frac > 0.0 { whole + 1 } else { whole }.min(support.len());
            for p in 0..picks {
                let q = rng.gen_range(p..support.len());
                support.swap(p, q);
                let i = support[p];
                let size = if p < whole { 1.0 } else { frac };
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                delta[i] = -sign * size * row.deviations[i];
            }
            delta
        })
        .collect()
}

/// DCA started from the restriction with optimistic shift `initial_shift`.
pub fn dca_solve_from(problem: &OrlpProblem, initial_shift: &[Vec<f64>], config: &DcaConfig) -> Result<DcaOutcome> {
    problem.validate()?;
    let n = problem.nominal.num_cols();
    let solve = |shift: &[Vec<f64>]| solve_subproblem(problem, shift, config.method, &config.simplex);

    let first = solve(initial_shift)?;
    let negate = |s: &[Vec<f64>]| -> Vec<Vec<f64>> { s.iter().map(|v| v.iter().map(|x| -x).collect()).collect() };
    let mut iterates = vec![DcaIterate {
        iteration: 0,
        objective: first.objective,
        deltas: negate(initial_shift),
        status: first.status,
    }];
    match first.status {
        LpStatus::Infeasible => {
            return Ok(DcaOutcome {
                solution: first,
                trace: DcaTrace { iterates, status: DcaStatus::SubproblemInfeasible },
            })
        }
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::Optimal => {}
    }
    let mut current = first;
    if !problem.has_optimism() {
        return Ok(DcaOutcome { solution: current, trace: DcaTrace { iterates, status: DcaStatus::Converged } });
    }
    for iteration in 1..=config.max_iters {
        let deltas: Vec<Vec<f64>> = problem.robust_rows.iter().map(|row| row.optimistic_argsup(&current.w)).collect();
        debug_assert!(deltas.iter().all(|d| d.len() == n));
        let next = solve(&negate(&deltas))?;
        if next.status == LpStatus::Unbounded {
            return Err(Error::Unbounded);
        }
        if !next.is_optimal() {
            warn!("DCA iteration {iteration}: subproblem reported {:?} at a feasible point", next.status);
            return Ok(DcaOutcome { solution: current, trace: DcaTrace { iterates, status: DcaStatus::Converged } });
        }
        let prev = current.objective;
        if next.objective > prev {
            debug!("DCA iteration {iteration}: objective rose by {:e}, stopping", next.objective - prev);
            return Ok(DcaOutcome { solution: current, trace: DcaTrace { iterates, status: DcaStatus::Converged } });
        }
        iterates.push(DcaIterate { iteration, objective: next.objective, deltas, status: next.status });
        current = next;
        if prev - current.objective <= config.rel_tol * prev.abs() {
            return Ok(DcaOutcome { solution: current, trace: DcaTrace { iterates, status: DcaStatus::Converged } });
        }
    }
    Ok(DcaOutcome { solution: current, trace: DcaTrace { iterates, status: DcaStatus::IterLimit } })
}
