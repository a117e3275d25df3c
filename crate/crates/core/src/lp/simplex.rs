//! Dense bounded-variable revised simplex with an explicit basis inverse.
//!
//! Phase 1 minimizes the sum of artificials; phase 2 fixes them at zero.
//! Pricing is Dantzig's rule until `3·(rows + cols)` consecutive pivots fail to
//! improve the objective, then Bland's rule until one does. The ratio test is
//! Harris' two-pass variant, and nonbasic columns may flip between finite bounds
//! without a basis change.

use log::debug;

use super::{LpSolution, LpStatus, NominalLp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexConfig {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// `None` means `50·(rows + cols)`.
    pub max_iters: Option<usize>,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        SimplexConfig { feas_tol: 1e-7, opt_tol: 1e-7, max_iters: None }
    }
}

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic at zero with no finite bound.
    Free,
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    n_struct: usize,
    /// Sparse columns: structural, then one slack per inequality, then one
    /// artificial per row.
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    up: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    rhs: Vec<f64>,
    iterations: usize,
    max_iters: usize,
    since_refactor: usize,
    cfg: SimplexConfig,
}

pub fn solve_lp(lp: &NominalLp, config: &SimplexConfig) -> Result<LpSolution> {
    lp.validate()?;
    let mut t = Tableau::new(lp, config);
    let art_start = t.n_struct + lp.ineq.len();

    let mut phase1_cost = vec![0.0; t.cols.len()];
    for (j, c) in phase1_cost.iter_mut().enumerate().skip(art_start) {
        if t.up[j] > 0.0 {
            *c = 1.0;
        }
    }
    if phase1_cost.iter().any(|c| *c > 0.0) {
        if let Phase::Unbounded = t.run(&phase1_cost)? {
            return Err(Error::Solver("phase 1 reported an unbounded ray".into()));
        }
        let infeas: f64 = (art_start..t.cols.len()).map(|j| t.x[j].abs()).sum();
        let scale = 1.0 + t.rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        debug!("phase 1 done after {} iterations, infeasibility {infeas:e}", t.iterations);
        if infeas > config.feas_tol * scale {
            return Ok(terminal(LpStatus::Infeasible, t.iterations));
        }
    }
    for j in art_start..t.cols.len() {
        t.up[j] = 0.0;
        if !matches!(t.state[j], State::Basic(_)) {
            t.x[j] = 0.0;
            t.state[j] = State::AtLower;
        }
    }
    t.drive_out_artificials(art_start);

    let mut cost = vec![0.0; t.cols.len()];
    cost[..t.n_struct].copy_from_slice(&lp.objective);
    match t.run(&cost)? {
        Phase::Unbounded => Ok(terminal(LpStatus::Unbounded, t.iterations)),
        Phase::Optimal => {
            t.refactor()?;
            let y = t.duals(&cost);
            let reduced_costs = (0..t.n_struct).map(|j| cost[j] - t.dot_col(&y, j)).collect();
            let w: Vec<f64> = t.x[..t.n_struct].to_vec();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                objective: lp.objective_value(&w),
                w,
                iterations: t.iterations,
                duals: y,
                reduced_costs,
            })
        }
    }
}

fn terminal(status: LpStatus, iterations: usize) -> LpSolution {
    LpSolution { status, w: Vec::new(), objective: f64::NAN, iterations, duals: Vec::new(), reduced_costs: Vec::new() }
}

impl Tableau {
    fn new(lp: &NominalLp, cfg: &SimplexConfig) -> Tableau {
        let n = lp.num_cols();
        let n_ineq = lp.ineq.len();
        let m = n_ineq + lp.eq.len();
        let rows: Vec<&super::LinearRow> = lp.ineq.iter().chain(&lp.eq).collect();

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &a) in row.coeffs.iter().enumerate() {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        let mut lo = lp.lower.clone();
        let mut up = lp.upper.clone();
        let mut x = vec![0.0; n];
        let mut state = Vec::with_capacity(n + n_ineq + m);
        for j in 0..n {
            if lo[j].is_finite() {
                x[j] = lo[j];
                state.push(State::AtLower);
            } else if up[j].is_finite() {
                x[j] = up[j];
                state.push(State::AtUpper);
            } else {
                state.push(State::Free);
            }
        }
        let rhs: Vec<f64> = rows.iter().map(|r| r.rhs).collect();
        let mut residual = rhs.clone();
        for (j, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                residual[i] -= a * x[j];
            }
        }

        let mut basis = vec![usize::MAX; m];
        let mut binv = vec![0.0; m * m];
        for i in 0..n_ineq {
            cols.push(vec![(i, 1.0)]);
            lo.push(0.0);
            up.push(f64::INFINITY);
            if residual[i] >= 0.0 {
                x.push(residual[i]);
                state.push(State::Basic(i));
                basis[i] = n + i;
                binv[i * m + i] = 1.0;
            } else {
                x.push(0.0);
                state.push(State::AtLower);
            }
        }
        for i in 0..m {
            let sigma = if residual[i] < 0.0 { -1.0 } else { 1.0 };
            cols.push(vec![(i, sigma)]);
            lo.push(0.0);
            if basis[i] == usize::MAX {
                up.push(f64::INFINITY);
                x.push(residual[i].abs());
                state.push(State::Basic(i));
                basis[i] = n + n_ineq + i;
                binv[i * m + i] = sigma;
            } else {
                up.push(0.0);
                x.push(0.0);
                state.push(State::AtLower);
            }
        }
        let max_iters = cfg.max_iters.unwrap_or(50 * (m + n).max(1));
        Tableau {
            m,
            n_struct: n,
            cols,
            lo,
            up,
            x,
            state,
            basis,
            binv,
            rhs,
            iterations: 0,
            max_iters,
            since_refactor: 0,
            cfg: *cfg,
        }
    }

    fn dot_col(&self, y: &[f64], j: usize) -> f64 {
        self.cols[j].iter().map(|&(i, a)| y[i] * a).sum()
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yk, b) in y.iter_mut().zip(row) {
                    *yk += c * b;
                }
            }
        }
        y
    }

    /// `B⁻¹ A_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(k, a) in &self.cols[j] {
            for (i, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[i * m + k] * a;
            }
        }
        alpha
    }

    fn run(&mut self, cost: &[f64]) -> Result<Phase> {
        let stall_limit = 3 * (self.m + self.n_struct).max(1);
        let mut stalled = 0usize;
        let mut bland = false;
        loop {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let y = self.duals(cost);
            let Some((q, dir, d)) = self.price(cost, &y, bland) else {
                return Ok(Phase::Optimal);
            };
            if self.iterations >= self.max_iters {
                return Err(Error::IterationLimit { limit: self.max_iters });
            }
            self.iterations += 1;
            let alpha = self.ftran(q);
            let step = match self.ratio_test(q, dir, &alpha) {
                Some(step) => step,
                None => return Ok(Phase::Unbounded),
            };
            if step * d.abs() > self.cfg.opt_tol * 1e-3 {
                stalled = 0;
                bland = false;
            } else {
                stalled += 1;
                if stalled > stall_limit && !bland {
                    debug!("switching to Bland's rule after {stalled} non-improving pivots");
                    bland = true;
                }
            }
        }
    }

    /// Entering column, its direction (+1 increase, −1 decrease) and reduced cost.
    fn price(&self, cost: &[f64], y: &[f64], bland: bool) -> Option<(usize, f64, f64)> {
        let tol = self.cfg.opt_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols.len() {
            if matches!(self.state[j], State::Basic(_)) || self.lo[j] == self.up[j] {
                continue;
            }
            let d = cost[j] - self.dot_col(y, j);
            let dir = match self.state[j] {
                State::AtLower if d < -tol => 1.0,
                State::AtUpper if d > tol => -1.0,
                State::Free if d.abs() > tol => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir, d));
            }
            if best.is_none_or(|(_, _, bd)| d.abs() > bd.abs()) {
                best = Some((j, dir, d));
            }
        }
        best
    }

    /// Moves column `q` in direction `dir`; returns the step length, or `None`
    /// on an unbounded ray.
    fn ratio_test(&mut self, q: usize, dir: f64, alpha: &[f64]) -> Option<f64> {
        let tol = self.cfg.feas_tol;
        let mut relaxed = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[i];
            let rate = -dir * a;
            let limit =
                if rate < 0.0 { (self.x[j] - self.lo[j] + tol) / -rate } else { (self.up[j] - self.x[j] + tol) / rate };
            relaxed = relaxed.min(limit);
        }
        let mut leave: Option<(usize, f64)> = None;
        if relaxed.is_finite() {
            let mut best_pivot = 0.0;
            for (i, &a) in alpha.iter().enumerate() {
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.basis[i];
                let rate = -dir * a;
                let exact = if rate < 0.0 { (self.x[j] - self.lo[j]) / -rate } else { (self.up[j] - self.x[j]) / rate };
                if exact <= relaxed && a.abs() > best_pivot {
                    best_pivot = a.abs();
                    leave = Some((i, exact.max(0.0)));
                }
            }
        }
        let span = self.up[q] - self.lo[q];
        match leave {
            Some((r, theta)) if theta < span => {
                self.apply_step(q, dir, theta, alpha);
                self.pivot(q, r, dir, alpha);
                Some(theta)
            }
            _ if span.is_finite() => {
                self.apply_step(q, dir, span, alpha);
                self.x[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
                self.state[q] = if dir > 0.0 { State::AtUpper } else { State::AtLower };
                Some(span)
            }
            _ => None,
        }
    }

    fn apply_step(&mut self, q: usize, dir: f64, theta: f64, alpha: &[f64]) {
        if theta == 0.0 {
            return;
        }
        for (i, &a) in alpha.iter().enumerate() {
            let j = self.basis[i];
            self.x[j] -= dir * theta * a;
        }
        self.x[q] += dir * theta;
    }

    fn pivot(&mut self, q: usize, r: usize, dir: f64, alpha: &[f64]) {
        let leaving = self.basis[r];
        let rate = -dir * alpha[r];
        if rate < 0.0 {
            self.x[leaving] = self.lo[leaving];
            self.state[leaving] = State::AtLower;
        } else {
            self.x[leaving] = self.up[leaving];
            self.state[leaving] = State::AtUpper;
        }
        self.eta_update(r, alpha);
        self.basis[r] = q;
        self.state[q] = State::Basic(r);
    }

    fn eta_update(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let inv = 1.0 / alpha[r];
        for k in 0..m {
            self.binv[r * m + k] *= inv;
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for (i, row) in before.chunks_exact_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                row.iter_mut().zip(pivot_row.iter()).for_each(|(b, p)| *b -= f * p);
            }
        }
        for (i, row) in after.chunks_exact_mut(m).enumerate() {
            let f = alpha[r + 1 + i];
            if f != 0.0 {
                row.iter_mut().zip(pivot_row.iter()).for_each(|(b, p)| *b -= f * p);
            }
        }
        self.since_refactor += 1;
    }

    /// Replaces basic artificials by structural or slack columns where possible.
    fn drive_out_artificials(&mut self, art_start: usize) {
        for r in 0..self.m {
            if self.basis[r] < art_start {
                continue;
            }
            let row: Vec<f64> = self.binv[r * self.m..(r + 1) * self.m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..art_start {
                if matches!(self.state[j], State::Basic(_)) {
                    continue;
                }
                let v = self.dot_col(&row, j);
                if v.abs() > 1e-7 && best.is_none_or(|(_, b)| v.abs() > b) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((q, _)) = best {
                let alpha = self.ftran(q);
                let leaving = self.basis[r];
                self.eta_update(r, &alpha);
                self.x[leaving] = 0.0;
                self.state[leaving] = State::AtLower;
                self.basis[r] = q;
                self.state[q] = State::Basic(r);
            }
        }
        if self.refactor().is_err() {
            debug!("refactor after artificial drive-out failed");
        }
    }

    /// Rebuilds `B⁻¹` by Gauss-Jordan elimination and recomputes basic values.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let mut a = vec![0.0; m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                a[i * m + c] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m).max_by(|&i, &k| a[i * m + c].abs().total_cmp(&a[k * m + c].abs())).unwrap_or(c);
            let pv = a[p * m + c];
            if pv.abs() < 1e-12 {
                return Err(Error::Solver("singular basis during refactorization".into()));
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let inv_pv = 1.0 / pv;
            for k in 0..m {
                a[c * m + k] *= inv_pv;
                inv[c * m + k] *= inv_pv;
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = a[i * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        a[i * m + k] -= f * a[c * m + k];
                        inv[i * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        self.binv = inv;

        let mut residual = self.rhs.clone();
        for j in 0..self.cols.len() {
            if matches!(self.state[j], State::Basic(_)) || self.x[j] == 0.0 {
                continue;
            }
            for &(i, v) in &self.cols[j] {
                residual[i] -= v * self.x[j];
            }
        }
        for r in 0..m {
            let v: f64 = (0..m).map(|k| self.binv[r * m + k] * residual[k]).sum();
            self.x[self.basis[r]] = v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::NominalLp;

    fn solve(lp: &NominalLp) -> LpSolution {
        solve_lp(lp, &SimplexConfig::default()).unwrap()
    }

    #[test]
    fn single_bounded_variable() {
        let lp = NominalLp::new(vec![-1.0]).with_ineq(vec![1.0], 1.0);
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.w[0] - 1.0).abs() < 1e-12);
        assert!((s.objective + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_row() {
        let lp = NominalLp::new(vec![1.0]).with_ineq(vec![1.0], -1.0);
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_face_is_deterministic() {
        let lp = NominalLp::new(vec![-1.0, -1.0]).with_ineq(vec![1.0, 1.0], 1.0);
        let a = solve(&lp);
        let b = solve(&lp);
        assert!((a.objective + 1.0).abs() < 1e-12);
        assert_eq!(a, b);
    }

    #[test]
    fn unbounded_ray() {
        let lp = NominalLp::new(vec![-1.0, 0.0]).with_ineq(vec![0.0, 1.0], 1.0);
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y s.t. x − y = 1, x + y ≥ −3 (as −x − y ≤ 3), both free.
        let inf = f64::INFINITY;
        let lp = NominalLp::new(vec![1.0, 1.0])
            .with_ineq(vec![-1.0, -1.0], 3.0)
            .with_eq(vec![1.0, -1.0], 1.0)
            .with_bounds(vec![-inf, -inf], vec![inf, inf]);
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 3.0).abs() < 1e-9);
        assert!((s.w[0] - s.w[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bound_flips_without_rows() {
        let lp = NominalLp::new(vec![-2.0, 3.0]).with_bounds(vec![-1.0, -4.0], vec![5.0, 2.0]);
        let s = solve(&lp);
        assert_eq!(s.w, vec![5.0, -4.0]);
        assert_eq!(s.objective, -22.0);
    }

    #[test]
    fn iteration_limit_is_an_error() {
        let lp = NominalLp::new(vec![-1.0, -1.0]).with_ineq(vec![1.0, 2.0], 4.0).with_ineq(vec![3.0, 1.0], 6.0);
        let cfg = SimplexConfig { max_iters: Some(1), ..SimplexConfig::default() };
        assert_eq!(solve_lp(&lp, &cfg), Err(Error::IterationLimit { limit: 1 }));
    }

    #[test]
    fn duals_satisfy_complementary_slackness() {
        // max 3x + 2y s.t. x + y ≤ 4, x + 3y ≤ 6, x ≤ 3.
        let lp = NominalLp::new(vec![-3.0, -2.0])
            .with_ineq(vec![1.0, 1.0], 4.0)
            .with_ineq(vec![1.0, 3.0], 6.0)
            .with_bounds(vec![0.0, 0.0], vec![3.0, f64::INFINITY]);
        let s = solve(&lp);
        assert!((s.objective + 11.0).abs() < 1e-9);
        for (row, y) in lp.ineq.iter().zip(&s.duals) {
            assert!(*y <= 1e-12);
            assert!((y * (row.rhs - row.activity(&s.w))).abs() < 1e-9);
        }
        // Dual objective equals primal objective: bᵀy + Σ bound contributions.
        let dual_obj: f64 = lp.ineq.iter().zip(&s.duals).map(|(r, y)| r.rhs * y).sum::<f64>()
            + s.reduced_costs.iter().zip(&s.w).map(|(d, x)| d * x).sum::<f64>();
        assert!((dual_obj - s.objective).abs() < 1e-9);
    }
}
