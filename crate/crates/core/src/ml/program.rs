//! A small modelling layer: linear cost, diagonal quadratic, linear rows and
//! second-order cones over bounded variables. Solved either by the simplex
//! (purely linear models) or by Clarabel.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpStatus, NominalLp, SimplexConfig};

/// Sparse affine expression `Σ c_j x_j + constant`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn var(j: usize, c: f64) -> Self {
        Affine { terms: vec![(j, c)], constant: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Affine { terms: Vec::new(), constant: c }
    }

    pub fn plus(mut self, j: usize, c: f64) -> Self {
        if c != 0.0 {
            self.terms.push((j, c));
        }
        self
    }

    pub fn plus_const(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct ConvexProgram {
    pub cost: Vec<f64>,
    /// Objective gets `½ Σ quad_j x_j²`.
    pub quad: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// `expr ≤ 0`.
    le: Vec<Affine>,
    /// `expr = 0`.
    eq: Vec<Affine>,
    /// `‖(e_1, …, e_m)‖₂ ≤ e_0`.
    soc: Vec<Vec<Affine>>,
}

impl ConvexProgram {
    pub fn add_var(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        self.cost.push(cost);
        self.quad.push(0.0);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    /// `lhs ≤ rhs`.
    pub fn add_le(&mut self, lhs: Affine, rhs: Affine) {
        let mut e = lhs;
        e.constant -= rhs.constant;
        e.terms.extend(rhs.terms.into_iter().map(|(j, c)| (j, -c)));
        self.le.push(e);
    }

    #[allow(dead_code)]
    pub fn add_eq(&mut self, expr: Affine) {
        self.eq.push(expr);
    }

    pub fn add_soc(&mut self, entries: Vec<Affine>) {
        debug_assert!(entries.len() >= 2);
        self.soc.push(entries);
    }

    /// `x² ≤ y` written as `‖(y − 1, 2x)‖ ≤ y + 1`.
    pub fn add_square_le(&mut self, x: Affine, y: Affine) {
        let top = y.clone().plus_const(1.0);
        let mid = y.plus_const(-1.0);
        let mut twice = x;
        twice.constant *= 2.0;
        for t in &mut twice.terms {
            t.1 *= 2.0;
        }
        self.add_soc(vec![top, mid, twice]);
    }

    pub fn is_linear(&self) -> bool {
        self.soc.is_empty() && self.quad.iter().all(|&q| q == 0.0)
    }

    pub fn solve(&self, simplex: &SimplexConfig) -> Result<Vec<f64>> {
        if self.is_linear() {
            self.solve_simplex(simplex)
        } else {
            self.solve_conic()
        }
    }

    fn dense(&self, e: &Affine) -> Vec<f64> {
        let mut row = vec![0.0; self.num_vars()];
        for &(j, c) in &e.terms {
            row[j] += c;
        }
        row
    }

    fn solve_simplex(&self, simplex: &SimplexConfig) -> Result<Vec<f64>> {
        let mut lp = NominalLp::new(self.cost.clone()).with_bounds(self.lower.clone(), self.upper.clone());
        for e in &self.le {
            lp = lp.with_ineq(self.dense(e), -e.constant);
        }
        for e in &self.eq {
            lp = lp.with_eq(self.dense(e), -e.constant);
        }
        let sol = solve_lp(&lp, simplex)?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.w),
            LpStatus::Infeasible => Err(Error::Infeasible),
            LpStatus::Unbounded => Err(Error::Unbounded),
        }
    }

    fn solve_conic(&self) -> Result<Vec<f64>> {
        let n = self.num_vars();
        let (mut ri, mut ci, mut vals) = (Vec::new(), Vec::new(), Vec::new());
        let mut b = Vec::new();
        let mut cones = Vec::new();
        // Rows are `s = b − Ax`, so an expression e = aᵀx + c enters as
        // A-row −a with b = c for `e ∈ K`.
        let mut push = |e: &Affine, ri: &mut Vec<usize>, ci: &mut Vec<usize>, vals: &mut Vec<f64>| {
            let r = b.len();
            for &(j, c) in &e.terms {
                ri.push(r);
                ci.push(j);
                vals.push(-c);
            }
            b.push(e.constant);
        };
        if !self.eq.is_empty() {
            for e in &self.eq {
                push(e, &mut ri, &mut ci, &mut vals);
            }
            cones.push(SupportedConeT::ZeroConeT(self.eq.len()));
        }
        let mut nonneg = 0;
        for e in &self.le {
            // e ≤ 0  ⇔  −e ≥ 0
            let neg = Affine { terms: e.terms.iter().map(|&(j, c)| (j, -c)).collect(), constant: -e.constant };
            push(&neg, &mut ri, &mut ci, &mut vals);
            nonneg += 1;
        }
        for j in 0..n {
            if self.lower[j].is_finite() {
                push(&Affine::var(j, 1.0).plus_const(-self.lower[j]), &mut ri, &mut ci, &mut vals);
                nonneg += 1;
            }
            if self.upper[j].is_finite() {
                push(&Affine::var(j, -1.0).plus_const(self.upper[j]), &mut ri, &mut ci, &mut vals);
                nonneg += 1;
            }
        }
        if nonneg > 0 {
            cones.push(SupportedConeT::NonnegativeConeT(nonneg));
        }
        for s in &self.soc {
            for e in s {
                push(e, &mut ri, &mut ci, &mut vals);
            }
            cones.push(SupportedConeT::SecondOrderConeT(s.len()));
        }
        let m = b.len();
        let a = CscMatrix::new_from_triplets(m, n, ri, ci, vals);
        let qi: Vec<usize> = (0..n).filter(|&j| self.quad[j] != 0.0).collect();
        let qv: Vec<f64> = qi.iter().map(|&j| self.quad[j]).collect();
        let p = CscMatrix::new_from_triplets(n, n, qi.clone(), qi, qv);
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(400)
            .build()
            .map_err(|e| Error::Solver(format!("{e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &self.cost, &a, &b, &cones, settings)
            .map_err(|e| Error::Solver(format!("{e:?}")))?;
        solver.solve();
        match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => Ok(solver.solution.x.clone()),
            // Badly scaled data can stall the last digits; keep an iterate
            // that is already accurate.
            SolverStatus::InsufficientProgress | SolverStatus::MaxIterations
                if solver.info.res_primal.max(solver.info.res_dual) <= 1e-7 && solver.info.gap_rel <= 1e-7 =>
            {
                log::warn!(
                    "conic solve stopped early ({:?}), residuals {:.1e}/{:.1e}, gap {:.1e}",
                    solver.solution.status,
                    solver.info.res_primal,
                    solver.info.res_dual,
                    solver.info.gap_rel
                );
                Ok(solver.solution.x.clone())
            }
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => Err(Error::Infeasible),
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => Err(Error::Unbounded),
            other => Err(Error::Solver(format!(
                "conic solve ended with {other:?} (residuals {:.1e}/{:.1e}, gap {:.1e})",
                solver.info.res_primal, solver.info.res_dual, solver.info.gap_rel
            ))),
        }
    }
}
