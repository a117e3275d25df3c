//! Linear programs in the form `min cᵀw + c₀ s.t. Aw ≤ b, Ew = d, l ≤ w ≤ u`.

mod mps;
mod simplex;

pub use mps::{parse_mps, write_mps};
pub use simplex::{solve_lp, SimplexConfig};

use crate::error::{check_dim, Error, Result};

/// One constraint row with dense coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub name: String,
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl LinearRow {
    pub fn new(name: impl Into<String>, coeffs: Vec<f64>, rhs: f64) -> Self {
        LinearRow { name: name.into(), coeffs, rhs }
    }

    pub fn activity(&self, w: &[f64]) -> f64 {
        self.coeffs.iter().zip(w).map(|(a, x)| a * x).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NominalLp {
    pub name: String,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    /// Rows `aᵀw ≤ b`.
    pub ineq: Vec<LinearRow>,
    /// Rows `eᵀw = d`.
    pub eq: Vec<LinearRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub col_names: Vec<String>,
}

impl NominalLp {
    /// An LP over `n` variables with default bounds `[0, ∞)` and no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        NominalLp {
            name: String::new(),
            objective,
            objective_offset: 0.0,
            ineq: Vec::new(),
            eq: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            col_names: (0..n).map(|j| format!("x{}", j + 1)).collect(),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn with_ineq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        let name = format!("r{}", self.ineq.len() + self.eq.len() + 1);
        self.ineq.push(LinearRow::new(name, coeffs, rhs));
        self
    }

    pub fn with_eq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        let name = format!("r{}", self.ineq.len() + self.eq.len() + 1);
        self.eq.push(LinearRow::new(name, coeffs, rhs));
        self
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_cols();
        check_dim(n, self.lower.len())?;
        check_dim(n, self.upper.len())?;
        check_dim(n, self.col_names.len())?;
        if let Some(c) = self.objective.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidData(format!("objective coefficient {c} is not finite")));
        }
        for row in self.ineq.iter().chain(&self.eq) {
            check_dim(n, row.coeffs.len())?;
            if row.coeffs.iter().any(|a| !a.is_finite()) || !row.rhs.is_finite() {
                return Err(Error::InvalidData(format!("row {} has a non-finite entry", row.name)));
            }
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(Error::InvalidData(format!(
                    "column {} has bounds [{}, {}]",
                    self.col_names[j], self.lower[j], self.upper[j]
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, w: &[f64]) -> f64 {
        self.objective_offset + self.objective.iter().zip(w).map(|(c, x)| c * x).sum::<f64>()
    }

    /// Largest violation of any row or bound at `w`.
    pub fn max_violation(&self, w: &[f64]) -> f64 {
        let rows = self.ineq.iter().map(|r| (r.activity(w) - r.rhs).max(0.0));
        let eqs = self.eq.iter().map(|r| (r.activity(w) - r.rhs).abs());
        let bounds = w.iter().enumerate().map(|(j, x)| (self.lower[j] - x).max(x - self.upper[j]).max(0.0));
        rows.chain(eqs).chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; empty unless optimal.
    pub w: Vec<f64>,
    /// Objective including the offset; `NaN` unless optimal.
    pub objective: f64,
    pub iterations: usize,
    /// Row multipliers `y = c_B B⁻¹`, inequality rows first then equalities.
    /// Nonpositive on `≤` rows at optimality.
    pub duals: Vec<f64>,
    /// `c − Aᵀy` for the structural columns.
    pub reduced_costs: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
