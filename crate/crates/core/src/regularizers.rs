//! Non-convex sparsity regularizers written as differences of convex functions.
//!
//! Each regularizer is `g^P(w) − g^O(w)` where `g^P = scale·‖w‖₁` and `g^O` is
//! convex. Equivalently it is the worst case over a pessimistic L∞ ball minus
//! the best case over an optimistic set, possibly with a penalty on optimism.

use crate::error::{Error, Result};
use crate::norms::{lp_norm, topk_norm, topk_subgradient, LpKind};
use crate::uncertainty::{penalized_optimism_inf, support_value, OptimismPenalty, SetKind, UncertaintySet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// `‖w‖₁ − ρ_k(w)`: zero exactly on vectors with at most `k` nonzeros.
    ApproxL0 {
        k: f64,
    },
    /// `‖w‖₁ − ‖w‖₂`.
    L12,
    /// `Σ min(|w_i|, θ)`.
    CappedL1 {
        theta: f64,
    },
    Mcp {
        lambda: f64,
        theta: f64,
    },
    Scad {
        lambda: f64,
        theta: f64,
    },
}

/// Values of a DC split at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DcParts {
    pub convex_value: f64,
    pub concave_value: f64,
    /// A subgradient of the subtracted convex part `g^O`.
    pub concave_subgradient: Vec<f64>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must be positive")))
    }
}

impl Regularizer {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Regularizer::ApproxL0 { k } => {
                if k.is_finite() && k >= 1.0 && k <= n as f64 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("order k = {k} outside [1, {n}]")))
                }
            }
            Regularizer::L12 => Ok(()),
            Regularizer::CappedL1 { theta } => positive("theta", theta),
            Regularizer::Mcp { lambda, theta } => {
                positive("lambda", lambda)?;
                positive("theta", theta)
            }
            Regularizer::Scad { lambda, theta } => {
                positive("lambda", lambda)?;
                if theta.is_finite() && theta > 2.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("SCAD needs theta > 2, got {theta}")))
                }
            }
        }
    }

    /// Coefficient of `‖w‖₁` in the convex part.
    pub fn l1_scale(&self) -> f64 {
        match *self {
            Regularizer::Mcp { lambda, .. } | Regularizer::Scad { lambda, .. } => lambda,
            _ => 1.0,
        }
    }

    /// `g^O(w)`, the subtracted convex part.
    fn concave_part(&self, w: &[f64]) -> f64 {
        match *self {
            Regularizer::ApproxL0 { k } => topk_norm(w, k).expect("validated order"),
            Regularizer::L12 => lp_norm(w, LpKind::L2),
            Regularizer::CappedL1 { theta } => w.iter().map(|x| (x.abs() - theta).max(0.0)).sum(),
            Regularizer::Mcp { lambda, theta } => w
                .iter()
                .map(|x| {
                    let a = x.abs();
                    if a <= theta * lambda {
                        a * a / (2.0 * theta)
                    } else {
                        lambda * a - theta * lambda * lambda / 2.0
                    }
                })
                .sum(),
            Regularizer::Scad { lambda, theta } => w
                .iter()
                .map(|x| {
                    let a = x.abs();
                    if a <= lambda {
                        0.0
                    } else if a <= theta * lambda {
                        (a - lambda).powi(2) / (2.0 * (theta - 1.0))
                    } else {
                        lambda * a - (theta + 1.0) * lambda * lambda / 2.0
                    }
                })
                .sum(),
        }
    }

    fn concave_subgradient(&self, w: &[f64]) -> Vec<f64> {
        let sign = |x: f64| if x == 0.0 { 0.0 } else { x.signum() };
        match *self {
            Regularizer::ApproxL0 { k } => topk_subgradient(w, k).expect("validated order"),
            Regularizer::L12 => {
                let norm = lp_norm(w, LpKind::L2);
                if norm > 0.0 {
                    w.iter().map(|x| x / norm).collect()
                } else {
                    vec![0.0; w.len()]
                }
            }
            Regularizer::CappedL1 { theta } => w.iter().map(|&x| if x.abs() > theta { sign(x) } else { 0.0 }).collect(),
            Regularizer::Mcp { lambda, theta } => w.iter().map(|&x| (x.abs() / theta).min(lambda) * sign(x)).collect(),
            Regularizer::Scad { lambda, theta } => w
                .iter()
                .map(|&x| {
                    let a = x.abs();
                    if a <= lambda {
                        0.0
                    } else if a <= theta * lambda {
                        (a - lambda) / (theta - 1.0) * sign(x)
                    } else {
                        lambda * sign(x)
                    }
                })
                .collect(),
        }
    }

    /// The pessimistic set, optimistic set and optimism penalty whose sup-inf
    /// value is this regularizer.
    pub fn robust_form(&self) -> (UncertaintySet, UncertaintySet, OptimismPenalty) {
        let pess = UncertaintySet::new(SetKind::LInfBall, self.l1_scale());
        match *self {
            Regularizer::ApproxL0 { k } => {
                (pess, UncertaintySet::new(SetKind::TopKDualBall { k }, 1.0), OptimismPenalty::NONE)
            }
            Regularizer::L12 => (pess, UncertaintySet::new(SetKind::L2Ball, 1.0), OptimismPenalty::NONE),
            Regularizer::CappedL1 { theta } => {
                (pess, UncertaintySet::new(SetKind::LInfBall, 1.0), OptimismPenalty::l1(theta))
            }
            Regularizer::Mcp { lambda, theta } => {
                (pess, UncertaintySet::new(SetKind::LInfBall, lambda), OptimismPenalty::squared(theta / 2.0))
            }
            Regularizer::Scad { lambda, theta } => (
                pess,
                UncertaintySet::new(SetKind::LInfBall, lambda),
                OptimismPenalty::elastic_net(lambda, (theta - 1.0) / 2.0),
            ),
        }
    }
}

pub fn reg_value(reg: &Regularizer, w: &[f64]) -> Result<f64> {
    reg.validate(w.len())?;
    let convex = reg.l1_scale() * lp_norm(w, LpKind::L1);
    // Clamp tiny negative round-off; every form is a nonnegative penalty.
    Ok((convex - reg.concave_part(w)).max(0.0))
}

pub fn reg_dc_parts(reg: &Regularizer, w: &[f64]) -> Result<DcParts> {
    reg.validate(w.len())?;
    Ok(DcParts {
        convex_value: reg.l1_scale() * lp_norm(w, LpKind::L1),
        concave_value: reg.concave_part(w),
        concave_subgradient: reg.concave_subgradient(w),
    })
}

/// Evaluates the regularizer as `sup_{δ^P} δᵀw + inf_{δ^O} (δᵀw + h(δ))`.
pub fn reg_via_robust_form(reg: &Regularizer, w: &[f64]) -> Result<f64> {
    reg.validate(w.len())?;
    let (pess, opt, penalty) = reg.robust_form();
    let sup = support_value(&pess, w)?;
    let inf = if penalty == OptimismPenalty::NONE {
        -support_value(&opt, w)?
    } else {
        penalized_optimism_inf(&opt, &penalty, w)?
    };
    Ok(sup + inf)
}
