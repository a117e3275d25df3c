//! Norm-ball uncertainty sets described by their support functions.
//!
//! A set is `{δ : ‖Āδ‖ ≤ z}` with `Ā = diag(1/ā_i)` and one of four norms. With
//! `y = Ā⁻¹w = ā∘w` the support function `sup_{δ∈C} δᵀw` is `z` times the dual
//! norm of `y`.

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::norms::{largest_sum_subgradient_unchecked, largest_sum_unchecked};
use crate::norms::{lp_norm, magnitude_order, LpKind};

/// The norm defining the ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SetKind {
    /// `‖Āδ‖₁ ≤ z`, support `z‖y‖∞`.
    L1Ball,
    /// `‖Āδ‖₂ ≤ z`, support `z‖y‖₂`.
    L2Ball,
    /// `‖Āδ‖∞ ≤ z`, support `z‖y‖₁`.
    LInfBall,
    /// `max(‖Āδ‖₁/k, ‖Āδ‖∞) ≤ z`, support `z·ρ_k(y)`.
    TopKDualBall { k: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySet {
    pub kind: SetKind,
    pub scale: f64,
    /// The `ā_i`; identity when absent.
    pub weights: Option<Vec<f64>>,
}

impl UncertaintySet {
    pub fn new(kind: SetKind, scale: f64) -> Self {
        UncertaintySet { kind, scale, weights: None }
    }

    pub fn weighted(kind: SetKind, scale: f64, weights: Vec<f64>) -> Self {
        UncertaintySet { kind, scale, weights: Some(weights) }
    }

    /// The degenerate set `{0}`.
    pub fn zero() -> Self {
        UncertaintySet::new(SetKind::LInfBall, 0.0)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(Error::Domain(format!("set scale {} must be finite and >= 0", self.scale)));
        }
        if let Some(weights) = &self.weights {
            check_dim(n, weights.len())?;
            if let Some(bad) = weights.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
                return Err(Error::Domain(format!("set weight {bad} must be positive")));
            }
        }
        if let SetKind::TopKDualBall { k } = self.kind {
            if !(k.is_finite() && k >= 1.0 && k <= n as f64) {
                return Err(Error::Domain(format!("order k = {k} outside [1, {n}]")));
            }
        }
        Ok(())
    }

    /// `y = Ā⁻¹w`.
    fn scaled(&self, w: &[f64]) -> Vec<f64> {
        match &self.weights {
            Some(a) => w.iter().zip(a).map(|(x, a)| x * a).collect(),
            None => w.to_vec(),
        }
    }

    fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |a| a[i])
    }

    /// Norm of `Āδ` in the set's own norm; membership is `gauge ≤ scale`.
    pub fn gauge(&self, delta: &[f64]) -> f64 {
        // Allocation-free: the grid oracle calls this once per grid point.
        let (mut l1, mut sq, mut inf) = (0.0f64, 0.0f64, 0.0f64);
        for (i, d) in delta.iter().enumerate() {
            let u = (d / self.weight(i)).abs();
            l1 += u;
            sq += u * u;
            inf = inf.max(u);
        }
        match self.kind {
            SetKind::L1Ball => l1,
            SetKind::L2Ball => sq.sqrt(),
            SetKind::LInfBall => inf,
            SetKind::TopKDualBall { k } if k > 0.0 => (l1 / k).max(inf),
            SetKind::TopKDualBall { .. } => {
                if l1 > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    pub fn contains(&self, delta: &[f64], tol: f64) -> bool {
        self.gauge(delta) <= self.scale + tol
    }
}

/// Penalty `h(δ) = weight_l1·‖δ‖₁ + weight_sq·‖δ‖₂²` charged for optimism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    None,
    L1,
    SquaredL2,
    ElasticNet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimismPenalty {
    pub kind: PenaltyKind,
    pub weight_l1: f64,
    pub weight_sq: f64,
}

impl OptimismPenalty {
    pub const NONE: OptimismPenalty = OptimismPenalty { kind: PenaltyKind::None, weight_l1: 0.0, weight_sq: 0.0 };

    pub fn l1(weight: f64) -> Self {
        OptimismPenalty { kind: PenaltyKind::L1, weight_l1: weight, weight_sq: 0.0 }
    }

    pub fn squared(weight: f64) -> Self {
        OptimismPenalty { kind: PenaltyKind::SquaredL2, weight_l1: 0.0, weight_sq: weight }
    }

    pub fn elastic_net(weight_l1: f64, weight_sq: f64) -> Self {
        OptimismPenalty { kind: PenaltyKind::ElasticNet, weight_l1, weight_sq }
    }

    /// Effective `(l1, sq)` weights; components not used by the kind read as zero.
    fn weights(&self) -> (f64, f64) {
        match self.kind {
            PenaltyKind::None => (0.0, 0.0),
            PenaltyKind::L1 => (self.weight_l1, 0.0),
            PenaltyKind::SquaredL2 => (0.0, self.weight_sq),
            PenaltyKind::ElasticNet => (self.weight_l1, self.weight_sq),
        }
    }

    pub fn value(&self, delta: &[f64]) -> f64 {
        let (l1, sq) = self.weights();
        delta.iter().map(|d| l1 * d.abs() + sq * d * d).sum()
    }

    fn validate(&self) -> Result<()> {
        let (l1, sq) = self.weights();
        if l1.is_finite() && sq.is_finite() && l1 >= 0.0 && sq >= 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("penalty weights ({l1}, {sq}) must be finite and >= 0")))
        }
    }
}

/// A linear term `wᵀ(X + δ^P + δ^O)` with pessimistic and optimistic disturbances.
#[derive(Debug, Clone, PartialEq)]
pub struct OroLinearTerm {
    pub nominal: Vec<f64>,
    pub pessimistic: UncertaintySet,
    pub optimistic: UncertaintySet,
    pub optimism_penalty: OptimismPenalty,
}

impl OroLinearTerm {
    fn validate(&self, w: &[f64]) -> Result<()> {
        let n = self.nominal.len();
        check_dim(n, w.len())?;
        self.pessimistic.validate(n)?;
        self.optimistic.validate(n)?;
        self.optimism_penalty.validate()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `sup_{δ ∈ set} δᵀw` in closed form.
pub fn support_value(set: &UncertaintySet, w: &[f64]) -> Result<f64> {
    set.validate(w.len())?;
    Ok(support_unchecked(set, w))
}

pub(crate) fn support_unchecked(set: &UncertaintySet, w: &[f64]) -> f64 {
    if set.scale == 0.0 {
        return 0.0;
    }
    let y = set.scaled(w);
    let dual = match set.kind {
        SetKind::L1Ball => lp_norm(&y, LpKind::Inf),
        SetKind::L2Ball => lp_norm(&y, LpKind::L2),
        SetKind::LInfBall => lp_norm(&y, LpKind::L1),
        SetKind::TopKDualBall { k } => largest_sum_unchecked(&y, k),
    };
    set.scale * dual
}

/// A maximizer of `δᵀw` over the set.
pub fn argsup(set: &UncertaintySet, w: &[f64]) -> Result<Vec<f64>> {
    set.validate(w.len())?;
    let y = set.scaled(w);
    let n = y.len();
    let mut u = match set.kind {
        SetKind::L1Ball => {
            let mut u = vec![0.0; n];
            if let Some(&i) = magnitude_order(&y).first() {
                if y[i] != 0.0 {
                    u[i] = y[i].signum();
                }
            }
            u
        }
        SetKind::L2Ball => {
            let norm = lp_norm(&y, LpKind::L2);
            if norm > 0.0 {
                y.iter().map(|v| v / norm).collect()
            } else {
                vec![0.0; n]
            }
        }
        SetKind::LInfBall => y.iter().map(|v| if *v == 0.0 { 0.0 } else { v.signum() }).collect(),
        SetKind::TopKDualBall { k } => largest_sum_subgradient_unchecked(&y, k),
    };
    for (i, ui) in u.iter_mut().enumerate() {
        *ui *= set.scale * set.weight(i);
    }
    Ok(u)
}

/// `wᵀX + sup_{δ^P} δᵀw + inf_{δ^O} (δᵀw + h(δ))`.
///
/// Without a penalty the optimistic half is `−support(O, w)`. With one, the
/// optimistic set must be an L∞ ball.
pub fn oro_linear_value(term: &OroLinearTerm, w: &[f64]) -> Result<f64> {
    term.validate(w)?;
    let base = dot(w, &term.nominal) + support_unchecked(&term.pessimistic, w);
    let optimistic = match term.optimism_penalty.kind {
        PenaltyKind::None => -support_unchecked(&term.optimistic, w),
        _ => penalized_optimism_inf(&term.optimistic, &term.optimism_penalty, w)?,
    };
    Ok(base + optimistic)
}

/// `inf_{δ ∈ set} wᵀδ + h(δ)` for an L∞ ball, one coordinate at a time.
///
/// Coordinate `i` minimizes `w_i d + a|d| + c d²` over `|d| ≤ z·ā_i`.
pub fn penalized_optimism_inf(set: &UncertaintySet, penalty: &OptimismPenalty, w: &[f64]) -> Result<f64> {
    if set.kind != SetKind::LInfBall {
        return Err(Error::Unsupported(format!("penalized optimism needs an L-infinity ball, got {:?}", set.kind)));
    }
    set.validate(w.len())?;
    penalty.validate()?;
    let (a, c) = penalty.weights();
    let total = w
        .iter()
        .enumerate()
        .map(|(i, wi)| {
            let radius = set.scale * set.weight(i);
            let excess = wi.abs() - a;
            if excess <= 0.0 || radius == 0.0 {
                return 0.0;
            }
            let t = if c > 0.0 { (excess / (2.0 * c)).min(radius) } else { radius };
            -excess * t + c * t * t
        })
        .sum();
    Ok(total)
}

const BRUTE_MAX_DIM: usize = 3;

/// Grid evaluation of `sup_{δ^P} inf_{δ^O} wᵀ(X + δ^P + δ^O) + h(δ^O)`.
///
/// Both sets are sampled on a uniform grid over their bounding box
/// `|δ_i| ≤ z·ā_i`, keeping only member points. Desk-scale only: `n ≤ 3`.
pub fn brute_force_sup_inf(term: &OroLinearTerm, w: &[f64], grid_points_per_dim: usize) -> Result<f64> {
    term.validate(w)?;
    let n = w.len();
    if n > BRUTE_MAX_DIM {
        return Err(Error::Unsupported(format!("brute-force oracle refuses n = {n} > {BRUTE_MAX_DIM}")));
    }
    if grid_points_per_dim < 11 {
        return Err(Error::Domain(format!("grid of {grid_points_per_dim} points per dimension is below 11")));
    }
    let nominal = dot(w, &term.nominal);
    let penalty = term.optimism_penalty;
    let sup = grid_extreme(&term.pessimistic, n, grid_points_per_dim, |d| dot(w, d), true);
    let inf = grid_extreme(&term.optimistic, n, grid_points_per_dim, |d| dot(w, d) + penalty.value(d), false);
    Ok(nominal + sup + inf)
}

/// A valid upper bound on `|brute_force_sup_inf − exact|` for the given grid.
///
/// Rounding the exact optimizer toward zero onto the grid keeps it inside any
/// of these balls and moves it by at most `2h√n` per coordinate box of spacing `h`.
pub fn brute_force_resolution(term: &OroLinearTerm, w: &[f64], grid_points_per_dim: usize) -> f64 {
    let n = w.len() as f64;
    let g = (grid_points_per_dim.max(2) - 1) as f64;
    let per_set = |set: &UncertaintySet, lipschitz_extra: f64| -> f64 {
        let radius = (0..w.len()).map(|i| set.scale * set.weight(i)).fold(0.0, f64::max);
        let h = 2.0 * radius / g;
        let grad = lp_norm(w, LpKind::L2) + lipschitz_extra;
        2.0 * h * n.sqrt() * grad
    };
    let (a, c) = term.optimism_penalty.weights();
    let opt_radius = (0..w.len()).map(|i| term.optimistic.scale * term.optimistic.weight(i)).fold(0.0, f64::max);
    let penalty_lip = n.sqrt() * (a + 2.0 * c * opt_radius);
    per_set(&term.pessimistic, 0.0) + per_set(&term.optimistic, penalty_lip)
}

fn grid_extreme<F>(set: &UncertaintySet, n: usize, g: usize, f: F, maximize: bool) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if set.scale == 0.0 || n == 0 {
        return f(&vec![0.0; n]);
    }
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let radius = set.scale * set.weight(i);
            (0..g).map(|s| radius * (2.0 * s as f64 / (g - 1) as f64 - 1.0)).collect()
        })
        .collect();
    let tol = 1e-12 * set.scale.max(1.0);
    let pick = |a: f64, b: f64| if maximize { a.max(b) } else { a.min(b) };
    let identity = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    // Parallel over the outer coordinates, sequential sweep of the first axis.
    (0..g.pow(n as u32 - 1))
        .into_par_iter()
        .fold(
            || (identity, vec![0.0; n]),
            |(mut best, mut delta), outer| {
                let mut rest = outer;
                for i in 1..n {
                    delta[i] = coords[i][rest % g];
                    rest /= g;
                }
                for &x in &coords[0] {
                    delta[0] = x;
                    if set.contains(&delta, tol) {
                        best = pick(best, f(&delta));
                    }
                }
                (best, delta)
            },
        )
        .map(|(best, _)| best)
        .reduce(|| identity, pick)
}
