//! The largest-k norm family and plain L_p norms.
//!
//! For `v ∈ R^n` and `k ∈ [1, n]` the largest-k norm is
//!
//! ```text
//! ρ_k(v) = Σ_{i ≤ ⌊k⌋} |v|_(i) + (k − ⌊k⌋)·|v|_(⌈k⌉)
//! ```
//!
//! where `|v|_(1) ≥ … ≥ |v|_(n)`. It interpolates between `‖v‖∞` (k = 1) and
//! `‖v‖₁` (k = n). Its dual norm is `max(‖v‖₁/k, ‖v‖∞)`, whose unit ball is the
//! budget-of-uncertainty polyhedron `{‖δ‖₁ ≤ k, ‖δ‖∞ ≤ 1}`.
//!
//! [`largest_sum`] is the same sum with `k ∈ [0, n]`: the support function of
//! `{‖δ‖₁ ≤ k, ‖δ‖∞ ≤ 1}` for any budget, which for `k < 1` is `k·‖v‖∞`.
//! Budgets of optimism below one coefficient go through it.

use crate::error::{Error, Result};

/// Which L_p norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpKind {
    L1,
    L2,
    Inf,
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_order(k: f64, n: usize) -> Result<()> {
    if k.is_finite() && k >= 1.0 && k <= n as f64 {
        Ok(())
    } else {
        Err(Error::Domain(format!("order k = {k} outside [1, {n}]")))
    }
}

fn check_budget(k: f64, n: usize) -> Result<()> {
    if k.is_finite() && k >= 0.0 && k <= n as f64 {
        Ok(())
    } else {
        Err(Error::Domain(format!("budget k = {k} outside [0, {n}]")))
    }
}

/// Indices sorted by decreasing magnitude; equal magnitudes keep ascending index order.
pub(crate) fn magnitude_order(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    // sort_by is stable, so ties stay lowest-index first.
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()));
    idx
}

/// Sum of the ⌊k⌋ largest magnitudes plus the fractional share of the next one.
pub fn largest_sum(v: &[f64], k: f64) -> Result<f64> {
    check_budget(k, v.len())?;
    Ok(largest_sum_unchecked(v, k))
}

pub(crate) fn largest_sum_unchecked(v: &[f64], k: f64) -> f64 {
    if k <= 0.0 || v.is_empty() {
        return 0.0;
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let whole = (k.floor() as usize).min(mags.len());
    let frac = k - k.floor();
    let mut total: f64 = mags[..whole].iter().sum();
    if frac > 0.0 && whole < mags.len() {
        total += frac * mags[whole];
    }
    total
}

/// A subgradient of [`largest_sum`] at `v`: `sign(v_i)` on the ⌊k⌋ largest
/// magnitudes, the fractional part of `k` times the sign on the next one.
pub fn largest_sum_subgradient(v: &[f64], k: f64) -> Result<Vec<f64>> {
    check_budget(k, v.len())?;
    Ok(largest_sum_subgradient_unchecked(v, k))
}

pub(crate) fn largest_sum_subgradient_unchecked(v: &[f64], k: f64) -> Vec<f64> {
    let mut g = vec![0.0; v.len()];
    if k <= 0.0 {
        return g;
    }
    let order = magnitude_order(v);
    let whole = (k.floor() as usize).min(v.len());
    for &i in &order[..whole] {
        g[i] = sign(v[i]);
    }
    let frac = k - k.floor();
    if frac > 0.0 && whole < v.len() {
        let i = order[whole];
        g[i] = frac * sign(v[i]);
    }
    g
}

/// Largest-k norm by the sort definition.
pub fn topk_norm(v: &[f64], k: f64) -> Result<f64> {
    check_order(k, v.len())?;
    Ok(largest_sum_unchecked(v, k))
}

/// Largest-k norm through its epigraph form `min_{ζ≥0} kζ + Σ[|v_i| − ζ]⁺`.
///
/// The objective is piecewise linear in ζ with breakpoints at `{0} ∪ {|v_i|}`,
/// so it is minimized by enumeration. Returns `(value, ζ*)`; when several
/// breakpoints attain the minimum the largest one is reported.
pub fn topk_norm_variational(v: &[f64], k: f64) -> Result<(f64, f64)> {
    check_order(k, v.len())?;
    let objective = |zeta: f64| -> f64 { k * zeta + v.iter().map(|x| (x.abs() - zeta).max(0.0)).sum::<f64>() };
    let mut best = (objective(0.0), 0.0);
    for zeta in v.iter().map(|x| x.abs()) {
        let value = objective(zeta);
        let slack = 4.0 * f64::EPSILON * best.0.abs().max(value.abs());
        if value < best.0 - slack || (value <= best.0 + slack && zeta > best.1) {
            best = (value, zeta);
        }
    }
    Ok(best)
}

/// Dual norm of the largest-k norm: `max(‖v‖₁/k, ‖v‖∞)`.
pub fn topk_dual_norm(v: &[f64], k: f64) -> Result<f64> {
    check_order(k, v.len())?;
    Ok(budget_dual_norm(v, k))
}

pub(crate) fn budget_dual_norm(v: &[f64], k: f64) -> f64 {
    let l1 = lp_norm(v, LpKind::L1);
    let inf = lp_norm(v, LpKind::Inf);
    if k > 0.0 {
        (l1 / k).max(inf)
    } else if l1 > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Subgradient of the largest-k norm at `v`.
///
/// Satisfies `gᵀv = ρ_k(v)` and `ρ_k*(g) ≤ 1`. Ties among equal magnitudes
/// go to the lowest index, and zero entries get zero sign.
pub fn topk_subgradient(v: &[f64], k: f64) -> Result<Vec<f64>> {
    check_order(k, v.len())?;
    Ok(largest_sum_subgradient_unchecked(v, k))
}

pub fn lp_norm(v: &[f64], p: LpKind) -> f64 {
    match p {
        LpKind::L1 => v.iter().map(|x| x.abs()).sum(),
        LpKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        LpKind::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

/// The `1/k`-scaled largest-k norm (average of the k largest magnitudes).
pub fn cvar_norm(v: &[f64], k: f64) -> Result<f64> {
    Ok(topk_norm(v, k)? / k)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: sort magnitudes and walk the definition term by term.
    fn oracle(v: &[f64], k: f64) -> f64 {
        let mut m: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        m.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut s = 0.0;
        let mut remaining = k;
        for x in m {
            let w = remaining.min(1.0);
            if w <= 0.0 {
                break;
            }
            s += w * x;
            remaining -= w;
        }
        s
    }

    #[test]
    fn topk_examples() {
        assert_eq!(oracle(&[3.0, -1.0, 2.0], 2.0), 5.0);
        assert_eq!(topk_norm(&[3.0, -1.0, 2.0], 2.0).unwrap(), 5.0);
        assert_eq!(topk_norm(&[0.0, 0.0, 0.0], 2.0).unwrap(), 0.0);
        assert_eq!(oracle(&[3.0, -1.0, 2.0], 1.5), 4.0);
        assert_eq!(topk_norm(&[3.0, -1.0, 2.0], 1.5).unwrap(), 4.0);
    }

    #[test]
    fn topk_rejects_bad_order() {
        assert!(matches!(topk_norm(&[1.0, 2.0], 0.5), Err(Error::Domain(_))));
        assert!(matches!(topk_norm(&[1.0, 2.0], 2.5), Err(Error::Domain(_))));
        assert!(topk_norm(&[1.0], f64::NAN).is_err());
        assert!(topk_subgradient(&[1.0], 3.0).is_err());
        assert!(topk_dual_norm(&[1.0], 0.0).is_err());
    }

    #[test]
    fn variational_examples() {
        assert_eq!(topk_norm_variational(&[3.0, -1.0, 2.0], 2.0).unwrap(), (5.0, 2.0));
        assert_eq!(topk_norm_variational(&[0.0], 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(topk_norm_variational(&[4.0, 4.0, 4.0], 2.0).unwrap(), (8.0, 4.0));
    }

    #[test]
    fn dual_norm_examples() {
        assert_eq!(topk_dual_norm(&[3.0, -1.0, 2.0], 2.0).unwrap(), 3.0);
        assert_eq!(topk_dual_norm(&[0.0, 0.0], 1.0).unwrap(), 0.0);
        assert_eq!(topk_dual_norm(&[1.0, 1.0, 1.0, 1.0], 2.0).unwrap(), 2.0);
    }

    #[test]
    fn subgradient_examples() {
        let g = topk_subgradient(&[3.0, -1.0, 2.0], 2.0).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 1.0]);
        assert_eq!(g[0] * 3.0 + g[2] * 2.0, 5.0);
        assert_eq!(topk_subgradient(&[1.0, 1.0], 1.0).unwrap(), vec![1.0, 0.0]);
        assert_eq!(topk_subgradient(&[0.0, 0.0], 1.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(topk_subgradient(&[-3.0, 1.0, 2.0], 1.5).unwrap(), vec![-1.0, 0.0, 0.5]);
    }

    #[test]
    fn lp_and_cvar_examples() {
        assert_eq!(lp_norm(&[3.0, 4.0], LpKind::L2), 5.0);
        assert_eq!(lp_norm(&[3.0, -4.0], LpKind::L1), 7.0);
        assert_eq!(lp_norm(&[3.0, -4.0], LpKind::Inf), 4.0);
        assert_eq!(cvar_norm(&[3.0, -1.0, 2.0], 2.0).unwrap(), 2.5);
        assert_eq!(cvar_norm(&[0.0, 0.0], 2.0).unwrap(), 0.0);
        assert_eq!(cvar_norm(&[6.0], 1.0).unwrap(), 6.0);
    }

    #[test]
    fn largest_sum_below_one() {
        assert_eq!(largest_sum(&[3.0, -5.0], 0.5).unwrap(), 2.5);
        assert_eq!(largest_sum(&[3.0, -5.0], 0.0).unwrap(), 0.0);
        assert_eq!(largest_sum_subgradient(&[3.0, -5.0], 0.5).unwrap(), vec![0.0, -0.5]);
        assert!(largest_sum(&[1.0], -0.1).is_err());
    }

    #[test]
    fn endpoints_match_l_inf_and_l1() {
        let v = [0.5, -7.25, 3.0, 0.0, -1.5];
        assert_eq!(topk_norm(&v, 1.0).unwrap(), lp_norm(&v, LpKind::Inf));
        assert_eq!(topk_norm(&v, 5.0).unwrap(), lp_norm(&v, LpKind::L1));
    }

    mod props {
        use super::super::*;
        use super::oracle;
        use proptest::prelude::*;

        fn vec_and_k() -> impl Strategy<Value = (Vec<f64>, f64)> {
            prop::collection::vec(-10.0f64..10.0, 1..20).prop_flat_map(|v| {
                let n = v.len() as f64;
                (Just(v), 1.0f64..=n)
            })
        }

        proptest! {
            #[test]
            fn matches_oracle((v, k) in vec_and_k()) {
                let a = topk_norm(&v, k).unwrap();
                prop_assert!((a - oracle(&v, k)).abs() <= 1e-12 * (1.0 + a));
            }

            #[test]
            fn homogeneous((v, k) in vec_and_k(), a in -5.0f64..5.0) {
                let scaled: Vec<f64> = v.iter().map(|x| a * x).collect();
                let lhs = topk_norm(&scaled, k).unwrap();
                let rhs = a.abs() * topk_norm(&v, k).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
            }

            #[test]
            fn subgradient_is_dual_feasible((v, k) in vec_and_k()) {
                let g = topk_subgradient(&v, k).unwrap();
                let dot: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
                let norm = topk_norm(&v, k).unwrap();
                prop_assert!((dot - norm).abs() <= 1e-10 * (1.0 + norm));
                prop_assert!(topk_dual_norm(&g, k).unwrap() <= 1.0 + 1e-12);
            }

            #[test]
            fn monotone_in_k((v, k) in vec_and_k(), t in 0.0f64..1.0) {
                let n = v.len() as f64;
                let k2 = k + t * (n - k);
                prop_assert!(topk_norm(&v, k).unwrap() <= topk_norm(&v, k2).unwrap() + 1e-12);
            }
        }
    }
}
