use super::objective::{convex_subsolve, AffineForm, CompositeObjective, HingeTerm, ResidualShape, TopKTerm};
use super::{Dataset, LinearModel, TrainReport, TrainerConfig};
use crate::error::{check_dim, Error, Result};
use crate::norms::{largest_sum_subgradient_unchecked, largest_sum_unchecked, lp_norm, magnitude_order, LpKind};
use crate::regularizers::{reg_dc_parts, reg_value, Regularizer};

fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("nu = {nu} outside (0, 1]")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must be positive")))
    }
}

fn check_radius(z: f64) -> Result<()> {
    if z.is_finite() && z >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius {z} must be finite and nonnegative")))
    }
}

fn check_radii(data: &Dataset, z: &[f64]) -> Result<()> {
    check_dim(data.num_samples(), z.len())?;
    z.iter().try_for_each(|&v| check_radius(v))
}

fn regularizer_term(reg: Option<&Regularizer>, w: &[f64]) -> Result<f64> {
    reg.map_or(Ok(0.0), |r| reg_value(r, w))
}

/// `f(x) = wᵀx + b`, written as an affine form in the model variables.
fn decision_form(x: &[f64], scale: f64, constant: f64) -> AffineForm {
    AffineForm { w: x.iter().map(|v| scale * v).collect(), b: scale, aux: 0.0, constant }
}

/// Runs DCA steps from `start` until the relative decrease drops below
/// `dca_rel_tol`. `step` solves the subproblem linearized at a model,
/// `objective` evaluates the true objective. A step that increases the
/// objective beyond round-off is rejected and ends the run.
fn dca_loop(
    start: LinearModel,
    config: &TrainerConfig,
    mut step: impl FnMut(&LinearModel) -> Result<LinearModel>,
    objective: impl Fn(&LinearModel) -> f64,
) -> Result<(LinearModel, Vec<f64>)> {
    let mut model = start;
    let mut trace = vec![objective(&model)];
    for _ in 0..config.dca_max_iters {
        let prev = *trace.last().unwrap();
        let next = step(&model)?;
        let val = objective(&next);
        if val > prev + 1e-9 * prev.abs().max(1.0) {
            log::debug!("DCA step rejected: {val} > {prev}");
            break;
        }
        model = next;
        trace.push(val);
        if prev - val <= config.dca_rel_tol * prev.abs() {
            break;
        }
    }
    Ok((model, trace))
}

/// `ν·z·reg(w) + ν·γ + (1/N)Σ[−y_i f(X_i) − γ]⁺` with `γ = aux`.
pub fn nu_svc_objective(data: &Dataset, reg: Option<&Regularizer>, z: f64, nu: f64, m: &LinearModel) -> Result<f64> {
    check_dim(data.num_features(), m.w.len())?;
    let gamma = m.aux.unwrap_or(0.0);
    let n = data.num_samples() as f64;
    let loss: f64 = data.x.iter().zip(&data.y).map(|(x, y)| (-y * m.predict(x) - gamma).max(0.0)).sum();
    Ok(nu * z * regularizer_term(reg, &m.w)? + nu * gamma + loss / n)
}

/// `ν·ε + (1/N)Σ[−y_i f(X_i) − ε + z·reg(w)]⁺`: the regularizer inside the
/// hinge. Equal to [`nu_svc_objective`] at `γ = ε − z·reg(w)`.
pub fn nu_svc_inside_objective(
    data: &Dataset,
    reg: Option<&Regularizer>,
    z: f64,
    nu: f64,
    w: &[f64],
    b: f64,
    eps: f64,
) -> Result<f64> {
    check_dim(data.num_features(), w.len())?;
    let r = z * regularizer_term(reg, w)?;
    let m = LinearModel { w: w.to_vec(), b, aux: None };
    let n = data.num_samples() as f64;
    let loss: f64 = data.x.iter().zip(&data.y).map(|(x, y)| (-y * m.predict(x) - eps + r).max(0.0)).sum();
    Ok(nu * eps + loss / n)
}

fn validate_nu_svc(data: &Dataset, reg: Option<&Regularizer>, z: f64, nu: f64) -> Result<()> {
    data.validate_classification()?;
    if data.y.iter().all(|&v| v == data.y[0]) {
        return Err(Error::InvalidData("all samples carry the same label".into()));
    }
    check_nu(nu)?;
    check_radius(z)?;
    reg.map_or(Ok(()), |r| r.validate(data.num_features()))
}

/// Non-convex regularized ν-SVC trained by DCA. The model's `aux` is γ.
///
/// Every subproblem is an LP over `‖w‖∞ ≤ weight_bound`; the objective is
/// positively homogeneous, so without the box it is unbounded or zero.
pub fn train_nu_svc_oro(
    data: &Dataset,
    reg: Option<&Regularizer>,
    z: f64,
    nu: f64,
    config: &TrainerConfig,
) -> Result<TrainReport> {
    validate_nu_svc(data, reg, z, nu)?;
    config.validate()?;
    let n = data.num_features();
    let inv_n = 1.0 / data.num_samples() as f64;
    let subproblem = |l1: f64, lin: Vec<f64>| {
        let mut obj = CompositeObjective::new(n);
        obj.weight_bound = Some(config.weight_bound);
        obj.linear_aux = nu;
        obj.l1_weight = l1;
        obj.linear_w = lin;
        for (x, &y) in data.x.iter().zip(&data.y) {
            let mut form = decision_form(x, -y, 0.0);
            form.aux = -1.0;
            obj.hinges.push(HingeTerm { weight: inv_n, form, inner_norm: None });
        }
        obj
    };
    let objective = |m: &LinearModel| nu_svc_objective(data, reg, z, nu, m).unwrap_or(f64::INFINITY);

    let init = convex_subsolve(&subproblem(0.0, vec![0.0; n]), &LinearModel::zeros(n), config)?;
    let (model, trace) = match reg {
        Some(r) if z > 0.0 => dca_loop(
            init,
            config,
            |m| {
                let parts = reg_dc_parts(r, &m.w)?;
                let lin = parts.concave_subgradient.iter().map(|g| -nu * z * g).collect();
                convex_subsolve(&subproblem(nu * z * r.l1_scale(), lin), m, config)
            },
            objective,
        )?,
        _ => {
            let trace = vec![objective(&init)];
            (init, trace)
        }
    };
    Ok(TrainReport { model, objective_trace: trace, excluded: Vec::new() })
}

/// `ν·z·reg(w) + C(ν·ε′ + (1/N)Σ[|y_i − f(X_i)| − ε′]⁺)` with `ε′ = aux`.
pub fn nu_svr_objective(
    data: &Dataset,
    reg: Option<&Regularizer>,
    z: f64,
    nu: f64,
    c: f64,
    m: &LinearModel,
) -> Result<f64> {
    check_dim(data.num_features(), m.w.len())?;
    let eps = m.aux.unwrap_or(0.0);
    let n = data.num_samples() as f64;
    let loss: f64 = data.x.iter().zip(&data.y).map(|(x, y)| ((y - m.predict(x)).abs() - eps).max(0.0)).sum();
    Ok(nu * z * regularizer_term(reg, &m.w)? + c * (nu * eps + loss / n))
}

/// Non-convex regularized ν-SVR trained by DCA. The model's `aux` is ε′.
pub fn train_nu_svr_oro(
    data: &Dataset,
    reg: Option<&Regularizer>,
    z: f64,
    nu: f64,
    c: f64,
    config: &TrainerConfig,
) -> Result<TrainReport> {
    data.validate()?;
    check_nu(nu)?;
    check_radius(z)?;
    check_positive("C", c)?;
    config.validate()?;
    let n = data.num_features();
    if let Some(r) = reg {
        r.validate(n)?;
    }
    let weight = c / data.num_samples() as f64;
    let subproblem = |l1: f64, lin: Vec<f64>| {
        let mut obj = CompositeObjective::new(n);
        obj.linear_aux = c * nu;
        obj.l1_weight = l1;
        obj.linear_w = lin;
        for (x, &y) in data.x.iter().zip(&data.y) {
            // y − f − ε′ and f − y − ε′
            for s in [-1.0, 1.0] {
                let mut form = decision_form(x, s, -s * y);
                form.aux = -1.0;
                obj.hinges.push(HingeTerm { weight, form, inner_norm: None });
            }
        }
        obj
    };
    let solve = |obj: &CompositeObjective, from: &LinearModel| {
        // Raising a negative ε′ to 0 never increases the split-hinge objective.
        convex_subsolve(obj, from, config).map(|mut m| {
            m.aux = Some(m.aux.unwrap_or(0.0).max(0.0));
            m
        })
    };
    let objective = |m: &LinearModel| nu_svr_objective(data, reg, z, nu, c, m).unwrap_or(f64::INFINITY);

    let init = solve(&subproblem(0.0, vec![0.0; n]), &LinearModel::zeros(n))?;
    let (model, trace) = match reg {
        Some(r) if z > 0.0 => dca_loop(
            init,
            config,
            |m| {
                let parts = reg_dc_parts(r, &m.w)?;
                let lin = parts.concave_subgradient.iter().map(|g| -nu * z * g).collect();
                solve(&subproblem(nu * z * r.l1_scale(), lin), m)
            },
            objective,
        )?,
        _ => {
            let trace = vec![objective(&init)];
            (init, trace)
        }
    };
    Ok(TrainReport { model, objective_trace: trace, excluded: Vec::new() })
}

fn residuals(data: &Dataset, m: &LinearModel, shape: ResidualShape) -> (Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = data.x.iter().zip(&data.y).map(|(x, y)| y - m.predict(x)).collect();
    let z = r
        .iter()
        .map(|&v| match shape {
            ResidualShape::Absolute => v.abs(),
            ResidualShape::Squared => v * v,
        })
        .collect();
    (r, z)
}

/// `½‖w‖² + (C/N)(largest_sum(z, νN) − largest_sum(z, μN))` where `z` are the
/// absolute or squared residuals.
pub fn trimmed_objective(
    data: &Dataset,
    nu: f64,
    mu: f64,
    c: f64,
    shape: ResidualShape,
    m: &LinearModel,
) -> Result<f64> {
    check_dim(data.num_features(), m.w.len())?;
    let n = data.num_samples() as f64;
    let (_, z) = residuals(data, m, shape);
    let ridge = 0.5 * lp_norm(&m.w, LpKind::L2).powi(2);
    Ok(ridge + c / n * (largest_sum_unchecked(&z, nu * n) - largest_sum_unchecked(&z, mu * n)))
}

/// Trimmed-loss regression by DCA, finished by refits on the kept samples
/// when `μN` is whole. The `⌊μN⌋` largest residuals at the final point are
/// reported in `excluded`.
pub fn train_trimmed_regression(
    data: &Dataset,
    nu: f64,
    mu: f64,
    c: f64,
    shape: ResidualShape,
    config: &TrainerConfig,
) -> Result<TrainReport> {
    data.validate()?;
    check_nu(nu)?;
    if !(mu >= 0.0 && mu < nu) {
        return Err(Error::Domain(format!("mu = {mu} must lie in [0, nu = {nu})")));
    }
    check_positive("C", c)?;
    config.validate()?;
    let n = data.num_features();
    let big_n = data.num_samples() as f64;
    let weight = c / big_n;
    let subproblem = |lin_w: Vec<f64>, lin_b: f64| {
        let mut obj = CompositeObjective::new(n);
        obj.quadratic = 1.0;
        obj.linear_w = lin_w;
        obj.linear_b = lin_b;
        let forms = data.x.iter().zip(&data.y).map(|(x, &y)| decision_form(x, -1.0, y)).collect();
        obj.topk.push(TopKTerm { weight, order: nu * big_n, forms, shape });
        obj
    };
    let objective = |m: &LinearModel| trimmed_objective(data, nu, mu, c, shape, m).unwrap_or(f64::INFINITY);

    let init = convex_subsolve(&subproblem(vec![0.0; n], 0.0), &LinearModel::zeros(n), config)?;
    let (mut model, mut trace) = if mu * big_n > 0.0 {
        dca_loop(
            init,
            config,
            |m| {
                let (r, z) = residuals(data, m, shape);
                let g = largest_sum_subgradient_unchecked(&z, mu * big_n);
                // −(C/N)Σ g_i s_i ∇r_i with ∇r_i = (−X_i, −1).
                let mut lin_w = vec![0.0; n];
                let mut lin_b = 0.0;
                for ((x, gi), ri) in data.x.iter().zip(&g).zip(&r) {
                    let s = match shape {
                        ResidualShape::Absolute if *ri == 0.0 => 0.0,
                        ResidualShape::Absolute => ri.signum(),
                        ResidualShape::Squared => 2.0 * ri,
                    };
                    let coef = weight * gi * s;
                    for (l, xv) in lin_w.iter_mut().zip(x) {
                        *l += coef * xv;
                    }
                    lin_b += coef;
                }
                convex_subsolve(&subproblem(lin_w, lin_b), m, config)
            },
            objective,
        )?
    } else {
        let trace = vec![objective(&init)];
        (init, trace)
    };
    let trimmed = (mu * big_n).floor() as usize;
    let top = |m: &LinearModel| {
        let (_, z) = residuals(data, m, shape);
        let mut e: Vec<usize> = magnitude_order(&z).into_iter().take(trimmed).collect();
        e.sort_unstable();
        e
    };
    let mut excluded = top(&model);

    // With whole μN the trimmed loss is the smallest, over excluded sets E of
    // that size, of the top-(νN − μN) loss on the rest. Refitting on the
    // complement of the current E is a tighter majorant than the linearized
    // one and never touches the excluded points.
    if trimmed > 0 && mu * big_n == trimmed as f64 {
        for _ in 0..config.dca_max_iters {
            let keep: Vec<usize> = (0..data.num_samples()).filter(|i| excluded.binary_search(i).is_err()).collect();
            let mut obj = CompositeObjective::new(n);
            obj.quadratic = 1.0;
            let forms = keep.iter().map(|&i| decision_form(&data.x[i], -1.0, data.y[i])).collect();
            obj.topk.push(TopKTerm { weight, order: nu * big_n - trimmed as f64, forms, shape });
            let next = convex_subsolve(&obj, &model, config)?;
            let prev = *trace.last().unwrap();
            let val = objective(&next);
            if val > prev {
                break;
            }
            model = next;
            trace.push(val);
            let e = top(&model);
            if e == excluded {
                break;
            }
            excluded = e;
        }
    }
    Ok(TrainReport { model, objective_trace: trace, excluded })
}

fn csvm_problem(data: &Dataset, c: f64, z_p: Option<&[f64]>) -> CompositeObjective {
    let mut obj = CompositeObjective::new(data.num_features());
    obj.quadratic = 1.0;
    for (i, (x, &y)) in data.x.iter().zip(&data.y).enumerate() {
        let inner_norm = z_p.map(|z| (z[i], LpKind::L2));
        obj.hinges.push(HingeTerm { weight: c, form: decision_form(x, -y, 1.0), inner_norm });
    }
    obj
}

/// `CΣ[1 − y_i f(X_i) + z_i‖w‖₂]⁺ + ½‖w‖²`.
pub fn robust_csvm_objective(data: &Dataset, c: f64, z_p: &[f64], m: &LinearModel) -> Result<f64> {
    check_dim(data.num_features(), m.w.len())?;
    check_dim(data.num_samples(), z_p.len())?;
    let norm = lp_norm(&m.w, LpKind::L2);
    let loss: f64 =
        data.x.iter().zip(&data.y).zip(z_p).map(|((x, y), z)| (1.0 - y * m.predict(x) + z * norm).max(0.0)).sum();
    Ok(c * loss + 0.5 * norm * norm)
}

/// `CΣ[1 − y_i f(X_i)]⁺ + ½‖w‖²`.
pub fn csvm_objective(data: &Dataset, c: f64, m: &LinearModel) -> Result<f64> {
    robust_csvm_objective(data, c, &vec![0.0; data.num_samples()], m)
}

/// `CΣ[1 − y_i f(X_i) − z_i‖w‖₂]⁺ + ½‖w‖²`.
pub fn tsvc_objective(data: &Dataset, c: f64, z_o: &[f64], m: &LinearModel) -> Result<f64> {
    let neg: Vec<f64> = z_o.iter().map(|z| -z).collect();
    robust_csvm_objective(data, c, &neg, m)
}

fn validate_csvm(data: &Dataset, c: f64, config: &TrainerConfig) -> Result<()> {
    data.validate_classification()?;
    check_positive("C", c)?;
    config.validate()
}

pub fn train_csvm(data: &Dataset, c: f64, config: &TrainerConfig) -> Result<TrainReport> {
    validate_csvm(data, c, config)?;
    let n = data.num_features();
    let model = convex_subsolve(&csvm_problem(data, c, None), &LinearModel::zeros(n), config)?;
    let trace = vec![csvm_objective(data, c, &model)?];
    Ok(TrainReport { model, objective_trace: trace, excluded: Vec::new() })
}

/// Pessimistic robust C-SVM: one convex solve with `z_i‖w‖₂` inside each hinge.
pub fn train_robust_csvm(data: &Dataset, c: f64, z_p: &[f64], config: &TrainerConfig) -> Result<TrainReport> {
    validate_csvm(data, c, config)?;
    check_radii(data, z_p)?;
    let n = data.num_features();
    let model = convex_subsolve(&csvm_problem(data, c, Some(z_p)), &LinearModel::zeros(n), config)?;
    let trace = vec![robust_csvm_objective(data, c, z_p, &model)?];
    Ok(TrainReport { model, objective_trace: trace, excluded: Vec::new() })
}

/// TSVC: alternates the closed-form optimistic shift `δ_i = z_i y_i w/‖w‖₂`
/// with a C-SVM solve on the shifted samples, starting from the plain C-SVM.
pub fn train_tsvc(data: &Dataset, c: f64, z_o: &[f64], config: &TrainerConfig) -> Result<TrainReport> {
    validate_csvm(data, c, config)?;
    check_radii(data, z_o)?;
    let init = train_csvm(data, c, config)?.model;
    let objective = |m: &LinearModel| tsvc_objective(data, c, z_o, m).unwrap_or(f64::INFINITY);
    let (model, trace) = dca_loop(
        init,
        config,
        |m| {
            let norm = lp_norm(&m.w, LpKind::L2);
            let shifted: Vec<Vec<f64>> = data
                .x
                .iter()
                .zip(&data.y)
                .zip(z_o)
                .map(|((x, y), z)| {
                    let s = if norm > 0.0 { z * y / norm } else { 0.0 };
                    x.iter().zip(&m.w).map(|(xi, wi)| xi + s * wi).collect()
                })
                .collect();
            let shifted = Dataset { x: shifted, y: data.y.clone() };
            convex_subsolve(&csvm_problem(&shifted, c, None), m, config)
        },
        objective,
    )?;
    Ok(TrainReport { model, objective_trace: trace, excluded: Vec::new() })
}

/// Compares the robust C-SVM with uniform radius `z_p` against plain C-SVMs.
///
/// With `s = 1 + z_p‖w_r‖` the robust hinge equals `s·[1 − y f/s]⁺`, so the
/// robust solution divided by `s` is a plain C-SVM solution for some `Ĉ`.
/// `Ĉ` is searched on `ln Ĉ ∈ [ln C − 12, ln C + 12]` by a coarse scan and a
/// golden-section refinement. Returns `(Ĉ, ‖w_r/s − w_plain(Ĉ)‖₂)`.
pub fn redundancy_probe(data: &Dataset, c: f64, z_p: f64, config: &TrainerConfig) -> Result<(f64, f64)> {
    const SPAN: f64 = 12.0;
    const SCAN: usize = 25;
    validate_csvm(data, c, config)?;
    check_radius(z_p)?;
    if z_p == 0.0 {
        return Ok((c, 0.0));
    }
    let robust = train_robust_csvm(data, c, &vec![z_p; data.num_samples()], config)?.model;
    let norm = lp_norm(&robust.w, LpKind::L2);
    let target: Vec<f64> = robust.w.iter().map(|v| v / (1.0 + z_p * norm)).collect();
    let distance = |log_c: f64| -> Result<f64> {
        let plain = train_csvm(data, log_c.exp(), config)?.model;
        Ok(target.iter().zip(&plain.w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
    };
    let (lo, hi) = (c.ln() - SPAN, c.ln() + SPAN);
    if norm == 0.0 {
        return Ok((lo.exp(), distance(lo)?));
    }

    let h = (hi - lo) / (SCAN - 1) as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..SCAN {
        let x = lo + h * i as f64;
        let f = distance(x)?;
        if f < best.1 {
            best = (x, f);
        }
    }
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (distance(x1)?, distance(x2)?);
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f < best.1 {
            best = (x, f);
        }
    }
    while b - a > 1e-6 {
        let (x, f) = if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = distance(x1)?;
            (x1, f1)
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = distance(x2)?;
            (x2, f2)
        };
        if f < best.1 {
            best = (x, f);
        }
    }
    Ok((best.0.exp(), best.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> Dataset {
        Dataset::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![1.0, -1.0]).unwrap()
    }

    #[test]
    fn nu_svc_separates_pair_without_regularizer() {
        let rep = train_nu_svc_oro(&pair(), None, 0.0, 0.5, &TrainerConfig::default()).unwrap();
        let d = pair();
        let loss: f64 = d.x.iter().zip(&d.y).map(|(x, y)| (-y * rep.model.predict(x)).max(0.0)).sum();
        assert!(loss < 1e-9);
        assert!(rep.model.aux.is_some());
    }

    #[test]
    fn one_class_data_is_rejected() {
        let d = Dataset::new(vec![vec![1.0], vec![2.0]], vec![1.0, 1.0]).unwrap();
        assert!(train_nu_svc_oro(&d, None, 0.0, 0.5, &TrainerConfig::default()).is_err());
    }

    #[test]
    fn inside_and_outside_forms_agree() {
        let d = pair();
        let reg = Regularizer::L12;
        for (w, b, eps) in [(vec![0.3, -0.2], 0.1, 0.4), (vec![-1.0, 0.5], -0.3, -0.2)] {
            let r = reg_value(&reg, &w).unwrap();
            let inside = nu_svc_inside_objective(&d, Some(&reg), 0.7, 0.4, &w, b, eps).unwrap();
            let m = LinearModel { w: w.clone(), b, aux: Some(eps - 0.7 * r) };
            let outside = nu_svc_objective(&d, Some(&reg), 0.7, 0.4, &m).unwrap();
            assert!((inside - outside).abs() < 1e-12, "{inside} vs {outside}");
        }
    }

    #[test]
    fn trimming_rejects_bad_mu() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0.0, 1.0]).unwrap();
        let cfg = TrainerConfig::default();
        assert!(train_trimmed_regression(&d, 0.5, 0.5, 1.0, ResidualShape::Squared, &cfg).is_err());
        assert!(train_trimmed_regression(&d, 1.0, -0.1, 1.0, ResidualShape::Squared, &cfg).is_err());
    }

    #[test]
    fn svr_fits_two_points_exactly() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0]], vec![1.0, 3.0]).unwrap();
        let rep = train_nu_svr_oro(&d, None, 0.0, 0.5, 100.0, &TrainerConfig::default()).unwrap();
        for (x, y) in d.x.iter().zip(&d.y) {
            assert!((rep.model.predict(x) - y).abs() < 1e-7, "{rep:?}");
        }
    }

    #[test]
    fn probe_with_zero_radius() {
        assert_eq!(redundancy_probe(&pair(), 2.0, 0.0, &TrainerConfig::default()).unwrap(), (2.0, 0.0));
    }
}
