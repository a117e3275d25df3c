//! Convex composite objectives over a linear model `(w, b, aux)` and their
//! minimization.

use super::program::{Affine, ConvexProgram};
use super::{InnerSolver, LinearModel, TrainerConfig};
use crate::error::{check_dim, Error, Result};
use crate::norms::{largest_sum_subgradient_unchecked, largest_sum_unchecked, lp_norm, LpKind};

/// `wᵀθ_w + b·θ_b + aux·θ_aux + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub w: Vec<f64>,
    pub b: f64,
    pub aux: f64,
    pub constant: f64,
}

impl AffineForm {
    pub fn value(&self, m: &LinearModel) -> f64 {
        dot(&self.w, &m.w) + self.b * m.b + self.aux * m.aux.unwrap_or(0.0) + self.constant
    }
}

/// `weight·[form + radius·‖w‖_p]⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeTerm {
    pub weight: f64,
    pub form: AffineForm,
    pub inner_norm: Option<(f64, LpKind)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualShape {
    Absolute,
    Squared,
}

/// `weight·largest_sum(shape(forms), order)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopKTerm {
    pub weight: f64,
    pub order: f64,
    pub forms: Vec<AffineForm>,
    pub shape: ResidualShape,
}

impl TopKTerm {
    fn values(&self, m: &LinearModel) -> (Vec<f64>, Vec<f64>) {
        let raw: Vec<f64> = self.forms.iter().map(|f| f.value(m)).collect();
        let shaped = raw
            .iter()
            .map(|&r| match self.shape {
                ResidualShape::Absolute => r.abs(),
                ResidualShape::Squared => r * r,
            })
            .collect();
        (raw, shaped)
    }
}

/// `(q/2)‖w‖² + linear + l1_weight·‖w‖₁ + Σ hinges + Σ top-k terms`,
/// optionally restricted to `‖w‖∞ ≤ weight_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeObjective {
    pub dim: usize,
    pub quadratic: f64,
    pub linear_w: Vec<f64>,
    pub linear_b: f64,
    pub linear_aux: f64,
    pub constant: f64,
    pub l1_weight: f64,
    pub hinges: Vec<HingeTerm>,
    pub topk: Vec<TopKTerm>,
    pub weight_bound: Option<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// A subgradient of `‖w‖_p`.
fn norm_subgradient(w: &[f64], kind: LpKind) -> Vec<f64> {
    match kind {
        LpKind::L1 => w.iter().map(|&x| sign(x)).collect(),
        LpKind::L2 => {
            let n = lp_norm(w, LpKind::L2);
            if n == 0.0 {
                vec![0.0; w.len()]
            } else {
                w.iter().map(|x| x / n).collect()
            }
        }
        LpKind::Inf => {
            let mut g = vec![0.0; w.len()];
            let best = (0..w.len()).fold(None, |acc: Option<usize>, i| match acc {
                Some(j) if w[j].abs() >= w[i].abs() => Some(j),
                _ => Some(i),
            });
            if let Some(i) = best {
                g[i] = sign(w[i]);
            }
            g
        }
    }
}

/// Subgradient of an objective split into its `w`, `b` and `aux` parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgradient {
    pub w: Vec<f64>,
    pub b: f64,
    pub aux: f64,
}

impl Subgradient {
    fn add_form(&mut self, f: &AffineForm, scale: f64) {
        for (g, a) in self.w.iter_mut().zip(&f.w) {
            *g += scale * a;
        }
        self.b += scale * f.b;
        self.aux += scale * f.aux;
    }
}

impl CompositeObjective {
    pub fn new(dim: usize) -> Self {
        CompositeObjective {
            dim,
            quadratic: 0.0,
            linear_w: vec![0.0; dim],
            linear_b: 0.0,
            linear_aux: 0.0,
            constant: 0.0,
            l1_weight: 0.0,
            hinges: Vec::new(),
            topk: Vec::new(),
            weight_bound: None,
        }
    }

    pub fn uses_aux(&self) -> bool {
        self.linear_aux != 0.0
            || self.hinges.iter().any(|h| h.form.aux != 0.0)
            || self.topk.iter().flat_map(|t| &t.forms).any(|f| f.aux != 0.0)
    }

    /// True when every term is piecewise linear.
    pub fn is_polyhedral(&self) -> bool {
        self.quadratic == 0.0
            && self.topk.iter().all(|t| t.shape == ResidualShape::Absolute)
            && self.hinges.iter().all(|h| !matches!(h.inner_norm, Some((z, LpKind::L2)) if z != 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        check_dim(n, self.linear_w.len())?;
        let forms = self.hinges.iter().map(|h| &h.form).chain(self.topk.iter().flat_map(|t| &t.forms));
        for f in forms {
            check_dim(n, f.w.len())?;
        }
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {v} must be finite and nonnegative")))
            }
        };
        nonneg("quadratic", self.quadratic)?;
        nonneg("l1_weight", self.l1_weight)?;
        for h in &self.hinges {
            nonneg("hinge weight", h.weight)?;
            if let Some((z, _)) = h.inner_norm {
                nonneg("hinge radius", z)?;
            }
        }
        for t in &self.topk {
            nonneg("top-k weight", t.weight)?;
            if !(t.order >= 0.0 && t.order <= t.forms.len() as f64) {
                return Err(Error::Domain(format!("top-k order {} outside [0, {}]", t.order, t.forms.len())));
            }
        }
        if let Some(bound) = self.weight_bound {
            nonneg("weight_bound", bound)?;
        }
        Ok(())
    }

    pub fn evaluate(&self, m: &LinearModel) -> f64 {
        let w = &m.w;
        let mut v = self.constant
            + 0.5 * self.quadratic * dot(w, w)
            + dot(&self.linear_w, w)
            + self.linear_b * m.b
            + self.linear_aux * m.aux.unwrap_or(0.0)
            + self.l1_weight * lp_norm(w, LpKind::L1);
        for h in &self.hinges {
            let inner = h.inner_norm.map_or(0.0, |(z, kind)| z * lp_norm(w, kind));
            v += h.weight * (h.form.value(m) + inner).max(0.0);
        }
        for t in &self.topk {
            let (_, shaped) = t.values(m);
            v += t.weight * largest_sum_unchecked(&shaped, t.order);
        }
        v
    }

    pub fn subgradient(&self, m: &LinearModel) -> Subgradient {
        let w = &m.w;
        let mut g = Subgradient {
            w: self.linear_w.iter().zip(w).map(|(c, x)| c + self.quadratic * x + self.l1_weight * sign(*x)).collect(),
            b: self.linear_b,
            aux: self.linear_aux,
        };
        for h in &self.hinges {
            let inner = h.inner_norm.map_or(0.0, |(z, kind)| z * lp_norm(w, kind));
            if h.form.value(m) + inner > 0.0 {
                g.add_form(&h.form, h.weight);
                if let Some((z, kind)) = h.inner_norm {
                    for (gi, si) in g.w.iter_mut().zip(norm_subgradient(w, kind)) {
                        *gi += h.weight * z * si;
                    }
                }
            }
        }
        for t in &self.topk {
            let (raw, shaped) = t.values(m);
            let weights = largest_sum_subgradient_unchecked(&shaped, t.order);
            for ((f, r), a) in t.forms.iter().zip(raw).zip(weights) {
                if a == 0.0 {
                    continue;
                }
                let d = match t.shape {
                    ResidualShape::Absolute => sign(r),
                    ResidualShape::Squared => 2.0 * r,
                };
                g.add_form(f, t.weight * a * d);
            }
        }
        g
    }

    fn to_program(&self) -> (ConvexProgram, usize, Option<usize>) {
        let n = self.dim;
        let mut p = ConvexProgram::default();
        let (lo, hi) = match self.weight_bound {
            Some(bound) => (-bound, bound),
            None => (f64::NEG_INFINITY, f64::INFINITY),
        };
        for j in 0..n {
            p.add_var(lo, hi, self.linear_w[j]);
            p.quad[j] = self.quadratic;
        }
        let b = p.add_var(f64::NEG_INFINITY, f64::INFINITY, self.linear_b);
        let aux = self.uses_aux().then(|| p.add_var(f64::NEG_INFINITY, f64::INFINITY, self.linear_aux));
        let affine = |f: &AffineForm| {
            let mut e = Affine::constant(f.constant).plus(b, f.b);
            for (j, &c) in f.w.iter().enumerate() {
                e = e.plus(j, c);
            }
            if let Some(a) = aux {
                e = e.plus(a, f.aux);
            }
            e
        };

        if self.l1_weight > 0.0 {
            for j in 0..n {
                let u = p.add_var(0.0, f64::INFINITY, self.l1_weight);
                p.add_le(Affine::var(j, 1.0), Affine::var(u, 1.0));
                p.add_le(Affine::var(j, -1.0), Affine::var(u, 1.0));
            }
        }

        // One epigraph variable per norm kind used inside a hinge.
        let mut norm_vars: Vec<(LpKind, usize)> = Vec::new();
        let mut norm_var = |p: &mut ConvexProgram, kind: LpKind| -> usize {
            if let Some(&(_, v)) = norm_vars.iter().find(|(k, _)| *k == kind) {
                return v;
            }
            let t = p.add_var(0.0, f64::INFINITY, 0.0);
            match kind {
                LpKind::L2 => {
                    let mut cone = vec![Affine::var(t, 1.0)];
                    cone.extend((0..n).map(|j| Affine::var(j, 1.0)));
                    p.add_soc(cone);
                }
                LpKind::Inf => {
                    for j in 0..n {
                        p.add_le(Affine::var(j, 1.0), Affine::var(t, 1.0));
                        p.add_le(Affine::var(j, -1.0), Affine::var(t, 1.0));
                    }
                }
                LpKind::L1 => {
                    let mut sum = Affine::default();
                    for j in 0..n {
                        let v = p.add_var(0.0, f64::INFINITY, 0.0);
                        p.add_le(Affine::var(j, 1.0), Affine::var(v, 1.0));
                        p.add_le(Affine::var(j, -1.0), Affine::var(v, 1.0));
                        sum = sum.plus(v, 1.0);
                    }
                    p.add_le(sum, Affine::var(t, 1.0));
                }
            }
            norm_vars.push((kind, t));
            t
        };

        for h in self.hinges.iter().filter(|h| h.weight > 0.0) {
            let s = p.add_var(0.0, f64::INFINITY, h.weight);
            let mut e = affine(&h.form);
            if let Some((z, kind)) = h.inner_norm {
                if z > 0.0 {
                    let t = norm_var(&mut p, kind);
                    e = e.plus(t, z);
                }
            }
            p.add_le(e, Affine::var(s, 1.0));
        }

        for t in self.topk.iter().filter(|t| t.weight > 0.0) {
            // largest_sum(z, K) = min_{ζ ≥ 0} Kζ + Σ[z_i − ζ]⁺ for z ≥ 0.
            let zeta = (t.order < t.forms.len() as f64).then(|| p.add_var(0.0, f64::INFINITY, t.weight * t.order));
            for f in &t.forms {
                let s = p.add_var(0.0, f64::INFINITY, t.weight);
                let mut cap = Affine::var(s, 1.0);
                if let Some(zv) = zeta {
                    cap = cap.plus(zv, 1.0);
                }
                let e = affine(f);
                match t.shape {
                    ResidualShape::Absolute => {
                        let mut neg = e.clone();
                        neg.constant = -neg.constant;
                        for term in &mut neg.terms {
                            term.1 = -term.1;
                        }
                        p.add_le(e, cap.clone());
                        p.add_le(neg, cap);
                    }
                    ResidualShape::Squared => p.add_square_le(e, cap),
                }
            }
        }
        (p, b, aux)
    }
}

/// Minimizes a convex composite objective.
///
/// Polyhedral objectives become an LP for the simplex. Otherwise the
/// configured inner solver runs: the conic solver, or the strongly convex
/// subgradient method started at `init`.
pub fn convex_subsolve(
    objective: &CompositeObjective,
    init: &LinearModel,
    config: &TrainerConfig,
) -> Result<LinearModel> {
    objective.validate()?;
    config.validate()?;
    check_dim(objective.dim, init.w.len())?;
    if !objective.is_polyhedral() && config.inner_solver == InnerSolver::Subgradient {
        return Ok(subgradient_method(objective, init, config));
    }
    let (program, b, aux) = objective.to_program();
    let x = program.solve(&config.simplex)?;
    let n = objective.dim;
    Ok(LinearModel { w: x[..n].to_vec(), b: x[b], aux: aux.map(|a| x[a]) })
}

fn project(m: &mut LinearModel, bound: Option<f64>) {
    if let Some(bound) = bound {
        for x in &mut m.w {
            *x = x.clamp(-bound, bound);
        }
    }
}

/// Step `1/(μt)` with `t`-weighted averaging of the iterates. Stops when the
/// averaged objective moves less than `inner_tol` (relative) over `CHECK`
/// steps; returns the best of the iterates and averages seen.
fn subgradient_method(obj: &CompositeObjective, init: &LinearModel, config: &TrainerConfig) -> LinearModel {
    const CHECK: usize = 100;
    let mu = if obj.quadratic > 0.0 { obj.quadratic } else { 1.0 };
    let uses_aux = obj.uses_aux();
    let mut cur = init.clone();
    cur.aux = uses_aux.then(|| init.aux.unwrap_or(0.0));
    project(&mut cur, obj.weight_bound);
    let mut avg = cur.clone();
    let mut weight_sum = 0.0;
    let mut best = cur.clone();
    let mut best_val = obj.evaluate(&cur);
    let mut last_check = f64::INFINITY;
    for t in 1..=config.inner_max_iters {
        let g = obj.subgradient(&cur);
        let step = if obj.quadratic > 0.0 { 1.0 / (mu * t as f64) } else { 1.0 / (t as f64).sqrt() };
        for (x, gi) in cur.w.iter_mut().zip(&g.w) {
            *x -= step * gi;
        }
        cur.b -= step * g.b;
        if let Some(a) = cur.aux.as_mut() {
            *a -= step * g.aux;
        }
        project(&mut cur, obj.weight_bound);

        let wt = t as f64;
        weight_sum += wt;
        let r = wt / weight_sum;
        for (a, x) in avg.w.iter_mut().zip(&cur.w) {
            *a += r * (x - *a);
        }
        avg.b += r * (cur.b - avg.b);
        if let (Some(a), Some(x)) = (avg.aux.as_mut(), cur.aux) {
            *a += r * (x - *a);
        }

        let v = obj.evaluate(&cur);
        if v < best_val {
            best_val = v;
            best = cur.clone();
        }
        if t % CHECK == 0 {
            let va = obj.evaluate(&avg);
            if va < best_val {
                best_val = va;
                best = avg.clone();
            }
            if (last_check - va).abs() <= config.inner_tol * va.abs().max(1.0) {
                break;
            }
            last_check = va;
        }
    }
    best
}
