//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use oro_core::ml::Dataset;
use oro_core::{lp::solve_lp, NominalLp, SimplexConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Largest-k sum of `|v|` straight from the sorted definition.
pub fn sorted_largest_sum(v: &[f64], k: f64) -> f64 {
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    signed_largest_sum(&mut a, k)
}

/// Sum of the `⌊k⌋` largest signed entries plus the fractional share of the next.
pub fn signed_largest_sum(v: &mut [f64], k: f64) -> f64 {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let whole = k.floor() as usize;
    let mut s: f64 = v[..whole.min(v.len())].iter().sum();
    if whole < v.len() {
        s += (k - whole as f64) * v[whole];
    }
    s
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Minimum of `cᵀx` over `{Ax ≤ b, l ≤ x ≤ u}` (finite bounds) by visiting
/// every basic solution.
pub fn vertex_enumeration(c: &[f64], a: &[Vec<f64>], b: &[f64], l: &[f64], u: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), u[j]));
        e[j] = -1.0;
        rows.push((e, -l[j]));
    }
    let m = rows.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let sys: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve_dense(sys, rhs) {
            let feasible = rows.iter().all(|(r, bb)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bb + 1e-9);
            if feasible {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |bv: f64| bv.min(v)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < m - n + i {
                idx[i] += 1;
                for k in i + 1..n {
                    idx[k] = idx[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain ν-SVC over `‖w‖∞ ≤ bound`: `min νγ + (1/N)Σ ξ_i` with
/// `ξ_i ≥ −y_i(wᵀx_i + b) − γ`, `ξ ≥ 0`. Weights are split as `w = p − q`.
pub fn plain_nu_svc_lp(d: &Dataset, nu: f64, bound: f64) -> f64 {
    let (nn, n) = (d.num_samples(), d.num_features());
    // layout: p (n), q (n), b, γ, ξ (N)
    let cols = 2 * n + 2 + nn;
    let mut c = vec![0.0; cols];
    c[2 * n + 1] = nu;
    for i in 0..nn {
        c[2 * n + 2 + i] = 1.0 / nn as f64;
    }
    let mut lower = vec![0.0; cols];
    let mut upper = vec![f64::INFINITY; cols];
    for j in 0..2 * n {
        upper[j] = bound;
    }
    lower[2 * n] = f64::NEG_INFINITY;
    lower[2 * n + 1] = f64::NEG_INFINITY;
    let mut lp = NominalLp::new(c).with_bounds(lower, upper);
    for i in 0..nn {
        let y = d.y[i];
        let mut row = vec![0.0; cols];
        for j in 0..n {
            row[j] = -y * d.x[i][j];
            row[n + j] = y * d.x[i][j];
        }
        row[2 * n] = -y;
        row[2 * n + 1] = -1.0;
        row[2 * n + 2 + i] = -1.0;
        lp = lp.with_ineq(row, 0.0);
    }
    solve_lp(&lp, &SimplexConfig::default()).unwrap().objective
}

/// Textbook ν-SVR without regularizer: `min C(νε + (1/N)Σ ξ_i)` with
/// `|y_i − wᵀx_i − b| ≤ ε + ξ_i`, `ε, ξ ≥ 0`.
pub fn plain_nu_svr_lp(d: &Dataset, nu: f64, c_reg: f64) -> f64 {
    let (nn, n) = (d.num_samples(), d.num_features());
    // layout: w (n), b, ε, ξ (N)
    let cols = n + 2 + nn;
    let mut c = vec![0.0; cols];
    c[n + 1] = c_reg * nu;
    for i in 0..nn {
        c[n + 2 + i] = c_reg / nn as f64;
    }
    let mut lower = vec![0.0; cols];
    for l in lower.iter_mut().take(n + 1) {
        *l = f64::NEG_INFINITY;
    }
    let upper = vec![f64::INFINITY; cols];
    let mut lp = NominalLp::new(c).with_bounds(lower, upper);
    for i in 0..nn {
        for s in [1.0, -1.0] {
            // s(y − wᵀx − b) − ε − ξ ≤ 0
            let mut row = vec![0.0; cols];
            for j in 0..n {
                row[j] = -s * d.x[i][j];
            }
            row[n] = -s;
            row[n + 1] = -1.0;
            row[n + 2 + i] = -1.0;
            lp = lp.with_ineq(row, -s * d.y[i]);
        }
    }
    solve_lp(&lp, &SimplexConfig::default()).unwrap().objective
}

/// Linear C-SVM `CΣ[1 − y f]⁺ + ½‖w‖²` through its dual, by SMO with the
/// maximal violating pair. Returns `(w, b, primal objective)`.
pub fn smo_csvm(d: &Dataset, c: f64) -> (Vec<f64>, f64, f64) {
    let nn = d.num_samples();
    let q = |i: usize, j: usize| d.y[i] * d.y[j] * dot(&d.x[i], &d.x[j]);
    let mut alpha = vec![0.0; nn];
    let mut grad = vec![-1.0; nn];
    for _ in 0..1_000_000 {
        let up = |i: usize, a: &[f64]| (d.y[i] > 0.0 && a[i] < c) || (d.y[i] < 0.0 && a[i] > 0.0);
        let low = |i: usize, a: &[f64]| (d.y[i] > 0.0 && a[i] > 0.0) || (d.y[i] < 0.0 && a[i] < c);
        let i = (0..nn)
            .filter(|&t| up(t, &alpha))
            .max_by(|&a, &b| (-d.y[a] * grad[a]).partial_cmp(&(-d.y[b] * grad[b])).unwrap());
        let j = (0..nn)
            .filter(|&t| low(t, &alpha))
            .min_by(|&a, &b| (-d.y[a] * grad[a]).partial_cmp(&(-d.y[b] * grad[b])).unwrap());
        let (i, j) = match (i, j) {
            (Some(i), Some(j)) => (i, j),
            _ => break,
        };
        if -d.y[i] * grad[i] + d.y[j] * grad[j] < 1e-12 {
            break;
        }
        // Move along y_i e_i − y_j e_j.
        let curv = (q(i, i) + q(j, j) - 2.0 * d.y[i] * d.y[j] * q(i, j)).max(1e-12);
        let mut t = (-d.y[i] * grad[i] + d.y[j] * grad[j]) / curv;
        let cap = |k: usize, dir: f64| if dir > 0.0 { c - alpha[k] } else { alpha[k] };
        t = t.min(cap(i, d.y[i])).min(cap(j, -d.y[j]));
        let (di, dj) = (d.y[i] * t, -d.y[j] * t);
        alpha[i] += di;
        alpha[j] += dj;
        for k in 0..nn {
            grad[k] += q(k, i) * di + q(k, j) * dj;
        }
    }
    let n = d.num_features();
    let mut w = vec![0.0; n];
    for i in 0..nn {
        for j in 0..n {
            w[j] += alpha[i] * d.y[i] * d.x[i][j];
        }
    }
    // Intercept: minimize the primal over b exactly (piecewise linear).
    let margins: Vec<f64> = (0..nn).map(|i| dot(&w, &d.x[i])).collect();
    let primal =
        |b: f64| c * (0..nn).map(|i| (1.0 - d.y[i] * (margins[i] + b)).max(0.0)).sum::<f64>() + 0.5 * dot(&w, &w);
    let b = (0..nn).map(|i| d.y[i] - margins[i]).min_by(|&a, &b| primal(a).partial_cmp(&primal(b)).unwrap()).unwrap();
    (w.clone(), b, primal(b))
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub fn dataset(x: &[&[f64]], y: &[f64]) -> Dataset {
    Dataset::new(x.iter().map(|r| r.to_vec()).collect(), y.to_vec()).unwrap()
}

/// Two classes separated by feature 1; feature 2 is noise that still helps
/// the unregularized ν-SVC.
pub fn sparse_svc_fixture() -> Dataset {
    let x1 = [1.0, 2.0, 1.5, 0.8, 0.4, -1.0, -2.0, -1.5, -0.8, -0.4];
    let x2 = [0.3, -0.2, 0.5, 0.1, 0.9, -0.4, 0.2, -0.1, 0.3, -0.9];
    let y = [1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0];
    Dataset::new(x1.iter().zip(&x2).map(|(a, b)| vec![*a, *b]).collect(), y.to_vec()).unwrap()
}

/// Target linear in feature 1; feature 2 tracks part of the noise.
pub fn sparse_svr_fixture() -> Dataset {
    let x2 = [0.3, -0.7, 0.2, 0.9, -0.4, 0.5, -0.1, 0.6];
    let noise = [0.05, -0.1, 0.08, -0.02, 0.1, -0.06, 0.03, -0.04];
    let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 * 0.5 - 2.0, x2[i]]).collect();
    let y = x.iter().zip(&noise).map(|(r, e)| 1.5 * r[0] + 0.5 + 0.2 * r[1] + e).collect();
    Dataset::new(x, y).unwrap()
}

/// Eight overlapping 2-D points.
pub fn svm_fixture() -> Dataset {
    dataset(
        &[
            &[1.0, 0.5],
            &[2.0, 1.5],
            &[1.5, -0.5],
            &[0.2, 1.0],
            &[-1.0, -0.5],
            &[-2.0, 0.3],
            &[-0.5, -1.5],
            &[0.3, -0.8],
        ],
        &[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
    )
}

pub fn random_classification(rng: &mut ChaCha8Rng, n_samples: usize, n: usize) -> Dataset {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n_samples {
        let label = if i % 2 == 0 { 1.0 } else { -1.0 };
        let row: Vec<f64> = (0..n).map(|j| rng.gen_range(-1.0..1.0) + if j == 0 { 0.7 * label } else { 0.0 }).collect();
        x.push(row);
        y.push(label);
    }
    Dataset::new(x, y).unwrap()
}

pub fn random_regression(rng: &mut ChaCha8Rng, n_samples: usize, n: usize) -> Dataset {
    let beta: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n_samples {
        let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        y.push(row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + rng.gen_range(-0.3..0.3));
        x.push(row);
    }
    Dataset::new(x, y).unwrap()
}

/// `min_ε νε + (1/N)Σ[|r| − ε]⁺`, checked over the candidate breakpoints.
pub fn nu_insensitive_loss(r: &[f64], nu: f64) -> f64 {
    let n = r.len() as f64;
    let f = |e: f64| nu * e + r.iter().map(|v| (v.abs() - e).max(0.0)).sum::<f64>() / n;
    r.iter().map(|v| f(v.abs())).fold(f(0.0), f64::min)
}
