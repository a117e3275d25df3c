//! The feasibility experiment: solve over a `(K, R)` grid of budgets, then
//! estimate how often each solution is violated under random coefficients.
//!
//! Coefficients follow the worst-case symmetric distribution: each uncertain
//! `â_ij` is `a_ij ± ā_ij` with equal probability. Indices the decision maker
//! protects (the `⌊r_j⌋` largest `|ā_ij w_i|`) only move by `± M·ā_ij`.

use std::fmt::Write as _;
use std::path::PathBuf;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::lp::{parse_mps, LinearRow, NominalLp};
use crate::norms::magnitude_order;
use crate::orlp::{dca_solve, DcaConfig, OrlpProblem, RobustRow};

/// A nominal LP with a deviation vector per inequality row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentInstance {
    pub lp: NominalLp,
    pub deviations: Vec<Vec<f64>>,
}

impl ExperimentInstance {
    /// Deviations `ā_ij = fraction·|a_ij|` on every inequality row.
    pub fn from_lp(lp: NominalLp, deviation_fraction: f64) -> Self {
        let deviations =
            lp.ineq.iter().map(|row| row.coeffs.iter().map(|a| deviation_fraction * a.abs()).collect()).collect();
        ExperimentInstance { lp, deviations }
    }

    fn uncertain_rows(&self) -> Vec<usize> {
        (0..self.deviations.len()).filter(|&j| self.deviations[j].iter().any(|a| *a > 0.0)).collect()
    }
}

/// `A ~ U(0, 0.5)^{J×n}`, `b = 1`, `w ≥ 0`, costs `−U(0, 1)` (a profit maximized).
pub fn generate_random_lp(seed: u64, n: usize, rows: usize, deviation_fraction: f64) -> ExperimentInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objective: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.0..1.0)).collect();
    let mut lp = NominalLp::new(objective);
    lp.name = format!("RANDOM_{n}x{rows}_{seed}");
    for j in 0..rows {
        let coeffs: Vec<f64> = (0..n)
            .map(|_| loop {
                let a = rng.gen_range(0.0..0.5);
                if a > 0.0 {
                    break a;
                }
            })
            .collect();
        lp.ineq.push(LinearRow::new(format!("c{}", j + 1), coeffs, 1.0));
    }
    ExperimentInstance::from_lp(lp, deviation_fraction)
}

/// Per row `β_j = #{ā_ij > 0}`, `k_j = clamp(K·β_j, 1, β_j)` and `r_j = R·k_j`.
/// Rows with `K·β_j < 1` stay nominal.
pub fn build_budgets(instance: &ExperimentInstance, k_frac: f64, r_frac: f64) -> OrlpProblem {
    let robust_rows = instance
        .deviations
        .iter()
        .enumerate()
        .filter_map(|(j, dev)| {
            let beta = dev.iter().filter(|a| **a > 0.0).count() as f64;
            let raw = k_frac * beta;
            if raw < 1.0 {
                return None;
            }
            let k = raw.clamp(1.0, beta);
            Some(RobustRow { row: j, deviations: dev.clone(), k, r: r_frac * k })
        })
        .collect();
    OrlpProblem { nominal: instance.lp.clone(), robust_rows }
}

/// Mean nominal slack `b_j − a_jᵀw` over rows with any deviation.
pub fn avg_protection(w: &[f64], instance: &ExperimentInstance) -> f64 {
    let rows = instance.uncertain_rows();
    if rows.is_empty() {
        return 0.0;
    }
    let total: f64 = rows.iter().map(|&j| instance.lp.ineq[j].rhs - instance.lp.ineq[j].activity(w)).sum();
    total / rows.len() as f64
}

/// Indices of the `⌊r_j⌋` largest `|ā_ij w_i|`, lowest index first among ties.
pub fn select_protected_indices(w: &[f64], row: &RobustRow) -> Vec<usize> {
    let v: Vec<f64> = row.deviations.iter().zip(w).map(|(a, x)| a * x).collect();
    let count = (row.r.floor().max(0.0) as usize).min(v.len());
    let mut picked = magnitude_order(&v)[..count].to_vec();
    picked.sort_unstable();
    picked
}

/// Fraction of `trials` draws in which some uncertain row is violated.
///
/// `protected[j]` lists the protected columns of inequality row `j`. Trial `t`
/// uses stream `t` of a ChaCha8 generator keyed by `seed`, so the estimate
/// does not depend on scheduling.
pub fn simulate_feasibility(
    w: &[f64],
    instance: &ExperimentInstance,
    protected: &[Vec<usize>],
    m: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let n = instance.lp.num_cols();
    check_dim(n, w.len())?;
    check_dim(instance.lp.ineq.len(), protected.len())?;
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("scenario scale M = {m} outside [0, 1]")));
    }
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let rows: Vec<(usize, Vec<bool>)> = instance
        .uncertain_rows()
        .into_iter()
        .map(|j| {
            let mut mask = vec![false; n];
            for &i in &protected[j] {
                if i >= n {
                    return Err(Error::Domain(format!("protected index {i} out of range in row {j}")));
                }
                mask[i] = true;
            }
            Ok((j, mask))
        })
        .collect::<Result<_>>()?;

    let failures: usize = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut failed = false;
            for (j, mask) in &rows {
                let row = &instance.lp.ineq[*j];
                let dev = &instance.deviations[*j];
                let mut activity = 0.0;
                for i in 0..n {
                    let mut a = row.coeffs[i];
                    if dev[i] > 0.0 {
                        let size = if mask[i] { m * dev[i] } else { dev[i] };
                        a += if rng.gen_bool(0.5) { size } else { -size };
                    }
                    activity += a * w[i];
                }
                failed |= activity > row.rhs + 1e-9;
            }
            usize::from(failed)
        })
        .sum();
    Ok(failures as f64 / trials as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub k_values: Vec<f64>,
    pub r_values: Vec<f64>,
    pub m_values: Vec<f64>,
    pub deviation_fraction: f64,
    pub trials: usize,
    pub seed: u64,
    /// Random family dimensions.
    pub n_vars: usize,
    pub n_rows: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            k_values: vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25],
            r_values: vec![0.0, 0.25],
            m_values: vec![0.0, 0.5, 1.0],
            deviation_fraction: 0.1,
            trials: 1000,
            seed: 0,
            n_vars: 250,
            n_rows: 50,
        }
    }
}

fn parse_list(value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad number '{t}'") }))
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(value: &str, line: usize) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse { line, message: format!("bad value '{}'", value.trim()) })
}

impl GridConfig {
    /// Parses flat `key = value` lines; `#` starts a comment and lists are comma-separated.
    pub fn parse(text: &str) -> Result<GridConfig> {
        let mut cfg = GridConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected key = value, found '{content}'") })?;
            match key.trim() {
                "K_values" => cfg.k_values = parse_list(value, line)?,
                "R_values" => cfg.r_values = parse_list(value, line)?,
                "M_values" => cfg.m_values = parse_list(value, line)?,
                "deviation_fraction" => cfg.deviation_fraction = parse_scalar(value, line)?,
                "trials" => cfg.trials = parse_scalar(value, line)?,
                "seed" => cfg.seed = parse_scalar(value, line)?,
                "n_vars" => cfg.n_vars = parse_scalar(value, line)?,
                "n_rows" => cfg.n_rows = parse_scalar(value, line)?,
                other => return Err(Error::Parse { line, message: format!("unknown key '{other}'") }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: &[f64], lo: f64, hi: f64, hi_open: bool| -> Result<()> {
            if v.is_empty() {
                return Err(Error::Domain(format!("{name} is empty")));
            }
            if v.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::Domain(format!("{name} must be strictly increasing")));
            }
            let out = |x: f64| x < lo || x > hi || (hi_open && x >= hi) || !x.is_finite();
            if let Some(x) = v.iter().find(|x| out(**x)) {
                return Err(Error::Domain(format!("{name} entry {x} outside its range")));
            }
            Ok(())
        };
        check("K_values", &self.k_values, 0.0, 1.0, false)?;
        check("R_values", &self.r_values, 0.0, 1.0, true)?;
        check("M_values", &self.m_values, 0.0, 1.0, false)?;
        if self.trials == 0 {
            return Err(Error::Domain("trials must be >= 1".into()));
        }
        if !(self.deviation_fraction.is_finite() && self.deviation_fraction >= 0.0) {
            return Err(Error::Domain("deviation_fraction must be >= 0".into()));
        }
        if self.n_vars == 0 || self.n_rows == 0 {
            return Err(Error::Domain("n_vars and n_rows must be >= 1".into()));
        }
        Ok(())
    }

    /// The resolved configuration in the same `key = value` format.
    pub fn to_kv(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!(
            "K_values = {}\nR_values = {}\nM_values = {}\ndeviation_fraction = {}\ntrials = {}\nseed = {}\nn_vars = {}\nn_rows = {}\n",
            list(&self.k_values),
            list(&self.r_values),
            list(&self.m_values),
            self.deviation_fraction,
            self.trials,
            self.seed,
            self.n_vars,
            self.n_rows
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    RandomLp,
    MpsFile(PathBuf),
}

impl ProblemSource {
    pub fn load(&self, grid: &GridConfig) -> Result<ExperimentInstance> {
        match self {
            ProblemSource::RandomLp => {
                Ok(generate_random_lp(grid.seed, grid.n_vars, grid.n_rows, grid.deviation_fraction))
            }
            ProblemSource::MpsFile(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidData(format!("cannot read {}: {e}", path.display())))?;
                Ok(ExperimentInstance::from_lp(parse_mps(&text)?, grid.deviation_fraction))
            }
        }
    }
}

/// One CSV row: a solve (`m`, `p_infeasible` empty) or a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub k: f64,
    /// The solve's `R`, or the scenario `R′` on `sim_r0` rows.
    pub r: f64,
    pub m: Option<f64>,
    pub loss: f64,
    pub avg_protection: f64,
    pub p_infeasible: Option<f64>,
    pub dca_iterations: usize,
    pub status: String,
}

pub const CSV_HEADER: &str = "K,R,M,loss,avg_protection,p_infeasible,dca_iterations,status";

pub fn write_csv(rows: &[SimulationResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.k,
            r.r,
            opt(r.m),
            r.loss,
            r.avg_protection,
            opt(r.p_infeasible),
            r.dca_iterations,
            r.status
        );
    }
    out
}

/// SplitMix64 finalizer over the grid seed and cell coordinates.
fn cell_seed(seed: u64, coords: &[usize]) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &c in coords {
        h = h.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(c as u64);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

fn protected_sets(instance: &ExperimentInstance, problem: &OrlpProblem, w: &[f64]) -> Vec<Vec<usize>> {
    let mut sets = vec![Vec::new(); instance.lp.ineq.len()];
    for row in &problem.robust_rows {
        sets[row.row] = select_protected_indices(w, row);
    }
    sets
}

/// Runs every `(K, R)` cell: solve, record, then simulate. For `R ≠ 0` one
/// simulation per `M`; for `R = 0` one per `(M, R′)` with protection recomputed
/// from the `R = 0` solution at budget `R′·k_j`. Failed solves are recorded as
/// rows with status `error` and the run continues.
pub fn run_grid(instance: &ExperimentInstance, grid: &GridConfig, dca: &DcaConfig) -> Result<Vec<SimulationResult>> {
    grid.validate()?;
    let cells: Vec<(usize, usize)> =
        (0..grid.k_values.len()).flat_map(|a| (0..grid.r_values.len()).map(move |b| (a, b))).collect();
    let per_cell: Vec<Result<Vec<SimulationResult>>> =
        cells.par_iter().map(|&(ki, ri)| run_cell(instance, grid, dca, ki, ri)).collect();
    let mut rows = Vec::new();
    for cell in per_cell {
        rows.extend(cell?);
    }
    Ok(rows)
}

fn run_cell(
    instance: &ExperimentInstance,
    grid: &GridConfig,
    dca: &DcaConfig,
    ki: usize,
    ri: usize,
) -> Result<Vec<SimulationResult>> {
    let (k, r) = (grid.k_values[ki], grid.r_values[ri]);
    let problem = build_budgets(instance, k, r);
    let outcome = match dca_solve(&problem, dca) {
        Ok(o) => o,
        Err(e) => {
            info!("cell K={k} R={r} failed: {e}");
            return Ok(vec![SimulationResult {
                k,
                r,
                m: None,
                loss: f64::NAN,
                avg_protection: f64::NAN,
                p_infeasible: None,
                dca_iterations: 0,
                status: "error".into(),
            }]);
        }
    };
    let iterations = outcome.trace.iterations();
    let status = outcome.status().as_str().to_string();
    if !outcome.solution.is_optimal() {
        return Ok(vec![SimulationResult {
            k,
            r,
            m: None,
            loss: f64::NAN,
            avg_protection: f64::NAN,
            p_infeasible: None,
            dca_iterations: iterations,
            status,
        }]);
    }
    let w = &outcome.solution.w;
    let loss: f64 = instance.lp.objective.iter().zip(w).map(|(c, x)| c * x).sum();
    let protection = avg_protection(w, instance);
    let mut rows = vec![SimulationResult {
        k,
        r,
        m: None,
        loss,
        avg_protection: protection,
        p_infeasible: None,
        dca_iterations: iterations,
        status,
    }];
    let sim_row = |r_col: f64, m: f64, p: f64, tag: &str| SimulationResult {
        k,
        r: r_col,
        m: Some(m),
        loss,
        avg_protection: protection,
        p_infeasible: Some(p),
        dca_iterations: iterations,
        status: tag.to_string(),
    };
    if r != 0.0 {
        let protected = protected_sets(instance, &problem, w);
        for (mi, &m) in grid.m_values.iter().enumerate() {
            let seed = cell_seed(grid.seed, &[ki, ri, mi, 0]);
            let p = simulate_feasibility(w, instance, &protected, m, grid.trials, seed)?;
            rows.push(sim_row(r, m, p, "sim"));
        }
    } else {
        for (rpi, &r_prime) in grid.r_values.iter().enumerate() {
            let scenario = build_budgets(instance, k, r_prime);
            let protected = protected_sets(instance, &scenario, w);
            for (mi, &m) in grid.m_values.iter().enumerate() {
                let seed = cell_seed(grid.seed, &[ki, ri, mi, rpi + 1]);
                let p = simulate_feasibility(w, instance, &protected, m, grid.trials, seed)?;
                rows.push(sim_row(r_prime, m, p, "sim_r0"));
            }
        }
    }
    Ok(rows)
}
