//! Linear classifiers and regressors derived from optimistic robust
//! formulations: non-convex regularized ν-SVC and ν-SVR solved by DCA,
//! trimmed-loss regression, TSVC and the pessimistic robust C-SVM.
//!
//! Trimmed regression uses the unscaled sum of the largest entries
//! ([`crate::norms::largest_sum`]), not the averaged [`crate::norms::cvar_norm`].

mod objective;
mod program;
mod trainers;

pub use objective::{convex_subsolve, AffineForm, CompositeObjective, HingeTerm, ResidualShape, Subgradient, TopKTerm};
pub use trainers::{
    csvm_objective, nu_svc_inside_objective, nu_svc_objective, nu_svr_objective, redundancy_probe,
    robust_csvm_objective, train_csvm, train_nu_svc_oro, train_nu_svr_oro, train_robust_csvm, train_trimmed_regression,
    train_tsvc, trimmed_objective, tsvc_objective,
};

use std::path::Path;

use crate::error::{check_dim, Error, Result};
use crate::lp::SimplexConfig;

/// Samples `x[i]` with targets `y[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        let d = Dataset { x, y };
        d.validate()?;
        Ok(d)
    }

    pub fn num_samples(&self) -> usize {
        self.y.len()
    }

    pub fn num_features(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.is_empty() {
            return Err(Error::InvalidData("dataset has no samples".into()));
        }
        check_dim(self.y.len(), self.x.len())?;
        let n = self.num_features();
        for (i, row) in self.x.iter().enumerate() {
            check_dim(n, row.len())?;
            if row.iter().any(|v| !v.is_finite()) || !self.y[i].is_finite() {
                return Err(Error::InvalidData(format!("sample {} has a non-finite entry", i + 1)));
            }
        }
        Ok(())
    }

    /// Checks labels are ±1.
    pub fn validate_classification(&self) -> Result<()> {
        self.validate()?;
        match self.y.iter().position(|&v| v != 1.0 && v != -1.0) {
            Some(i) => Err(Error::InvalidData(format!("sample {} has label {}, expected -1 or 1", i + 1, self.y[i]))),
            None => Ok(()),
        }
    }

    pub fn with_negated_labels(&self) -> Dataset {
        Dataset { x: self.x.clone(), y: self.y.iter().map(|v| -v).collect() }
    }

    /// Parses delimiter-separated values, one sample per line with the target
    /// last. The delimiter is the first of `,` `;` tab found in the first data
    /// line, else runs of spaces. A first line that does not parse as numbers
    /// is taken as a header. Lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| Error::InvalidData("dataset file is empty".into()))?;
        let delimiter = [b',', b';', b'\t'].into_iter().find(|&d| first.as_bytes().contains(&d));
        let records: Vec<(usize, Vec<String>)> = match delimiter {
            Some(d) => {
                let mut reader = csv::ReaderBuilder::new()
                    .has_headers(false)
                    .delimiter(d)
                    .comment(Some(b'#'))
                    .trim(csv::Trim::All)
                    .flexible(true)
                    .from_reader(text.as_bytes());
                let mut out = Vec::new();
                for rec in reader.records() {
                    let rec = rec.map_err(|e| Error::Parse {
                        line: e.position().map_or(0, |p| p.line() as usize),
                        message: e.to_string(),
                    })?;
                    let line = rec.position().map_or(0, |p| p.line() as usize);
                    if rec.iter().all(str::is_empty) {
                        continue;
                    }
                    out.push((line, rec.iter().map(str::to_string).collect()));
                }
                out
            }
            None => text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .map(|(i, l)| (i + 1, l.split_whitespace().map(str::to_string).collect()))
                .collect(),
        };

        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut width = None;
        for (idx, (line, fields)) in records.iter().enumerate() {
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if idx == 0 => continue,
                Err(e) => {
                    return Err(Error::Parse { line: *line, message: format!("bad number: {e}") });
                }
            };
            if values.len() < 2 {
                return Err(Error::Parse { line: *line, message: "need at least one feature and a target".into() });
            }
            match width {
                None => width = Some(values.len()),
                Some(w) if w != values.len() => {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("expected {w} fields, found {}", values.len()),
                    })
                }
                _ => {}
            }
            let (features, target) = values.split_at(values.len() - 1);
            x.push(features.to_vec());
            y.push(target[0]);
        }
        Dataset::new(x, y)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidData(format!("cannot read {}: {e}", path.display())))?;
        Dataset::parse(&text)
    }
}

/// `f(x) = wᵀx + b`; `aux` holds γ or ε′ for the ν formulations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub aux: Option<f64>,
}

impl LinearModel {
    pub fn zeros(n: usize) -> Self {
        LinearModel { w: vec![0.0; n], b: 0.0, aux: None }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.b
    }

    /// `key=value` lines; floats are written so they read back exactly.
    pub fn to_kv(&self, metadata: &[(&str, String)]) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut out = format!("w={}\nb={:?}\n", list(&self.w), self.b);
        if let Some(a) = self.aux {
            out.push_str(&format!("aux={a:?}\n"));
        }
        for (k, v) in metadata {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    /// Reads the model keys back; other keys are returned as metadata.
    pub fn parse_kv(text: &str) -> Result<(LinearModel, Vec<(String, String)>)> {
        let mut w = None;
        let mut b = None;
        let mut aux = None;
        let mut meta = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: String| Error::Parse { line: i + 1, message: m };
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key=value".into()))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
            match k.trim() {
                "w" if v.trim().is_empty() => w = Some(Vec::new()),
                "w" => w = Some(v.split(',').map(num).collect::<Result<Vec<_>>>()?),
                "b" => b = Some(num(v)?),
                "aux" => aux = Some(num(v)?),
                other => meta.push((other.to_string(), v.trim().to_string())),
            }
        }
        let missing = |k: &str| Error::InvalidData(format!("model file lacks `{k}`"));
        Ok((LinearModel { w: w.ok_or_else(|| missing("w"))?, b: b.ok_or_else(|| missing("b"))?, aux }, meta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerSolver {
    /// Interior-point conic solver.
    #[default]
    Conic,
    /// Subgradient method with step `1/(μt)`.
    Subgradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    pub dca_max_iters: usize,
    pub dca_rel_tol: f64,
    pub inner_max_iters: usize,
    pub inner_tol: f64,
    pub seed: u64,
    /// `‖w‖∞` bound used by the ν-SVC trainers, whose objective is
    /// positively homogeneous.
    pub weight_bound: f64,
    pub inner_solver: InnerSolver,
    pub simplex: SimplexConfig,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            dca_max_iters: 50,
            dca_rel_tol: 1e-6,
            inner_max_iters: 20_000,
            inner_tol: 1e-6,
            seed: 0,
            weight_bound: 1.0,
            inner_solver: InnerSolver::Conic,
            simplex: SimplexConfig::default(),
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dca_max_iters == 0 || self.inner_max_iters == 0 {
            return Err(Error::Domain("iteration limits must be positive".into()));
        }
        for (name, v) in
            [("dca_rel_tol", self.dca_rel_tol), ("inner_tol", self.inner_tol), ("weight_bound", self.weight_bound)]
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// A fitted model with its objective history.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub model: LinearModel,
    /// Objective after initialization and after each accepted iteration.
    pub objective_trace: Vec<f64>,
    /// Samples ignored by the trimmed loss at the final point (0-based).
    pub excluded: Vec<usize>,
}

impl TrainReport {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().unwrap_or(&f64::NAN)
    }

    pub fn iterations(&self) -> usize {
        self.objective_trace.len().saturating_sub(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_delimiters_and_header() {
        let comma = Dataset::parse("a,b,label\n1,2,1\n3,4,-1\n").unwrap();
        assert_eq!(comma.x, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(comma.y, vec![1.0, -1.0]);
        let spaces = Dataset::parse("# comment\n1  2   1\n3 4 -1\n").unwrap();
        assert_eq!(spaces, comma);
        let tabs = Dataset::parse("1\t2\t1\n3\t4\t-1\n").unwrap();
        assert_eq!(tabs, comma);
    }

    #[test]
    fn parse_errors_carry_lines() {
        match Dataset::parse("1,2,3\n4,x,6\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Dataset::parse("1,2,3\n4,5\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Dataset::parse("\n\n").is_err());
        assert!(Dataset::parse("1,nan,1\n").is_err());
    }

    #[test]
    fn labels_are_checked() {
        let d = Dataset::parse("1,1\n2,0.5\n").unwrap();
        assert!(d.validate_classification().is_err());
    }

    #[test]
    fn model_dump_round_trips() {
        let m = LinearModel { w: vec![0.1, -1.0 / 3.0], b: 2.5e-17, aux: Some(-0.75) };
        let text = m.to_kv(&[("task", "svc".to_string()), ("objective", "0.125".into())]);
        let (back, meta) = LinearModel::parse_kv(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(meta[0], ("task".to_string(), "svc".to_string()));
        assert!(LinearModel::parse_kv("b=1\n").is_err());
    }
}
