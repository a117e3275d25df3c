use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::info;
use oro_core::experiments::{build_budgets, generate_random_lp, run_grid, write_csv, ExperimentInstance, GridConfig};
use oro_core::lp::parse_mps;
use oro_core::ml::{
    train_csvm, train_nu_svc_oro, train_nu_svr_oro, train_robust_csvm, train_trimmed_regression, train_tsvc,
};
use oro_core::orlp::dca_solve;
use oro_core::{Dataset, DcaConfig, DcaStatus, InnerSolver, LinearModel, Regularizer, ResidualShape, TrainerConfig};

use crate::manifest::RunManifest;
use crate::{ExperimentArgs, Failure, Family, Inner, RegKind, Shape, SolveArgs, Task, TrainArgs};

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn text(path: &Path, bytes: Vec<u8>) -> Result<String, Failure> {
    String::from_utf8(bytes).map_err(|_| Failure::Usage(format!("{} is not UTF-8 text", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

pub fn solve_orlp(args: &SolveArgs, argv: &[String]) -> Result<(), Failure> {
    let mut manifest = RunManifest::new("solve-orlp", argv, args.seed);
    let instance = match &args.mps {
        Some(path) => {
            let bytes = read_input(path)?;
            manifest.add_input(path, &bytes);
            ExperimentInstance::from_lp(parse_mps(&text(path, bytes)?)?, args.deviation)
        }
        None => {
            manifest.set("n", args.n);
            manifest.set("rows", args.rows);
            generate_random_lp(args.seed, args.n, args.rows, args.deviation)
        }
    };
    for (key, v) in [("k", args.k), ("r", args.r), ("deviation", args.deviation)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Failure::Usage(format!("--{key} must be a non-negative number, got {v}")));
        }
        manifest.set(key, v);
    }
    if args.k > 1.0 || args.r > 1.0 {
        return Err(Failure::Usage("--k and --r are fractions in [0, 1]".into()));
    }
    manifest.set("max_iters", args.max_iters);
    let problem = build_budgets(&instance, args.k, args.r);
    let config = DcaConfig { max_iters: args.max_iters, seed: args.seed, ..DcaConfig::default() };
    let outcome = dca_solve(&problem, &config)?;

    fs::create_dir_all(&args.out)?;
    let mut trace = String::from("iteration,objective,lp_status\n");
    for it in &outcome.trace.iterates {
        let _ = writeln!(trace, "{},{:?},{:?}", it.iteration, it.objective, it.status);
    }
    write_file(&args.out.join("trace.csv"), &trace)?;
    write_file(&args.out.join("manifest.txt"), &manifest.render())?;

    let status = outcome.status();
    let mut sol = String::new();
    let _ = writeln!(sol, "status={}", status.as_str());
    let _ = writeln!(sol, "iterations={}", outcome.trace.iterations());
    let _ = writeln!(sol, "robust_rows={}", problem.robust_rows.len());
    if outcome.solution.is_optimal() {
        let w = &outcome.solution.w;
        let _ = writeln!(sol, "objective={:?}", outcome.solution.objective);
        let _ = writeln!(sol, "robust_violation={:?}", problem.robust_violation(w));
    }
    print!("{sol}");
    if outcome.solution.is_optimal() {
        let _ = writeln!(sol, "w={}", join(&outcome.solution.w));
    }
    write_file(&args.out.join("solution.txt"), &sol)?;
    if status == DcaStatus::SubproblemInfeasible {
        return Err(Failure::Infeasible("the robust problem has no feasible point".into()));
    }
    Ok(())
}

pub fn experiment(args: &ExperimentArgs, argv: &[String]) -> Result<(), Failure> {
    let grid_bytes = read_input(&args.grid_file)?;
    let grid_text = text(&args.grid_file, grid_bytes.clone())?;
    let grid =
        GridConfig::parse(&grid_text).map_err(|e| Failure::Usage(format!("{}: {e}", args.grid_file.display())))?;
    let mut manifest = RunManifest::new("experiment", argv, grid.seed);
    manifest.add_input(&args.grid_file, &grid_bytes);
    for line in grid.to_kv().lines() {
        if let Some((k, v)) = line.split_once('=') {
            manifest.set(k.trim(), v.trim());
        }
    }
    let instance = match args.family {
        Family::Random => {
            if args.mps.is_some() {
                return Err(Failure::Usage("--mps only applies to --family mps".into()));
            }
            manifest.set("family", "random");
            generate_random_lp(grid.seed, grid.n_vars, grid.n_rows, grid.deviation_fraction)
        }
        Family::Mps => {
            let path = args.mps.as_ref().ok_or_else(|| Failure::Usage("--family mps needs --mps PATH".into()))?;
            let bytes = read_input(path)?;
            manifest.add_input(path, &bytes);
            manifest.set("family", "mps");
            ExperimentInstance::from_lp(parse_mps(&text(path, bytes)?)?, grid.deviation_fraction)
        }
    };
    info!("running {}x{} grid", grid.k_values.len(), grid.r_values.len());
    let rows = run_grid(&instance, &grid, &DcaConfig { seed: grid.seed, ..DcaConfig::default() })?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_file(&args.out, &write_csv(&rows))?;
    write_file(&args.out.with_extension("manifest.txt"), &manifest.render())?;
    println!("rows={}", rows.len());
    Ok(())
}

fn regularizer(args: &TrainArgs) -> Result<Option<Regularizer>, Failure> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Failure::Usage(format!("--reg {} needs --{flag}", reg_name(args.reg))))
    };
    let lambda = args.lambda.unwrap_or(1.0);
    Ok(match args.reg {
        RegKind::None => None,
        RegKind::ApproxL0 => Some(Regularizer::ApproxL0 { k: need(args.k, "k")? }),
        RegKind::L12 => Some(Regularizer::L12),
        RegKind::CappedL1 => Some(Regularizer::CappedL1 { theta: need(args.theta, "theta")? }),
        RegKind::Mcp => Some(Regularizer::Mcp { lambda, theta: need(args.theta, "theta")? }),
        RegKind::Scad => Some(Regularizer::Scad { lambda, theta: need(args.theta, "theta")? }),
    })
}

fn reg_name(r: RegKind) -> &'static str {
    match r {
        RegKind::None => "none",
        RegKind::ApproxL0 => "approx-l0",
        RegKind::L12 => "l12",
        RegKind::CappedL1 => "capped-l1",
        RegKind::Mcp => "mcp",
        RegKind::Scad => "scad",
    }
}

fn task_name(t: Task) -> &'static str {
    match t {
        Task::Svc => "svc",
        Task::Svr => "svr",
        Task::Trimmed => "trimmed",
        Task::Tsvc => "tsvc",
        Task::RobustSvm => "robust-svm",
    }
}

/// Mean hinge or insensitive loss of the fitted model, in the task's own form.
fn data_loss(task: Task, data: &Dataset, m: &LinearModel) -> f64 {
    let n = data.num_samples() as f64;
    let aux = m.aux.unwrap_or(0.0);
    let per: f64 = data
        .x
        .iter()
        .zip(&data.y)
        .map(|(x, &y)| {
            let f = m.predict(x);
            match task {
                Task::Svc => (-y * f - aux).max(0.0),
                Task::Svr => ((y - f).abs() - aux).max(0.0),
                Task::Trimmed => (y - f).abs(),
                Task::Tsvc | Task::RobustSvm => (1.0 - y * f).max(0.0),
            }
        })
        .sum();
    per / n
}

pub fn train(args: &TrainArgs, argv: &[String]) -> Result<(), Failure> {
    let bytes = read_input(&args.data)?;
    let data = Dataset::parse(&text(&args.data, bytes.clone())?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.data.display())))?;
    let mut manifest = RunManifest::new("train", argv, args.seed);
    manifest.add_input(&args.data, &bytes);
    let reg = regularizer(args)?;
    if reg.is_some() && !matches!(args.task, Task::Svc | Task::Svr) {
        return Err(Failure::Usage(format!("--reg applies to svc and svr, not {}", task_name(args.task))));
    }
    if let Some(r) = &reg {
        r.validate(data.num_features())?;
    }
    let config = TrainerConfig {
        dca_max_iters: args.max_iters,
        seed: args.seed,
        weight_bound: args.weight_bound,
        inner_solver: match args.inner {
            Inner::Conic => InnerSolver::Conic,
            Inner::Subgradient => InnerSolver::Subgradient,
        },
        ..TrainerConfig::default()
    };
    manifest.set("task", task_name(args.task));
    manifest.set("reg", reg_name(args.reg));
    for (key, v) in [("k", args.k), ("theta", args.theta), ("lambda", args.lambda)] {
        if let Some(v) = v {
            manifest.set(key, v);
        }
    }
    manifest.set("max_iters", args.max_iters);

    let radii = vec![args.radius; data.num_samples()];
    let report = match args.task {
        Task::Svc => {
            let nu = args.nu.unwrap_or(0.5);
            manifest.set("nu", nu);
            manifest.set("z", args.z);
            manifest.set("weight_bound", args.weight_bound);
            train_nu_svc_oro(&data, reg.as_ref(), args.z, nu, &config)?
        }
        Task::Svr => {
            let nu = args.nu.unwrap_or(0.5);
            manifest.set("nu", nu);
            manifest.set("z", args.z);
            manifest.set("c", args.c);
            train_nu_svr_oro(&data, reg.as_ref(), args.z, nu, args.c, &config)?
        }
        Task::Trimmed => {
            let nu = args.nu.unwrap_or(1.0);
            let shape = match args.shape {
                Shape::Abs => ResidualShape::Absolute,
                Shape::Squared => ResidualShape::Squared,
            };
            manifest.set("nu", nu);
            manifest.set("mu", args.mu);
            manifest.set("c", args.c);
            manifest.set("shape", if matches!(args.shape, Shape::Abs) { "abs" } else { "squared" });
            train_trimmed_regression(&data, nu, args.mu, args.c, shape, &config)?
        }
        Task::Tsvc | Task::RobustSvm => {
            manifest.set("c", args.c);
            manifest.set("radius", args.radius);
            if args.radius == 0.0 {
                train_csvm(&data, args.c, &config)?
            } else if args.task == Task::Tsvc {
                train_tsvc(&data, args.c, &radii, &config)?
            } else {
                train_robust_csvm(&data, args.c, &radii, &config)?
            }
        }
    };

    let loss = data_loss(args.task, &data, &report.model);
    let excluded = report.excluded.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    let meta = [
        ("task", task_name(args.task).to_string()),
        ("objective", format!("{:?}", report.objective())),
        ("iterations", report.iterations().to_string()),
        ("loss", format!("{loss:?}")),
        ("excluded", excluded.clone()),
    ];
    fs::create_dir_all(&args.out)?;
    write_file(&args.out.join("model.txt"), &report.model.to_kv(&meta))?;
    let mut trace = String::from("iteration,objective\n");
    for (i, v) in report.objective_trace.iter().enumerate() {
        let _ = writeln!(trace, "{i},{v:?}");
    }
    write_file(&args.out.join("trace.csv"), &trace)?;
    write_file(&args.out.join("manifest.txt"), &manifest.render())?;
    println!("objective={:?}", report.objective());
    println!("iterations={}", report.iterations());
    println!("loss={loss:?}");
    println!("excluded={excluded}");
    Ok(())
}
