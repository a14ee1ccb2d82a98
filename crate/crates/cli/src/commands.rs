use std::path::Path;
use std::process::ExitCode;

use negacopula::audit::{ordering_suite, standard_suite, SuiteConfig};
use negacopula::bivariate::BivariateModel;
use negacopula::copula::{kendall_tau, spearman_rho, Copula, CopulaError, DependenceParam};
use negacopula::estimation::{fit_pipeline, EstimationError, FitConfig, PairedData, ThetaMethod};
use negacopula::marginals::{AicSelection, MarginalError, MarginalModel};
use negacopula::sampler::{sample_copula, SampleError, RNG_ALGORITHM};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::output::{num, sidecar_path, write_csv, write_json};
use crate::{AuditArgs, FitArgs, MeasuresArgs, MethodArg, PlotArgs, PlotWhat, SampleArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] negacopula::estimation::DataError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Marginal(#[from] MarginalError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("write failed: {0}")]
    Output(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Estimation(EstimationError::PositiveDependence { .. }) => 3,
            CliError::Estimation(EstimationError::BootstrapDrops { .. }) => 1,
            _ => 2,
        }
    }
}

impl From<SampleError> for CliError {
    fn from(err: SampleError) -> Self {
        match err {
            SampleError::Marginal(m) => CliError::Marginal(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn rng_record(seed: u64) -> Value {
    json!({ "algorithm": RNG_ALGORITHM, "seed": seed })
}

/// Written next to CSV outputs so every file carries its configuration.
fn write_sidecar<C: Serialize>(
    command: &str,
    config: &C,
    seed: Option<u64>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(path) = output {
        let record = json!({
            "command": command,
            "config": config,
            "rng": seed.map(rng_record),
        });
        write_json(&record, Some(&sidecar_path(path)))?;
    }
    Ok(())
}

fn marginal_json(column: &str, selection: &AicSelection<f64>) -> Value {
    let model = &selection.best.model;
    let params: serde_json::Map<String, Value> = model
        .family()
        .param_names()
        .iter()
        .zip(model.params())
        .map(|(name, value)| (name.to_string(), json!(value)))
        .collect();
    json!({
        "column": column,
        "family": model.family(),
        "params": params,
        "model": model.to_string(),
        "log_likelihood": selection.best.log_likelihood,
        "aic": selection.best.aic,
        "aic_table": selection.table,
    })
}

pub fn fit(args: &FitArgs) -> Result<ExitCode, CliError> {
    let data = PairedData::from_csv_path(&args.input, &args.xcol, &args.ycol)?;
    let config = FitConfig {
        families: args.families.clone(),
        method: match args.method {
            MethodArg::Rho => ThetaMethod::RhoInversion,
            MethodArg::Tau => ThetaMethod::TauInversion,
        },
        bootstrap: args.bootstrap,
        seed: args.seed,
        conditional_at: args.at.clone(),
        curve_points: args.curve_points,
    };
    let report = fit_pipeline(&data, &config)?;
    let value = json!({
        "config": args,
        "n": report.n,
        "dropped_rows": report.dropped_rows,
        "marginals": {
            "x": marginal_json(&args.xcol, &report.marginal_x),
            "y": marginal_json(&args.ycol, &report.marginal_y),
        },
        "rho_emp": report.rho_emp,
        "tau_emp": report.tau_emp,
        "method": report.method,
        "theta_hat": report.theta_hat,
        "ks": { "x": report.ks_x, "y": report.ks_y },
        "conditional_curves": report.conditional_curves,
        "rng": rng_record(args.seed),
    });
    write_json(&value, args.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn sample(args: &SampleArgs) -> Result<ExitCode, CliError> {
    let theta = DependenceParam::new(args.theta)?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let batch = sample_copula(args.n, theta, args.seed)?;
    let output = args.output.as_deref();
    match (&args.margin_x, &args.margin_y) {
        (Some(mx), Some(my)) => {
            let rows = batch
                .pairs
                .iter()
                .map(|p| Ok(vec![num(mx.quantile(p.u)?), num(my.quantile(p.v)?)]))
                .collect::<Result<Vec<_>, MarginalError>>()?;
            write_csv(&["x", "y"], rows.into_iter(), output)?;
        }
        _ => write_csv(
            &["u", "v"],
            batch.pairs.iter().map(|p| vec![num(p.u), num(p.v)]),
            output,
        )?,
    }
    write_sidecar("sample", args, Some(args.seed), output)?;
    Ok(ExitCode::SUCCESS)
}

pub fn measures(args: &MeasuresArgs) -> Result<ExitCode, CliError> {
    let output = args.output.as_deref();
    if let Some(points) = args.grid {
        if points < 2 {
            return Err(CliError::Usage("--grid must be at least 2".into()));
        }
        let lo = DependenceParam::new(args.theta_min)?.value().ln();
        let hi = DependenceParam::new(args.theta_max)?.value().ln();
        if lo >= hi {
            return Err(CliError::Usage(
                "--theta-min must be below --theta-max".into(),
            ));
        }
        let rows = (0..points)
            .map(|i| {
                let t = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
                Ok(vec![num(t), num(spearman_rho(t)?), num(kendall_tau(t)?)])
            })
            .collect::<Result<Vec<_>, CopulaError>>()?;
        write_csv(&["theta", "rho", "tau"], rows.into_iter(), output)?;
        write_sidecar("measures", args, None, output)?;
    } else {
        let theta = args.theta.expect("clap requires --theta without --grid");
        let value = json!({
            "config": args,
            "theta": DependenceParam::new(theta)?,
            "rho": spearman_rho(theta)?,
            "tau": kendall_tau(theta)?,
        });
        write_json(&value, output)?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn audit(args: &AuditArgs) -> Result<ExitCode, CliError> {
    let cfg = SuiteConfig {
        grid: args.grid,
        laplacian_grid: args.laplacian_grid,
        n_random: args.n_random,
        seed: args.seed,
    };
    if cfg.grid < 2 || cfg.laplacian_grid < 2 || cfg.n_random == 0 {
        return Err(CliError::Usage(
            "grids need at least 2 points and --n-random at least 1".into(),
        ));
    }
    let mut reports = Vec::new();
    if let Some(t) = args.theta {
        reports.extend(standard_suite(DependenceParam::new(t)?, cfg));
    }
    if let (Some(t1), Some(t2)) = (args.theta1, args.theta2) {
        let (t1, t2) = (DependenceParam::new(t1)?, DependenceParam::new(t2)?);
        if t1.value() > t2.value() {
            return Err(CliError::Usage("--theta1 must not exceed --theta2".into()));
        }
        reports.extend(ordering_suite(t1, t2, cfg)?);
    }
    let output = args.output.as_deref();
    write_json(&reports, output)?;
    write_sidecar("audit", args, Some(args.seed), output)?;
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!(
            "audit failed: {} (worst violation {:e} > tolerance {:e})",
            r.check_name, r.worst_violation, r.tolerance
        );
    }
    Ok(if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn model_from_report(path: &Path) -> Result<BivariateModel<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |what: &str| CliError::Usage(format!("{}: {what}", path.display()));
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    let margin = |axis: &str| -> Result<MarginalModel<f64>, CliError> {
        value["marginals"][axis]["model"]
            .as_str()
            .ok_or_else(|| bad(&format!("missing marginals.{axis}.model")))?
            .parse()
            .map_err(CliError::Marginal)
    };
    let theta = value["theta_hat"]
        .as_f64()
        .ok_or_else(|| bad("missing theta_hat"))?;
    Ok(BivariateModel::new(
        margin("x")?,
        margin("y")?,
        DependenceParam::new(theta)?,
    ))
}

fn resolve_model(args: &PlotArgs) -> Result<BivariateModel<f64>, CliError> {
    if let Some(path) = &args.report {
        return model_from_report(path);
    }
    match (&args.margin_x, &args.margin_y, args.theta) {
        (Some(mx), Some(my), Some(t)) => {
            Ok(BivariateModel::new(*mx, *my, DependenceParam::new(t)?))
        }
        _ => Err(CliError::Usage(
            "fitted-model plots need --report, or --margin-x, --margin-y and --theta".into(),
        )),
    }
}

fn axis(upper: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| upper * i as f64 / (points - 1) as f64)
        .collect()
}

pub fn plot_data(args: &PlotArgs) -> Result<ExitCode, CliError> {
    if args.grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let g = args.grid;
    let output = args.output.as_deref();
    let mut rows = Vec::new();
    match args.what {
        PlotWhat::Cdf | PlotWhat::Pdf => {
            let theta = args
                .theta
                .ok_or_else(|| CliError::Usage("--theta is required for copula plots".into()))?;
            let c = Copula::new(theta)?;
            let grid = axis(1.0, g);
            for &u in &grid {
                for &v in &grid {
                    let value = if args.what == PlotWhat::Cdf {
                        c.cdf(u, v)
                    } else {
                        c.pdf(u, v)
                    };
                    rows.push(vec![num(u), num(v), num(value)]);
                }
            }
            write_csv(&["u", "v", "value"], rows.into_iter(), output)?;
        }
        PlotWhat::JointCdf => {
            let model = resolve_model(args)?;
            let xs = axis(model.margin_x.quantile(0.995)?, g);
            let ys = axis(model.margin_y.quantile(0.995)?, g);
            for &x in &xs {
                for &y in &ys {
                    rows.push(vec![num(x), num(y), num(model.joint_cdf(x, y))]);
                }
            }
            write_csv(&["x", "y", "value"], rows.into_iter(), output)?;
        }
        PlotWhat::Cond => {
            if args.at.is_empty() {
                return Err(CliError::Usage(
                    "--at is required for conditional curves".into(),
                ));
            }
            let model = resolve_model(args)?;
            let ys = axis(model.margin_y.quantile(0.999)?, g);
            for &x in &args.at {
                for &y in &ys {
                    rows.push(vec![num(y), num(model.cond_cdf_y_given_x(y, x)), num(x)]);
                }
            }
            write_csv(&["y", "cdf", "conditioning_x"], rows.into_iter(), output)?;
        }
    }
    write_sidecar("plot-data", args, None, output)?;
    Ok(ExitCode::SUCCESS)
}
