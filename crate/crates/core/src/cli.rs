//! Command implementations behind the `hypersr` binary.
//!
//! Reports are JSON, predictions and derivative exports are CSV, and
//! expressions use the infix grammar of [`crate::expr`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{self, DataError, GmrParameters};
use crate::expr::{ExprError, ExpressionTree};
use crate::fitness::{self, Dataset, FitnessError};
use crate::gp::{self, GpConfig, GpError};
use crate::mechanics::InvariantPoint;

/// Environment variable capping the number of fitness workers.
pub const THREADS_ENV: &str = "HYPERSR_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation; exit code 2.
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn file_err(path: &Path, e: impl ToString) -> CliError {
    CliError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| file_err(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| file_err(path, e))
}

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub best_expression: String,
    /// Full-data MAE of `best_expression` [MPa].
    pub raw_fitness: f64,
    pub penalized_fitness: f64,
    pub size: usize,
    /// Expression with the lowest full-data MAE seen during the run.
    pub lowest_raw_expression: String,
    pub lowest_raw_fitness: f64,
    pub variables: Vec<String>,
    pub fitness_trace: Vec<f64>,
    pub config_echo: GpConfig,
    pub seed: u64,
    pub wall_time: f64,
}

impl FitReport {
    pub fn from_result(result: &gp::FitResult, cfg: &GpConfig, wall_time: f64) -> Self {
        let best = &result.best_ever;
        let best_f = best.fitness.expect("evaluated best");
        let low = &result.best_raw;
        Self {
            best_expression: best.tree.to_infix(&result.variables),
            raw_fitness: best_f.raw,
            penalized_fitness: best_f.penalized,
            size: best.size,
            lowest_raw_expression: low.tree.to_infix(&result.variables),
            lowest_raw_fitness: low.fitness.expect("evaluated best").raw,
            variables: result.variables.clone(),
            fitness_trace: result.trace.clone(),
            config_echo: cfg.clone(),
            seed: cfg.seed,
            wall_time,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        serde_json::from_str(&read_text(path)?).map_err(|e| file_err(path, e))
    }
}

/// Best-of-N overview written next to the per-seed reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub best_seed: u64,
    pub best_expression: String,
    pub best_raw_fitness: f64,
    pub seeds: Vec<u64>,
    pub raw_fitness: Vec<f64>,
    pub reports: Vec<String>,
}

/// Which parameters `generate` should use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenerateSource {
    Case(u8),
    Custom(GmrParameters),
}

/// Writes a benchmark CSV; returns the data set written.
pub fn cmd_generate(source: GenerateSource, out: &Path) -> Result<Dataset, CliError> {
    let (params, label) = match source {
        GenerateSource::Case(c) => (
            GmrParameters::case(c)
                .ok_or_else(|| CliError::Usage(format!("unknown case {c}; expected 1, 2 or 3")))?,
            format!("case {c}"),
        ),
        GenerateSource::Custom(p) => (p, "custom".to_string()),
    };
    let ds = data::default_benchmark(&params)?;
    let [c10, c20, c30, c01, c02, c03] = params.as_array();
    let comments = vec![
        format!("generalized Mooney-Rivlin benchmark ({label})"),
        format!("c10={c10} c20={c20} c30={c30} c01={c01} c02={c02} c03={c03} [MPa]"),
    ];
    let mut text = Vec::new();
    data::write_csv(&ds, &mut text, &comments).map_err(|e| file_err(out, e))?;
    write_text(out, &String::from_utf8(text).expect("utf-8 csv"))?;
    Ok(ds)
}

/// Worker count from [`THREADS_ENV`], defaulting to the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `seeds` fits with seeds `base_seed + k` and writes one report per
/// seed plus `summary.json` into `out_dir`.
pub fn cmd_fit(
    data_path: &Path,
    config_path: &Path,
    out_dir: &Path,
    seeds: usize,
    base_seed: Option<u64>,
) -> Result<(Vec<FitReport>, FitSummary), CliError> {
    if seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let dataset = data::load_csv(data_path)?;
    let cfg = GpConfig::from_json(&read_text(config_path)?).map_err(|e| file_err(config_path, e))?;
    fit_dataset(&dataset, &cfg, out_dir, seeds, base_seed)
}

pub fn fit_dataset(
    dataset: &Dataset,
    cfg: &GpConfig,
    out_dir: &Path,
    seeds: usize,
    base_seed: Option<u64>,
) -> Result<(Vec<FitReport>, FitSummary), CliError> {
    let base = base_seed.unwrap_or(cfg.seed);
    let threads = thread_count();
    let mut reports = Vec::with_capacity(seeds);
    let mut files = Vec::with_capacity(seeds);
    for k in 0..seeds as u64 {
        let run_cfg = cfg.clone().with_seed(base + k);
        let start = Instant::now();
        let result = gp::run_with_threads(&run_cfg, dataset, threads)?;
        let report = FitReport::from_result(&result, &run_cfg, start.elapsed().as_secs_f64());
        let name = format!("report_seed{}.json", run_cfg.seed);
        write_text(&out_dir.join(&name), &report.to_json())?;
        files.push(name);
        reports.push(report);
    }
    let best = reports
        .iter()
        .min_by(|a, b| a.raw_fitness.total_cmp(&b.raw_fitness))
        .expect("at least one seed");
    let summary = FitSummary {
        best_seed: best.seed,
        best_expression: best.best_expression.clone(),
        best_raw_fitness: best.raw_fitness,
        seeds: reports.iter().map(|r| r.seed).collect(),
        raw_fitness: reports.iter().map(|r| r.raw_fitness).collect(),
        reports: files,
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_text(&out_dir.join("summary.json"), &text)?;
    Ok((reports, summary))
}

/// Per-point predictions of an expression on a data set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub dataset: Dataset,
    pub predicted: Vec<f64>,
    pub mae: f64,
}

impl Evaluation {
    /// CSV table followed by a `# MAE,<value>` line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("mode,stretch");
        for name in self.dataset.param_names() {
            let _ = write!(s, ",param:{name}");
        }
        s.push_str(",stress_observed_MPa,stress_predicted_MPa\n");
        for (p, pred) in self.dataset.points().iter().zip(&self.predicted) {
            let _ = write!(s, "{},{:?}", p.mode, p.stretch);
            for x in &p.extras {
                let _ = write!(s, ",{x:?}");
            }
            let _ = writeln!(s, ",{:?},{:?}", p.stress, pred);
        }
        let _ = writeln!(s, "# MAE,{:?}", self.mae);
        s
    }
}

/// Resolves an expression argument: a report path (`*.json`) or inline text.
pub fn resolve_expression(arg: &str) -> Result<(String, f64), CliError> {
    let path = Path::new(arg);
    if arg.ends_with(".json") {
        let report = FitReport::load(path)?;
        return Ok((report.best_expression, report.config_echo.fd_step));
    }
    Ok((arg.to_string(), crate::mechanics::DEFAULT_FD_STEP))
}

pub fn evaluate_expression(text: &str, dataset: &Dataset, fd_step: f64) -> Result<Evaluation, CliError> {
    let tree = ExpressionTree::parse(text, &dataset.variable_names())?;
    let predicted = dataset
        .points()
        .iter()
        .map(|p| fitness::predict(&tree, p, fd_step))
        .collect::<Result<Vec<_>, _>>()?;
    let mae = fitness::mae(&predicted, &dataset.observed())?;
    Ok(Evaluation {
        dataset: dataset.clone(),
        predicted,
        mae,
    })
}

pub fn cmd_evaluate(expression_or_report: &str, data_path: &Path) -> Result<Evaluation, CliError> {
    let dataset = data::load_csv(data_path)?;
    let (text, fd_step) = resolve_expression(expression_or_report)?;
    evaluate_expression(&text, &dataset, fd_step)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Expr,
    Derivs,
}

impl std::str::FromStr for ExportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expr" => Ok(ExportFormat::Expr),
            "derivs" => Ok(ExportFormat::Derivs),
            other => Err(CliError::Usage(format!(
                "unknown format `{other}`; expected `expr` or `derivs`"
            ))),
        }
    }
}

/// Parses a derivative grid: a CSV file with header `I1bar,I2bar,J[,eta...]`
/// or inline tuples such as `"5,4.25,1;3,3,1"`.
pub fn parse_grid(arg: &str, n_vars: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let path = PathBuf::from(arg);
    let (rows, skip_header): (Vec<String>, bool) = if path.is_file() {
        let text = read_text(&path)?;
        (
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect(),
            true,
        )
    } else {
        (
            arg.split(';')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
            false,
        )
    };
    let mut grid = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        if skip_header && k == 0 {
            continue;
        }
        let values = row
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("grid row `{row}` is not numeric")))?;
        if values.len() != n_vars {
            return Err(CliError::Usage(format!(
                "grid row `{row}` has {} value(s), expected {n_vars}",
                values.len()
            )));
        }
        grid.push(values);
    }
    if grid.is_empty() {
        return Err(CliError::Usage("grid is empty".into()));
    }
    Ok(grid)
}

/// Renders a report as an expression or as a derivative table.
pub fn cmd_export(
    report: &FitReport,
    format: ExportFormat,
    grid: Option<&str>,
) -> Result<String, CliError> {
    match format {
        ExportFormat::Expr => Ok(format!("{}\n", report.best_expression)),
        ExportFormat::Derivs => {
            let grid = grid.ok_or_else(|| {
                CliError::Usage("--grid is required for --format derivs".into())
            })?;
            export_derivatives(
                &report.best_expression,
                &report.variables,
                report.config_echo.fd_step,
                &parse_grid(grid, report.variables.len())?,
            )
        }
    }
}

/// Table of `(invariants, extras) -> (psi, dpsi/dI1bar, dpsi/dI2bar, dpsi/dJ)`.
pub fn export_derivatives(
    expression: &str,
    variables: &[String],
    fd_step: f64,
    grid: &[Vec<f64>],
) -> Result<String, CliError> {
    let tree = ExpressionTree::parse(expression, variables)?;
    tree.check_bound(variables.len())?;
    let mut s = variables.join(",");
    s.push_str(",psi,dpsi_dI1bar,dpsi_dI2bar,dpsi_dJ\n");
    for row in grid {
        let ip = InvariantPoint::new(row[0], row[1], row[2]);
        let ed = fitness::energy_derivatives_of(&tree, ip, &row[3..], fd_step);
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(
            s,
            "{},{:?},{:?},{:?},{:?}",
            cells.join(","),
            ed.psi,
            ed.d_i1,
            ed.d_i2,
            ed.d_j
        );
    }
    Ok(s)
}
