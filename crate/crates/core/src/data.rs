//! Data sets: CSV ingestion, generalized Mooney-Rivlin benchmarks and
//! parameter scaling.
//!
//! CSV layout (header required, `#` starts a comment line):
//!
//! ```text
//! mode,stretch,stress_MPa[,param:<name>[:<scaler>]...]
//! mode,strain,stress_MPa[,...]
//! ```
//!
//! `mode` is one of `UT`, `PS`, `EBT`. A `strain` column is converted to
//! stretch as `1 + strain`. The only scaler is `temperature`, which maps
//! degrees Celsius onto [`scale_temperature`]; unscaled columns are read as is.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitness::{DataPoint, Dataset, FitnessError};
use crate::mechanics::{nominal_stress_from, InvariantPoint, LoadingMode};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("header: {0}")]
    Header(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Dataset(#[from] FitnessError),
}

/// Coefficients of the generalized Mooney-Rivlin energy [MPa].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmrParameters {
    pub c10: f64,
    pub c20: f64,
    pub c30: f64,
    pub c01: f64,
    pub c02: f64,
    pub c03: f64,
}

impl GmrParameters {
    pub const fn new(c10: f64, c20: f64, c30: f64, c01: f64, c02: f64, c03: f64) -> Self {
        Self {
            c10,
            c20,
            c30,
            c01,
            c02,
            c03,
        }
    }

    /// The three benchmark parameter sets, `case` in `1..=3`.
    pub fn case(case: u8) -> Option<Self> {
        match case {
            1 => Some(Self::new(0.48, 0.0, 0.0, 0.12, 0.0, 0.0)),
            2 => Some(Self::new(0.87, 0.86, 0.0, 0.98, 0.43, 0.0)),
            3 => Some(Self::new(0.91, 0.57, 0.79, 0.88, 0.21, 0.70)),
            _ => None,
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.c10, self.c20, self.c30, self.c01, self.c02, self.c03]
    }

    /// The energy written in the expression grammar.
    pub fn to_expression(&self) -> String {
        let mut terms = Vec::new();
        for (inv, cs) in [
            ("I1bar", [self.c10, self.c20, self.c30]),
            ("I2bar", [self.c01, self.c02, self.c03]),
        ] {
            for (i, c) in cs.into_iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let base = format!("({inv} - 3)");
                let power = vec![base; i + 1].join(" * ");
                terms.push(format!("{} * {power}", crate::expr::format_constant(c)));
            }
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

fn gmr_pair(c: [f64; 3], x: f64) -> (f64, f64) {
    let d = x - 3.0;
    let psi = c[0] * d + c[1] * d * d + c[2] * d * d * d;
    let dpsi = c[0] + 2.0 * c[1] * d + 3.0 * c[2] * d * d;
    (psi, dpsi)
}

pub fn gmr_energy(p: &GmrParameters, ip: &InvariantPoint) -> f64 {
    gmr_pair([p.c10, p.c20, p.c30], ip.i1bar).0 + gmr_pair([p.c01, p.c02, p.c03], ip.i2bar).0
}

/// Analytic `(dΨ/dI1bar, dΨ/dI2bar)`; the energy does not depend on `J`.
pub fn gmr_derivatives(p: &GmrParameters, ip: &InvariantPoint) -> (f64, f64) {
    (
        gmr_pair([p.c10, p.c20, p.c30], ip.i1bar).1,
        gmr_pair([p.c01, p.c02, p.c03], ip.i2bar).1,
    )
}

/// Nominal stress of the generalized Mooney-Rivlin model.
pub fn gmr_stress(p: &GmrParameters, mode: LoadingMode, stretch: f64) -> Result<f64, FitnessError> {
    let ip = crate::fitness::point_invariants(mode, stretch)?;
    let (d1, d2) = gmr_derivatives(p, &ip);
    Ok(nominal_stress_from(d1, d2, mode, stretch))
}

/// `n` evenly spaced stretches on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Default benchmark grid: 50 points on `[1, 3]` for UT/PS and `[1, 2.5]` for EBT.
pub fn default_grid(mode: LoadingMode) -> Vec<f64> {
    match mode {
        LoadingMode::UT | LoadingMode::PS => linspace(1.0, 3.0, 50),
        LoadingMode::EBT => linspace(1.0, 2.5, 50),
    }
}

/// One point per `(mode, stretch)` with exact model stresses.
pub fn generate_benchmark(
    p: &GmrParameters,
    grids: &[(LoadingMode, Vec<f64>)],
) -> Result<Dataset, FitnessError> {
    let mut points = Vec::new();
    for (mode, grid) in grids {
        for &l in grid {
            points.push(DataPoint::new(*mode, l, gmr_stress(p, *mode, l)?));
        }
    }
    Dataset::new(points, vec![])
}

/// Benchmark over all three modes on the default grids (150 points).
pub fn default_benchmark(p: &GmrParameters) -> Result<Dataset, FitnessError> {
    let grids: Vec<_> = LoadingMode::ALL.iter().map(|&m| (m, default_grid(m))).collect();
    generate_benchmark(p, &grids)
}

/// Maps a temperature in °C onto the scaled temperature `T/400 + 1/2`.
pub fn scale_temperature(celsius: f64) -> f64 {
    debug_assert!(celsius > -200.0, "temperature {celsius} °C is below the physical guard");
    celsius / 400.0 + 0.5
}

/// Temperature-dependent stand-in material: `c10(T̄) = a + b·T̄`, constant `c01`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalGmr {
    pub a: f64,
    pub b: f64,
    pub c01: f64,
}

impl Default for ThermalGmr {
    fn default() -> Self {
        Self {
            a: 0.9,
            b: -0.6,
            c01: 0.05,
        }
    }
}

impl ThermalGmr {
    pub fn at(&self, t_bar: f64) -> GmrParameters {
        GmrParameters::new(self.a + self.b * t_bar, 0.0, 0.0, self.c01, 0.0, 0.0)
    }

    /// Uniaxial curves at each temperature [°C], extras = `[T̄]`.
    pub fn dataset(&self, temperatures: &[f64], stretches: &[f64]) -> Result<Dataset, FitnessError> {
        let mut points = Vec::new();
        for &t in temperatures {
            let t_bar = scale_temperature(t);
            let p = self.at(t_bar);
            for &l in stretches {
                let s = gmr_stress(&p, LoadingMode::UT, l)?;
                points.push(DataPoint::new(LoadingMode::UT, l, s).with_extras(vec![t_bar]));
            }
        }
        Dataset::new(points, vec!["temperature".into()])
    }
}

/// Training and held-out temperatures [°C] of the thermal data set.
pub const TRAIN_TEMPERATURES: [f64; 5] = [-40.0, 0.0, 40.0, 90.0, 120.0];
pub const TEST_TEMPERATURES: [f64; 4] = [-20.0, 23.0, 60.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scaler {
    None,
    Temperature,
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file)
}

pub fn read_csv<R: Read>(reader: R) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 3 {
        return Err(DataError::Header(
            "expected `mode,stretch|strain,stress_MPa[,param:<name>...]`".into(),
        ));
    }
    if &header[0] != "mode" {
        return Err(DataError::Header(format!("first column must be `mode`, got `{}`", &header[0])));
    }
    let strain = match &header[1] {
        "stretch" => false,
        "strain" => true,
        other => {
            return Err(DataError::Header(format!(
                "second column must be `stretch` or `strain`, got `{other}`"
            )))
        }
    };
    if &header[2] != "stress_MPa" {
        return Err(DataError::Header(format!(
            "third column must be `stress_MPa`, got `{}`",
            &header[2]
        )));
    }
    let mut names = Vec::new();
    let mut scalers = Vec::new();
    for col in header.iter().skip(3) {
        let spec = col
            .strip_prefix("param:")
            .ok_or_else(|| DataError::Header(format!("unexpected column `{col}`")))?;
        let (name, scaler) = match spec.split_once(':') {
            None => (spec, Scaler::None),
            Some((name, "temperature")) => (name, Scaler::Temperature),
            Some((_, other)) => {
                return Err(DataError::Header(format!("unknown scaler `{other}` in `{col}`")))
            }
        };
        if name.is_empty() {
            return Err(DataError::Header(format!("empty parameter name in `{col}`")));
        }
        names.push(name.to_string());
        scalers.push(scaler);
    }

    let mut points = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        // 1-based line number in the file, including the header.
        let row = record.position().map_or(k + 2, |p| p.line() as usize);
        let err = |message: String| DataError::Row { row, message };
        if record.len() != header.len() {
            return Err(err(format!(
                "{} field(s), expected {}",
                record.len(),
                header.len()
            )));
        }
        let mode: LoadingMode = record[0].parse().map_err(|e| err(format!("{e}")))?;
        let num = |i: usize| -> Result<f64, DataError> {
            let v: f64 = record[i]
                .parse()
                .map_err(|_| err(format!("`{}` is not a number", &record[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("`{}` is not finite", &record[i])))
            }
        };
        let x = num(1)?;
        let stretch = if strain { 1.0 + x } else { x };
        if !(stretch > 0.0) {
            return Err(err(format!("stretch {stretch} is not positive")));
        }
        let stress = num(2)?;
        let mut extras = Vec::with_capacity(scalers.len());
        for (j, scaler) in scalers.iter().enumerate() {
            let v = num(3 + j)?;
            extras.push(match scaler {
                Scaler::None => v,
                Scaler::Temperature => {
                    if v <= -200.0 {
                        return Err(err(format!("temperature {v} °C is below -200")));
                    }
                    scale_temperature(v)
                }
            });
        }
        points.push(DataPoint::new(mode, stretch, stress).with_extras(extras));
    }
    Ok(Dataset::new(points, names)?)
}

/// Writes the data set with stretch columns and already-scaled parameters.
pub fn write_csv<W: Write>(dataset: &Dataset, mut out: W, comments: &[String]) -> io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    write!(out, "mode,stretch,stress_MPa")?;
    for name in dataset.param_names() {
        write!(out, ",param:{name}")?;
    }
    writeln!(out)?;
    for p in dataset.points() {
        write!(out, "{},{:?},{:?}", p.mode, p.stretch, p.stress)?;
        for x in &p.extras {
            write!(out, ",{x:?}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>, comments: &[String]) -> Result<(), DataError> {
    let path = path.as_ref();
    let io_err = |source| DataError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = io::BufWriter::new(File::create(path).map_err(io_err)?);
    write_csv(dataset, &mut file, comments).map_err(io_err)?;
    file.flush().map_err(io_err)
}
