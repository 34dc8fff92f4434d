//! From candidate energy to predicted stresses to a fitness score.

use thiserror::Error;

use crate::expr::{standard_variables, BatchScratch, ExprError, ExpressionTree};
use crate::gp::{GpConfig, Objective};
use crate::mechanics::{
    self, central_difference, fd_step, nominal_stress_from, InvariantPoint, LoadingMode,
    MechanicsError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitnessError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no data points selected")]
    EmptySelection,
    #[error("index {0} is outside the dataset")]
    IndexOutOfRange(usize),
    #[error("length mismatch: {predicted} predictions vs {observed} observations")]
    LengthMismatch { predicted: usize, observed: usize },
    #[error("data point {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
}

/// One observation of a homogeneous test.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub mode: LoadingMode,
    pub stretch: f64,
    /// Nominal stress [MPa].
    pub stress: f64,
    /// Extra parameters, already scaled.
    pub extras: Vec<f64>,
}

impl DataPoint {
    pub fn new(mode: LoadingMode, stretch: f64, stress: f64) -> Self {
        Self {
            mode,
            stretch,
            stress,
            extras: Vec::new(),
        }
    }

    pub fn with_extras(mut self, extras: Vec<f64>) -> Self {
        self.extras = extras;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<DataPoint>,
    /// Display names of the extra parameters (e.g. `temperature`).
    param_names: Vec<String>,
}

impl Dataset {
    pub fn new(points: Vec<DataPoint>, param_names: Vec<String>) -> Result<Self, FitnessError> {
        if points.is_empty() {
            return Err(FitnessError::EmptyDataset);
        }
        for (index, p) in points.iter().enumerate() {
            let invalid = |reason: String| FitnessError::InvalidPoint { index, reason };
            if !(p.stretch > 0.0 && p.stretch.is_finite()) {
                return Err(invalid(format!("stretch {} is not positive", p.stretch)));
            }
            if !p.stress.is_finite() {
                return Err(invalid("stress is not finite".into()));
            }
            if p.extras.len() != param_names.len() {
                return Err(invalid(format!(
                    "{} extra parameter(s), expected {}",
                    p.extras.len(),
                    param_names.len()
                )));
            }
            if p.extras.iter().any(|x| !x.is_finite()) {
                return Err(invalid("extra parameter is not finite".into()));
            }
        }
        Ok(Self {
            points,
            param_names,
        })
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn n_extras(&self) -> usize {
        self.param_names.len()
    }

    /// Expression variable names: `I1bar, I2bar, J, eta1..etaN`.
    pub fn variable_names(&self) -> Vec<String> {
        standard_variables(self.n_extras())
    }

    pub fn observed(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.stress).collect()
    }

    /// Subset by predicate, keeping the parameter names.
    pub fn filter(&self, keep: impl Fn(&DataPoint) -> bool) -> Result<Self, FitnessError> {
        Self::new(
            self.points.iter().filter(|p| keep(p)).cloned().collect(),
            self.param_names.clone(),
        )
    }
}

/// Invariants of the deformation state behind a data point.
pub fn point_invariants(mode: LoadingMode, stretch: f64) -> Result<InvariantPoint, MechanicsError> {
    Ok(mechanics::invariants(&mechanics::deformation(mode, stretch)?))
}

fn bind(ip: &InvariantPoint, extras: &[f64], buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend_from_slice(&[ip.i1bar, ip.i2bar, ip.j]);
    buf.extend_from_slice(extras);
}

/// Predicted nominal stress of `tree` at one data point.
pub fn predict(tree: &ExpressionTree, point: &DataPoint, fd_step: f64) -> Result<f64, FitnessError> {
    tree.check_bound(3 + point.extras.len())?;
    let ip = point_invariants(point.mode, point.stretch)?;
    let ed = energy_derivatives_of(tree, ip, &point.extras, fd_step);
    Ok(mechanics::nominal_stress(&ed, point.mode, point.stretch)?)
}

/// Finite-difference derivatives of a tree; variables must already be bound-checked.
pub fn energy_derivatives_of(
    tree: &ExpressionTree,
    ip: InvariantPoint,
    extras: &[f64],
    fd_step: f64,
) -> mechanics::EnergyDerivatives {
    let mut buf = Vec::with_capacity(3 + extras.len());
    mechanics::energy_derivatives(
        |p, ex| {
            bind(p, ex, &mut buf);
            tree.evaluate_bound(&buf)
        },
        ip,
        extras,
        fd_step,
    )
}

/// Mean absolute error.
pub fn mae(predicted: &[f64], observed: &[f64]) -> Result<f64, FitnessError> {
    if predicted.len() != observed.len() {
        return Err(FitnessError::LengthMismatch {
            predicted: predicted.len(),
            observed: observed.len(),
        });
    }
    if predicted.is_empty() {
        return Err(FitnessError::EmptySelection);
    }
    let sum: f64 = predicted.iter().zip(observed).map(|(p, o)| (p - o).abs()).sum();
    Ok(sum / predicted.len() as f64)
}

/// Mean of `values[i]` over `indices`, summed in index order.
pub(crate) fn mean_over(values: &[f64], indices: &[usize]) -> f64 {
    let sum: f64 = indices.iter().map(|&i| values[i]).sum();
    sum / indices.len() as f64
}

/// Raw and penalized fitness of one tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub raw: f64,
    pub penalized: f64,
}

/// Scores `tree` on the selected points of `dataset`.
pub fn score(
    tree: &ExpressionTree,
    dataset: &Dataset,
    indices: &[usize],
    cfg: &GpConfig,
) -> Result<Score, FitnessError> {
    if indices.is_empty() {
        return Err(FitnessError::EmptySelection);
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= dataset.len()) {
        return Err(FitnessError::IndexOutOfRange(bad));
    }
    let prepared = PreparedDataset::new(dataset, cfg.fd_step)?;
    let mut residuals = Vec::new();
    prepared.abs_residuals(tree, &mut residuals, &mut BatchScratch::default())?;
    let raw = mean_over(&residuals, indices);
    Ok(Score {
        raw,
        penalized: raw + cfg.parsimony_coefficient * tree.size() as f64,
    })
}

/// Dataset with the finite-difference stencil precomputed column-wise.
///
/// Each point contributes four stencil rows, `I1bar ± h` and `I2bar ± h`,
/// which is all the stress needs (the `J` derivative drops out when `J = 1`).
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    modes: Vec<LoadingMode>,
    stretches: Vec<f64>,
    observed: Vec<f64>,
    h_i1: Vec<f64>,
    h_i2: Vec<f64>,
    columns: Vec<Vec<f64>>,
    variables: Vec<String>,
}

const STENCIL: usize = 4;

impl PreparedDataset {
    pub fn new(dataset: &Dataset, fd_step_rel: f64) -> Result<Self, FitnessError> {
        let n = dataset.len();
        let n_vars = 3 + dataset.n_extras();
        let mut columns = vec![Vec::with_capacity(STENCIL * n); n_vars];
        let mut h_i1 = Vec::with_capacity(n);
        let mut h_i2 = Vec::with_capacity(n);
        for p in dataset.points() {
            let ip = point_invariants(p.mode, p.stretch)?;
            let h1 = fd_step(ip.i1bar, fd_step_rel);
            let h2 = fd_step(ip.i2bar, fd_step_rel);
            let rows = [
                (ip.i1bar + h1, ip.i2bar),
                (ip.i1bar - h1, ip.i2bar),
                (ip.i1bar, ip.i2bar + h2),
                (ip.i1bar, ip.i2bar - h2),
            ];
            for (i1, i2) in rows {
                columns[0].push(i1);
                columns[1].push(i2);
                columns[2].push(ip.j);
                for (k, x) in p.extras.iter().enumerate() {
                    columns[3 + k].push(*x);
                }
            }
            h_i1.push(h1);
            h_i2.push(h2);
        }
        Ok(Self {
            modes: dataset.points().iter().map(|p| p.mode).collect(),
            stretches: dataset.points().iter().map(|p| p.stretch).collect(),
            observed: dataset.observed(),
            h_i1,
            h_i2,
            columns,
            variables: dataset.variable_names(),
        })
    }

    /// Predicted stresses for every point.
    pub fn predict_all(
        &self,
        tree: &ExpressionTree,
        scratch: &mut BatchScratch,
    ) -> Result<Vec<f64>, FitnessError> {
        let n = self.observed.len();
        let cols: Vec<&[f64]> = self.columns.iter().map(Vec::as_slice).collect();
        let mut psi = vec![0.0; STENCIL * n];
        tree.evaluate_batch(&cols, &mut psi, scratch)?;
        Ok((0..n)
            .map(|k| {
                let s = &psi[STENCIL * k..STENCIL * (k + 1)];
                let d_i1 = central_difference(s[0], s[1], self.h_i1[k]);
                let d_i2 = central_difference(s[2], s[3], self.h_i2[k]);
                nominal_stress_from(d_i1, d_i2, self.modes[k], self.stretches[k])
            })
            .collect())
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }
}

impl Objective for PreparedDataset {
    fn len(&self) -> usize {
        self.observed.len()
    }

    fn variables(&self) -> &[String] {
        &self.variables
    }

    fn abs_residuals(
        &self,
        tree: &ExpressionTree,
        out: &mut Vec<f64>,
        scratch: &mut BatchScratch,
    ) -> Result<(), FitnessError> {
        let pred = self.predict_all(tree, scratch)?;
        out.clear();
        out.extend(pred.iter().zip(&self.observed).map(|(p, o)| (p - o).abs()));
        Ok(())
    }
}
