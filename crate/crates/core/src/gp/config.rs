use serde::{Deserialize, Serialize};

use super::GpError;
use crate::expr::{standard_variables, FunctionSet, Op};
use crate::mechanics::DEFAULT_FD_STEP;

/// Hyperparameters of a symbolic-regression run.
///
/// The first nine fields are required in the JSON form; the engine keys
/// after them fall back to their defaults when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Early stop once the best full-data MAE [MPa] drops to this value.
    pub stopping_criteria: f64,
    pub p_crossover: f64,
    pub p_subtree_mutation: f64,
    pub p_hoist_mutation: f64,
    pub p_point_mutation: f64,
    /// Fraction of the data drawn each generation for selection fitness.
    pub max_samples: f64,
    /// Penalty per node [MPa].
    pub parsimony_coefficient: f64,

    #[serde(default = "default_tournament_size")]
    pub tournament_size: usize,
    #[serde(default = "default_init_depth")]
    pub init_depth: (usize, usize),
    #[serde(default = "FunctionSet::default_operators")]
    pub function_set: Vec<Op>,
    #[serde(default = "default_constant_range")]
    pub constant_range: (f64, f64),
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

fn default_tournament_size() -> usize {
    20
}

fn default_init_depth() -> (usize, usize) {
    (2, 6)
}

fn default_constant_range() -> (f64, f64) {
    (-1.0, 1.0)
}

fn default_fd_step() -> f64 {
    DEFAULT_FD_STEP
}

/// The published hyperparameter columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    GmrCase1,
    GmrCase2,
    GmrCase3,
    Treloar,
    Hytrel,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self::preset(Preset::GmrCase1)
    }
}

impl GpConfig {
    pub fn preset(preset: Preset) -> Self {
        // (population, generations, p_xo, p_sub, p_hoist, p_point, max_samples, parsimony)
        let (pop, gens, pc, ps, ph, pp, ms, pars) = match preset {
            Preset::GmrCase1 => (1000, 50, 0.7, 0.15, 0.1, 0.05, 0.9, 0.003),
            Preset::GmrCase2 => (7500, 50, 0.7, 0.15, 0.1, 0.05, 0.9, 0.003),
            Preset::GmrCase3 => (15000, 50, 0.6, 0.15, 0.1, 0.15, 0.9, 0.0005),
            Preset::Treloar => (5000, 200, 0.65, 0.1, 0.05, 0.1, 0.6, 0.0025),
            Preset::Hytrel => (15000, 50, 0.6, 0.15, 0.1, 0.15, 0.9, 0.02),
        };
        Self {
            population_size: pop,
            generations: gens,
            stopping_criteria: 0.001,
            p_crossover: pc,
            p_subtree_mutation: ps,
            p_hoist_mutation: ph,
            p_point_mutation: pp,
            max_samples: ms,
            parsimony_coefficient: pars,
            tournament_size: default_tournament_size(),
            init_depth: default_init_depth(),
            function_set: FunctionSet::default_operators(),
            constant_range: default_constant_range(),
            seed: 0,
            fd_step: default_fd_step(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |msg: String| Err(GpError::Config(msg));
        if self.population_size == 0 {
            return bad("population_size must be at least 1".into());
        }
        if self.generations == 0 {
            return bad("generations must be at least 1".into());
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return bad(format!(
                "tournament_size {} must lie in 1..={}",
                self.tournament_size, self.population_size
            ));
        }
        let probs = [
            ("p_crossover", self.p_crossover),
            ("p_subtree_mutation", self.p_subtree_mutation),
            ("p_hoist_mutation", self.p_hoist_mutation),
            ("p_point_mutation", self.p_point_mutation),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        let total: f64 = probs.iter().map(|(_, p)| p).sum();
        if total > 1.0 + 1e-12 {
            return bad(format!("operator probabilities sum to {total} > 1"));
        }
        if !(self.max_samples > 0.0 && self.max_samples <= 1.0) {
            return bad(format!("max_samples {} must lie in (0, 1]", self.max_samples));
        }
        if !(self.parsimony_coefficient >= 0.0 && self.parsimony_coefficient.is_finite()) {
            return bad("parsimony_coefficient must be finite and non-negative".into());
        }
        if !self.stopping_criteria.is_finite() {
            return bad("stopping_criteria must be finite".into());
        }
        let (lo, hi) = self.init_depth;
        if lo == 0 || lo > hi {
            return bad(format!("init_depth ({lo}, {hi}) must satisfy 1 <= min <= max"));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return bad("fd_step must be positive".into());
        }
        self.function_set_for(0)?;
        Ok(())
    }

    /// Function set over the standard variables plus `n_extras` parameters.
    pub fn function_set_for(&self, n_extras: usize) -> Result<FunctionSet, GpError> {
        FunctionSet::new(
            self.function_set.clone(),
            standard_variables(n_extras),
            self.constant_range,
        )
        .map_err(|e| GpError::Config(e.to_string()))
    }

    /// Number of points drawn per generation out of `n`.
    pub fn subsample_size(&self, n: usize) -> usize {
        let m = (self.max_samples * n as f64 - 1e-9).ceil() as usize;
        m.clamp(1, n)
    }

    pub fn from_json(text: &str) -> Result<Self, GpError> {
        let cfg: GpConfig =
            serde_json::from_str(text).map_err(|e| GpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
