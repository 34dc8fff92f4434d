//! Genetic programming over expression trees.
//!
//! Offspring are built sequentially from a single seeded RNG so the lineage
//! is fixed before any fitness work starts; evaluation then runs on the
//! current rayon pool. Because evaluation is pure and results are collected
//! in offspring order, a run is a function of `(config, data)` alone.

mod config;
pub mod operators;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use config::{GpConfig, Preset};
pub use operators::{crossover, hoist_mutation, point_mutation, subtree_mutation};

use crate::expr::{random_tree, BatchScratch, ExpressionTree, FunctionSet, InitMethod};
use crate::fitness::{mean_over, Dataset, FitnessError, PreparedDataset};

/// Seeded generator used for every run.
pub type GpRng = ChaCha8Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
}

/// Something that can score an expression point by point.
pub trait Objective: Sync {
    /// Number of data points.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Variable names the trees are evaluated against.
    fn variables(&self) -> &[String];

    /// Absolute residual of every data point, in data order.
    fn abs_residuals(
        &self,
        tree: &ExpressionTree,
        out: &mut Vec<f64>,
        scratch: &mut BatchScratch,
    ) -> Result<(), FitnessError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    /// MAE on the generation's subsample [MPa].
    pub raw: f64,
    /// `raw + parsimony_coefficient * size`.
    pub penalized: f64,
    /// MAE on the full data set [MPa].
    pub full_raw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub tree: ExpressionTree,
    pub size: usize,
    pub fitness: Option<Fitness>,
}

impl Individual {
    pub fn new(tree: ExpressionTree) -> Self {
        Self {
            size: tree.size(),
            tree,
            fitness: None,
        }
    }

    pub fn raw_fitness(&self) -> Option<f64> {
        self.fitness.map(|f| f.raw)
    }

    pub fn penalized_fitness(&self) -> Option<f64> {
        self.fitness.map(|f| f.penalized)
    }

    /// Copy scored on the full data set, as kept in the hall of fame.
    fn promoted(&self, parsimony: f64) -> Option<Individual> {
        let f = self.fitness?;
        Some(Individual {
            tree: self.tree.clone(),
            size: self.size,
            fitness: Some(Fitness {
                raw: f.full_raw,
                penalized: f.full_raw + parsimony * self.size as f64,
                full_raw: f.full_raw,
            }),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub generation: usize,
    /// Lowest full-data penalized fitness seen so far.
    pub best_ever: Option<Individual>,
    /// Lowest full-data raw fitness seen so far.
    pub best_raw: Option<Individual>,
}

impl Population {
    pub fn is_evaluated(&self) -> bool {
        self.individuals.iter().all(|i| i.fitness.is_some())
    }

    /// Lowest full-data MAE in the current generation.
    pub fn generation_best_raw(&self) -> Option<f64> {
        self.individuals
            .iter()
            .filter_map(|i| i.fitness.map(|f| f.full_raw))
            .reduce(f64::min)
    }

    fn update_hall_of_fame(&mut self, parsimony: f64) {
        for ind in &self.individuals {
            let Some(f) = ind.fitness else { continue };
            let full_pen = f.full_raw + parsimony * ind.size as f64;
            if self
                .best_ever
                .as_ref()
                .and_then(Individual::penalized_fitness)
                .is_none_or(|b| full_pen < b)
            {
                self.best_ever = ind.promoted(parsimony);
            }
            if self
                .best_raw
                .as_ref()
                .and_then(Individual::raw_fitness)
                .is_none_or(|b| f.full_raw < b)
            {
                self.best_raw = ind.promoted(parsimony);
            }
        }
    }
}

/// Ramped half-and-half initial population (unevaluated).
pub fn init_population<R: Rng + ?Sized>(
    cfg: &GpConfig,
    fs: &FunctionSet,
    rng: &mut R,
) -> Result<Population, GpError> {
    cfg.validate()?;
    let (lo, hi) = cfg.init_depth;
    let n_depths = hi - lo + 1;
    let individuals = (0..cfg.population_size)
        .map(|i| {
            let method = if i % 2 == 0 {
                InitMethod::Full
            } else {
                InitMethod::Grow
            };
            let depth = lo + (i / 2) % n_depths;
            Individual::new(random_tree(fs, method, depth, rng))
        })
        .collect();
    Ok(Population {
        individuals,
        generation: 0,
        best_ever: None,
        best_raw: None,
    })
}

/// Tournament of `k` distinct individuals; lowest penalized fitness wins,
/// then smaller size, then earlier draw.
pub fn tournament_select<'p, R: Rng + ?Sized>(
    pop: &'p Population,
    k: usize,
    rng: &mut R,
) -> Result<&'p Individual, GpError> {
    let n = pop.individuals.len();
    if k == 0 || k > n {
        return Err(GpError::Config(format!(
            "tournament size {k} must lie in 1..={n}"
        )));
    }
    let mut best: Option<(&Individual, f64)> = None;
    for idx in index::sample(rng, n, k) {
        let cand = &pop.individuals[idx];
        let pen = cand.penalized_fitness().ok_or_else(|| {
            GpError::State("tournament over an unevaluated population".into())
        })?;
        let wins = match best {
            None => true,
            Some((b, bp)) => pen < bp || (pen == bp && cand.size < b.size),
        };
        if wins {
            best = Some((cand, pen));
        }
    }
    Ok(best.expect("k >= 1").0)
}

/// Sorted subsample of the data used for selection fitness this generation.
pub fn draw_subsample<R: Rng + ?Sized>(cfg: &GpConfig, n: usize, rng: &mut R) -> Vec<usize> {
    let mut idx = index::sample(rng, n, cfg.subsample_size(n)).into_vec();
    idx.sort_unstable();
    idx
}

/// Scores trees on `subsample` and on the full data.
pub fn evaluate_trees<O: Objective + ?Sized>(
    trees: Vec<ExpressionTree>,
    subsample: &[usize],
    objective: &O,
    parsimony: f64,
) -> Result<Vec<Individual>, GpError> {
    let all: Vec<usize> = (0..objective.len()).collect();
    trees
        .into_par_iter()
        .map_init(
            || (BatchScratch::default(), Vec::new()),
            |(scratch, residuals), tree| {
                objective.abs_residuals(&tree, residuals, scratch)?;
                let raw = mean_over(residuals, subsample);
                let full_raw = mean_over(residuals, &all);
                let mut ind = Individual::new(tree);
                ind.fitness = Some(Fitness {
                    raw,
                    penalized: raw + parsimony * ind.size as f64,
                    full_raw,
                });
                Ok(ind)
            },
        )
        .collect()
}

/// Evaluates an initial population on a fresh subsample.
pub fn evaluate_population<O: Objective + ?Sized, R: Rng + ?Sized>(
    pop: Population,
    cfg: &GpConfig,
    objective: &O,
    rng: &mut R,
) -> Result<Population, GpError> {
    if objective.is_empty() {
        return Err(FitnessError::EmptyDataset.into());
    }
    let subsample = draw_subsample(cfg, objective.len(), rng);
    let trees = pop.individuals.into_iter().map(|i| i.tree).collect();
    let mut out = Population {
        individuals: evaluate_trees(trees, &subsample, objective, cfg.parsimony_coefficient)?,
        generation: pop.generation,
        best_ever: pop.best_ever,
        best_raw: pop.best_raw,
    };
    out.update_hall_of_fame(cfg.parsimony_coefficient);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variation {
    Crossover,
    SubtreeMutation,
    HoistMutation,
    PointMutation,
    Reproduction,
}

fn choose_variation<R: Rng + ?Sized>(cfg: &GpConfig, rng: &mut R) -> Variation {
    let u: f64 = rng.random();
    let mut acc = cfg.p_crossover;
    if u < acc {
        return Variation::Crossover;
    }
    acc += cfg.p_subtree_mutation;
    if u < acc {
        return Variation::SubtreeMutation;
    }
    acc += cfg.p_hoist_mutation;
    if u < acc {
        return Variation::HoistMutation;
    }
    acc += cfg.p_point_mutation;
    if u < acc {
        return Variation::PointMutation;
    }
    Variation::Reproduction
}

/// Builds the offspring trees of the next generation (no evaluation).
pub fn breed<R: Rng + ?Sized>(
    pop: &Population,
    cfg: &GpConfig,
    fs: &FunctionSet,
    rng: &mut R,
) -> Result<Vec<(Variation, ExpressionTree)>, GpError> {
    (0..cfg.population_size)
        .map(|_| {
            let method = choose_variation(cfg, rng);
            let parent = &tournament_select(pop, cfg.tournament_size, rng)?.tree;
            let child = match method {
                Variation::Crossover => {
                    let donor = &tournament_select(pop, cfg.tournament_size, rng)?.tree;
                    crossover(parent, donor, rng)
                }
                Variation::SubtreeMutation => subtree_mutation(parent, fs, cfg.init_depth, rng),
                Variation::HoistMutation => hoist_mutation(parent, rng),
                Variation::PointMutation => point_mutation(parent, fs, rng),
                Variation::Reproduction => parent.clone(),
            };
            Ok((method, child))
        })
        .collect()
}

/// One generational step: breed, draw a subsample, evaluate, update the hall of fame.
pub fn evolve_generation<O: Objective + ?Sized, R: Rng + ?Sized>(
    pop: &Population,
    cfg: &GpConfig,
    fs: &FunctionSet,
    objective: &O,
    rng: &mut R,
) -> Result<Population, GpError> {
    if !pop.is_evaluated() {
        return Err(GpError::State("population must be evaluated before breeding".into()));
    }
    let children = breed(pop, cfg, fs, rng)?;
    let subsample = draw_subsample(cfg, objective.len(), rng);
    let trees = children.into_iter().map(|(_, t)| t).collect();
    let mut next = Population {
        individuals: evaluate_trees(trees, &subsample, objective, cfg.parsimony_coefficient)?,
        generation: pop.generation + 1,
        best_ever: pop.best_ever.clone(),
        best_raw: pop.best_raw.clone(),
    };
    next.update_hall_of_fame(cfg.parsimony_coefficient);
    Ok(next)
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub best_ever: Individual,
    pub best_raw: Individual,
    /// Best full-data MAE of each generation, starting with the initial one.
    pub trace: Vec<f64>,
    pub variables: Vec<String>,
}

/// Runs the search on a data set.
pub fn run(cfg: &GpConfig, dataset: &Dataset) -> Result<FitResult, GpError> {
    cfg.validate()?;
    let prepared = PreparedDataset::new(dataset, cfg.fd_step)?;
    let fs = cfg.function_set_for(dataset.n_extras())?;
    run_objective(cfg, &fs, &prepared)
}

/// Runs the search on `objective` within a dedicated pool of `threads` workers.
pub fn run_with_threads(
    cfg: &GpConfig,
    dataset: &Dataset,
    threads: usize,
) -> Result<FitResult, GpError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| GpError::State(e.to_string()))?;
    pool.install(|| run(cfg, dataset))
}

pub fn run_objective<O: Objective + ?Sized>(
    cfg: &GpConfig,
    fs: &FunctionSet,
    objective: &O,
) -> Result<FitResult, GpError> {
    cfg.validate()?;
    if objective.is_empty() {
        return Err(FitnessError::EmptyDataset.into());
    }
    let mut rng = GpRng::seed_from_u64(cfg.seed);
    let init = init_population(cfg, fs, &mut rng)?;
    let mut pop = evaluate_population(init, cfg, objective, &mut rng)?;
    let mut trace = Vec::with_capacity(cfg.generations);
    loop {
        let best = pop.generation_best_raw().expect("non-empty population");
        trace.push(best);
        if best <= cfg.stopping_criteria || trace.len() >= cfg.generations {
            break;
        }
        pop = evolve_generation(&pop, cfg, fs, objective, &mut rng)?;
    }
    Ok(FitResult {
        best_ever: pop.best_ever.expect("evaluated population"),
        best_raw: pop.best_raw.expect("evaluated population"),
        trace,
        variables: objective.variables().to_vec(),
    })
}
