//! Steady-state GP with 3-tournament elimination.
//!
//! Each step draws three distinct individuals, removes the worst, crosses the
//! two survivors with a uniformly chosen crossover, mutates the child with
//! probability `mutation_prob` and puts it in the vacated slot. The best
//! individual ever evaluated is tracked outside the population.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfun::TruthTable;
use crate::error::{Error, Result};
use crate::evaluation::{objective, ConstructionEvaluator, FitnessValue, ObjectiveKind};
use crate::gp::{crossover, random_tree, subtree_mutation, CrossoverKind, GpTree, LeafTables, TerminalSet};

/// Anything that can score a tree. Must be usable from several runs at once.
pub trait Evaluator: Sync {
    fn terminals(&self) -> TerminalSet;
    fn evaluate(&self, tree: &GpTree) -> FitnessValue;
}

impl Evaluator for ConstructionEvaluator {
    fn terminals(&self) -> TerminalSet {
        ConstructionEvaluator::terminals(self)
    }

    fn evaluate(&self, tree: &GpTree) -> FitnessValue {
        ConstructionEvaluator::evaluate(self, tree).expect("evolved trees use only context terminals")
    }
}

/// Plain GP: the tree over `v_0..v_{n-1}` is itself the candidate function.
#[derive(Clone, Debug)]
pub struct FunctionEvaluator {
    tables: LeafTables,
    objective: ObjectiveKind,
}

impl FunctionEvaluator {
    pub fn new(n: u32, objective: ObjectiveKind) -> Result<Self> {
        Ok(Self { tables: LeafTables::concrete(n as usize, &[])?, objective })
    }

    pub fn function(&self, tree: &GpTree) -> Result<TruthTable> {
        self.tables.eval(tree)
    }
}

impl Evaluator for FunctionEvaluator {
    fn terminals(&self) -> TerminalSet {
        self.tables.terminals()
    }

    fn evaluate(&self, tree: &GpTree) -> FitnessValue {
        let f = self.tables.eval_unchecked(tree, &mut Vec::new());
        FitnessValue::single(objective(&f, self.objective))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolverConfig {
    pub population_size: usize,
    pub max_depth: usize,
    pub mutation_prob: f64,
    /// Total fitness evaluations per run.
    pub budget: u64,
    pub runs: usize,
    pub rng_seed: u64,
    pub crossover_kinds: Vec<CrossoverKind>,
    /// Whether the initial population is charged to `budget`.
    pub count_initial_evaluations: bool,
    /// Optional early exit once the best fitness reaches this value.
    pub stop_at: Option<f64>,
}

impl EvolverConfig {
    /// Population 500, depth 5, mutation 0.5, 500 000 evaluations, 30 runs.
    pub fn paper() -> Self {
        Self {
            population_size: 500,
            max_depth: 5,
            mutation_prob: 0.5,
            budget: 500_000,
            runs: 30,
            rng_seed: 1,
            crossover_kinds: CrossoverKind::ALL.to_vec(),
            count_initial_evaluations: true,
            stop_at: None,
        }
    }

    /// Paper parameters with a 50 000 evaluation budget and 10 runs.
    pub fn desk() -> Self {
        Self { budget: 50_000, runs: 10, ..Self::paper() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 3 {
            return Err(Error::Config(format!("population size {} < 3", self.population_size)));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(Error::Config(format!("mutation probability {} outside [0, 1]", self.mutation_prob)));
        }
        if self.count_initial_evaluations && self.budget < self.population_size as u64 {
            return Err(Error::Config(format!(
                "budget {} smaller than population {}",
                self.budget, self.population_size
            )));
        }
        if self.crossover_kinds.is_empty() {
            return Err(Error::Config("no crossover operators enabled".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        Ok(())
    }

    /// RNG of run `index`: one ChaCha stream per run under the same key.
    pub fn run_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(index as u64);
        rng
    }
}

impl Default for EvolverConfig {
    fn default() -> Self {
        Self::desk()
    }
}

/// Improvement record: evaluation index, best-so-far fitness and its tree size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub evaluation: u64,
    pub best: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub run_index: usize,
    pub rng_seed: u64,
    pub best_tree: GpTree,
    pub best_fitness: FitnessValue,
    pub evaluations_used: u64,
    pub fitness_history: Vec<HistoryPoint>,
    pub final_population: Vec<GpTree>,
}

struct Individual {
    tree: GpTree,
    fitness: FitnessValue,
}

/// One independent run.
pub fn run<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    config: &EvolverConfig,
    evaluator: &E,
    rng: &mut R,
) -> Result<RunResult> {
    run_indexed(config, evaluator, rng, 0)
}

fn run_indexed<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    config: &EvolverConfig,
    evaluator: &E,
    rng: &mut R,
    run_index: usize,
) -> Result<RunResult> {
    config.validate()?;
    let terms = evaluator.terminals();
    let limit = if config.count_initial_evaluations {
        config.budget
    } else {
        config.budget + config.population_size as u64
    };
    let reached = |f: &FitnessValue| config.stop_at.is_some_and(|t| f.value >= t);

    let mut evaluations = 0u64;
    let mut history = Vec::new();
    let mut population: Vec<Individual> = Vec::with_capacity(config.population_size);
    let mut best: Option<(GpTree, FitnessValue)> = None;
    let mut record = |tree: &GpTree, fitness: &FitnessValue, at: u64, best: &mut Option<(GpTree, FitnessValue)>| {
        let better = best.as_ref().map_or(true, |(_, b)| fitness.value > b.value);
        if better {
            *best = Some((tree.clone(), fitness.clone()));
            history.push(HistoryPoint { evaluation: at, best: fitness.value, size: tree.size() });
        }
    };

    for _ in 0..config.population_size {
        let tree = random_tree(&terms, config.max_depth, rng);
        let fitness = evaluator.evaluate(&tree);
        evaluations += 1;
        record(&tree, &fitness, evaluations, &mut best);
        population.push(Individual { tree, fitness });
    }

    let mut done = best.as_ref().is_some_and(|(_, f)| reached(f));
    while !done && evaluations < limit {
        let drawn = sample(rng, population.len(), 3).into_vec();
        let worst_value = drawn
            .iter()
            .map(|&i| population[i].fitness.value)
            .min_by(f64::total_cmp)
            .expect("three contestants");
        let tied: Vec<usize> = drawn
            .iter()
            .copied()
            .filter(|&i| population[i].fitness.value == worst_value)
            .collect();
        let loser = tied[rng.gen_range(0..tied.len())];
        let mut parents = drawn.iter().copied().filter(|&i| i != loser);
        let (p1, p2) = (parents.next().expect("two survivors"), parents.next().expect("two survivors"));

        let kind = config.crossover_kinds[rng.gen_range(0..config.crossover_kinds.len())];
        let mut child = crossover(&population[p1].tree, &population[p2].tree, kind, config.max_depth, rng);
        if rng.gen_bool(config.mutation_prob) {
            child = subtree_mutation(&child, &terms, config.max_depth, rng);
        }
        debug_assert!(child.depth() <= config.max_depth);
        let fitness = evaluator.evaluate(&child);
        evaluations += 1;
        record(&child, &fitness, evaluations, &mut best);
        done = reached(&fitness);
        population[loser] = Individual { tree: child, fitness };
    }

    let (best_tree, best_fitness) = best.expect("population is non-empty");
    Ok(RunResult {
        run_index,
        rng_seed: config.rng_seed,
        best_tree,
        best_fitness,
        evaluations_used: evaluations,
        fitness_history: history,
        final_population: population.into_iter().map(|i| i.tree).collect(),
    })
}

/// `config.runs` independent runs on parallel workers, ordered by run index.
pub fn run_batch<E: Evaluator + ?Sized>(config: &EvolverConfig, evaluator: &E) -> Result<Vec<RunResult>> {
    config.validate()?;
    (0..config.runs)
        .into_par_iter()
        .map(|i| run_indexed(config, evaluator, &mut config.run_rng(i), i))
        .collect()
}

/// Same as [`run_batch`] on the calling thread.
pub fn run_batch_serial<E: Evaluator + ?Sized>(config: &EvolverConfig, evaluator: &E) -> Result<Vec<RunResult>> {
    config.validate()?;
    (0..config.runs)
        .map(|i| run_indexed(config, evaluator, &mut config.run_rng(i), i))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_flags: Vec<bool>,
}

impl BatchSummary {
    pub fn from_flags(flags: Vec<bool>) -> Self {
        Self { runs: flags.len(), successes: flags.iter().filter(|&&f| f).count(), success_flags: flags }
    }

    pub fn rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.successes as f64 / self.runs as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::nonlinearity;

    struct Constant(TerminalSet);

    impl Evaluator for Constant {
        fn terminals(&self) -> TerminalSet {
            self.0
        }
        fn evaluate(&self, _: &GpTree) -> FitnessValue {
            FitnessValue::single(1.0)
        }
    }

    fn small(budget: u64) -> EvolverConfig {
        EvolverConfig { population_size: 30, budget, runs: 3, rng_seed: 7, ..EvolverConfig::desk() }
    }

    #[test]
    fn budget_equal_population_returns_initial_best() {
        let eval = FunctionEvaluator::new(4, ObjectiveKind::NlOnly).unwrap();
        let cfg = small(30);
        let r = run(&cfg, &eval, &mut cfg.run_rng(0)).unwrap();
        assert_eq!(r.evaluations_used, 30);
        assert_eq!(r.final_population.len(), 30);
        let best = r.final_population.iter().map(|t| eval.evaluate(t).value).fold(f64::MIN, f64::max);
        assert_eq!(r.best_fitness.value, best);
    }

    #[test]
    fn constant_evaluator_terminates_at_budget() {
        let eval = Constant(TerminalSet::new(2, 2));
        let cfg = small(500);
        let r = run(&cfg, &eval, &mut cfg.run_rng(0)).unwrap();
        assert_eq!(r.evaluations_used, 500);
        assert_eq!(r.final_population.len(), 30);
        assert!(r.final_population.iter().all(|t| t.depth() <= cfg.max_depth));
    }

    #[test]
    fn uncounted_initial_population() {
        let eval = Constant(TerminalSet::new(2, 2));
        let cfg = EvolverConfig { count_initial_evaluations: false, ..small(100) };
        let r = run(&cfg, &eval, &mut cfg.run_rng(0)).unwrap();
        assert_eq!(r.evaluations_used, 130);
    }

    #[test]
    fn deterministic_and_history_monotone() {
        let eval = FunctionEvaluator::new(5, ObjectiveKind::NlWithSpectrum).unwrap();
        let cfg = small(3000);
        let a = run_batch(&cfg, &eval).unwrap();
        let b = run_batch_serial(&cfg, &eval).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(r.fitness_history.windows(2).all(|w| w[0].best < w[1].best));
            assert_eq!(r.fitness_history.last().unwrap().best, r.best_fitness.value);
        }
        let single = run(&cfg, &eval, &mut cfg.run_rng(0)).unwrap();
        assert_eq!(single.best_tree, a[0].best_tree);
    }

    #[test]
    fn finds_balanced_nl12_at_five_variables() {
        let eval = FunctionEvaluator::new(5, ObjectiveKind::NlWithSpectrum).unwrap();
        let cfg = EvolverConfig { population_size: 100, budget: 20_000, stop_at: Some(12.0), ..small(0) };
        let r = run(&cfg, &eval, &mut cfg.run_rng(0)).unwrap();
        let f = eval.function(&r.best_tree).unwrap();
        assert!(f.is_balanced());
        assert_eq!(nonlinearity(&f), 12);
        assert!(r.evaluations_used <= 20_000);
    }

    #[test]
    fn rejects_bad_configs() {
        let eval = Constant(TerminalSet::new(1, 0));
        for cfg in [
            EvolverConfig { population_size: 2, ..small(100) },
            EvolverConfig { mutation_prob: 1.5, ..small(100) },
            EvolverConfig { crossover_kinds: vec![], ..small(100) },
            small(10),
        ] {
            assert!(run(&cfg, &eval, &mut cfg.run_rng(0)).is_err());
        }
    }

    #[test]
    fn summary_counts_flags() {
        let s = BatchSummary::from_flags(vec![true, false, true]);
        assert_eq!((s.runs, s.successes), (3, 2));
        assert!((s.rate() - 2.0 / 3.0).abs() < 1e-12);
    }
}
