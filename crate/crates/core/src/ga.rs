//! Genetic search over `(l_s, eta1, eta2, Q)` minimizing training-set MAE.
//!
//! Chromosomes live in a normalized `[0, 1]^4` gene space and are decoded
//! linearly into the configured parameter bounds. All random draws come from
//! a single seeded ChaCha stream in this order: initial genes (individual by
//! individual, gene by gene); then, per offspring, the two tournaments, the
//! four crossover weights, the mutation gate and the four mutation steps.
//! Fitness evaluation consumes no randomness and runs in parallel.

use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PmbsiError, Result};
use crate::invariant::StringParams;
use crate::metrics;
use crate::predictor::{first_admissible_target, forecast_targets, Mode};

pub const GENES: usize = 4;
pub const GENE_NAMES: [&str; GENES] = ["l_s", "eta1", "eta2", "q"];

/// Best-fitness changes at or below this count as no progress.
pub const PROGRESS_TOLERANCE: f64 = 1e-12;

/// Inclusive `(min, max)` ranges for the searched parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub l_s: (f64, f64),
    pub eta1: (f64, f64),
    pub eta2: (f64, f64),
    pub q: (f64, f64),
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            l_s: (2.0, 50.0),
            eta1: (-0.96, 0.96),
            eta2: (-0.96, 0.96),
            q: (0.01, 30.0),
        }
    }
}

impl ParamBounds {
    pub fn gene(&self, i: usize) -> (f64, f64) {
        match i {
            0 => self.l_s,
            1 => self.eta1,
            2 => self.eta2,
            3 => self.q,
            _ => panic!("gene index {i} out of range"),
        }
    }

    /// Sets one range by name (`l_s`, `eta1`, `eta2`, `q`).
    pub fn set(&mut self, name: &str, min: f64, max: f64) -> Result<()> {
        let slot = match name {
            "l_s" | "ls" => &mut self.l_s,
            "eta1" => &mut self.eta1,
            "eta2" => &mut self.eta2,
            "q" | "Q" => &mut self.q,
            other => {
                return Err(PmbsiError::InvalidConfig(format!(
                    "unknown bound parameter `{other}`"
                )))
            }
        };
        *slot = (min, max);
        Ok(())
    }

    pub fn validate(&self, l_pr: usize) -> Result<()> {
        for (i, name) in GENE_NAMES.iter().enumerate() {
            let (lo, hi) = self.gene(i);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(PmbsiError::InvalidConfig(format!(
                    "bounds for {name} must satisfy min <= max, got {lo}:{hi}"
                )));
            }
        }
        for (name, (lo, hi)) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if lo <= -1.0 || hi >= 1.0 {
                return Err(PmbsiError::InvalidConfig(format!(
                    "{name} bounds must lie inside (-1, 1), got {lo}:{hi}"
                )));
            }
        }
        if self.q.0 <= 0.0 {
            return Err(PmbsiError::InvalidConfig(format!(
                "Q lower bound must be positive, got {}",
                self.q.0
            )));
        }
        if self.l_s.0 < 1.0 {
            return Err(PmbsiError::InvalidConfig("l_s lower bound must be at least 1".into()));
        }
        if self.l_s.1.round() < (l_pr + 1) as f64 {
            return Err(PmbsiError::InvalidConfig(format!(
                "l_s upper bound {} must exceed horizon {l_pr}",
                self.l_s.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    /// Share of the population copied unchanged into the next generation
    /// (at least one individual).
    pub elite_fraction: f64,
    /// Consecutive generations without improvement before stopping.
    pub stop_no_progress: usize,
    pub mutation_rate_initial: f64,
    pub mutation_probability: f64,
    pub bounds: ParamBounds,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            tournament_size: 5,
            elite_fraction: 0.01,
            stop_no_progress: 50,
            mutation_rate_initial: 0.5,
            mutation_probability: 1.0,
            bounds: ParamBounds::default(),
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self, l_pr: usize) -> Result<()> {
        if self.population_size < 2 {
            return Err(PmbsiError::InvalidConfig("population size must be at least 2".into()));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return Err(PmbsiError::InvalidConfig(format!(
                "tournament size must lie in 1..={}, got {}",
                self.population_size, self.tournament_size
            )));
        }
        if !(0.0..=1.0).contains(&self.elite_fraction) {
            return Err(PmbsiError::InvalidConfig("elite fraction must lie in [0, 1]".into()));
        }
        if self.stop_no_progress == 0 {
            return Err(PmbsiError::InvalidConfig("stop criterion must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate_initial) {
            return Err(PmbsiError::InvalidConfig("mutation rate must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(PmbsiError::InvalidConfig(
                "mutation probability must lie in [0, 1]".into(),
            ));
        }
        self.bounds.validate(l_pr)
    }

    /// `max(1, round(elite_fraction * population_size))`, capped at the population size.
    pub fn elite_count(&self) -> usize {
        ((self.elite_fraction * self.population_size as f64).round() as usize)
            .max(1)
            .min(self.population_size)
    }

    /// Mutation rate after `decay_steps` no-progress generations since the last reset.
    pub fn mutation_rate(&self, decay_steps: usize) -> f64 {
        let left = self.stop_no_progress.saturating_sub(decay_steps) as f64;
        self.mutation_rate_initial * left / self.stop_no_progress as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Genotype {
    pub genes: [f64; GENES],
    pub decoded: Option<StringParams>,
    /// Training MAE; lower is better.
    pub fitness: Option<f64>,
}

impl Genotype {
    pub fn new(genes: [f64; GENES]) -> Self {
        Self {
            genes,
            decoded: None,
            fitness: None,
        }
    }

    fn score(&self) -> f64 {
        match self.fitness {
            Some(f) if !f.is_nan() => f,
            _ => f64::INFINITY,
        }
    }
}

fn lerp((lo, hi): (f64, f64), g: f64) -> f64 {
    lo + g * (hi - lo)
}

/// Linear decode from gene space; `l_s` is rounded and clamped to `>= l_pr + 1`.
pub fn decode(genes: &[f64; GENES], bounds: &ParamBounds, l_pr: usize) -> StringParams {
    let l_s = (lerp(bounds.l_s, genes[0]).round().max(1.0) as usize).max(l_pr + 1);
    StringParams {
        l_s,
        l_pr,
        eta1: lerp(bounds.eta1, genes[1]),
        eta2: lerp(bounds.eta2, genes[2]),
        q: lerp(bounds.q, genes[3]),
    }
}

/// Training MAE of `params` over every admissible target in `train`, with
/// undefined forecasts substituted.
pub fn evaluate_fitness(params: &StringParams, train: &[f64]) -> Result<f64> {
    let start = first_admissible_target(params.l_s, params.l_pr);
    if start >= train.len() {
        return Err(PmbsiError::SeriesTooShort {
            valid: train.len(),
            required: start + 1,
        });
    }
    let tf = forecast_targets(train, params, params.l_pr, start..train.len(), Mode::Direct)?;
    metrics::mae(&tf.actual, &tf.forecast)
}

/// Two independent tournaments; each samples `tournament_size` distinct
/// individuals and returns the fittest (lowest index on ties).
pub fn select_parents<R: Rng + ?Sized>(
    population: &[Genotype],
    config: &GaConfig,
    rng: &mut R,
) -> (usize, usize) {
    let a = tournament(population, config.tournament_size, rng);
    let b = tournament(population, config.tournament_size, rng);
    (a, b)
}

fn tournament<R: Rng + ?Sized>(population: &[Genotype], size: usize, rng: &mut R) -> usize {
    let size = size.min(population.len()).max(1);
    index::sample(rng, population.len(), size)
        .into_iter()
        .min_by(|&i, &j| {
            population[i]
                .score()
                .total_cmp(&population[j].score())
                .then(i.cmp(&j))
        })
        .expect("non-empty tournament")
}

/// Per-gene blend `alpha * a + (1 - alpha) * b`.
pub fn crossover_with(a: &Genotype, b: &Genotype, alpha: &[f64; GENES]) -> Genotype {
    let mut genes = [0.0; GENES];
    for i in 0..GENES {
        genes[i] = alpha[i] * a.genes[i] + (1.0 - alpha[i]) * b.genes[i];
        // keep the child inside the parents' interval under rounding
        let (lo, hi) = if a.genes[i] <= b.genes[i] {
            (a.genes[i], b.genes[i])
        } else {
            (b.genes[i], a.genes[i])
        };
        genes[i] = genes[i].clamp(lo, hi);
    }
    Genotype::new(genes)
}

pub fn crossover<R: Rng + ?Sized>(a: &Genotype, b: &Genotype, rng: &mut R) -> Genotype {
    let mut alpha = [0.0; GENES];
    for w in &mut alpha {
        *w = rng.gen::<f64>();
    }
    crossover_with(a, b, &alpha)
}

/// Adds `rate * beta` to every gene, then clamps to `[0, 1]`.
pub fn mutate_with(genotype: &Genotype, rate: f64, beta: &[f64; GENES]) -> Genotype {
    let mut genes = genotype.genes;
    for (g, b) in genes.iter_mut().zip(beta) {
        *g = (*g + rate * b).clamp(0.0, 1.0);
    }
    Genotype::new(genes)
}

/// Mutation gated by `config.mutation_probability`, followed by repair.
/// The gate and all four steps are always drawn.
pub fn mutate_and_repair<R: Rng + ?Sized>(
    genotype: &Genotype,
    rate: f64,
    config: &GaConfig,
    rng: &mut R,
) -> Genotype {
    let gate = rng.gen::<f64>() < config.mutation_probability;
    let mut beta = [0.0; GENES];
    for b in &mut beta {
        *b = rng.gen_range(-1.0..=1.0);
    }
    if gate {
        mutate_with(genotype, rate, &beta)
    } else {
        mutate_with(genotype, 0.0, &beta)
    }
}

/// Statistics for one generation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// Evaluation-segment MAE of this generation's fittest individual.
    pub champion_eval_mae: f64,
    pub champion: StringParams,
    /// Mutation rate used to breed this generation.
    pub mutation_rate: f64,
    #[serde(skip)]
    pub population: Vec<[f64; GENES]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionTrace {
    pub generations: Vec<GenerationStats>,
    /// Bounds after clamping `l_s` to what the training segment supports.
    pub effective_bounds: ParamBounds,
    pub elapsed_secs: f64,
}

impl EvolutionTrace {
    pub fn generation_count(&self) -> usize {
        self.generations.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evolution {
    pub params: StringParams,
    pub train_mae: f64,
    pub eval_mae: f64,
    /// Generation whose champion was selected.
    pub champion_generation: usize,
    pub trace: EvolutionTrace,
}

/// Largest string length the search may use on a training segment of
/// `train_len` samples: the segment must still hold at least `l_s` scored
/// targets, relaxed to `l_pr + 1` when that is all it can support, and never
/// past the single-target limit.
pub fn max_string_length(train_len: usize, l_pr: usize) -> usize {
    let single_target = train_len.saturating_sub(l_pr + 1);
    let balanced = train_len.saturating_sub(l_pr) / 2;
    balanced.max(l_pr + 1).min(single_target)
}

/// Evaluation-segment MAE of `params`, using the training segment as history.
pub fn evaluation_mae(params: &StringParams, context: &[f64], eval_start: usize) -> Result<f64> {
    let tf = forecast_targets(context, params, params.l_pr, eval_start..context.len(), Mode::Direct)?;
    metrics::mae(&tf.actual, &tf.forecast)
}

fn evaluate_population(population: &mut [Genotype], bounds: &ParamBounds, l_pr: usize, train: &[f64]) -> Result<()> {
    population
        .par_iter_mut()
        .try_for_each(|g| -> Result<()> {
            let params = decode(&g.genes, bounds, l_pr);
            g.fitness = Some(evaluate_fitness(&params, train)?);
            g.decoded = Some(params);
            Ok(())
        })
}

fn fittest(population: &[Genotype]) -> usize {
    (0..population.len())
        .min_by(|&i, &j| population[i].score().total_cmp(&population[j].score()).then(i.cmp(&j)))
        .expect("non-empty population")
}

fn mean_fitness(population: &[Genotype]) -> f64 {
    let finite: Vec<f64> = population
        .iter()
        .map(Genotype::score)
        .filter(|f| f.is_finite())
        .collect();
    if finite.is_empty() {
        f64::INFINITY
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    }
}

/// Runs the generational loop and returns the per-generation champion with
/// the lowest evaluation MAE (earliest on ties).
pub fn evolve(train: &[f64], eval: &[f64], l_pr: usize, config: &GaConfig) -> Result<Evolution> {
    let started = Instant::now();
    config.validate(l_pr)?;
    if eval.is_empty() {
        return Err(PmbsiError::InvalidConfig("evaluation segment is empty".into()));
    }

    let mut bounds = config.bounds;
    let ls_cap = max_string_length(train.len(), l_pr);
    if ls_cap < l_pr + 1 {
        return Err(PmbsiError::SeriesTooShort {
            valid: train.len(),
            required: 2 * l_pr + 2,
        });
    }
    bounds.l_s.0 = bounds.l_s.0.max((l_pr + 1) as f64).min(ls_cap as f64);
    bounds.l_s.1 = bounds.l_s.1.min(ls_cap as f64).max(bounds.l_s.0);

    let mut context = Vec::with_capacity(train.len() + eval.len());
    context.extend_from_slice(train);
    context.extend_from_slice(eval);
    let eval_start = train.len();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population: Vec<Genotype> = (0..config.population_size)
        .map(|_| {
            let mut genes = [0.0; GENES];
            for g in &mut genes {
                *g = rng.gen::<f64>();
            }
            Genotype::new(genes)
        })
        .collect();
    evaluate_population(&mut population, &bounds, l_pr, train)?;

    let mut generations = Vec::new();
    let mut last_champion: Option<([f64; GENES], f64)> = None;
    let mut record = |population: &[Genotype], generation: usize, rate: f64| -> Result<GenerationStats> {
        let best = &population[fittest(population)];
        let eval_mae = match last_champion {
            Some((genes, mae)) if genes == best.genes => mae,
            _ => {
                let mae = evaluation_mae(best.decoded.as_ref().unwrap(), &context, eval_start)?;
                last_champion = Some((best.genes, mae));
                mae
            }
        };
        Ok(GenerationStats {
            generation,
            best_fitness: best.score(),
            mean_fitness: mean_fitness(population),
            champion_eval_mae: eval_mae,
            champion: best.decoded.unwrap(),
            mutation_rate: rate,
            population: population.iter().map(|g| g.genes).collect(),
        })
    };

    generations.push(record(&population, 0, config.mutation_rate(0))?);
    let mut best = population[fittest(&population)].score();
    let mut no_progress = 0;
    let mut decay_steps = 0;
    let elites = config.elite_count();

    while no_progress < config.stop_no_progress {
        let rate = config.mutation_rate(decay_steps);
        let mut offspring = Vec::with_capacity(config.population_size);
        for _ in 0..config.population_size {
            let (a, b) = select_parents(&population, config, &mut rng);
            let child = crossover(&population[a], &population[b], &mut rng);
            offspring.push(mutate_and_repair(&child, rate, config, &mut rng));
        }
        evaluate_population(&mut offspring, &bounds, l_pr, train)?;

        // elites of the current generation replace the weakest offspring
        let mut parents_order: Vec<usize> = (0..population.len()).collect();
        parents_order.sort_by(|&i, &j| population[i].score().total_cmp(&population[j].score()).then(i.cmp(&j)));
        let mut child_order: Vec<usize> = (0..offspring.len()).collect();
        child_order.sort_by(|&i, &j| offspring[j].score().total_cmp(&offspring[i].score()).then(j.cmp(&i)));
        for (&slot, &elite) in child_order.iter().zip(&parents_order).take(elites) {
            offspring[slot] = population[elite].clone();
        }
        population = offspring;

        let generation_best = population[fittest(&population)].score();
        if generation_best < best - PROGRESS_TOLERANCE {
            best = generation_best;
            no_progress = 0;
        } else {
            no_progress += 1;
            decay_steps += 1;
            if config.mutation_rate(decay_steps) <= 0.0 {
                decay_steps = 0;
            }
        }
        let generation = generations.len();
        generations.push(record(&population, generation, rate)?);
    }

    let chosen = generations
        .iter()
        .min_by(|a, b| {
            a.champion_eval_mae
                .total_cmp(&b.champion_eval_mae)
                .then(a.generation.cmp(&b.generation))
        })
        .expect("at least the initial generation");

    Ok(Evolution {
        params: chosen.champion,
        train_mae: chosen.best_fitness,
        eval_mae: chosen.champion_eval_mae,
        champion_generation: chosen.generation,
        trace: EvolutionTrace {
            effective_bounds: bounds,
            elapsed_secs: started.elapsed().as_secs_f64(),
            generations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pop_with_fitness(fits: &[f64]) -> Vec<Genotype> {
        fits.iter()
            .enumerate()
            .map(|(i, &f)| Genotype {
                genes: [i as f64 / 10.0; GENES],
                decoded: None,
                fitness: Some(f),
            })
            .collect()
    }

    #[test]
    fn decode_endpoints_and_rounding() {
        let b = ParamBounds::default();
        let lo = decode(&[0.0; GENES], &b, 1);
        assert_eq!((lo.l_s, lo.eta1, lo.eta2, lo.q), (2, -0.96, -0.96, 0.01));
        let hi = decode(&[1.0; GENES], &b, 1);
        assert_eq!((hi.l_s, hi.eta1, hi.eta2, hi.q), (50, 0.96, 0.96, 30.0));
        assert_eq!(decode(&[0.5, 0.5, 0.5, 0.5], &b, 1).l_s, 26);
        assert_eq!(decode(&[0.0; GENES], &b, 7).l_s, 8);
        assert!(decode(&[0.3; GENES], &b, 1).validate().is_ok());
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = GaConfig::default();
        assert_eq!(c.elite_count(), 1);
        assert!(c.validate(1).is_ok());
        assert!(c.validate(50).is_err());
        let mut bad = c.clone();
        bad.tournament_size = 21;
        assert!(bad.validate(1).is_err());
        let mut bad = c.clone();
        bad.bounds.eta1 = (-1.0, 0.5);
        assert!(bad.validate(1).is_err());
        let mut bad = c;
        bad.bounds.q = (0.0, 1.0);
        assert!(bad.validate(1).is_err());
    }

    #[test]
    fn mutation_schedule_is_linear() {
        let c = GaConfig::default();
        assert_eq!(c.mutation_rate(0), 0.5);
        assert!((c.mutation_rate(25) - 0.25).abs() < 1e-15);
        assert_eq!(c.mutation_rate(50), 0.0);
    }

    #[test]
    fn full_tournament_returns_global_best() {
        let pop = pop_with_fitness(&[0.5, 0.2, 0.9, 0.1, 0.3]);
        let cfg = GaConfig {
            population_size: 5,
            tournament_size: 5,
            ..GaConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(select_parents(&pop, &cfg, &mut rng), (3, 3));
        }
    }

    #[test]
    fn duplicated_population_selects_the_duplicate() {
        let pop = vec![pop_with_fitness(&[0.4])[0].clone(); 6];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = select_parents(&pop, &GaConfig::default(), &mut rng);
        assert_eq!(pop[a].genes, pop[0].genes);
        assert_eq!(pop[b].genes, pop[0].genes);
    }

    #[test]
    fn tournament_replay_is_deterministic() {
        let pop = pop_with_fitness(&[0.5, 0.2, 0.9, 0.1, 0.3, 0.8, 0.7, 0.6, 0.05, 1.0]);
        let cfg = GaConfig {
            population_size: 10,
            ..GaConfig::default()
        };
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..30).map(|_| select_parents(&pop, &cfg, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn crossover_endpoints() {
        let a = Genotype::new([0.1, 0.2, 0.3, 0.4]);
        let b = Genotype::new([0.9, 0.8, 0.7, 0.6]);
        assert_eq!(crossover_with(&a, &b, &[0.0; GENES]).genes, b.genes);
        assert_eq!(crossover_with(&a, &b, &[1.0; GENES]).genes, a.genes);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(crossover(&a, &a, &mut rng).genes, a.genes);
        let child = crossover(&a, &b, &mut rng);
        for i in 0..GENES {
            let (lo, hi) = (a.genes[i].min(b.genes[i]), a.genes[i].max(b.genes[i]));
            assert!(child.genes[i] >= lo && child.genes[i] <= hi);
        }
    }

    #[test]
    fn mutation_cases() {
        let g = Genotype::new([0.9, 0.5, 0.1, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = GaConfig::default();
        assert_eq!(mutate_and_repair(&g, 0.0, &cfg, &mut rng).genes, g.genes);
        let m = mutate_with(&g, 0.5, &[1.0, 0.0, -1.0, -1.0]);
        assert_eq!(m.genes, [1.0, 0.5, 0.0, 0.0]);
        let off = GaConfig {
            mutation_probability: 0.0,
            ..GaConfig::default()
        };
        for _ in 0..10 {
            assert_eq!(mutate_and_repair(&g, 0.5, &off, &mut rng).genes, g.genes);
        }
    }

    #[test]
    fn fitness_of_constant_series_is_zero() {
        let train = vec![4.0; 30];
        let p = StringParams::new(5, 1, 0.2, 0.5, 1.3).unwrap();
        assert_eq!(evaluate_fitness(&p, &train).unwrap(), 0.0);
        assert!(evaluate_fitness(&p, &train[..6]).is_err());
    }

    #[test]
    fn constant_series_stops_after_stagnation() {
        let train = vec![2.0; 30];
        let eval = vec![2.0; 10];
        let evo = evolve(&train, &eval, 1, &GaConfig::default()).unwrap();
        assert_eq!(evo.trace.generations[0].best_fitness, 0.0);
        assert_eq!(evo.trace.generation_count(), 51);
        assert_eq!(evo.eval_mae, 0.0);
    }

    #[test]
    fn string_length_bound_follows_training_length() {
        let train: Vec<f64> = (0..12).map(|i| 2.0 + (i as f64).sin()).collect();
        let eval: Vec<f64> = (12..18).map(|i| 2.0 + (i as f64).sin()).collect();
        let cfg = GaConfig {
            stop_no_progress: 5,
            ..GaConfig::default()
        };
        let evo = evolve(&train, &eval, 2, &cfg).unwrap();
        assert_eq!(evo.trace.effective_bounds.l_s, (3.0, 5.0));
        assert!(evo.params.l_s <= 5);
        assert_eq!(max_string_length(15, 1), 7);
        assert_eq!(max_string_length(15, 3), 6);
        assert_eq!(max_string_length(8, 3), 4);
        assert_eq!(max_string_length(7, 3), 3);
        assert!(evolve(&train[..5], &eval, 2, &cfg).is_err());
    }
}
