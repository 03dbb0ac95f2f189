//! The mu+lambda differential-evolution engine over the configurable design
//! space: 5 initializations x 10 mutations x 2 crossovers x NP/F/Cr grids.
//!
//! One run is single-threaded and deterministic given its generator. RNG
//! consumption order per generation: for each target index `i`, the mutation
//! index draws, then the crossover draws; all trials are evaluated afterwards
//! in index order (evaluation draws nothing).

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::bbob::{evaluate, ProblemInstance};
use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::sampling::{initialize, InitStrategy};

/// The ten mutation formulas; index order is the agent's head-1 encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutationStrategy {
    #[serde(rename = "rand/1")]
    Rand1,
    #[serde(rename = "rand/2")]
    Rand2,
    #[serde(rename = "best/1")]
    Best1,
    #[serde(rename = "best/2")]
    Best2,
    #[serde(rename = "current-to-rand/1")]
    CurrentToRand1,
    #[serde(rename = "current-to-best/1")]
    CurrentToBest1,
    #[serde(rename = "rand-to-best/1")]
    RandToBest1,
    #[serde(rename = "current-to-rand/2")]
    CurrentToRand2,
    #[serde(rename = "current-to-best/2")]
    CurrentToBest2,
    #[serde(rename = "rand-to-best/2")]
    RandToBest2,
}

pub const MUTATION_STRATEGIES: [MutationStrategy; 10] = [
    MutationStrategy::Rand1,
    MutationStrategy::Rand2,
    MutationStrategy::Best1,
    MutationStrategy::Best2,
    MutationStrategy::CurrentToRand1,
    MutationStrategy::CurrentToBest1,
    MutationStrategy::RandToBest1,
    MutationStrategy::CurrentToRand2,
    MutationStrategy::CurrentToBest2,
    MutationStrategy::RandToBest2,
];

impl MutationStrategy {
    /// How many distinct random partners the formula consumes.
    pub fn partners(self) -> usize {
        match self {
            MutationStrategy::Rand1 => 3,
            MutationStrategy::Rand2 => 5,
            MutationStrategy::Best1 => 2,
            MutationStrategy::Best2 => 4,
            MutationStrategy::CurrentToRand1 => 3,
            MutationStrategy::CurrentToBest1 => 2,
            MutationStrategy::RandToBest1 => 4,
            MutationStrategy::CurrentToRand2 => 5,
            MutationStrategy::CurrentToBest2 => 4,
            MutationStrategy::RandToBest2 => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossoverStrategy {
    #[serde(rename = "binomial")]
    Binomial,
    #[serde(rename = "exponential")]
    Exponential,
}

pub const CROSSOVER_STRATEGIES: [CrossoverStrategy; 2] =
    [CrossoverStrategy::Binomial, CrossoverStrategy::Exponential];

/// Population-size multipliers (NP = multiplier * D).
pub const NP_MULTIPLIERS: [usize; 5] = [5, 7, 9, 11, 13];

/// Scale-factor grid: F = k * 0.05 for k in 0..=40.
pub const F_GRID_LEN: usize = 41;
pub fn f_value(k: usize) -> f64 {
    k as f64 * 0.05
}

/// Crossover-rate grid: Cr = k * 0.1 for k in 0..=20. Values above 1 are
/// passed through literally: binomial then always copies the donor and the
/// exponential run length saturates at D.
pub const CR_GRID_LEN: usize = 21;
pub fn cr_value(k: usize) -> f64 {
    k as f64 * 0.1
}

/// A point in the six-component design space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DEConfig {
    pub init: InitStrategy,
    pub mutation: MutationStrategy,
    pub crossover: CrossoverStrategy,
    pub np_mult: usize,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "Cr")]
    pub cr: f64,
}

impl DEConfig {
    pub fn population_size(&self, dimension: usize) -> usize {
        self.np_mult * dimension
    }

    /// Checks that every field sits on its grid.
    pub fn validate(&self) -> Result<()> {
        if !NP_MULTIPLIERS.contains(&self.np_mult) {
            return Err(Error::config(format!(
                "np_mult {} not in {:?}",
                self.np_mult, NP_MULTIPLIERS
            )));
        }
        let fk = self.f / 0.05;
        if !(0.0..=40.0).contains(&fk) || (fk - fk.round()).abs() > 1e-9 {
            return Err(Error::config(format!("F {} not on the 0.05 grid", self.f)));
        }
        let ck = self.cr / 0.1;
        if !(0.0..=20.0).contains(&ck) || (ck - ck.round()).abs() > 1e-9 {
            return Err(Error::config(format!("Cr {} not on the 0.1 grid", self.cr)));
        }
        Ok(())
    }
}

/// Current population of a run.
#[derive(Clone, Debug)]
pub struct Population {
    pub x: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub best_index: usize,
    pub fes_used: usize,
}

impl Population {
    fn recompute_best(&mut self) {
        let mut best = 0;
        for i in 1..self.fitness.len() {
            if self.fitness[i] < self.fitness[best] {
                best = i;
            }
        }
        self.best_index = best;
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best_f: f64,
    pub best_x: Vec<f64>,
    /// (fes, best objective so far) at each requested checkpoint plus the
    /// final evaluation count.
    pub trajectory: Vec<(usize, f64)>,
    pub fes_used: usize,
    pub wall_time: f64,
}

/// Draws `k` distinct indices from `{0..np} \ {exclude}`, uniformly without
/// replacement, via a partial Fisher-Yates over the candidate pool.
pub fn distinct_partners(rng: &mut DetRng, np: usize, exclude: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..np).filter(|&j| j != exclude).collect();
    for t in 0..k {
        let j = t + rng.random_range(0..pool.len() - t);
        pool.swap(t, j);
    }
    pool.truncate(k);
    pool
}

/// The donor formula for target `i` given drawn partner indices.
pub fn donor_from_indices(
    x: &[Vec<f64>],
    i: usize,
    best: usize,
    partners: &[usize],
    strategy: MutationStrategy,
    f: f64,
) -> Vec<f64> {
    let d = x[i].len();
    let row = |idx: usize| &x[idx];
    let mut v = vec![0.0; d];
    for j in 0..d {
        v[j] = match strategy {
            MutationStrategy::Rand1 => {
                row(partners[0])[j] + f * (row(partners[1])[j] - row(partners[2])[j])
            }
            MutationStrategy::Rand2 => {
                row(partners[0])[j]
                    + f * (row(partners[1])[j] - row(partners[2])[j])
                    + f * (row(partners[3])[j] - row(partners[4])[j])
            }
            MutationStrategy::Best1 => {
                row(best)[j] + f * (row(partners[0])[j] - row(partners[1])[j])
            }
            MutationStrategy::Best2 => {
                row(best)[j]
                    + f * (row(partners[0])[j] - row(partners[1])[j])
                    + f * (row(partners[2])[j] - row(partners[3])[j])
            }
            MutationStrategy::CurrentToRand1 => {
                row(i)[j]
                    + f * (row(partners[0])[j] - row(i)[j])
                    + f * (row(partners[1])[j] - row(partners[2])[j])
            }
            MutationStrategy::CurrentToBest1 => {
                row(i)[j]
                    + f * (row(best)[j] - row(i)[j])
                    + f * (row(partners[0])[j] - row(partners[1])[j])
            }
            MutationStrategy::RandToBest1 => {
                row(partners[0])[j]
                    + f * (row(best)[j] - row(partners[1])[j])
                    + f * (row(partners[2])[j] - row(partners[3])[j])
            }
            MutationStrategy::CurrentToRand2 => {
                row(i)[j]
                    + f * (row(partners[0])[j] - row(i)[j])
                    + f * (row(partners[1])[j] - row(partners[2])[j])
                    + f * (row(partners[3])[j] - row(partners[4])[j])
            }
            MutationStrategy::CurrentToBest2 => {
                row(i)[j]
                    + f * (row(best)[j] - row(i)[j])
                    + f * (row(partners[0])[j] - row(partners[1])[j])
                    + f * (row(partners[2])[j] - row(partners[3])[j])
            }
            MutationStrategy::RandToBest2 => {
                row(partners[0])[j]
                    + f * (row(best)[j] - row(partners[0])[j])
                    + f * (row(partners[1])[j] - row(partners[2])[j])
                    + f * (row(partners[3])[j] - row(partners[4])[j])
            }
        };
    }
    v
}

/// Donor matrix for the whole population.
pub fn mutate(
    pop: &Population,
    strategy: MutationStrategy,
    f: f64,
    rng: &mut DetRng,
) -> Result<Vec<Vec<f64>>> {
    let np = pop.x.len();
    if np < 6 {
        return Err(Error::config(format!("mutation needs NP >= 6, got {np}")));
    }
    let k = strategy.partners();
    let mut donors = Vec::with_capacity(np);
    for i in 0..np {
        let partners = distinct_partners(rng, np, i, k);
        donors.push(donor_from_indices(&pop.x, i, pop.best_index, &partners, strategy, f));
    }
    Ok(donors)
}

/// Recombines one target/donor pair.
///
/// Binomial draws `j_rand` and then one uniform per component (including at
/// `j_rand`). Exponential draws the start position `k`, then grows the run
/// length geometrically: L starts at 1 and grows while a uniform draw falls
/// below Cr and L < D.
pub fn crossover(
    target: &[f64],
    donor: &[f64],
    strategy: CrossoverStrategy,
    cr: f64,
    rng: &mut DetRng,
) -> Vec<f64> {
    let d = target.len();
    match strategy {
        CrossoverStrategy::Binomial => {
            let j_rand = rng.random_range(0..d);
            (0..d)
                .map(|j| {
                    let u: f64 = rng.random();
                    if u <= cr || j == j_rand {
                        donor[j]
                    } else {
                        target[j]
                    }
                })
                .collect()
        }
        CrossoverStrategy::Exponential => {
            let start = rng.random_range(0..d);
            let mut len = 1;
            while len < d && rng.random::<f64>() < cr {
                len += 1;
            }
            let mut trial = target.to_vec();
            for offset in 0..len {
                let j = (start + offset) % d;
                trial[j] = donor[j];
            }
            trial
        }
    }
}

/// Clamps every component into `[lb, ub]`. Idempotent.
pub fn repair_bounds(x: &mut [f64], lb: f64, ub: f64) {
    for v in x.iter_mut() {
        *v = v.clamp(lb, ub);
    }
}

/// Best-of-union survival: keeps the NP lowest-fitness rows of the combined
/// targets and trials. Ties break toward lower fitness, then target before
/// trial, then lower index.
pub fn select_mu_lambda(targets: &Population, trials: Vec<Vec<f64>>, trial_fitness: Vec<f64>) -> Population {
    let np = targets.x.len();
    let mut order: Vec<(f64, u8, usize)> = Vec::with_capacity(2 * np);
    for (i, &fit) in targets.fitness.iter().enumerate() {
        order.push((fit, 0, i));
    }
    for (i, &fit) in trial_fitness.iter().enumerate() {
        order.push((fit, 1, i));
    }
    order.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut x = Vec::with_capacity(np);
    let mut fitness = Vec::with_capacity(np);
    for &(fit, origin, idx) in order.iter().take(np) {
        fitness.push(fit);
        if origin == 0 {
            x.push(targets.x[idx].clone());
        } else {
            x.push(trials[idx].clone());
        }
    }
    let mut pop = Population { x, fitness, best_index: 0, fes_used: targets.fes_used };
    pop.recompute_best();
    pop
}

struct TrajectoryRecorder<'a> {
    checkpoints: &'a [usize],
    next: usize,
    points: Vec<(usize, f64)>,
}

impl<'a> TrajectoryRecorder<'a> {
    fn new(checkpoints: &'a [usize]) -> Self {
        TrajectoryRecorder { checkpoints, next: 0, points: Vec::new() }
    }

    fn on_evaluation(&mut self, fes: usize, best_f: f64) {
        while self.next < self.checkpoints.len() && fes >= self.checkpoints[self.next] {
            self.points.push((self.checkpoints[self.next], best_f));
            self.next += 1;
        }
    }

    fn finish(mut self, fes: usize, best_f: f64) -> Vec<(usize, f64)> {
        if self.points.last().map(|p| p.0) != Some(fes) {
            self.points.push((fes, best_f));
        }
        self.points
    }
}

/// Runs one configured DE on one instance.
///
/// The budget counts every objective evaluation including initialization;
/// the loop stops when a further generation would exceed `max_fes`.
/// `checkpoint_fes` must be sorted ascending.
pub fn run_de(
    config: &DEConfig,
    instance: &ProblemInstance,
    max_fes: usize,
    checkpoint_fes: &[usize],
    rng: &mut DetRng,
) -> Result<RunResult> {
    let start = Instant::now();
    let d = instance.dimension;
    let np = config.population_size(d);
    if max_fes < np {
        return Err(Error::config(format!(
            "max_fes {max_fes} is below the population size {np}"
        )));
    }

    let x = initialize(config.init, np, d, instance.lower, instance.upper, rng)?;
    let mut recorder = TrajectoryRecorder::new(checkpoint_fes);
    let mut fitness = Vec::with_capacity(np);
    let mut best_f = f64::INFINITY;
    let mut best_x = x[0].clone();
    let mut fes = 0;
    for row in &x {
        let f = evaluate(instance, row)?;
        fes += 1;
        if f < best_f {
            best_f = f;
            best_x = row.clone();
        }
        recorder.on_evaluation(fes, best_f);
        fitness.push(f);
    }
    let mut pop = Population { x, fitness, best_index: 0, fes_used: fes };
    pop.recompute_best();

    while pop.fes_used + np <= max_fes {
        let donors = mutate(&pop, config.mutation, config.f, rng)?;
        let mut trials = Vec::with_capacity(np);
        for (i, donor) in donors.into_iter().enumerate() {
            let mut trial = crossover(&pop.x[i], &donor, config.crossover, config.cr, rng);
            repair_bounds(&mut trial, instance.lower, instance.upper);
            trials.push(trial);
        }
        let mut trial_fitness = Vec::with_capacity(np);
        for trial in &trials {
            let f = evaluate(instance, trial)?;
            pop.fes_used += 1;
            if f < best_f {
                best_f = f;
                best_x = trial.clone();
            }
            recorder.on_evaluation(pop.fes_used, best_f);
            trial_fitness.push(f);
        }
        let fes_used = pop.fes_used;
        pop = select_mu_lambda(&pop, trials, trial_fitness);
        pop.fes_used = fes_used;
    }

    Ok(RunResult {
        best_f,
        best_x,
        trajectory: recorder.finish(pop.fes_used, best_f),
        fes_used: pop.fes_used,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbob::make_instance;
    use crate::rng::seed_rng;

    fn sample_config() -> DEConfig {
        DEConfig {
            init: InitStrategy::LatinHypercube,
            mutation: MutationStrategy::Rand1,
            crossover: CrossoverStrategy::Binomial,
            np_mult: 5,
            f: 0.5,
            cr: 0.9,
        }
    }

    #[test]
    fn rand1_formula_direct() {
        // direct evaluation of the rand/1 formula
        let x = vec![vec![9.0, 9.0], vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let v = donor_from_indices(&x, 0, 0, &[1, 2, 3], MutationStrategy::Rand1, 0.5);
        assert_eq!(v, vec![0.5, 0.0]);
    }

    #[test]
    fn best1_with_zero_f_copies_best() {
        let x = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        for i in 0..3 {
            let v = donor_from_indices(&x, i, 1, &[0, 2], MutationStrategy::Best1, 0.0);
            assert_eq!(v, x[1]);
        }
    }

    #[test]
    fn current_to_best_collapses_when_rows_coincide() {
        let row = vec![2.0, -1.0];
        let x = vec![row.clone(), row.clone(), row.clone()];
        let v = donor_from_indices(&x, 0, 0, &[1, 2], MutationStrategy::CurrentToBest1, 1.0);
        assert_eq!(v, row);
    }

    #[test]
    fn partners_exclude_target_and_repeat() {
        let mut rng = seed_rng(4);
        for _ in 0..500 {
            let partners = distinct_partners(&mut rng, 10, 3, 5);
            let mut seen = std::collections::BTreeSet::new();
            for p in &partners {
                assert_ne!(*p, 3);
                assert!(seen.insert(*p), "duplicate partner");
            }
        }
    }

    #[test]
    fn mutate_rejects_tiny_populations() {
        let pop = Population {
            x: vec![vec![0.0; 2]; 5],
            fitness: vec![0.0; 5],
            best_index: 0,
            fes_used: 5,
        };
        let mut rng = seed_rng(1);
        assert!(mutate(&pop, MutationStrategy::Rand1, 0.5, &mut rng).is_err());
    }

    #[test]
    fn binomial_extremes() {
        let target = vec![0.0; 8];
        let donor = vec![1.0; 8];
        let mut rng = seed_rng(6);
        let all = crossover(&target, &donor, CrossoverStrategy::Binomial, 1.0, &mut rng);
        assert_eq!(all, donor);
        for _ in 0..50 {
            let one = crossover(&target, &donor, CrossoverStrategy::Binomial, 0.0, &mut rng);
            assert_eq!(one.iter().filter(|v| **v == 1.0).count(), 1);
        }
    }

    #[test]
    fn exponential_zero_cr_copies_one_component() {
        let target = vec![0.0; 8];
        let donor = vec![1.0; 8];
        let mut rng = seed_rng(7);
        for _ in 0..50 {
            let trial = crossover(&target, &donor, CrossoverStrategy::Exponential, 0.0, &mut rng);
            assert_eq!(trial.iter().filter(|v| **v == 1.0).count(), 1);
        }
    }

    #[test]
    fn exponential_cr_above_one_saturates() {
        let target = vec![0.0; 6];
        let donor = vec![1.0; 6];
        let mut rng = seed_rng(8);
        let trial = crossover(&target, &donor, CrossoverStrategy::Exponential, 2.0, &mut rng);
        assert_eq!(trial, donor);
    }

    #[test]
    fn repair_clamps_and_is_idempotent() {
        let mut x = vec![6.0, -7.0];
        repair_bounds(&mut x, -5.0, 5.0);
        assert_eq!(x, vec![5.0, -5.0]);
        let mut y = vec![1.0, -2.0];
        repair_bounds(&mut y, -5.0, 5.0);
        assert_eq!(y, vec![1.0, -2.0]);
        let mut z = vec![5.0000001, 0.0];
        repair_bounds(&mut z, -5.0, 5.0);
        assert_eq!(z, vec![5.0, 0.0]);
    }

    #[test]
    fn selection_extremes_and_mixed() {
        let targets = Population {
            x: vec![vec![0.0], vec![1.0]],
            fitness: vec![3.0, 1.0],
            best_index: 1,
            fes_used: 2,
        };
        // all trials worse
        let kept = select_mu_lambda(&targets, vec![vec![9.0], vec![8.0]], vec![10.0, 11.0]);
        assert_eq!(kept.fitness, vec![1.0, 3.0]);
        // all trials better
        let replaced = select_mu_lambda(&targets, vec![vec![9.0], vec![8.0]], vec![0.5, 0.25]);
        assert_eq!(replaced.fitness, vec![0.25, 0.5]);
        // mixed: {3,1} targets vs {2,4} trials -> survivors {1,2}
        let mixed = select_mu_lambda(&targets, vec![vec![9.0], vec![8.0]], vec![2.0, 4.0]);
        assert_eq!(mixed.fitness, vec![1.0, 2.0]);
    }

    #[test]
    fn selection_prefers_targets_on_ties() {
        let targets = Population {
            x: vec![vec![0.0], vec![1.0]],
            fitness: vec![2.0, 2.0],
            best_index: 0,
            fes_used: 2,
        };
        let kept = select_mu_lambda(&targets, vec![vec![7.0], vec![8.0]], vec![2.0, 2.0]);
        assert_eq!(kept.x, vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn run_budget_counts_initialization() {
        let inst = make_instance(1, 2, 1).unwrap();
        let cfg = sample_config(); // NP = 10
        let result = run_de(&cfg, &inst, 10, &[], &mut seed_rng(1)).unwrap();
        assert_eq!(result.fes_used, 10);
        assert_eq!(result.trajectory, vec![(10, result.best_f)]);
        assert!(run_de(&cfg, &inst, 9, &[], &mut seed_rng(1)).is_err());
    }

    #[test]
    fn run_is_deterministic_per_seed() {
        let inst = make_instance(6, 3, 2).unwrap();
        let cfg = sample_config();
        let a = run_de(&cfg, &inst, 600, &[100, 300], &mut seed_rng(42)).unwrap();
        let b = run_de(&cfg, &inst, 600, &[100, 300], &mut seed_rng(42)).unwrap();
        assert_eq!(a.best_f.to_bits(), b.best_f.to_bits());
        assert_eq!(a.best_x, b.best_x);
        assert_eq!(a.trajectory, b.trajectory);
    }

    #[test]
    fn trajectory_is_non_increasing_and_budget_respected() {
        let inst = make_instance(15, 3, 9).unwrap();
        let cfg = sample_config();
        let checkpoints: Vec<usize> = (1..=20).map(|k| k * 30).collect();
        let result = run_de(&cfg, &inst, 611, &checkpoints, &mut seed_rng(5)).unwrap();
        assert!(result.fes_used <= 611);
        assert_eq!(result.fes_used % 15, 0); // NP * (1 + G)
        for pair in result.trajectory.windows(2) {
            assert!(pair[1].1 <= pair[0].1);
            assert!(pair[1].0 > pair[0].0);
        }
    }

    #[test]
    fn degenerate_parameters_never_worsen_fitness() {
        // F = 0 and Cr = 0: donors equal base rows, survival keeps the best
        let inst = make_instance(3, 2, 4).unwrap();
        let cfg = DEConfig { f: 0.0, cr: 0.0, ..sample_config() };
        let mut rng = seed_rng(9);
        let r1 = run_de(&cfg, &inst, 100, &[10, 50], &mut rng).unwrap();
        for pair in r1.trajectory.windows(2) {
            assert!(pair[1].1 <= pair[0].1);
        }
    }

    #[test]
    fn config_grid_validation() {
        let mut cfg = sample_config();
        assert!(cfg.validate().is_ok());
        cfg.np_mult = 6;
        assert!(cfg.validate().is_err());
        cfg = sample_config();
        cfg.f = 0.51;
        assert!(cfg.validate().is_err());
        cfg = sample_config();
        cfg.cr = 2.05;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_field_names() {
        let cfg = sample_config();
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"init\":\"latin-hypercube\""), "{json}");
        assert!(json.contains("\"mutation\":\"rand/1\""));
        assert!(json.contains("\"crossover\":\"binomial\""));
        assert!(json.contains("\"np_mult\":5"));
        assert!(json.contains("\"F\":0.5"));
        assert!(json.contains("\"Cr\":0.9"));
        let back: DEConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }
}
