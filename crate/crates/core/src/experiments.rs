//! Factorial experiment designs and the replica runner.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::cleaning::{CleaningPolicy, CleaningSchedule};
use crate::engine::{run_replica_with, SimConfig, DEFAULT_HORIZON};
use crate::error::{ConfigError, Error, Result};
use crate::metrics::{summarize_group, Metric, ReplicaResult, SummaryStats};
use crate::model::Parameters;
use crate::Scenario;

pub const INTERVALS: [u32; 3] = [10, 20, 30];
pub const RATES: [f64; 4] = [0.5, 0.7, 0.9, 1.0];
pub const RANDOM_COUNTS: [u32; 3] = [24, 36, 48];
pub const DEFAULT_REPLICAS: u32 = 150;

#[derive(Debug, Clone, PartialEq)]
pub struct ComboSpec {
    pub experiment_id: u8,
    pub combo_id: String,
    pub scenario: Scenario,
}

impl ComboSpec {
    pub fn new(experiment_id: u8, scenario: Scenario) -> Self {
        ComboSpec {
            experiment_id,
            combo_id: scenario.combo_key(),
            scenario,
        }
    }
}

fn schedule_grid() -> Vec<CleaningSchedule> {
    let mut out = Vec::with_capacity(144);
    for ht_interval in INTERVALS {
        for ht_rate in RATES {
            for lt_interval in INTERVALS {
                for lt_rate in RATES {
                    out.push(CleaningSchedule {
                        ht_interval,
                        ht_rate,
                        lt_interval,
                        lt_rate,
                    });
                }
            }
        }
    }
    out
}

/// The combinations of one factorial experiment.
///
/// 1: direct infection on/off without cleaning; 2: total cleaning over the
/// 3x4x3x4 interval/rate grid; 3: random cleaning of 24, 36 or 48 surfaces
/// per type over the same grid.
pub fn enumerate_combos(experiment_id: u32) -> Result<Vec<ComboSpec>, ConfigError> {
    let combos = match experiment_id {
        1 => [true, false]
            .into_iter()
            .map(|direct_infection| {
                ComboSpec::new(
                    1,
                    Scenario {
                        direct_infection,
                        cleaning: CleaningPolicy::None,
                    },
                )
            })
            .collect(),
        2 => schedule_grid()
            .into_iter()
            .map(|s| {
                ComboSpec::new(
                    2,
                    Scenario {
                        direct_infection: false,
                        cleaning: CleaningPolicy::Total(s),
                    },
                )
            })
            .collect(),
        3 => RANDOM_COUNTS
            .into_iter()
            .flat_map(|count_per_type| {
                schedule_grid().into_iter().map(move |schedule| {
                    ComboSpec::new(
                        3,
                        Scenario {
                            direct_infection: false,
                            cleaning: CleaningPolicy::Random {
                                schedule,
                                count_per_type,
                            },
                        },
                    )
                })
            })
            .collect(),
        other => return Err(ConfigError::UnknownExperiment(other)),
    };
    Ok(combos)
}

/// 64-bit FNV-1a, used to turn a combo id into a seed offset.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn replica_seed(base_seed: u64, combo_id: &str, replica_index: u32) -> u64 {
    (base_seed ^ fnv1a(combo_id.as_bytes())).wrapping_add(u64::from(replica_index))
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub combos: Vec<ComboSpec>,
    pub replicas_per_combo: u32,
    pub base_seed: u64,
    pub params: Parameters,
    pub horizon: u32,
}

impl ExperimentPlan {
    /// Builds a plan and checks that no two runs share a seed.
    pub fn new(
        combos: Vec<ComboSpec>,
        replicas_per_combo: u32,
        base_seed: u64,
        params: Parameters,
        horizon: u32,
    ) -> Result<Self, ConfigError> {
        let params = params.validate()?;
        for c in &combos {
            c.scenario.cleaning.validate()?;
        }
        let plan = ExperimentPlan {
            combos,
            replicas_per_combo,
            base_seed,
            params,
            horizon,
        };
        plan.check_seeds()?;
        Ok(plan)
    }

    /// Plan for experiments `ids` with default parameters.
    pub fn for_experiments(
        ids: &[u32],
        replicas_per_combo: u32,
        base_seed: u64,
        horizon: u32,
    ) -> Result<Self, ConfigError> {
        let mut combos = Vec::new();
        for &id in ids {
            combos.extend(enumerate_combos(id)?);
        }
        ExperimentPlan::new(combos, replicas_per_combo, base_seed, Parameters::default(), horizon)
    }

    pub fn run_count(&self) -> usize {
        self.combos.len() * self.replicas_per_combo as usize
    }

    fn check_seeds(&self) -> Result<(), ConfigError> {
        let mut seen: HashMap<u64, (usize, u32)> = HashMap::with_capacity(self.run_count());
        for (ci, combo) in self.combos.iter().enumerate() {
            for r in 0..self.replicas_per_combo {
                let seed = replica_seed(self.base_seed, &combo.combo_id, r);
                if let Some(&(cj, rj)) = seen.get(&seed) {
                    return Err(ConfigError::SeedCollision {
                        seed,
                        first: format!("{}#{}", self.combos[cj].combo_id, rj),
                        second: format!("{}#{}", combo.combo_id, r),
                    });
                }
                seen.insert(seed, (ci, r));
            }
        }
        Ok(())
    }

    /// Config for one run of the plan.
    pub fn sim_config(&self, combo: &ComboSpec, replica_index: u32) -> SimConfig {
        SimConfig {
            params: self.params.clone(),
            scenario: combo.scenario,
            seed: replica_seed(self.base_seed, &combo.combo_id, replica_index),
            horizon: self.horizon,
        }
    }

    /// Runs a single (combo, replica) pair in isolation.
    pub fn run_one(&self, combo: &ComboSpec, replica_index: u32) -> Result<ReplicaResult> {
        let config = self.sim_config(combo, replica_index);
        let state = run_replica_with(&config, |_| {}).map_err(|source| Error::Replica {
            combo_id: combo.combo_id.clone(),
            replica: replica_index,
            seed: config.seed,
            source,
        })?;
        Ok(ReplicaResult {
            experiment_id: combo.experiment_id,
            combo_id: combo.combo_id.clone(),
            replica_index,
            seed: config.seed,
            scenario: combo.scenario,
            counters: state.counters,
            horizon: self.horizon,
        })
    }
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            combos: Vec::new(),
            replicas_per_combo: DEFAULT_REPLICAS,
            base_seed: 0,
            params: Parameters::default(),
            horizon: DEFAULT_HORIZON,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComboSummary {
    pub experiment_id: u8,
    pub combo_id: String,
    pub metric: Metric,
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    /// Sorted by (experiment, combo id, replica index).
    pub results: Vec<ReplicaResult>,
    pub summaries: Vec<ComboSummary>,
}

/// Sorts results into their canonical (experiment, combo id, replica) order.
pub fn sort_results(results: &mut [ReplicaResult]) {
    results.sort_by(|a, b| {
        (a.experiment_id, &a.combo_id, a.replica_index).cmp(&(
            b.experiment_id,
            &b.combo_id,
            b.replica_index,
        ))
    });
}

/// Per-combo summaries of every metric, in result order. Metrics with no
/// defined value in a combo (e.g. shares when nobody was infected) are
/// skipped.
pub fn summarize_results(results: &[ReplicaResult]) -> Vec<ComboSummary> {
    let mut out = Vec::new();
    for group in results.chunk_by(|a, b| a.experiment_id == b.experiment_id && a.combo_id == b.combo_id) {
        for metric in Metric::ALL {
            if let Ok(stats) = summarize_group(group, metric) {
                out.push(ComboSummary {
                    experiment_id: group[0].experiment_id,
                    combo_id: group[0].combo_id.clone(),
                    metric,
                    stats,
                });
            }
        }
    }
    out
}

/// Runs every (combo, replica) pair of `plan` on `parallelism` worker
/// threads. Output is independent of the worker count.
pub fn run_experiment(plan: &ExperimentPlan, parallelism: usize) -> Result<ExperimentOutput> {
    let tasks: Vec<(&ComboSpec, u32)> = plan
        .combos
        .iter()
        .flat_map(|c| (0..plan.replicas_per_combo).map(move |r| (c, r)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("failed to build worker pool");
    let mut results: Vec<ReplicaResult> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(combo, r)| plan.run_one(combo, r))
            .collect::<Result<Vec<_>>>()
    })?;

    sort_results(&mut results);
    let summaries = summarize_results(&results);
    Ok(ExperimentOutput { results, summaries })
}

/// Mean cumulative contact infections after each tick `0..=max_horizon`,
/// averaged over `replicas` runs of `scenario`.
///
/// A run to horizon `h` is a prefix of the run to any longer horizon with
/// the same seed, so one long run per replica yields the whole curve.
pub fn mean_infection_curve(
    params: &Parameters,
    scenario: Scenario,
    replicas: u32,
    base_seed: u64,
    max_horizon: u32,
    parallelism: usize,
) -> Result<Vec<f64>> {
    let combo = ComboSpec::new(0, scenario);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("failed to build worker pool");
    let curves: Vec<Vec<u64>> = pool.install(|| {
        (0..replicas)
            .into_par_iter()
            .map(|r| {
                let config = SimConfig {
                    params: params.clone(),
                    scenario,
                    seed: replica_seed(base_seed, &combo.combo_id, r),
                    horizon: max_horizon,
                };
                let mut curve = Vec::with_capacity(max_horizon as usize + 1);
                run_replica_with(&config, |s| curve.push(s.counters.total_contact_infections()))
                    .map(|_| curve)
                    .map_err(|source| Error::Replica {
                        combo_id: combo.combo_id.clone(),
                        replica: r,
                        seed: config.seed,
                        source,
                    })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let n = replicas.max(1) as f64;
    Ok((0..=max_horizon as usize)
        .map(|t| curves.iter().map(|c| c[t] as f64).sum::<f64>() / n)
        .collect())
}

/// The horizon in `[min_horizon, max_horizon]` whose mean no-cleaning,
/// no-direct-contact infection count is closest to `target`, provided it
/// lies within `rel_tol` of it.
pub fn calibrate_horizon(
    params: &Parameters,
    target: f64,
    rel_tol: f64,
    (min_horizon, max_horizon): (u32, u32),
    replicas: u32,
    base_seed: u64,
    parallelism: usize,
) -> Result<Option<(u32, f64)>> {
    let curve = mean_infection_curve(
        params,
        Scenario::default(),
        replicas,
        base_seed,
        max_horizon,
        parallelism,
    )?;
    Ok((min_horizon..=max_horizon)
        .map(|h| (h, curve[h as usize]))
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .filter(|&(_, mean)| (mean - target).abs() <= rel_tol * target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infection_curve_matches_individual_runs() {
        let params = Parameters::default();
        let curve = mean_infection_curve(&params, Scenario::default(), 3, 11, 150, 1).unwrap();
        let combo = ComboSpec::new(0, Scenario::default());
        for h in [0u32, 60, 150] {
            let plan = ExperimentPlan::new(vec![combo.clone()], 3, 11, params.clone(), h).unwrap();
            let out = run_experiment(&plan, 1).unwrap();
            let mean = out
                .results
                .iter()
                .map(|r| r.counters.total_contact_infections() as f64)
                .sum::<f64>()
                / 3.0;
            assert_eq!(curve[h as usize], mean);
        }
    }

    #[test]
    fn combo_counts() {
        assert_eq!(enumerate_combos(1).unwrap().len(), 2);
        assert_eq!(enumerate_combos(2).unwrap().len(), 144);
        assert_eq!(enumerate_combos(3).unwrap().len(), 432);
        assert_eq!(
            enumerate_combos(4).unwrap_err(),
            ConfigError::UnknownExperiment(4)
        );
    }

    #[test]
    fn combo_ids_unique() {
        for id in 1..=3 {
            let combos = enumerate_combos(id).unwrap();
            let mut ids: Vec<_> = combos.iter().map(|c| c.combo_id.clone()).collect();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), combos.len());
        }
    }

    #[test]
    fn full_design_run_count() {
        let plan = ExperimentPlan::for_experiments(&[1, 2, 3], 150, 2024, 365).unwrap();
        assert_eq!(plan.run_count(), 86_700);
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn small_experiment_shape() {
        let plan = ExperimentPlan::for_experiments(&[1], 2, 7, 20).unwrap();
        let out = run_experiment(&plan, 2).unwrap();
        assert_eq!(out.results.len(), 4);
        assert!(out.results.windows(2).all(|w| {
            (&w[0].combo_id, w[0].replica_index) < (&w[1].combo_id, w[1].replica_index)
        }));
    }
}
