use proptest::prelude::*;

use wardsim::experiments::{replica_seed, sort_results, summarize_results};
use wardsim::io::{read_results_csv, write_results_csv};
use wardsim::metrics::{Metric, SummaryStats};
use wardsim::{
    apply_cleaning, AttributionCounters, Cell, CleaningPolicy, CleaningSchedule, ReplicaResult,
    Scenario, SimConfig, SimulationState, Surface, SurfaceKind,
};

fn policy_strategy() -> impl Strategy<Value = CleaningPolicy> {
    let schedule = (1u32..40, 0.0f64..=1.0, 1u32..40, 0.0f64..=1.0).prop_map(
        |(ht_interval, ht_rate, lt_interval, lt_rate)| CleaningSchedule {
            ht_interval,
            ht_rate,
            lt_interval,
            lt_rate,
        },
    );
    prop_oneof![
        Just(CleaningPolicy::None),
        schedule.clone().prop_map(CleaningPolicy::Total),
        (schedule, 0u32..=72).prop_map(|(schedule, count_per_type)| CleaningPolicy::Random {
            schedule,
            count_per_type
        }),
    ]
}

fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    (any::<bool>(), policy_strategy()).prop_map(|(direct_infection, cleaning)| Scenario {
        direct_infection,
        cleaning,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engine_invariants_hold_every_tick(seed in any::<u64>(), scenario in scenario_strategy()) {
        let config = SimConfig { scenario, seed, horizon: 120, ..SimConfig::default() };
        let mut state = SimulationState::initialize(&config);
        let mut prev_counters = state.counters;
        for _ in 0..config.horizon {
            let before: Vec<f64> = state.grid.surfaces().iter().map(|s| s.contamination).collect();
            let prev_patients = state.patients.clone();
            state.step(&config);
            let tick = state.tick;
            let c = state.counters;

            prop_assert!(state.population() <= config.params.capacity as usize);
            prop_assert!(state.patients.iter().all(|p| state.grid.is_walkable(p.position)));
            prop_assert!(state.patients.windows(2).all(|w| w[0].id < w[1].id));
            prop_assert_eq!(
                c.admissions - c.discharges - c.deaths,
                state.population() as u64
            );
            if !scenario.direct_infection {
                prop_assert_eq!(c.infected_by_colonized + c.infected_by_diseased, 0);
            }

            // Counters never go down.
            for (now, then) in [
                (c.infected_by_ht, prev_counters.infected_by_ht),
                (c.infected_by_lt, prev_counters.infected_by_lt),
                (c.infected_by_colonized, prev_counters.infected_by_colonized),
                (c.infected_by_diseased, prev_counters.infected_by_diseased),
                (c.admissions, prev_counters.admissions),
                (c.discharges, prev_counters.discharges),
                (c.deaths, prev_counters.deaths),
                (c.spontaneous_colonizations, prev_counters.spontaneous_colonizations),
            ] {
                prop_assert!(now >= then);
            }
            prev_counters = c;

            for (s, b) in state.grid.surfaces().iter().zip(&before) {
                prop_assert!(s.contamination >= 0.0);
                if !scenario.cleaning.cleaning_due(tick, s.kind) {
                    prop_assert!(s.contamination >= *b);
                }
            }

            // Timers: survivors either reset (state changed) or advanced by one,
            // and nobody changed state before their minimum stay, except via
            // contact infection (which always lands in Colonized).
            for p in &state.patients {
                if let Some(old) = prev_patients.iter().find(|q| q.id == p.id) {
                    if old.state == p.state {
                        prop_assert!(
                            p.ticks_in_state == old.ticks_in_state + 1
                                || (p.ticks_in_state == 0 && p.state == wardsim::PatientState::Colonized)
                                || p.ticks_in_state == 1
                        );
                    } else if p.ticks_in_state == 0 && p.state != wardsim::PatientState::Colonized {
                        prop_assert!(old.ticks_in_state >= config.params.min_stay(old.state));
                    }
                }
            }
        }
    }

    #[test]
    fn total_clean_every_tick_leaves_no_residue(seed in any::<u64>()) {
        let config = SimConfig {
            scenario: Scenario {
                direct_infection: false,
                cleaning: CleaningPolicy::Total(CleaningSchedule::uniform(1, 1.0)),
            },
            seed,
            horizon: 60,
            ..SimConfig::default()
        };
        let mut state = SimulationState::initialize(&config);
        for _ in 0..config.horizon {
            state.step(&config);
            prop_assert!(state.grid.surfaces().iter().all(|s| s.contamination == 0.0));
        }
    }

    #[test]
    fn cleaning_algebra(c in 0.0f64..1e3, rate in 0.0f64..=1.0) {
        let mut s = Surface { kind: SurfaceKind::HighTouch, position: Cell::new(3, 3), contamination: c };
        apply_cleaning(&mut s, rate);
        prop_assert_eq!(s.contamination, c * (1.0 - rate));
        prop_assert!(s.contamination >= 0.0 && s.contamination <= c);
    }

    #[test]
    fn summary_ordering_and_permutation_invariance(
        mut values in prop::collection::vec(-1e6f64..1e6, 1..200),
        rot in any::<prop::sample::Index>(),
    ) {
        let a = SummaryStats::from_values(&values).unwrap();
        prop_assert!(a.min <= a.q1 && a.q1 <= a.median && a.median <= a.q3 && a.q3 <= a.max);
        prop_assert!(a.std >= 0.0);
        let k = rot.index(values.len());
        values.rotate_left(k);
        values.reverse();
        let b = SummaryStats::from_values(&values).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn shares_normalise(ht in 0u64..1000, lt in 0u64..1000, col in 0u64..1000, dis in 0u64..1000) {
        let c = AttributionCounters {
            infected_by_ht: ht, infected_by_lt: lt, infected_by_colonized: col, infected_by_diseased: dis,
            ..Default::default()
        };
        match c.shares() {
            None => prop_assert_eq!(ht + lt + col + dis, 0),
            Some(s) => prop_assert!((s.sum() - 1.0).abs() < 1e-12),
        }
    }

    #[test]
    fn results_csv_round_trip(
        rows in prop::collection::vec(
            (0u8..4, scenario_strategy(), any::<u64>(), 0u32..200, prop::array::uniform8(0u64..100_000)),
            0..12,
        )
    ) {
        let mut results: Vec<ReplicaResult> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (exp, scenario, seed, horizon, c))| ReplicaResult {
                experiment_id: exp,
                combo_id: scenario.combo_key(),
                replica_index: i as u32,
                seed,
                scenario,
                counters: AttributionCounters {
                    infected_by_ht: c[0],
                    infected_by_lt: c[1],
                    infected_by_colonized: c[2],
                    infected_by_diseased: c[3],
                    admissions: c[4],
                    discharges: c[5],
                    deaths: c[6],
                    spontaneous_colonizations: c[7],
                },
                horizon,
            })
            .collect();
        sort_results(&mut results);
        let mut buf = Vec::new();
        write_results_csv(&results, &mut buf).unwrap();
        let back = read_results_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &results);

        let mut again = Vec::new();
        write_results_csv(&back, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }
}

#[test]
fn seeds_distinct_across_full_design() {
    use std::collections::HashSet;
    let mut seen = HashSet::new();
    for id in 1..=3 {
        for combo in wardsim::enumerate_combos(id).unwrap() {
            for r in 0..150 {
                assert!(seen.insert(replica_seed(0, &combo.combo_id, r)));
            }
        }
    }
    assert_eq!(seen.len(), 86_700);
}

#[test]
fn summary_shares_recompute_from_counts() {
    let plan = wardsim::ExperimentPlan::for_experiments(&[1], 4, 3, 150).unwrap();
    let out = wardsim::run_experiment(&plan, 1).unwrap();
    let summaries = summarize_results(&out.results);
    for s in summaries.iter().filter(|s| s.metric == Metric::ShareHt) {
        let vals: Vec<f64> = out
            .results
            .iter()
            .filter(|r| r.combo_id == s.combo_id)
            .filter_map(|r| {
                let c = &r.counters;
                let total = c.infected_by_ht + c.infected_by_lt + c.infected_by_colonized + c.infected_by_diseased;
                (total > 0).then(|| c.infected_by_ht as f64 / total as f64)
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        assert_eq!(s.stats.n, vals.len());
        assert!((s.stats.mean - mean).abs() < 1e-9);
    }
}

#[test]
fn touch_ratio_follows_touch_probabilities_without_shedding() {
    let params = wardsim::Parameters {
        shed_c: 0.0,
        shed_d: 0.0,
        ..Default::default()
    };
    let config = SimConfig {
        params,
        seed: 4,
        horizon: 5000,
        ..SimConfig::default()
    };
    let state = wardsim::run_replica_with(&config, |_| {}).unwrap();
    let ratio = state.touches.high_touch as f64 / state.touches.low_touch as f64;
    assert!((ratio - 2.0).abs() <= 0.1, "{ratio}");
}
