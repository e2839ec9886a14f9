//! Spatial agent-based model of C. difficile transmission in a hospital
//! ward through high-touch and low-touch surfaces, with a factorial
//! experiment harness for cleaning strategies.
//!
//! The building blocks, bottom-up:
//!
//! * [`model`]: patient states, parameters and per-tick transitions.
//! * [`environment`]: the walled ward grid and its 144 surfaces.
//! * [`cleaning`]: total and random cleaning policies.
//! * [`engine`]: the tick loop of a single replica.
//! * [`metrics`]: infection attribution and descriptive summaries.
//! * [`experiments`]: factorial designs and the parallel replica runner.
//! * [`io`] and [`cli`]: CSV files, config files and the command line.

pub mod cleaning;
pub mod cli;
pub mod engine;
pub mod environment;
pub mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod model;

use serde::{Deserialize, Serialize};

pub use cleaning::{apply_cleaning, CleaningPolicy, CleaningSchedule};
pub use engine::{run_replica, run_replica_with, SimConfig, SimulationState, TraceRow};
pub use environment::{Cell, CellKind, Grid, Surface, SurfaceKind};
pub use error::{ConfigError, Error, ParamError, Result};
pub use experiments::{enumerate_combos, run_experiment, ComboSpec, ExperimentOutput, ExperimentPlan};
pub use metrics::{
    summarize_group, AttributionCounters, InfectionSource, Metric, ReplicaResult, SummaryStats,
};
pub use model::{min_stay, transition, Parameters, Patient, PatientState, TransitionOutcome};

/// The intervention settings that vary between experiment combinations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scenario {
    pub direct_infection: bool,
    pub cleaning: CleaningPolicy,
}

impl Scenario {
    /// Stable identifier built from the scenario's field values.
    pub fn combo_key(&self) -> String {
        let direct = if self.direct_infection {
            "direct"
        } else {
            "nodirect"
        };
        match &self.cleaning {
            CleaningPolicy::None => format!("{direct}_none"),
            CleaningPolicy::Total(s) => format!(
                "{direct}_total_hti{}_htr{}_lti{}_ltr{}",
                s.ht_interval, s.ht_rate, s.lt_interval, s.lt_rate
            ),
            CleaningPolicy::Random {
                schedule: s,
                count_per_type,
            } => format!(
                "{direct}_random{count_per_type}_hti{}_htr{}_lti{}_ltr{}",
                s.ht_interval, s.ht_rate, s.lt_interval, s.lt_rate
            ),
        }
    }
}
