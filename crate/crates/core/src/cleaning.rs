//! Surface cleaning policies.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::{Grid, Surface, SurfaceKind, SURFACES_PER_KIND};
use crate::error::ConfigError;

/// Per-kind cleaning cadence and detergent potency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleaningSchedule {
    pub ht_interval: u32,
    pub ht_rate: f64,
    pub lt_interval: u32,
    pub lt_rate: f64,
}

impl CleaningSchedule {
    pub fn uniform(interval: u32, rate: f64) -> Self {
        CleaningSchedule {
            ht_interval: interval,
            ht_rate: rate,
            lt_interval: interval,
            lt_rate: rate,
        }
    }

    pub fn interval(&self, kind: SurfaceKind) -> u32 {
        match kind {
            SurfaceKind::HighTouch => self.ht_interval,
            SurfaceKind::LowTouch => self.lt_interval,
        }
    }

    pub fn rate(&self, kind: SurfaceKind) -> f64 {
        match kind {
            SurfaceKind::HighTouch => self.ht_rate,
            SurfaceKind::LowTouch => self.lt_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum CleaningPolicy {
    #[default]
    None,
    /// Every surface of a kind is cleaned when its interval comes due.
    Total(CleaningSchedule),
    /// A fresh uniform sample of `count_per_type` surfaces per kind is
    /// cleaned at each due tick.
    Random {
        schedule: CleaningSchedule,
        count_per_type: u32,
    },
}

impl CleaningPolicy {
    pub fn schedule(&self) -> Option<&CleaningSchedule> {
        match self {
            CleaningPolicy::None => None,
            CleaningPolicy::Total(s) => Some(s),
            CleaningPolicy::Random { schedule, .. } => Some(schedule),
        }
    }

    pub fn random_count(&self) -> Option<u32> {
        match self {
            CleaningPolicy::Random { count_per_type, .. } => Some(*count_per_type),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CleaningPolicy::None => "none",
            CleaningPolicy::Total(_) => "total",
            CleaningPolicy::Random { .. } => "random",
        }
    }

    pub fn validate(self) -> Result<Self, ConfigError> {
        let Some(s) = self.schedule() else {
            return Ok(self);
        };
        for (flag, interval) in [
            ("high-touch-disinfection-interval", s.ht_interval),
            ("low-touch-disinfection-interval", s.lt_interval),
        ] {
            if interval < 1 {
                return Err(ConfigError::InvalidValue {
                    flag: flag.into(),
                    value: interval.to_string(),
                    reason: "interval must be at least 1".into(),
                });
            }
        }
        for (flag, rate) in [
            ("high-touch-disinfection-rate", s.ht_rate),
            ("low-touch-disinfection-rate", s.lt_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(ConfigError::InvalidValue {
                    flag: flag.into(),
                    value: rate.to_string(),
                    reason: "rate must lie in [0, 1]".into(),
                });
            }
        }
        if let Some(count) = self.random_count() {
            if count as usize > SURFACES_PER_KIND {
                return Err(ConfigError::InvalidValue {
                    flag: "number-of-random-cleaning".into(),
                    value: count.to_string(),
                    reason: format!("at most {SURFACES_PER_KIND} surfaces per type"),
                });
            }
        }
        Ok(self)
    }

    /// Whether surfaces of `kind` are cleaned at 1-based `tick`.
    pub fn cleaning_due(&self, tick: u64, kind: SurfaceKind) -> bool {
        match self.schedule() {
            None => false,
            Some(s) => tick.is_multiple_of(u64::from(s.interval(kind))),
        }
    }

    /// Surface indices of `kind` to clean at a due tick.
    pub fn select_targets<R: Rng + ?Sized>(
        &self,
        grid: &Grid,
        kind: SurfaceKind,
        rng: &mut R,
    ) -> Vec<usize> {
        let pool = grid.surfaces_of(kind);
        match self {
            CleaningPolicy::None => Vec::new(),
            CleaningPolicy::Total(_) => pool.to_vec(),
            CleaningPolicy::Random { count_per_type, .. } => {
                let k = (*count_per_type as usize).min(pool.len());
                let mut picked: Vec<usize> = index::sample(rng, pool.len(), k)
                    .into_iter()
                    .map(|i| pool[i])
                    .collect();
                picked.sort_unstable();
                picked
            }
        }
    }
}

/// Removes `rate` of the surface's contamination.
pub fn apply_cleaning(surface: &mut Surface, rate: f64) {
    surface.contamination *= 1.0 - rate;
}
