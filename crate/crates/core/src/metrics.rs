//! Infection attribution, per-replica results and descriptive summaries.

use serde::{Deserialize, Serialize};

use crate::environment::SurfaceKind;
use crate::error::{Error, Result};
use crate::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfectionSource {
    HighTouch,
    LowTouch,
    ColonizedPatient,
    DiseasedPatient,
}

impl From<SurfaceKind> for InfectionSource {
    fn from(kind: SurfaceKind) -> Self {
        match kind {
            SurfaceKind::HighTouch => InfectionSource::HighTouch,
            SurfaceKind::LowTouch => InfectionSource::LowTouch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AttributionCounters {
    pub infected_by_ht: u64,
    pub infected_by_lt: u64,
    pub infected_by_colonized: u64,
    pub infected_by_diseased: u64,
    pub admissions: u64,
    pub discharges: u64,
    pub deaths: u64,
    /// S->C and S->D moves drawn from the transition ladder; not attributed.
    pub spontaneous_colonizations: u64,
}

impl AttributionCounters {
    pub fn record_infection(&mut self, source: InfectionSource) {
        match source {
            InfectionSource::HighTouch => self.infected_by_ht += 1,
            InfectionSource::LowTouch => self.infected_by_lt += 1,
            InfectionSource::ColonizedPatient => self.infected_by_colonized += 1,
            InfectionSource::DiseasedPatient => self.infected_by_diseased += 1,
        }
    }

    pub fn surface_infections(&self) -> u64 {
        self.infected_by_ht + self.infected_by_lt
    }

    pub fn total_contact_infections(&self) -> u64 {
        self.infected_by_ht + self.infected_by_lt + self.infected_by_colonized + self.infected_by_diseased
    }

    /// Fraction of contact infections per source, or `None` if there were none.
    pub fn shares(&self) -> Option<Shares> {
        let total = self.total_contact_infections();
        if total == 0 {
            return None;
        }
        let t = total as f64;
        Some(Shares {
            high_touch: self.infected_by_ht as f64 / t,
            low_touch: self.infected_by_lt as f64 / t,
            colonized: self.infected_by_colonized as f64 / t,
            diseased: self.infected_by_diseased as f64 / t,
        })
    }

    /// High-touch fraction of surface-borne infections only.
    pub fn surface_share_ht(&self) -> Option<f64> {
        let s = self.surface_infections();
        (s > 0).then(|| self.infected_by_ht as f64 / s as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shares {
    pub high_touch: f64,
    pub low_touch: f64,
    pub colonized: f64,
    pub diseased: f64,
}

impl Shares {
    pub fn sum(&self) -> f64 {
        self.high_touch + self.low_touch + self.colonized + self.diseased
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaResult {
    /// 0 for ad-hoc single runs, otherwise the factorial experiment number.
    pub experiment_id: u8,
    pub combo_id: String,
    pub replica_index: u32,
    pub seed: u64,
    pub scenario: Scenario,
    pub counters: AttributionCounters,
    pub horizon: u32,
}

/// Per-replica quantities that can be summarised across a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    InfectedHt,
    InfectedLt,
    InfectedColonized,
    InfectedDiseased,
    Spontaneous,
    TotalContactInfections,
    Admissions,
    Discharges,
    Deaths,
    ShareHt,
    ShareLt,
    ShareColonized,
    ShareDiseased,
    SurfaceShareHt,
}

impl Metric {
    pub const ALL: [Metric; 14] = [
        Metric::InfectedHt,
        Metric::InfectedLt,
        Metric::InfectedColonized,
        Metric::InfectedDiseased,
        Metric::Spontaneous,
        Metric::TotalContactInfections,
        Metric::Admissions,
        Metric::Discharges,
        Metric::Deaths,
        Metric::ShareHt,
        Metric::ShareLt,
        Metric::ShareColonized,
        Metric::ShareDiseased,
        Metric::SurfaceShareHt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::InfectedHt => "infected_ht",
            Metric::InfectedLt => "infected_lt",
            Metric::InfectedColonized => "infected_colonized",
            Metric::InfectedDiseased => "infected_diseased",
            Metric::Spontaneous => "spontaneous",
            Metric::TotalContactInfections => "total_contact_infections",
            Metric::Admissions => "admissions",
            Metric::Discharges => "discharges",
            Metric::Deaths => "deaths",
            Metric::ShareHt => "share_ht",
            Metric::ShareLt => "share_lt",
            Metric::ShareColonized => "share_colonized",
            Metric::ShareDiseased => "share_diseased",
            Metric::SurfaceShareHt => "surface_share_ht",
        }
    }

    /// `None` for a share whose denominator is zero.
    pub fn value(self, c: &AttributionCounters) -> Option<f64> {
        let count = |v: u64| Some(v as f64);
        match self {
            Metric::InfectedHt => count(c.infected_by_ht),
            Metric::InfectedLt => count(c.infected_by_lt),
            Metric::InfectedColonized => count(c.infected_by_colonized),
            Metric::InfectedDiseased => count(c.infected_by_diseased),
            Metric::Spontaneous => count(c.spontaneous_colonizations),
            Metric::TotalContactInfections => count(c.total_contact_infections()),
            Metric::Admissions => count(c.admissions),
            Metric::Discharges => count(c.discharges),
            Metric::Deaths => count(c.deaths),
            Metric::ShareHt => c.shares().map(|s| s.high_touch),
            Metric::ShareLt => c.shares().map(|s| s.low_touch),
            Metric::ShareColonized => c.shares().map(|s| s.colonized),
            Metric::ShareDiseased => c.shares().map(|s| s.diseased),
            Metric::SurfaceShareHt => c.surface_share_ht(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator; 0 when n = 1).
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl SummaryStats {
    /// Quartiles interpolate linearly between order statistics at position
    /// p * (n - 1), so an even-sized median is the midpoint of the middle pair.
    pub fn from_values(values: &[f64]) -> Result<SummaryStats> {
        if values.is_empty() {
            return Err(Error::EmptyGroup);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss: f64 = sorted.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(SummaryStats {
            n,
            mean,
            std,
            min: sorted[0],
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
            max: sorted[n - 1],
        })
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Summarises one metric across a group of replicas. Replicas whose metric
/// is undefined (a share with nothing to divide) are left out of `n`.
pub fn summarize_group(results: &[ReplicaResult], metric: Metric) -> Result<SummaryStats> {
    let values: Vec<f64> = results
        .iter()
        .filter_map(|r| metric.value(&r.counters))
        .collect();
    SummaryStats::from_values(&values)
}
