//! CSV result and summary files, and the optional TOML config file.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::cleaning::{CleaningPolicy, CleaningSchedule};
use crate::error::{Error, Result};
use crate::experiments::ComboSummary;
use crate::metrics::{AttributionCounters, ReplicaResult};
use crate::model::Parameters;
use crate::Scenario;

pub const RESULTS_HEADER: [&str; 21] = [
    "experiment",
    "combo_id",
    "replica",
    "seed",
    "direct_infection",
    "policy",
    "ht_interval",
    "ht_rate",
    "lt_interval",
    "lt_rate",
    "random_count",
    "infected_ht",
    "infected_lt",
    "infected_colonized",
    "infected_diseased",
    "spontaneous",
    "total_contact_infections",
    "admissions",
    "discharges",
    "deaths",
    "horizon",
];

pub const SUMMARY_HEADER: [&str; 11] = [
    "experiment",
    "combo_id",
    "metric",
    "n",
    "mean",
    "std",
    "min",
    "q1",
    "median",
    "q3",
    "max",
];

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn results_record(r: &ReplicaResult) -> Vec<String> {
    let c = &r.counters;
    let policy = &r.scenario.cleaning;
    let (hti, htr, lti, ltr) = match policy.schedule() {
        Some(s) => (
            s.ht_interval.to_string(),
            s.ht_rate.to_string(),
            s.lt_interval.to_string(),
            s.lt_rate.to_string(),
        ),
        None => Default::default(),
    };
    vec![
        r.experiment_id.to_string(),
        r.combo_id.clone(),
        r.replica_index.to_string(),
        r.seed.to_string(),
        r.scenario.direct_infection.to_string(),
        policy.label().to_string(),
        hti,
        htr,
        lti,
        ltr,
        policy.random_count().map(|n| n.to_string()).unwrap_or_default(),
        c.infected_by_ht.to_string(),
        c.infected_by_lt.to_string(),
        c.infected_by_colonized.to_string(),
        c.infected_by_diseased.to_string(),
        c.spontaneous_colonizations.to_string(),
        c.total_contact_infections().to_string(),
        c.admissions.to_string(),
        c.discharges.to_string(),
        c.deaths.to_string(),
        r.horizon.to_string(),
    ]
}

/// Writes the header and one row per replica. Returns the number of rows.
pub fn write_results_csv<W: Write>(results: &[ReplicaResult], dest: W) -> Result<usize> {
    let mut w = csv_writer(dest);
    w.write_record(RESULTS_HEADER)?;
    for r in results {
        w.write_record(results_record(r))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(results.len())
}

pub fn write_results_file(results: &[ReplicaResult], path: &Path) -> Result<usize> {
    write_results_csv(results, create(path)?)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, row: usize) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::MalformedRow {
        row,
        message: format!("bad {} value `{raw}`", RESULTS_HEADER[idx]),
    })
}

/// Parses a file produced by [`write_results_csv`].
pub fn read_results_csv<R: Read>(src: R) -> Result<Vec<ReplicaResult>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(src);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(RESULTS_HEADER.iter().copied()) {
        return Err(Error::MalformedRow {
            row: 0,
            message: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let policy = match rec.get(5).unwrap_or("") {
            "none" => CleaningPolicy::None,
            label @ ("total" | "random") => {
                let schedule = CleaningSchedule {
                    ht_interval: field(&rec, 6, row)?,
                    ht_rate: field(&rec, 7, row)?,
                    lt_interval: field(&rec, 8, row)?,
                    lt_rate: field(&rec, 9, row)?,
                };
                if label == "total" {
                    CleaningPolicy::Total(schedule)
                } else {
                    CleaningPolicy::Random {
                        schedule,
                        count_per_type: field(&rec, 10, row)?,
                    }
                }
            }
            other => {
                return Err(Error::MalformedRow {
                    row,
                    message: format!("unknown policy `{other}`"),
                })
            }
        };
        let counters = AttributionCounters {
            infected_by_ht: field(&rec, 11, row)?,
            infected_by_lt: field(&rec, 12, row)?,
            infected_by_colonized: field(&rec, 13, row)?,
            infected_by_diseased: field(&rec, 14, row)?,
            spontaneous_colonizations: field(&rec, 15, row)?,
            admissions: field(&rec, 17, row)?,
            discharges: field(&rec, 18, row)?,
            deaths: field(&rec, 19, row)?,
        };
        let total: u64 = field(&rec, 16, row)?;
        if total != counters.total_contact_infections() {
            return Err(Error::MalformedRow {
                row,
                message: "total_contact_infections does not match its parts".into(),
            });
        }
        out.push(ReplicaResult {
            experiment_id: field(&rec, 0, row)?,
            combo_id: rec.get(1).unwrap_or("").to_string(),
            replica_index: field(&rec, 2, row)?,
            seed: field(&rec, 3, row)?,
            scenario: Scenario {
                direct_infection: field(&rec, 4, row)?,
                cleaning: policy,
            },
            counters,
            horizon: field(&rec, 20, row)?,
        });
    }
    Ok(out)
}

pub fn read_results_file(path: &Path) -> Result<Vec<ReplicaResult>> {
    read_results_csv(open(path)?)
}

/// One row per (combo, metric). Returns the number of rows.
pub fn write_summary_csv<W: Write>(summaries: &[ComboSummary], dest: W) -> Result<usize> {
    let mut w = csv_writer(dest);
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        let st = &s.stats;
        w.write_record([
            s.experiment_id.to_string(),
            s.combo_id.clone(),
            s.metric.name().to_string(),
            st.n.to_string(),
            st.mean.to_string(),
            st.std.to_string(),
            st.min.to_string(),
            st.q1.to_string(),
            st.median.to_string(),
            st.q3.to_string(),
            st.max.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(summaries.len())
}

pub fn write_summary_file(summaries: &[ComboSummary], path: &Path) -> Result<usize> {
    write_summary_csv(summaries, create(path)?)
}

/// Optional settings file. Keys use the same spellings as the CLI flags;
/// model parameters live under `[parameters]`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub horizon: Option<u32>,
    pub replicas: Option<u32>,
    pub parallelism: Option<usize>,
    pub direct_infection: Option<bool>,
    pub disinfect: Option<bool>,
    pub random_disinfect: Option<bool>,
    pub high_touch_disinfection_interval: Option<u32>,
    pub high_touch_disinfection_rate: Option<f64>,
    pub low_touch_disinfection_interval: Option<u32>,
    pub low_touch_disinfection_rate: Option<f64>,
    pub number_of_random_cleaning: Option<u32>,
    pub parameters: Option<Parameters>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        FileConfig::parse(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_results_header_only() {
        let mut buf = Vec::new();
        assert_eq!(write_results_csv(&[], &mut buf).unwrap(), 0);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{}\n", RESULTS_HEADER.join(",")));
        assert!(read_results_csv(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn config_file_keys() {
        let text = r#"
seed = 7
disinfect = true
high-touch-disinfection-interval = 20
high-touch-disinfection-rate = 0.7

[parameters]
p_ht = 0.5
"#;
        let cfg = FileConfig::parse(text, Path::new("x.toml")).unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.high_touch_disinfection_interval, Some(20));
        let params = cfg.parameters.unwrap();
        assert_eq!(params.p_ht, 0.5);
        assert_eq!(params.p_lt, 0.2);

        assert!(FileConfig::parse("bogus = 1", Path::new("x.toml")).is_err());
    }
}
