//! CSV and JSON emission. CSV keeps one fixed column set for every record
//! kind; JSON wraps typed records with a schema version.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Format;
use super::distribution::{DistributionReport, ScourfieldFit};
use super::scenario::{AdditiveDistribution, ClassHighlight, FilterComparison, ScenarioReport};
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 8] = ["scenario", "spec", "x", "q", "a", "count", "expected", "ratio"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Record {
    Distribution(DistributionReport),
    Additive { scenario: String, #[serde(flatten)] data: AdditiveDistribution },
    Scourfield(ScourfieldFit),
    Highlight { scenario: String, #[serde(flatten)] data: ClassHighlight },
    Comparison { scenario: String, #[serde(flatten)] data: FilterComparison },
}

impl Record {
    /// Flattens a scenario report into records, distributions first.
    pub fn from_scenario(report: ScenarioReport) -> Vec<Record> {
        let name = report.scenario.to_string();
        let mut out: Vec<Record> = report.distributions.into_iter().map(Record::Distribution).collect();
        out.extend(report.additive.into_iter().map(|data| Record::Additive { scenario: name.clone(), data }));
        out.extend(report.highlights.into_iter().map(|data| Record::Highlight { scenario: name.clone(), data }));
        out.extend(report.comparisons.into_iter().map(|data| Record::Comparison { scenario: name.clone(), data }));
        out
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonDocument {
    pub schema_version: u32,
    pub records: Vec<Record>,
}

/// Rows under [`CSV_COLUMNS`]. Highlights and comparisons summarize other
/// rows and only appear in JSON.
pub fn write_csv<W: Write>(records: &[Record], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for record in records {
        match record {
            Record::Distribution(d) => {
                let expected = d.expected();
                let label = format!("{} filter={}", d.spec, d.filter);
                for (&a, &count) in &d.counts {
                    let ratio = d.ratio(a).map(fmt_f64).unwrap_or_default();
                    w.write_record([&d.scenario, &label, &d.x.to_string(), &d.q.to_string(), &a.to_string(), &count.to_string(), &fmt_f64(expected), &ratio])?;
                }
            }
            Record::Additive { scenario, data } => {
                for (label, counts) in [("A(n)", &data.sum_counts), ("A*(n)", &data.alt_counts)] {
                    for (a, &count) in counts.iter().enumerate() {
                        let ratio = fmt_f64(count as f64 / data.expected);
                        w.write_record([scenario, label, &data.x.to_string(), &data.q.to_string(), &a.to_string(), &count.to_string(), &fmt_f64(data.expected), &ratio])?;
                    }
                }
            }
            Record::Scourfield(fit) => {
                for r in &fit.rows {
                    let ratio = fmt_f64(r.n_coprime as f64 / r.pred);
                    w.write_record(["scourfield", &r.spec, &r.x.to_string(), &r.q.to_string(), "", &r.n_coprime.to_string(), &fmt_f64(r.pred), &ratio])?;
                }
            }
            Record::Highlight { .. } | Record::Comparison { .. } => {}
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[Record], mut out: W) -> Result<()> {
    let doc = JsonDocument { schema_version: SCHEMA_VERSION, records: records.to_vec() };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

/// Writes `records` to `path` in `format`. An empty list still produces a
/// header (CSV) or an empty record array (JSON).
pub fn export_report(records: &[Record], format: Format, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        Format::Csv => write_csv(records, file),
        Format::Json => write_json(records, file),
    }
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::config::{ExperimentConfig, ScenarioName};
    use crate::lab::scenario::run_scenario;

    fn sample() -> Vec<Record> {
        let cfg = ExperimentConfig { x: vec![5000], q: vec![5], ..Default::default() };
        let mut records = Record::from_scenario(run_scenario(ScenarioName::Distribution, &cfg).unwrap());
        let cfg = ExperimentConfig { x: vec![5000], q: vec![4], ..Default::default() };
        records.extend(Record::from_scenario(run_scenario(ScenarioName::Additive, &cfg).unwrap()));
        let cfg = ExperimentConfig { x: vec![5000], ..Default::default() };
        records.extend(Record::from_scenario(run_scenario(ScenarioName::CounterexampleIi, &cfg).unwrap()));
        records
    }

    #[test]
    fn csv_has_phi_rows_per_distribution() {
        let records = sample();
        let mut buf = Vec::new();
        write_csv(&records[..1], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines.len(), 1 + 4);
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_COLUMNS.join(",")));
    }

    #[test]
    fn json_round_trips() {
        let records = sample();
        let mut buf = Vec::new();
        write_json(&records, &mut buf).unwrap();
        let doc: JsonDocument = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc.schema_version, SCHEMA_VERSION);
        assert_eq!(doc.records, records);
        let kinds: Vec<String> = serde_json::from_slice::<serde_json::Value>(&buf).unwrap()["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["kind"].as_str().unwrap().to_string())
            .collect();
        assert!(kinds.contains(&"distribution".into()) && kinds.contains(&"additive".into()) && kinds.contains(&"highlight".into()));
    }
}
