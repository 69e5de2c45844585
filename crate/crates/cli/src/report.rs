use std::io::Write;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Settings;
use crate::error::CliError;

/// Keys holding timing data; ignored when comparing reports.
const TIMING_KEYS: [&str; 2] = ["timestamp", "wall_time_s"];

/// Flat table for CSV export.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = S>, S: ToString>(&mut self, row: I) {
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub args: Value,
    pub config: Settings,
    pub pass: bool,
    pub result: Value,
    pub table: Table,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub wall_time_s: f64,
}

/// What a command hands back before timing is attached.
pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub table: Table,
}

impl Report {
    pub fn new(command: &str, args: Value, config: Settings, outcome: Outcome, elapsed: Duration) -> Self {
        Report {
            command: command.to_string(),
            args,
            config,
            pass: outcome.pass,
            result: outcome.result,
            table: outcome.table,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            wall_time_s: elapsed.as_secs_f64(),
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    /// The report as JSON with every timing field removed.
    pub fn numeric_view(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        strip_timing(&mut v);
        v
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.header)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for key in TIMING_KEYS {
                map.remove(key);
            }
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
