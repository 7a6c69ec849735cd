//! Text output: shortest round-trip numbers and the provenance header.

use super::CliError;
use crate::model::{derive, SystemConfig};
use crate::montecarlo::SimulationConfig;
use std::io::Write;

/// Shortest representation that parses back to the same f64; empty for NaN.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// Effective configuration and derived parameters, then `key=value` fields
/// or a CSV body.
pub struct Report {
    comments: Vec<String>,
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(cfg: &SystemConfig) -> Result<Report, CliError> {
        let d = derive(cfg).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Report {
            comments: vec![
                format!("config={}", serde_json::to_string(cfg).expect("config serializes")),
                format!("regime={} mu={} c={}", d.regime, fmt_f64(d.mu), fmt_f64(d.c)),
            ],
            fields: vec![
                ("regime".into(), d.regime.to_string()),
                ("mu".into(), fmt_f64(d.mu)),
                ("c".into(), fmt_f64(d.c)),
            ],
        })
    }

    pub fn comment(&mut self, line: &str) {
        self.comments.push(line.to_string());
    }

    pub fn simulation(&mut self, sim: &SimulationConfig) {
        self.comment(&format!("simulation={}", serde_json::to_string(sim).expect("simulation serializes")));
    }

    pub fn field(&mut self, key: &str, value: String) {
        self.fields.push((key.to_string(), value));
    }

    /// `# `-prefixed comment lines.
    pub fn header(&self) -> String {
        self.comments.iter().map(|c| format!("# {c}\n")).collect()
    }

    pub fn write_record(&self, out: &mut dyn Write) -> std::io::Result<()> {
        write!(out, "{}", self.header())?;
        for (k, v) in &self.fields {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_format() {
        for v in [0.1, 1.0, 1e-300, 123456.789, 2.0f64.sqrt(), 5e-324] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::NAN), "");
    }
}
