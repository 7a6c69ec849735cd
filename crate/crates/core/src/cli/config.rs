//! Link configuration assembled from defaults, a JSON file and flags.

use super::CliError;
use crate::model::{db_to_linear, SystemConfig};
use clap::Args;
use serde::Deserialize;
use std::path::PathBuf;

/// Link flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct LinkArgs {
    /// JSON file with SystemConfig fields; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Nakagami severity of the desired signal.
    #[arg(long = "m-s")]
    pub m_s: Option<u32>,
    /// Nakagami severity of each interferer.
    #[arg(long = "m-i")]
    pub m_i: Option<u32>,
    /// Number of cochannel interferers.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long = "omega-s", conflicts_with = "snr_db")]
    pub omega_s: Option<f64>,
    #[arg(long = "omega-i", conflicts_with_all = ["inr_db", "awgn_only"])]
    pub omega_i: Option<f64>,
    #[arg(long, conflicts_with = "sir_limited")]
    pub sigma2: Option<f64>,
    /// Average SNR per branch in dB; sets Ω_S = 10^(dB/10)·σ².
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Average INR per interferer per branch in dB; sets Ω_I = 10^(dB/10)·σ².
    #[arg(long = "inr-db", allow_hyphen_values = true, conflicts_with = "awgn_only")]
    pub inr_db: Option<f64>,
    /// No noise (σ² = 0).
    #[arg(long = "sir-limited", conflicts_with_all = ["awgn_only", "snr_db", "inr_db"])]
    pub sir_limited: bool,
    /// No interference (Ω_I = 0).
    #[arg(long = "awgn-only")]
    pub awgn_only: bool,
    /// Desired-signal maximum Doppler, Hz.
    #[arg(long)]
    pub fm0: Option<f64>,
    /// Interferer maximum Doppler, Hz; defaults to --fm0.
    #[arg(long)]
    pub fmi: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    #[serde(rename = "m_S", alias = "m_s")]
    m_s: Option<u32>,
    #[serde(rename = "m_I", alias = "m_i")]
    m_i: Option<u32>,
    #[serde(rename = "omega_S", alias = "omega_s")]
    omega_s: Option<f64>,
    #[serde(rename = "omega_I", alias = "omega_i")]
    omega_i: Option<f64>,
    sigma2: Option<f64>,
    n: Option<u32>,
    f_m0: Option<f64>,
    f_mi: Option<f64>,
}

impl LinkArgs {
    /// Effective configuration: flags over file over defaults (m = 1, n = 1,
    /// unit powers, f_m0 = 1 Hz, f_mi = f_m0). Validated.
    pub fn resolve(&self) -> Result<SystemConfig, CliError> {
        let file = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str::<PartialConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("bad config {}: {e}", p.display())))?
            }
            None => PartialConfig::default(),
        };
        let sigma2 = if self.sir_limited { 0.0 } else { self.sigma2.or(file.sigma2).unwrap_or(1.0) };
        let omega_s = match self.snr_db {
            Some(db) => db_to_linear(db) * sigma2,
            None => self.omega_s.or(file.omega_s).unwrap_or(1.0),
        };
        let omega_i = if self.awgn_only {
            0.0
        } else {
            match self.inr_db {
                Some(db) => db_to_linear(db) * sigma2,
                None => self.omega_i.or(file.omega_i).unwrap_or(1.0),
            }
        };
        let f_m0 = self.fm0.or(file.f_m0).unwrap_or(1.0);
        let cfg = SystemConfig {
            m_s: self.m_s.or(file.m_s).unwrap_or(1),
            m_i: self.m_i.or(file.m_i).unwrap_or(1),
            omega_s,
            omega_i,
            sigma2,
            n: self.n.or(file.n).unwrap_or(1),
            f_m0,
            f_mi: self.fmi.or(file.f_mi).unwrap_or(f_m0),
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn precedence() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"m_S": 3, "n": 4, "sigma2": 2.0, "f_m0": 7.0}}"#).unwrap();
        let args = LinkArgs { config: Some(f.path().into()), n: Some(2), snr_db: Some(10.0), ..Default::default() };
        let c = args.resolve().unwrap();
        assert_eq!((c.m_s, c.n, c.sigma2, c.f_m0, c.f_mi), (3, 2, 2.0, 7.0, 7.0));
        assert!((c.omega_s - 20.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_field_is_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"m_S": 1, "gamma": 2}}"#).unwrap();
        let args = LinkArgs { config: Some(f.path().into()), ..Default::default() };
        assert!(matches!(args.resolve(), Err(CliError::Usage(_))));
    }

    #[test]
    fn db_round_trip() {
        for db in [-30.0, -3.0, 0.0, 7.5, 40.0] {
            let c = LinkArgs { snr_db: Some(db), inr_db: Some(db / 2.0), ..Default::default() }.resolve().unwrap();
            assert!((crate::model::linear_to_db(c.omega_s) - db).abs() < 1e-12);
            assert!((crate::model::linear_to_db(c.omega_i) - db / 2.0).abs() < 1e-12);
        }
    }
}
