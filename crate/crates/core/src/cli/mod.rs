//! Command-line front end: `eval`, `sweep`, `simulate` and `validate`.
//!
//! Exit codes: 0 success, 1 validation disagreement, 2 bad input,
//! 3 runtime or simulation failure, 4 too little data to judge.

mod config;
mod output;

pub use config::LinkArgs;

use crate::analytic::{
    afd, level_crossing_rate, log_grid, outage_probability, sweep, sweep_interferers, AfdFlag, AnalyticError, Axis,
    Normalization, StatCurve, Statistic,
};
use crate::model::{derive, SystemConfig};
use crate::montecarlo::{
    compare, simulate, validation_thresholds, write_binary, write_csv, SimError, SimulationConfig,
};
use crate::specfun::QuadratureSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{fmt_f64, Report};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Insufficient(String),
    #[error("{0}")]
    Disagreement(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Disagreement(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Insufficient(_) => 4,
        }
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Model(_) | AnalyticError::Domain(_) | AnalyticError::Regime { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Invalid(_) | SimError::Model(_) => CliError::Usage(e.to_string()),
            SimError::Empty(_) => CliError::Insufficient(e.to_string()),
            SimError::Analytic(a) => a.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "divstats", version, about = "Outage, level crossing rate and fade duration of dual selection combining")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Statistics at one threshold.
    Eval(EvalArgs),
    /// CSV curve over a threshold grid or interferer counts.
    Sweep(SweepArgs),
    /// Generate a fading trace (CSV if --out ends in .csv, binary otherwise).
    Simulate(SimulateArgs),
    /// Compare analytic statistics with a simulated trace.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    /// Threshold relative to μ (or to Ω_S/σ² without interference).
    #[arg(long = "z-over-mu")]
    pub z_over_mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    #[value(name = "z_over_mu")]
    ZOverMu,
    #[value(name = "n")]
    N,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    #[arg(long, value_enum, default_value = "z_over_mu")]
    pub axis: SweepAxis,
    /// lo:hi:points[:log]; defaults to 1e-3:1e3:121:log for z_over_mu and 1:8:8 for n.
    #[arg(long)]
    pub grid: Option<String>,
    /// Fixed threshold for the n axis.
    #[arg(long = "z-over-mu", default_value_t = 1.0)]
    pub z_over_mu: f64,
    /// CSV path (stdout if absent); diagnostics go to PATH.diagnostics.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Seconds measured (default 500/f_m0).
    #[arg(long)]
    pub duration: Option<f64>,
    /// Sampling rate in Hz (default 64·f_m0).
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub sinusoids: usize,
    #[arg(long, env = "DIVSTATS_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Seconds discarded first (default 5/f_m0).
    #[arg(long)]
    pub warmup: Option<f64>,
}

impl SimArgs {
    fn resolve(&self, cfg: &SystemConfig) -> Result<SimulationConfig, CliError> {
        let d = SimulationConfig::for_link(cfg, 500.0 / cfg.f_m0, self.seed);
        let sim = SimulationConfig {
            sample_rate: self.rate.unwrap_or(d.sample_rate),
            duration: self.duration.unwrap_or(d.duration),
            num_sinusoids: self.sinusoids,
            seed: self.seed,
            warmup: self.warmup.unwrap_or(d.warmup),
        };
        sim.validate(cfg)?;
        Ok(sim)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// z/μ grid lo:hi:points[:log]; defaults to 21 points over 1e-2..1e2.
    #[arg(long)]
    pub grid: Option<String>,
    /// Report path (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `lo:hi:points[:log]`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad grid '{s}', expected lo:hi:points[:log]"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) || (parts.len() == 4 && parts[3] != "log") {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let points: usize = parts[2].parse().map_err(|_| bad())?;
    if parts.len() == 4 {
        return Ok(log_grid(lo, hi, points)?);
    }
    if points == 1 && lo == hi {
        return Ok(vec![lo]);
    }
    if !(lo.is_finite() && hi > lo && hi.is_finite()) || points < 2 {
        return Err(bad());
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut g: Vec<f64> = (0..points).map(|k| lo + k as f64 * step).collect();
    g[points - 1] = hi;
    Ok(g)
}

fn threshold_scale(cfg: &SystemConfig) -> Result<f64, CliError> {
    Ok(derive(cfg).map_err(|e| CliError::Usage(e.to_string()))?.threshold_scale(cfg))
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.link.resolve()?;
    if !(a.z_over_mu >= 0.0 && a.z_over_mu.is_finite()) {
        return Err(CliError::Usage(format!("--z-over-mu must be finite and nonnegative, got {}", a.z_over_mu)));
    }
    let z = a.z_over_mu * threshold_scale(&cfg)?;
    let spec = QuadratureSpec::default();
    let op = outage_probability(z, &cfg, &spec)?;
    let lcr = level_crossing_rate(z, &cfg)?;
    let t = afd(z, &cfg, &spec)?;
    let mut r = Report::new(&cfg)?;
    r.field("z", fmt_f64(z));
    r.field("z_over_mu", fmt_f64(a.z_over_mu));
    r.field("op", fmt_f64(op));
    r.field("lcr", fmt_f64(lcr));
    r.field("lcr_norm", fmt_f64(lcr / cfg.f_m0));
    let (v, vn) = match t.flag {
        AfdFlag::Unbounded => ("inf".to_string(), "inf".to_string()),
        _ => (fmt_f64(t.value), fmt_f64(t.value * cfg.f_m0)),
    };
    r.field("afd", v);
    r.field("afd_norm", vn);
    r.field("afd_flag", format!("{:?}", t.flag));
    r.write_record(out)?;
    Ok(())
}

fn write_text(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.link.resolve()?;
    let spec = QuadratureSpec::default();
    let norm = Normalization::DopplerNormalized;
    let stats = [Statistic::OutageProb, Statistic::Lcr, Statistic::Afd];
    let (label, xs, curves): (&str, Vec<f64>, Vec<StatCurve>) = match a.axis {
        SweepAxis::ZOverMu => {
            let xs = parse_grid(a.grid.as_deref().unwrap_or("1e-3:1e3:121:log"))?;
            let scale = threshold_scale(&cfg)?;
            let zs: Vec<f64> = xs.iter().map(|x| x * scale).collect();
            let curves =
                stats.iter().map(|&s| sweep(&cfg, &zs, Axis::Sinr, s, norm, &spec)).collect::<Result<_, _>>()?;
            ("z_over_mu", xs, curves)
        }
        SweepAxis::N => {
            let xs = parse_grid(a.grid.as_deref().unwrap_or("1:8:8"))?;
            if xs.iter().any(|x| !(*x >= 1.0 && x.fract() == 0.0 && *x <= u32::MAX as f64)) {
                return Err(CliError::Usage("the n grid must hold positive integers".into()));
            }
            let ns: Vec<u32> = xs.iter().map(|&x| x as u32).collect();
            let z = a.z_over_mu * threshold_scale(&cfg)?;
            let curves = stats
                .iter()
                .map(|&s| sweep_interferers(&cfg, &ns, z, s, norm, &spec))
                .collect::<Result<_, _>>()?;
            ("n", xs, curves)
        }
    };
    let mut r = Report::new(&cfg)?;
    if a.axis == SweepAxis::N {
        r.comment(&format!("z_over_mu={}", fmt_f64(a.z_over_mu)));
    }
    let mut text = r.header();
    text.push_str(&format!("{label},op,lcr_norm,afd_norm\n"));
    for (i, x) in xs.iter().enumerate() {
        let cell = |c: &StatCurve| c.values[i].map(fmt_f64).unwrap_or_default();
        text.push_str(&format!("{},{},{},{}\n", fmt_f64(*x), cell(&curves[0]), cell(&curves[1]), cell(&curves[2])));
    }
    match curves[1].argmax() {
        Some((i, _)) => {
            let peak = fmt_f64(curves[1].values[i].unwrap_or(f64::NAN));
            match a.axis {
                SweepAxis::ZOverMu => text.push_str(&format!("# th0_z_over_mu={} lcr_norm_max={peak}\n", fmt_f64(xs[i]))),
                SweepAxis::N => text.push_str(&format!("# lcr_norm_max={peak} at n={}\n", fmt_f64(xs[i]))),
            }
        }
        None => text.push_str("# th0 unavailable\n"),
    }
    write_text(&a.out, &text, out)?;

    let gaps: Vec<_> = curves.iter().flat_map(|c| c.gaps.iter().map(move |g| (c.statistic, g))).collect();
    let diag = serde_json::json!({
        "gaps": gaps.iter().map(|(s, g)| serde_json::json!({
            "statistic": s, "index": g.index, "abscissa": xs[g.index], "message": g.message,
        })).collect::<Vec<_>>(),
    });
    match &a.out {
        Some(p) => {
            let mut side = p.clone().into_os_string();
            side.push(".diagnostics.json");
            std::fs::write(&side, serde_json::to_string_pretty(&diag).expect("json") + "\n")?;
        }
        None if !gaps.is_empty() => writeln!(err, "{}", serde_json::to_string_pretty(&diag).expect("json"))?,
        None => {}
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.link.resolve()?;
    let sim = a.sim.resolve(&cfg)?;
    let trace = simulate(&cfg, &sim)?;
    let file = std::fs::File::create(&a.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", a.out.display())))?;
    let w = std::io::BufWriter::new(file);
    if a.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_csv(&trace, w)?;
    } else {
        write_binary(&trace, w)?;
    }
    let mut r = Report::new(&cfg)?;
    r.simulation(&sim);
    r.field("samples", trace.len().to_string());
    r.field("time_step", fmt_f64(trace.time_step));
    r.field("path", a.out.display().to_string());
    r.write_record(out)?;
    Ok(())
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.link.resolve()?;
    let sim = a.sim.resolve(&cfg)?;
    let scale = threshold_scale(&cfg)?;
    let zs = match &a.grid {
        Some(g) => parse_grid(g)?.into_iter().map(|x| x * scale).collect(),
        None => validation_thresholds(&cfg)?,
    };
    let report = compare(&cfg, &sim, &zs, &QuadratureSpec::default())?;
    let mut r = Report::new(&cfg)?;
    r.simulation(&sim);
    r.comment(&format!("samples={}", report.samples));
    let mut text = r.header();
    text.push_str(
        "z_over_mu,op,op_hat,op_se,op_verdict,lcr,lcr_hat,lcr_se,lcr_verdict,afd,afd_hat,afd_se,afd_verdict,upcrossings,switching_upcrossings\n",
    );
    for (row, z) in report.rows.iter().zip(&zs) {
        let c = |c: &crate::montecarlo::Comparison| {
            format!("{},{},{},{:?}", fmt_f64(c.analytic), fmt_f64(c.empirical), fmt_f64(c.stderr), c.verdict)
        };
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(z / scale),
            c(&row.outage),
            c(&row.lcr),
            c(&row.afd),
            row.empirical.upcrossings,
            row.empirical.switching_upcrossings
        ));
    }
    let verdict = if report.insufficient() {
        "insufficient"
    } else if report.all_pass() {
        "pass"
    } else {
        "fail"
    };
    text.push_str(&format!("# overall={verdict}\n"));
    write_text(&a.out, &text, out)?;
    match verdict {
        "pass" => Ok(()),
        "insufficient" => Err(CliError::Insufficient(format!(
            "too few samples: a compared threshold has fewer than {} upcrossings, or none lies in the outage window",
            crate::montecarlo::MIN_UPCROSSINGS
        ))),
        _ => Err(CliError::Disagreement("analytic and simulated statistics disagree".into())),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Results go to `out`, messages to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(err, "error: --jobs must be at least 1");
            return 2;
        }
        builder = builder.num_threads(j);
    }
    let result = match builder.build() {
        Ok(pool) => {
            let (r, o, e) = pool.install(|| {
                let (mut o, mut e) = (Vec::new(), Vec::new());
                let r = dispatch(&cli, &mut o, &mut e);
                (r, o, e)
            });
            let _ = out.write_all(&o);
            let _ = err.write_all(&e);
            r
        }
        Err(e) => Err(CliError::Runtime(e.to_string())),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1:8:8").unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let g = parse_grid("1e-2:1e2:5:log").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!((g[0], g[4]), (1e-2, 1e2));
        assert!((g[2] - 1.0).abs() < 1e-15);
        for bad in ["1:2", "2:1:5", "1:2:3:lin", "a:2:3", "0:1:3:log", "1:2:1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
