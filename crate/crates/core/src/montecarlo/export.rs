//! Trace files: a little-endian binary column format and CSV.
//!
//! Binary layout: `FTRC`, version (u32), sample count (u64), channel count
//! (u32), time step (f64), then each channel as `count` f64 values. Channels
//! are x₀₁, x₀₂, w₁₁, w₁₂, …, w_n1, w_n2, g, selected branch.

use super::{FadingTrace, SimError};
use std::io::{Read, Write};

pub const TRACE_MAGIC: &[u8; 4] = b"FTRC";
pub const TRACE_VERSION: u32 = 1;

fn channels(trace: &FadingTrace) -> Vec<Vec<f64>> {
    let mut c = vec![trace.desired[0].clone(), trace.desired[1].clone()];
    for w in &trace.interferers {
        c.push(w[0].clone());
        c.push(w[1].clone());
    }
    c.push(trace.selected_ratio.clone());
    c.push(trace.selected_branch.iter().map(|&b| b as f64).collect());
    c
}

pub fn write_binary<W: Write>(trace: &FadingTrace, mut out: W) -> Result<(), SimError> {
    let ch = channels(trace);
    out.write_all(TRACE_MAGIC)?;
    out.write_all(&TRACE_VERSION.to_le_bytes())?;
    out.write_all(&(trace.len() as u64).to_le_bytes())?;
    out.write_all(&(ch.len() as u32).to_le_bytes())?;
    out.write_all(&trace.time_step.to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * trace.len());
    for c in &ch {
        buf.clear();
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<FadingTrace, SimError> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != TRACE_MAGIC {
        return Err(SimError::Format("missing FTRC magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != TRACE_VERSION {
        return Err(SimError::Format(format!("unsupported version {version}")));
    }
    input.read_exact(&mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;
    input.read_exact(&mut b4)?;
    let nch = u32::from_le_bytes(b4) as usize;
    if nch < 4 || nch % 2 != 0 {
        return Err(SimError::Format(format!("bad channel count {nch}")));
    }
    input.read_exact(&mut b8)?;
    let time_step = f64::from_le_bytes(b8);
    let mut raw = vec![0u8; 8 * count];
    let mut ch = Vec::with_capacity(nch);
    for _ in 0..nch {
        input.read_exact(&mut raw)?;
        ch.push(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect::<Vec<f64>>());
    }
    let branch = ch.pop().expect("channels").into_iter().map(|v| v as u8).collect();
    let selected_ratio = ch.pop().expect("channels");
    let mut it = ch.into_iter();
    let desired = [it.next().expect("x01"), it.next().expect("x02")];
    let mut interferers = Vec::new();
    while let (Some(a), Some(b)) = (it.next(), it.next()) {
        interferers.push([a, b]);
    }
    Ok(FadingTrace { time_step, desired, interferers, selected_ratio, selected_branch: branch })
}

/// One row per sample: t, x01, x02, w1_1, w1_2, …, g, branch.
pub fn write_csv<W: Write>(trace: &FadingTrace, mut out: W) -> Result<(), SimError> {
    let mut header = vec!["t".to_string(), "x01".into(), "x02".into()];
    for i in 1..=trace.interferers.len() {
        header.push(format!("w{i}_1"));
        header.push(format!("w{i}_2"));
    }
    header.push("g".into());
    header.push("branch".into());
    writeln!(out, "{}", header.join(","))?;
    let mut line = String::new();
    for t in 0..trace.len() {
        use std::fmt::Write as _;
        line.clear();
        let _ = write!(line, "{},{},{}", t as f64 * trace.time_step, trace.desired[0][t], trace.desired[1][t]);
        for w in &trace.interferers {
            let _ = write!(line, ",{},{}", w[0][t], w[1][t]);
        }
        let _ = write!(line, ",{},{}", trace.selected_ratio[t], trace.selected_branch[t]);
        writeln!(out, "{line}")?;
    }
    Ok(())
}
