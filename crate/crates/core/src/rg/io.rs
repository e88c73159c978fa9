use std::io::Write;

use serde::Serialize;

use super::continuation::ContinuationPolicy;
use super::scan::GapScan;
use super::spec::RgModelSpec;
use crate::error::Result;

/// Fixed 17-significant-digit float formatting used in every emitted table.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV of the scan grid: `g, min_gap, argmin_seed_a, argmin_seed_b, delta_g_used`.
pub fn write_scan_csv<W: Write>(scan: &GapScan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["g", "min_gap", "argmin_seed_a", "argmin_seed_b", "delta_g_used"])?;
    for s in &scan.steps {
        w.write_record([
            fmt_f64(s.g),
            fmt_f64(s.min_gap),
            s.argmin_seed_a.to_string(),
            s.argmin_seed_b.to_string(),
            fmt_f64(s.delta_g_used),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    spec: &'a RgModelSpec<f64>,
    policy: &'a ContinuationPolicy,
    g_target: f64,
    rejected_steps: usize,
    final_q: Vec<FinalRoot<'a>>,
}

#[derive(Serialize)]
struct FinalRoot<'a> {
    seed: u64,
    q: &'a [f64],
}

/// JSON sidecar with spec, policy and the final charge vector of every seed.
pub fn write_scan_sidecar<W: Write>(scan: &GapScan, out: W) -> Result<()> {
    let side = Sidecar {
        spec: &scan.spec,
        policy: &scan.policy,
        g_target: scan.g_target,
        rejected_steps: scan.rejected_steps,
        final_q: scan
            .final_states
            .iter()
            .map(|s| FinalRoot { seed: s.seed, q: &s.q })
            .collect(),
    };
    serde_json::to_writer_pretty(out, &side)?;
    Ok(())
}
