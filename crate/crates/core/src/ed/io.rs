use std::io::Write;

use super::sector::GapRecord;
use crate::error::Result;
use crate::rg::fmt_f64;

/// Columns `N,M,delta,gap`.
pub fn write_gap_csv<W: Write>(records: &[GapRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "M", "delta", "gap"])?;
    for r in records {
        w.write_record([r.n.to_string(), r.m.to_string(), fmt_f64(r.delta), fmt_f64(r.gap)])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `N,state_index,entropy`.
pub fn write_entropy_csv<W: Write>(n: usize, entropies: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "state_index", "entropy"])?;
    for (i, s) in entropies.iter().enumerate() {
        w.write_record([n.to_string(), i.to_string(), fmt_f64(*s)])?;
    }
    w.flush()?;
    Ok(())
}
