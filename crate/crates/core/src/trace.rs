//! CSV export of iteration traces.

use std::io::{self, Write};

use crate::solver::IterationRecord;

pub const TRACE_HEADER: &str = "k,f,grad_norm,alpha,backtracks,restarted,beta,gTd";

/// Writes one row per record under [`TRACE_HEADER`].
///
/// With `running_min` a trailing `min_grad_norm` column holds the smallest
/// gradient norm seen up to each row.
pub fn write_trace_csv<W: Write>(trace: &[IterationRecord], mut w: W, running_min: bool) -> io::Result<()> {
    write!(w, "{TRACE_HEADER}")?;
    if running_min {
        write!(w, ",min_grad_norm")?;
    }
    writeln!(w)?;
    let mut best = f64::INFINITY;
    for r in trace {
        write!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.k,
            r.f,
            r.grad_norm,
            r.alpha,
            r.backtracks,
            u8::from(r.restarted),
            r.beta,
            r.slope
        )?;
        if running_min {
            best = best.min(r.grad_norm);
            write!(w, ",{best}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
