//! CSV emission for aggregated traces.

use std::path::Path;

use super::{AggregateTrace, HarnessError};

pub const CSV_HEADER: [&str; 7] = ["scenario", "policy", "order", "t", "mean_regret", "std_regret", "ratio_to_lb"];

fn write_rows<W: std::io::Write>(trace: &AggregateTrace, sink: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for p in &trace.policies {
        let order = p.order.map(|o| o.to_string()).unwrap_or_default();
        for i in 0..p.checkpoints.len() {
            // `Display` for f64 prints the shortest string that round-trips.
            let row = [
                trace.scenario.clone(),
                p.label.clone(),
                order.clone(),
                p.checkpoints[i].to_string(),
                p.mean[i].to_string(),
                p.std[i].to_string(),
                p.ratio[i].map(|r| r.to_string()).unwrap_or_default(),
            ];
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows grouped by policy in configuration order, checkpoints ascending.
pub fn write_csv(trace: &AggregateTrace, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path)?;
    write_rows(trace, std::io::BufWriter::new(file))
}

pub fn to_csv_string(trace: &AggregateTrace) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_rows(trace, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}
