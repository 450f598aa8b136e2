//! Repeated in-memory pipeline runs with median stage timings.

use std::num::NonZeroUsize;

use synlog_core::model::LogRecord;

use crate::error::Result;
use crate::pipeline::{run, PipelineConfig, PipelineOutput};
use crate::report::{median, BenchReport};

/// Runs the pipeline `repeat` times over already-loaded records.
pub fn bench(
    records: &[LogRecord],
    cfg: &PipelineConfig,
    repeat: NonZeroUsize,
) -> Result<(BenchReport, PipelineOutput)> {
    let mut grouping = Vec::with_capacity(repeat.get());
    let mut refinement = Vec::with_capacity(repeat.get());
    let mut total = Vec::with_capacity(repeat.get());
    let mut last = None;
    for _ in 0..repeat.get() {
        let out = run(records, cfg)?;
        grouping.push(out.timings.grouping);
        refinement.push(out.timings.refinement);
        total.push(out.timings.total());
        last = Some(out);
    }
    let last = last.expect("repeat is non-zero");
    let report = BenchReport {
        records: records.len(),
        groups: last.groups.len(),
        repeat: repeat.get(),
        threads: cfg.threads.get(),
        grouping: median(&mut grouping),
        refinement: median(&mut refinement),
        total: median(&mut total),
    };
    Ok((report, last))
}
