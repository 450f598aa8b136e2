//! Grouping followed by optional template identification, with stage timing.

use std::num::NonZeroUsize;
use std::thread;
use std::time::{Duration, Instant};

use synlog_core::anonymize::RegexRuleSet;
use synlog_core::grouping::{group_records, GrouperConfig};
use synlog_core::metrics::ParseResult;
use synlog_core::model::{LogGroup, LogRecord};
use synlog_core::synlog::{Refiner, SamplerConfig};

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub grouper: GrouperConfig,
    pub sampler: SamplerConfig,
    pub rules: RegexRuleSet,
    /// When false, groups keep the grouper's own templates.
    pub refine: bool,
    /// Worker cap for the refinement stage.
    pub threads: NonZeroUsize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            grouper: GrouperConfig::default(),
            sampler: SamplerConfig::default(),
            rules: RegexRuleSet::default(),
            refine: true,
            threads: NonZeroUsize::MIN,
        }
    }
}

impl PipelineConfig {
    pub fn refiner(&self) -> Refiner {
        Refiner::new(self.rules.clone(), self.sampler)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub grouping: Duration,
    pub refinement: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.grouping + self.refinement
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub groups: Vec<LogGroup>,
    pub result: ParseResult,
    pub timings: StageTimings,
}

/// Groups `records` in order, then refines every group when enabled.
pub fn run(records: &[LogRecord], cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.sampler.validate()?;
    let start = Instant::now();
    let mut groups = group_records(&cfg.grouper, &cfg.rules, records)?;
    let grouping = start.elapsed();

    let start = Instant::now();
    if cfg.refine {
        refine_parallel(&mut groups, &cfg.refiner(), cfg.threads)?;
    }
    let refinement = start.elapsed();

    let result = ParseResult::from_groups(&groups);
    Ok(PipelineOutput {
        groups,
        result,
        timings: StageTimings {
            grouping,
            refinement,
        },
    })
}

/// Refines groups on up to `threads` workers. Each group's template depends
/// only on the group itself, so the outcome does not depend on the worker
/// count.
pub fn refine_parallel(
    groups: &mut [LogGroup],
    refiner: &Refiner,
    threads: NonZeroUsize,
) -> Result<()> {
    let workers = threads.get().min(groups.len());
    if workers <= 1 {
        refiner.refine_groups(groups)?;
        return Ok(());
    }
    let chunk = groups.len().div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = groups
            .chunks_mut(chunk)
            .map(|part| s.spawn(move || refiner.refine_groups(part)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("refinement worker panicked"))
            .collect::<std::result::Result<Vec<()>, _>>()
    })?;
    Ok(())
}
