//! Command-line interface.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use synlog_core::anonymize::RegexRuleSet;
use synlog_core::grouping::{Backend, GrouperConfig};
use synlog_core::metrics::{evaluate, GroundTruth, ParseResult};
use synlog_core::synlog::SamplerConfig;
use synlog_core::variables::RegexCoverage;

use crate::bench::bench;
use crate::dataset::{write_structured_output, StructuredDataset};
use crate::error::{Error, Result};
use crate::pipeline::{run, PipelineConfig};
use crate::report::{write_regex_stats, Evaluation};
use crate::synth;

#[derive(Debug, Parser)]
#[command(
    name = "synlog",
    version,
    about = "Syntax-based log parsing with template refinement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a log and write structured and template CSVs.
    Parse(CommonArgs),
    /// Score parsed templates against EventTemplate ground truth.
    Evaluate(CommonArgs),
    /// Time the grouping and refinement stages.
    Bench(BenchArgs),
    /// Classify ground-truth variables by anonymization rule.
    RegexStats(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Structured CSV (`.csv`) or raw log file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub parser: ParserArgs,
}

#[derive(Debug, Args)]
pub struct ParserArgs {
    /// Grouping backend.
    #[arg(long, default_value = "drain", value_parser = parse_backend)]
    pub grouper: Backend,
    /// Prefix-tree depth (drain only).
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Similarity threshold (drain only).
    #[arg(long, default_value_t = 0.4)]
    pub st: f64,
    /// Maximum children per tree node (drain only).
    #[arg(long, default_value_t = 100)]
    pub max_children: usize,
    /// Representatives sampled per group.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Sampling seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Anonymization rules file, one `category<TAB>pattern` per line.
    #[arg(long, env = "SYNLOG_RULES")]
    pub rules: Option<PathBuf>,
    /// Keep the grouper's templates instead of refining them.
    #[arg(long)]
    pub no_refine: bool,
    /// Worker threads for refinement.
    #[arg(long, default_value = "1")]
    pub threads: NonZeroUsize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Runs per measurement; the median is reported.
    #[arg(long, default_value = "3")]
    pub repeat: NonZeroUsize,
    /// Benchmark a generated corpus of this many lines instead of --input.
    #[arg(long, conflicts_with = "input")]
    pub synthetic: Option<usize>,
}

fn parse_backend(s: &str) -> std::result::Result<Backend, String> {
    s.parse().map_err(|e: synlog_core::Error| e.to_string())
}

impl ParserArgs {
    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let grouper = GrouperConfig {
            backend: self.grouper,
            tree_depth: self.depth,
            similarity_threshold: self.st,
            max_children: self.max_children,
        };
        grouper.validate()?;
        let sampler = SamplerConfig::new(self.k, self.seed)?;
        let rules = match &self.rules {
            Some(path) => load_rules(path)?,
            None => RegexRuleSet::default(),
        };
        Ok(PipelineConfig {
            grouper,
            sampler,
            rules,
            refine: !self.no_refine,
            threads: self.threads,
        })
    }
}

fn load_rules(path: &Path) -> Result<RegexRuleSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RegexRuleSet::from_rules_text(&text).map_err(|e| Error::format(path, e.to_string()))
}

impl CommonArgs {
    fn dataset(&self) -> Result<StructuredDataset> {
        let path = self
            .input
            .as_deref()
            .ok_or_else(|| Error::Usage("--input is required".into()))?;
        StructuredDataset::load(path)
    }
}

fn require_truth(data: &StructuredDataset) -> Result<&GroundTruth> {
    data.truth
        .as_ref()
        .ok_or_else(|| Error::Usage(format!("{}: no EventTemplate ground truth", data.name)))
}

fn baseline_result(groups: &[synlog_core::model::LogGroup]) -> ParseResult {
    groups
        .iter()
        .flat_map(|g| {
            let t = g.draft.to_string();
            g.member_ids.iter().map(move |&id| (id, t.clone()))
        })
        .collect()
}

fn cmd_parse(args: &CommonArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.parser.pipeline_config()?;
    let data = args.dataset()?;
    let result = run(&data.records, &cfg)?;
    let files = write_structured_output(&data, &result.result, &args.out)?;
    emit(
        out,
        &format!(
            "{} records, {} groups\n{}\n{}\n",
            data.len(),
            result.groups.len(),
            files.structured.display(),
            files.templates.display()
        ),
    )
}

fn cmd_evaluate(args: &CommonArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.parser.pipeline_config()?;
    let data = args.dataset()?;
    let truth = require_truth(&data)?;
    let output = run(&data.records, &cfg)?;
    let baseline = evaluate(&baseline_result(&output.groups), truth)?;
    let refined = if cfg.refine {
        Some(evaluate(&output.result, truth)?)
    } else {
        None
    };
    let eval = Evaluation { baseline, refined };
    eval.write(&args.out)?;
    write_structured_output(&data, &output.result, &args.out)?;
    emit(out, &eval.to_key_value())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.common.parser.pipeline_config()?;
    let data = match args.synthetic {
        Some(lines) => synth::generate(lines, args.common.parser.seed),
        None => args.common.dataset()?,
    };
    let (report, _) = bench(&data.records, &cfg, args.repeat)?;
    report.write(&args.common.out)?;
    emit(
        out,
        &format!(
            "{}\n{}\n",
            crate::report::BenchReport::CSV_HEADER,
            report.csv_row()
        ),
    )
}

fn cmd_regex_stats(args: &CommonArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.parser.pipeline_config()?;
    let data = args.dataset()?;
    let truth = require_truth(&data)?;
    let contents = data.records.iter().map(|r| (r.line_id, r.content.as_str()));
    let (coverage, _) = RegexCoverage::tally(contents, truth, &cfg.rules);
    write_regex_stats(&coverage, &args.out)?;
    emit(out, &crate::report::regex_stats_csv(&coverage))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

/// Executes an already-parsed command, writing summaries to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Parse(a) => cmd_parse(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::RegexStats(a) => cmd_regex_stats(a, out),
    }
}

/// Parses `args`, runs the command and maps failures to exit codes with a
/// one-line diagnostic on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("usage error");
            eprintln!("synlog: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("synlog: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}
