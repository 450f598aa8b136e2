//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::num::NonZeroUsize;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synlog::bench::bench;
use synlog::dataset::{load_structured_csv, StructuredDataset};
use synlog::pipeline::{run, PipelineConfig};
use synlog::synth;
use synlog_core::anonymize::{RegexCategory, RegexRuleSet};
use synlog_core::metrics::{evaluate, GroundTruth, MetricsReport, ParseResult};
use synlog_core::model::{tokenize, LineId, LogGroup, LogRecord, Template, MARKER};
use synlog_core::synlog::{sample_representatives, SamplerConfig};
use synlog_core::variables::{extract_variables, Extraction, RegexCoverage};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(took)
}

fn four(r: &MetricsReport) -> [f64; 4] {
    [r.ga, r.pa, r.fga, r.fta]
}

fn broadcast_pair() -> Outcome {
    let start = Instant::now();
    let dataset = StructuredDataset::load(&data("spark_mini.log")).map_err(|e| e.to_string())?;
    let out = run(&dataset.records, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    ensure!(
        out.groups.len() == 1,
        "expected one group, got {}",
        out.groups.len()
    );
    let template = out.groups[0].template.clone().ok_or("no template")?;
    let want = "Reading broadcast variable <*> took <*> ms";
    ensure!(template.to_string() == want, "got `{template}`");
    let values = extract_variables(&dataset.records[0].content, &template);
    ensure!(
        values == Extraction::Aligned(vec!["11".into(), "15".into()]),
        "extracted {values:?}"
    );
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("`{want}` with 11, 15 in {took:?}"))
}

/// Brute-force reference: compares message sets directly.
fn oracle(pred: &BTreeMap<LineId, String>, truth: &BTreeMap<LineId, String>) -> [f64; 4] {
    let members = |m: &BTreeMap<LineId, String>, t: &str| -> BTreeSet<LineId> {
        m.iter()
            .filter(|(_, x)| x.as_str() == t)
            .map(|(&i, _)| i)
            .collect()
    };
    let n = pred.len();
    let grouped = pred
        .iter()
        .filter(|(id, t)| members(pred, t) == members(truth, &truth[id]))
        .count();
    let parsed = pred.iter().filter(|(id, t)| truth[id] == **t).count();
    let ptemps: BTreeSet<&String> = pred.values().collect();
    let ttemps: BTreeSet<&String> = truth.values().collect();
    let (mut cg, mut ct) = (0usize, 0usize);
    for p in &ptemps {
        let set = members(pred, p);
        for t in &ttemps {
            if members(truth, t) == set {
                cg += 1;
                if p == t {
                    ct += 1;
                }
            }
        }
    }
    let div = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let denom = ptemps.len() + ttemps.len();
    [
        div(grouped, n),
        div(parsed, n),
        div(2 * cg, denom),
        div(2 * ct, denom),
    ]
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let truth_pool = ["a <*>", "b", "c <*> d", "e f", "<*> g"];
    let extra_pool = ["a x", "b <*>", "<*>", "c <*>", "h"];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for instance in 0..1000 {
        let n = rng.random_range(1..=20);
        let templates = rng.random_range(1..=5);
        let clusters = rng.random_range(1..=n);
        let labels: Vec<&str> = (0..clusters)
            .map(|_| {
                if rng.random_bool(0.6) {
                    truth_pool[rng.random_range(0..templates)]
                } else {
                    *extra_pool.choose(&mut rng).unwrap()
                }
            })
            .collect();
        let mut truth = BTreeMap::new();
        let mut pred = BTreeMap::new();
        for i in 0..n {
            let id = rng.random_range(1..1_000_000u64) * 32 + i as u64;
            truth.insert(id, truth_pool[rng.random_range(0..templates)].to_string());
            pred.insert(id, labels[rng.random_range(0..clusters)].to_string());
        }
        let p: ParseResult = pred.iter().map(|(&i, t)| (i, t.clone())).collect();
        let t: GroundTruth = truth.iter().map(|(&i, t)| (i, t.clone())).collect();
        let got = four(&evaluate(&p, &t).map_err(|e| e.to_string())?);
        let want = oracle(&pred, &truth);
        ensure!(
            got == want,
            "instance {instance}: {got:?} != oracle {want:?}"
        );
    }
    let took = within(Duration::from_secs(10), start)?;
    Ok(format!("1000 instances in {took:?}"))
}

fn hand_fixture() -> Outcome {
    let truth: GroundTruth = [(1, "A"), (2, "A"), (3, "B"), (4, "C")]
        .into_iter()
        .map(|(i, t)| (i, t.to_string()))
        .collect();
    let pred: ParseResult = [(1, "X"), (2, "X"), (3, "X"), (4, "C")]
        .into_iter()
        .map(|(i, t)| (i, t.to_string()))
        .collect();
    let r = evaluate(&pred, &truth).map_err(|e| e.to_string())?;
    ensure!(r.ga == 0.25, "GA {}", r.ga);
    ensure!(r.pga == 0.5, "PGA {}", r.pga);
    ensure!(r.rga == 1.0 / 3.0, "RGA {}", r.rga);
    ensure!(r.fga == 0.4, "FGA {}", r.fga);
    Ok("GA=0.25 PGA=0.5 RGA=1/3 FGA=0.4".into())
}

const STEMS: &[&str] = &[
    "open file <*> ok",
    "close socket <*> now",
    "user <*> logged in from <*>",
    "job <*> finished",
    "disk <*> at <*> percent",
    "request <*> took <*>",
    "cache <*> evicted",
    "Deleting block <*> file <*>",
    "ping",
    "state changed to <*>",
];

fn value(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..6) {
        0 => rng.random_range(0..10_000).to_string(),
        1 => format!(
            "10.0.{}.{}",
            rng.random_range(0..256),
            rng.random_range(0..256)
        ),
        2 => format!("/tmp/f{}", rng.random_range(0..50)),
        3 => format!("{}ms", rng.random_range(1..999)),
        4 => ["idle", "busy", "down", "up"]
            .choose(rng)
            .unwrap()
            .to_string(),
        _ => format!("blk_{}", rng.random_range(0..1_000_000)),
    }
}

fn random_corpus(rng: &mut ChaCha8Rng) -> Vec<LogRecord> {
    let count = rng.random_range(1..6);
    let stems: Vec<&str> = STEMS.choose_multiple(rng, count).copied().collect();
    (0..rng.random_range(1..60))
        .map(|i| {
            let stem = stems.choose(rng).unwrap();
            let line: Vec<String> = stem
                .split(' ')
                .map(|t| {
                    if t == MARKER {
                        value(rng)
                    } else {
                        t.to_string()
                    }
                })
                .collect();
            LogRecord::new(i as LineId + 1, line.join(" ")).unwrap()
        })
        .collect()
}

fn is_subsequence(needle: &[&str], hay: &[String]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

fn pipeline_invariants() -> Outcome {
    let rules = RegexRuleSet::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0usize;
    let mut corpora = 0usize;
    while checked < 500 {
        corpora += 1;
        let records = random_corpus(&mut rng);
        let cfg = PipelineConfig {
            sampler: SamplerConfig::new(rng.random_range(2..5), rng.random()).unwrap(),
            ..Default::default()
        };
        let baseline = run(
            &records,
            &PipelineConfig {
                refine: false,
                ..cfg.clone()
            },
        )
        .map_err(|e| e.to_string())?;
        let out = run(&records, &cfg).map_err(|e| e.to_string())?;
        let partition = |g: &[LogGroup]| g.iter().map(|g| g.member_ids.clone()).collect::<Vec<_>>();
        ensure!(
            partition(&baseline.groups) == partition(&out.groups),
            "membership changed"
        );

        let content: BTreeMap<LineId, &str> = records
            .iter()
            .map(|r| (r.line_id, r.content.as_str()))
            .collect();
        let anon = |text: &str| -> Vec<String> {
            rules
                .anonymize(&tokenize(text).unwrap())
                .iter()
                .map(|t| t.text().to_string())
                .collect()
        };
        for g in &out.groups {
            let template = g
                .template
                .as_ref()
                .ok_or("group without template")?
                .to_string();
            let words: Vec<&str> = template.split(' ').collect();
            ensure!(
                !words.windows(2).any(|w| w[0] == MARKER && w[1] == MARKER),
                "adjacent markers in `{template}`"
            );
            let constants: Vec<&str> = words.iter().copied().filter(|w| *w != MARKER).collect();
            for id in &g.member_ids {
                let tokens = anon(content[id]);
                for c in &constants {
                    ensure!(tokens.iter().any(|t| t == c), "`{c}` absent from line {id}");
                }
            }
            for rep in sample_representatives(g, &cfg.sampler) {
                ensure!(
                    is_subsequence(&constants, &anon(rep)),
                    "`{template}` not a subsequence of `{rep}`"
                );
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} groups from {corpora} corpora"))
}

fn synthetic14() -> Result<StructuredDataset, String> {
    load_structured_csv(&data("synthetic14.csv")).map_err(|e| e.to_string())
}

fn k_sensitivity() -> Outcome {
    let start = Instant::now();
    let dataset = synthetic14()?;
    let truth = dataset.truth.as_ref().ok_or("no truth")?;
    let mut seen: Option<(BTreeSet<String>, [f64; 4])> = None;
    for k in [2, 3, 6] {
        let cfg = PipelineConfig {
            sampler: SamplerConfig::new(k, 42).unwrap(),
            ..Default::default()
        };
        let out = run(&dataset.records, &cfg).map_err(|e| e.to_string())?;
        let templates: BTreeSet<String> = out.result.iter().map(|(_, t)| t.to_string()).collect();
        let metrics = four(&evaluate(&out.result, truth).map_err(|e| e.to_string())?);
        match &seen {
            None => seen = Some((templates, metrics)),
            Some((t, m)) => {
                ensure!(*t == templates, "k={k}: template set differs");
                ensure!(*m == metrics, "k={k}: {metrics:?} vs {m:?}");
            }
        }
    }
    let took = within(Duration::from_secs(5), start)?;
    let (templates, metrics) = seen.unwrap();
    Ok(format!(
        "{} templates, metrics {metrics:?}, in {took:?}",
        templates.len()
    ))
}

fn uplift() -> Outcome {
    let dataset = synthetic14()?;
    let truth = dataset.truth.as_ref().ok_or("no truth")?;
    let score = |refine: bool| -> Result<[f64; 4], String> {
        let cfg = PipelineConfig {
            refine,
            ..Default::default()
        };
        let out = run(&dataset.records, &cfg).map_err(|e| e.to_string())?;
        Ok(four(
            &evaluate(&out.result, truth).map_err(|e| e.to_string())?,
        ))
    };
    let (base, refined) = (score(false)?, score(true)?);
    for (name, (b, r)) in ["GA", "PA", "FGA", "FTA"]
        .iter()
        .zip(base.iter().zip(&refined))
    {
        ensure!(r >= b, "{name} dropped {b} -> {r}");
    }
    ensure!(
        refined[1] > base[1],
        "PA not improved: {} -> {}",
        base[1],
        refined[1]
    );
    ensure!(
        refined[3] > base[3],
        "FTA not improved: {} -> {}",
        base[3],
        refined[3]
    );
    Ok(format!(
        "PA {:.4} -> {:.4}, FTA {:.4} -> {:.4}",
        base[1], refined[1], base[3], refined[3]
    ))
}

fn runtime_overhead() -> Outcome {
    let start = Instant::now();
    let dataset = synth::generate(100_000, 42);
    let (report, _) = bench(
        &dataset.records,
        &PipelineConfig::default(),
        NonZeroUsize::new(3).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(
        report.groups == synth::TEMPLATE_COUNT,
        "{} groups",
        report.groups
    );
    let ratio = report.refinement_ratio();
    ensure!(ratio <= 0.20, "refinement/grouping = {ratio:.3}");
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!(
        "grouping {:?}, refinement {:?}, ratio {ratio:.3}, wall {took:?}",
        report.grouping, report.refinement
    ))
}

fn regex_coverage() -> Outcome {
    let dataset = load_structured_csv(&data("regex_coverage.csv")).map_err(|e| e.to_string())?;
    let truth = dataset.truth.as_ref().ok_or("no truth")?;
    let contents = dataset
        .records
        .iter()
        .map(|r| (r.line_id, r.content.as_str()));
    let (cov, _) = RegexCoverage::tally(contents, truth, &RegexRuleSet::default());
    use RegexCategory::*;
    let want = [
        (EmailAddress, 0),
        (MacAddress, 0),
        (IpAddress, 3),
        (WindowsPath, 0),
        (UnixPath, 2),
        (Datetime, 1),
        (Duration, 1),
        (Memory, 1),
    ];
    for (c, n) in want {
        ensure!(cov.count(c) == n, "{c}: {} != {n}", cov.count(c));
    }
    ensure!(
        cov.matched() == 8 && cov.unmatched == 2,
        "{}/{}",
        cov.matched(),
        cov.total()
    );
    ensure!(
        cov.misaligned_pairs == 0,
        "{} misaligned",
        cov.misaligned_pairs
    );
    Ok("8/10 matched, 2 unmatched".into())
}

fn anonymizer_fixtures() -> Outcome {
    let rules = RegexRuleSet::default();
    let cases = [
        ("126MB", MARKER),
        ("10ms", MARKER),
        ("2005-06-18", MARKER),
        ("0x1F", MARKER),
        ("blk_7236", "blk_7236"),
    ];
    for (input, want) in cases {
        let out = rules.anonymize(&tokenize(input).unwrap());
        let got = Template::new(out).to_string();
        ensure!(got == want, "`{input}` -> `{got}`");
    }
    Ok(format!("{} fixtures", cases.len()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = data("synthetic14.csv");
    let run_cli = |sub: &str| -> Result<PathBuf, String> {
        let out = dir.path().join(sub);
        for cmd in ["evaluate", "regex-stats"] {
            let output = Command::new(env!("CARGO_BIN_EXE_synlog"))
                .args([cmd, "--input"])
                .arg(&input)
                .arg("--out")
                .arg(&out)
                .args(["--threads", "4"])
                .env_remove("SYNLOG_RULES")
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(output.status.success(), "{cmd} failed: {}", output.status);
        }
        Ok(out)
    };
    let (a, b) = (run_cli("a")?, run_cli("b")?);
    let mut names: Vec<_> = fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    ensure!(
        names.len() == 5,
        "expected 5 output files, found {}",
        names.len()
    );
    for name in &names {
        let x = fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(name)).map_err(|e| e.to_string())?;
        ensure!(x == y, "{name:?} differs");
    }
    Ok(format!("{} files identical", names.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("broadcast pair template", broadcast_pair),
        ("metrics oracle equivalence", oracle_equivalence),
        ("hand-derived metric fixture", hand_fixture),
        ("pipeline invariants", pipeline_invariants),
        ("k-sensitivity", k_sensitivity),
        ("refinement uplift", uplift),
        ("runtime overhead", runtime_overhead),
        ("regex coverage fixture", regex_coverage),
        ("anonymizer fixtures", anonymizer_fixtures),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
