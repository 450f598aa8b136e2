//! Seeded generator for a 20-template benchmark corpus with ground truth.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synlog_core::metrics::GroundTruth;
use synlog_core::model::{LineId, LogRecord};

use crate::dataset::StructuredDataset;

#[derive(Debug, Clone, Copy)]
enum Slot {
    Int(u32),
    Ip,
    Path,
    Hex,
    Block,
    Millis,
    Megabytes,
    Word,
}

const WORDS: &[&str] = &[
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
];

const TEMPLATES: &[(&str, &[Slot])] = &[
    (
        "Reading broadcast variable <*> took <*> ms",
        &[Slot::Int(500), Slot::Int(90)],
    ),
    (
        "Connection from <*> port <*> closed",
        &[Slot::Ip, Slot::Int(65535)],
    ),
    (
        "Received block <*> of size <*> from <*>",
        &[Slot::Block, Slot::Int(1 << 26), Slot::Ip],
    ),
    ("Opening file <*> for writing", &[Slot::Path]),
    (
        "Worker <*> registered with executor <*>",
        &[Slot::Int(64), Slot::Int(4096)],
    ),
    (
        "Memory usage reached <*> on node <*>",
        &[Slot::Megabytes, Slot::Int(32)],
    ),
    (
        "Request served in <*> with status <*>",
        &[Slot::Millis, Slot::Int(600)],
    ),
    ("Interrupt vector <*> masked", &[Slot::Hex]),
    ("Deleting block <*> file <*>", &[Slot::Block, Slot::Path]),
    (
        "Session opened for user <*> by uid <*>",
        &[Slot::Word, Slot::Int(2000)],
    ),
    (
        "Failed password for <*> from <*> port <*> ssh2",
        &[Slot::Word, Slot::Ip, Slot::Int(65535)],
    ),
    (
        "Task <*> finished in stage <*> on host <*>",
        &[Slot::Int(10000), Slot::Int(200), Slot::Ip],
    ),
    ("Cache miss ratio is <*> percent", &[Slot::Int(100)]),
    (
        "Scheduler queue length <*> exceeds limit <*>",
        &[Slot::Int(1000), Slot::Int(1000)],
    ),
    (
        "Checkpoint written to <*> after <*>",
        &[Slot::Path, Slot::Millis],
    ),
    ("Heartbeat lost from datanode <*>", &[Slot::Ip]),
    (
        "Allocated <*> containers for application <*>",
        &[Slot::Int(50), Slot::Hex],
    ),
    (
        "Kernel reported temperature <*> on cpu <*>",
        &[Slot::Int(110), Slot::Int(16)],
    ),
    (
        "Replica count for <*> set to <*>",
        &[Slot::Block, Slot::Int(5)],
    ),
    (
        "Shutting down service after <*> requests",
        &[Slot::Int(1_000_000)],
    ),
];

/// Number of distinct templates the generator draws from.
pub const TEMPLATE_COUNT: usize = TEMPLATES.len();

fn fill(slot: Slot, rng: &mut ChaCha8Rng) -> String {
    match slot {
        Slot::Int(max) => rng.random_range(0..max).to_string(),
        Slot::Ip => format!(
            "10.{}.{}.{}",
            rng.random_range(0..256),
            rng.random_range(0..256),
            rng.random_range(1..255)
        ),
        Slot::Path => format!(
            "/data/{}/part-{:05}",
            WORDS.choose(rng).expect("non-empty"),
            rng.random_range(0..100_000)
        ),
        Slot::Hex => format!("0x{:X}", rng.random_range(0..0x1_0000u32)),
        Slot::Block => format!("blk_{}", rng.random_range(1_000_000u64..9_999_999_999)),
        Slot::Millis => format!("{}ms", rng.random_range(1..5000)),
        Slot::Megabytes => format!("{}MB", rng.random_range(1..4096)),
        Slot::Word => WORDS.choose(rng).expect("non-empty").to_string(),
    }
}

/// `lines` records drawn uniformly from the template pool, numbered from 1.
pub fn generate(lines: usize, seed: u64) -> StructuredDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(lines);
    let mut truth = GroundTruth::new();
    for i in 0..lines {
        let line_id = i as LineId + 1;
        let (template, slots) = TEMPLATES[rng.random_range(0..TEMPLATES.len())];
        let mut values = slots.iter().map(|&s| fill(s, &mut rng));
        let content = template
            .split(' ')
            .map(|tok| match tok {
                "<*>" => values.next().expect("one value per marker"),
                _ => tok.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ");
        records.push(LogRecord::new(line_id, content).expect("generated content is non-empty"));
        truth.insert(line_id, template);
    }
    StructuredDataset {
        name: format!("synthetic_{lines}"),
        records,
        truth: Some(truth),
    }
}
