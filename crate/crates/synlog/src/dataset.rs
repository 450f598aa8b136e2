//! Loghub-style structured CSVs and raw log files.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use synlog_core::metrics::{GroundTruth, ParseResult};
use synlog_core::model::{LineId, LogRecord};

use crate::error::{Error, Result};

pub use synlog_core::variables::{extract_variables, Extraction};

/// Records of one dataset, with ground truth when the source carried an
/// `EventTemplate` column.
#[derive(Debug, Clone)]
pub struct StructuredDataset {
    pub name: String,
    pub records: Vec<LogRecord>,
    pub truth: Option<GroundTruth>,
}

impl StructuredDataset {
    /// Picks the loader from the extension: `.csv` is structured, anything
    /// else is a raw log.
    pub fn load(path: &Path) -> Result<Self> {
        let is_csv = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            load_structured_csv(path)
        } else {
            load_raw_log(path)
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// `HDFS_2k.log_structured_corrected.csv` becomes `HDFS_2k`.
pub fn dataset_name(path: &Path) -> String {
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let mut name = file.as_str();
    for suffix in [".csv", "_structured_corrected", "_structured", ".log"] {
        if let Some(stripped) = name.strip_suffix(suffix) {
            if !stripped.is_empty() {
                name = stripped;
            }
        }
    }
    name.to_string()
}

/// Reads a CSV with a `Content` column and optional `LineId` and
/// `EventTemplate` columns.
pub fn load_structured_csv(path: &Path) -> Result<StructuredDataset> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let content_col =
        column("Content").ok_or_else(|| Error::format(path, "missing Content column"))?;
    let id_col = column("LineId");
    let template_col = column("EventTemplate");

    let mut records = Vec::new();
    let mut truth = template_col.map(|_| GroundTruth::new());
    let mut seen = HashSet::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let row_no = idx + 1;
        let line_id: LineId = match id_col {
            Some(c) => {
                let raw = row.get(c).unwrap_or("").trim();
                raw.parse()
                    .map_err(|_| Error::format(path, format!("row {row_no}: bad LineId `{raw}`")))?
            }
            None => row_no as LineId,
        };
        if !seen.insert(line_id) {
            return Err(Error::format(
                path,
                format!("row {row_no}: duplicate LineId {line_id}"),
            ));
        }
        let content = row.get(content_col).unwrap_or("");
        let record = LogRecord::new(line_id, content)
            .map_err(|_| Error::format(path, format!("row {row_no}: empty Content")))?;
        records.push(record);
        if let (Some(truth), Some(c)) = (truth.as_mut(), template_col) {
            truth.insert(line_id, row.get(c).unwrap_or(""));
        }
    }
    Ok(StructuredDataset {
        name: dataset_name(path),
        records,
        truth,
    })
}

/// One record per non-blank line, numbered from 1.
pub fn load_raw_log(path: &Path) -> Result<StructuredDataset> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let records = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| LogRecord::new(i as LineId + 1, l).expect("blank lines filtered"))
        .collect();
    Ok(StructuredDataset {
        name: dataset_name(path),
        records,
        truth: None,
    })
}

/// Paths written by [`write_structured_output`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub structured: PathBuf,
    pub templates: PathBuf,
}

/// Writes `<name>_structured.csv` and `<name>_templates.csv`. Event ids are
/// `E1`, `E2`, ... in order of each template's first appearance.
pub fn write_structured_output(
    dataset: &StructuredDataset,
    result: &ParseResult,
    out_dir: &Path,
) -> Result<OutputFiles> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let structured = out_dir.join(format!("{}_structured.csv", dataset.name));
    let templates = out_dir.join(format!("{}_templates.csv", dataset.name));

    let mut event_ids: BTreeMap<&str, usize> = BTreeMap::new();
    let mut order: Vec<(&str, usize)> = Vec::new();
    let mut rows = Vec::with_capacity(dataset.records.len());
    for record in &dataset.records {
        let template = result
            .get(record.line_id)
            .ok_or_else(|| Error::Internal(format!("no template for line {}", record.line_id)))?;
        let idx = *event_ids.entry(template).or_insert_with(|| {
            order.push((template, 0));
            order.len() - 1
        });
        order[idx].1 += 1;
        rows.push((record, idx));
    }

    let mut w = csv::Writer::from_path(&structured).map_err(|e| Error::csv(&structured, e))?;
    w.write_record(["LineId", "Content", "EventId", "EventTemplate"])
        .map_err(|e| Error::csv(&structured, e))?;
    for (record, idx) in rows {
        w.write_record([
            record.line_id.to_string().as_str(),
            record.content.as_str(),
            event_id(idx).as_str(),
            order[idx].0,
        ])
        .map_err(|e| Error::csv(&structured, e))?;
    }
    w.flush().map_err(|e| Error::io(&structured, e))?;

    let mut w = csv::Writer::from_path(&templates).map_err(|e| Error::csv(&templates, e))?;
    w.write_record(["EventId", "EventTemplate", "Occurrences"])
        .map_err(|e| Error::csv(&templates, e))?;
    for (idx, (template, count)) in order.iter().enumerate() {
        w.write_record([event_id(idx).as_str(), template, count.to_string().as_str()])
            .map_err(|e| Error::csv(&templates, e))?;
    }
    w.flush().map_err(|e| Error::io(&templates, e))?;

    Ok(OutputFiles {
        structured,
        templates,
    })
}

fn event_id(idx: usize) -> String {
    format!("E{}", idx + 1)
}
