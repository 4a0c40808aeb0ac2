//! JSON-lines dataset files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::clean::clean_text;
use super::record::{Attribute, Label, PostRecord, Region, Role};
use crate::error::{CoreError, Result};

/// Whether a gold label is required on every line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    Training,
    Prediction,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    id: String,
    text: String,
    regions: Vec<Region>,
    #[serde(default)]
    attributes: Vec<Attribute>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    has_person: Option<bool>,
}

fn parse_err(line: usize, field: &str, message: impl Into<String>) -> CoreError {
    CoreError::Parse {
        line,
        field: field.into(),
        message: message.into(),
    }
}

/// Parses one line (1-based `line_no` for messages) and checks field
/// contracts: region widths, at most one global region, confidences.
pub fn parse_record(text: &str, line_no: usize, mode: LoadMode, vision_dim: usize) -> Result<PostRecord> {
    let line: Line = serde_json::from_str(text).map_err(|e| parse_err(line_no, "record", e.to_string()))?;
    if mode == LoadMode::Training && line.label.is_none() {
        return Err(parse_err(line_no, "label", "missing in training mode"));
    }
    let mut globals = 0;
    for (i, r) in line.regions.iter().enumerate() {
        if r.vec.len() != vision_dim {
            return Err(parse_err(
                line_no,
                &format!("regions[{i}].vec"),
                format!("width {} (expected {vision_dim})", r.vec.len()),
            ));
        }
        if let Some(v) = r.vec.iter().find(|v| !v.is_finite()) {
            return Err(parse_err(line_no, &format!("regions[{i}].vec"), format!("non-finite value {v}")));
        }
        globals += (r.role == Role::Global) as usize;
    }
    if globals > 1 {
        return Err(parse_err(line_no, "regions", "more than one global region"));
    }
    for (i, a) in line.attributes.iter().enumerate() {
        if !(0.0..=1.0).contains(&a.confidence) {
            return Err(parse_err(
                line_no,
                &format!("attributes[{i}].confidence"),
                format!("{} outside [0, 1]", a.confidence),
            ));
        }
    }
    Ok(PostRecord {
        tokens: clean_text(&line.text),
        id: line.id,
        raw_text: line.text,
        regions: line.regions,
        attributes: line.attributes,
        label: line.label,
        has_person: line.has_person,
    })
}

pub fn read_dataset<R: BufRead>(reader: R, mode: LoadMode, vision_dim: usize) -> Result<Vec<PostRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line, i + 1, mode, vision_dim)?);
    }
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>, mode: LoadMode, vision_dim: usize) -> Result<Vec<PostRecord>> {
    read_dataset(BufReader::new(File::open(path)?), mode, vision_dim)
}

/// One JSON line; `text` is the record's raw text.
pub fn record_to_line(record: &PostRecord) -> Result<String> {
    let line = Line {
        id: record.id.clone(),
        text: record.raw_text.clone(),
        regions: record.regions.clone(),
        attributes: record.attributes.clone(),
        label: record.label,
        has_person: record.has_person,
    };
    Ok(serde_json::to_string(&line)?)
}

pub fn write_dataset<W: Write>(mut w: W, records: &[PostRecord]) -> Result<()> {
    for r in records {
        writeln!(w, "{}", record_to_line(r)?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(path: impl AsRef<Path>, records: &[PostRecord]) -> Result<()> {
    write_dataset(BufWriter::new(File::create(path)?), records)
}
