//! Word-embedding providers and the per-record encodings consumed by the
//! model: text rows, a fixed 20-slot attribute matrix and vision regions.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sentifuse_tensor::Tensor;

use crate::data::{fnv1a, Attribute, AttributeClass, PostRecord, Role};
use crate::error::{CoreError, Result};

/// Full text width: three concatenated 300-wide sub-tables.
pub const TEXT_DIM: usize = 900;
pub const SUB_TABLES: usize = 3;
pub const MAX_REGIONS: usize = 8;

/// Deterministic unit-norm vector from `(token, seed)`.
pub fn synthetic_embedding(token: &str, dim: usize, seed: u64) -> Vec<f64> {
    assert!(dim >= 1, "embedding width must be positive");
    let mut key = token.as_bytes().to_vec();
    key.extend_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(&key));
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Token-to-vector lookup over three equal-width sub-tables.
///
/// Each sub-table is looked up independently; a token missing from a
/// sub-table gets that sub-table's synthetic fallback (seeded by the
/// provider seed and the sub-table index).
#[derive(Debug, Clone)]
pub struct EmbeddingProvider {
    dim: usize,
    seed: u64,
    tables: Vec<HashMap<String, Vec<f64>>>,
}

impl EmbeddingProvider {
    /// Every token gets its synthetic vectors.
    pub fn synthetic(dim: usize, seed: u64) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            seed,
            tables: vec![HashMap::new(); SUB_TABLES],
        })
    }

    /// One table file per sub-table, each `dim N` then `token v1 … vN`.
    pub fn from_files(paths: &[impl AsRef<Path>], seed: u64) -> Result<Self> {
        if paths.len() != SUB_TABLES {
            return Err(CoreError::Config(format!(
                "expected {SUB_TABLES} embedding tables, got {}",
                paths.len()
            )));
        }
        let mut tables = Vec::new();
        let mut sub = None;
        for p in paths {
            let (d, table) = read_table(BufReader::new(File::open(p)?))?;
            if *sub.get_or_insert(d) != d {
                return Err(CoreError::Config("embedding tables differ in width".into()));
            }
            tables.push(table);
        }
        Ok(Self {
            dim: sub.unwrap() * SUB_TABLES,
            seed,
            tables,
        })
    }

    /// Builds a provider from already parsed sub-tables.
    pub fn from_tables(tables: Vec<HashMap<String, Vec<f64>>>, sub_dim: usize, seed: u64) -> Result<Self> {
        if tables.len() != SUB_TABLES {
            return Err(CoreError::Config(format!("expected {SUB_TABLES} sub-tables")));
        }
        if tables.iter().flat_map(|t| t.values()).any(|v| v.len() != sub_dim) {
            return Err(CoreError::Config(format!("table vectors must have width {sub_dim}")));
        }
        Self::check_dim(sub_dim * SUB_TABLES)?;
        Ok(Self {
            dim: sub_dim * SUB_TABLES,
            seed,
            tables,
        })
    }

    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 || dim % SUB_TABLES != 0 {
            return Err(CoreError::Config(format!(
                "text width {dim} must be a positive multiple of {SUB_TABLES}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sub_dim(&self) -> usize {
        self.dim / SUB_TABLES
    }

    pub fn embed(&self, token: &str) -> Vec<f64> {
        let sub = self.sub_dim();
        let mut out = Vec::with_capacity(self.dim);
        for (t, table) in self.tables.iter().enumerate() {
            match table.get(token) {
                Some(v) => out.extend_from_slice(v),
                None => out.extend(synthetic_embedding(token, sub, self.seed.wrapping_add(t as u64))),
            }
        }
        out
    }
}

/// Parses one embedding table file.
pub fn read_table<R: BufRead>(reader: R) -> Result<(usize, HashMap<String, Vec<f64>>)> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(parse_err(1, "header", "empty embedding file")),
    };
    let dim: usize = header
        .strip_prefix("dim ")
        .and_then(|d| d.trim().parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| parse_err(1, "header", "expected `dim N`"))?;
    let mut table = HashMap::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().unwrap().to_string();
        let values: Vec<f64> = parts
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(i + 1, &token, &e.to_string()))?;
        if values.len() != dim {
            return Err(parse_err(i + 1, &token, &format!("{} values, expected {dim}", values.len())));
        }
        table.insert(token, values);
    }
    Ok((dim, table))
}

fn parse_err(line: usize, field: &str, message: &str) -> CoreError {
    CoreError::Parse {
        line,
        field: field.into(),
        message: message.into(),
    }
}

/// Zero-row matrices have no tensor form, so rows are kept as a flat
/// buffer with a row count.
#[derive(Debug, Clone, PartialEq)]
pub struct TextEncoding {
    pub dim: usize,
    pub data: Vec<f64>,
    pub mask: Vec<bool>,
}

impl TextEncoding {
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeEncoding {
    /// `[20 × dim]`, slot order of [`AttributeClass::ALL`].
    pub matrix: Tensor,
    pub mask: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisionEncoding {
    pub global: Vec<f64>,
    /// `[MAX_REGIONS × dim]`, row 0 the global region, padding rows zero.
    pub regions: Tensor,
    pub mask: Vec<bool>,
    pub roles: Vec<Role>,
}

/// Everything the model reads from one record.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPost {
    pub text: TextEncoding,
    pub attributes: AttributeEncoding,
    pub vision: VisionEncoding,
    pub label: Option<usize>,
}

pub fn embed_text(tokens: &[String], provider: &EmbeddingProvider) -> TextEncoding {
    let mut data = Vec::with_capacity(tokens.len() * provider.dim());
    for t in tokens {
        data.extend(provider.embed(t));
    }
    TextEncoding {
        dim: provider.dim(),
        data,
        mask: vec![true; tokens.len()],
    }
}

/// Slot `j` holds the mean word vector of class `j`'s value. Expects
/// filtered attributes; if a class still repeats, its first entry wins.
pub fn embed_attributes(attrs: &[Attribute], provider: &EmbeddingProvider) -> AttributeEncoding {
    let dim = provider.dim();
    let mut data = vec![0.0; AttributeClass::COUNT * dim];
    let mut mask = vec![false; AttributeClass::COUNT];
    for a in attrs {
        let slot = a.class.slot();
        if mask[slot] {
            continue;
        }
        let words: Vec<&str> = a.value.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let row = &mut data[slot * dim..(slot + 1) * dim];
        for w in &words {
            for (r, v) in row.iter_mut().zip(provider.embed(&w.to_lowercase())) {
                *r += v;
            }
        }
        let k = words.len() as f64;
        row.iter_mut().for_each(|r| *r /= k);
        mask[slot] = true;
    }
    AttributeEncoding {
        matrix: Tensor::matrix(AttributeClass::COUNT, dim, data).expect("fixed shape"),
        mask,
    }
}

/// Global region first, then faces, then items, each in input order, up
/// to [`MAX_REGIONS`] rows; the rest is zero padding with mask `false`.
pub fn encode_vision(record: &PostRecord, dim: usize) -> Result<VisionEncoding> {
    let err = |message: String| CoreError::Record {
        id: record.id.clone(),
        message,
    };
    if let Some((i, r)) = record.regions.iter().enumerate().find(|(_, r)| r.vec.len() != dim) {
        return Err(err(format!("regions[{i}].vec has width {} (expected {dim})", r.vec.len())));
    }
    let global = record
        .global_region()
        .ok_or_else(|| err("missing field `regions` entry with role global".into()))?;
    let mut picked = vec![global];
    for role in [Role::Face, Role::Item] {
        picked.extend(record.regions.iter().filter(|r| r.role == role));
    }
    picked.truncate(MAX_REGIONS);
    let mut data = vec![0.0; MAX_REGIONS * dim];
    for (row, r) in data.chunks_mut(dim).zip(&picked) {
        row.copy_from_slice(&r.vec);
    }
    let mask = (0..MAX_REGIONS).map(|i| i < picked.len()).collect();
    Ok(VisionEncoding {
        global: global.vec.clone(),
        regions: Tensor::matrix(MAX_REGIONS, dim, data).expect("fixed shape"),
        mask,
        roles: picked.iter().map(|r| r.role).collect(),
    })
}

/// Encodes a record; attributes are filtered at `threshold` first.
pub fn encode_post(
    record: &PostRecord,
    provider: &EmbeddingProvider,
    vision_dim: usize,
    threshold: f64,
) -> Result<EncodedPost> {
    let attrs = crate::data::filter_attributes(&record.attributes, threshold);
    Ok(EncodedPost {
        text: embed_text(&record.tokens, provider),
        attributes: embed_attributes(&attrs, provider),
        vision: encode_vision(record, vision_dim)?,
        label: record.label.map(|l| l.index()),
    })
}
