use std::collections::HashSet;
use std::fmt;

use super::clean::is_emoji_only;
use super::record::{Attribute, PostRecord};

pub const MIN_TOKENS: usize = 5;
pub const ATTRIBUTE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    NoPerson,
    EmojiOnly,
    TooShort,
    Duplicate,
}

impl DropReason {
    pub fn name(self) -> &'static str {
        match self {
            DropReason::NoPerson => "no_person",
            DropReason::EmojiOnly => "emoji_only",
            DropReason::TooShort => "too_short",
            DropReason::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Keep,
    Drop(DropReason),
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Hash of the global region with every value rounded to 6 decimals.
pub fn image_fingerprint(record: &PostRecord) -> Option<u64> {
    let global = record.global_region()?;
    let bytes: Vec<u8> = global
        .vec
        .iter()
        .flat_map(|v| ((v * 1e6).round() as i64).to_le_bytes())
        .collect();
    Some(fnv1a(&bytes))
}

/// Post-level cleaning rules. Duplicate detection remembers every kept
/// fingerprint, so records must be fed in input order.
#[derive(Debug, Default, Clone)]
pub struct PostFilter {
    seen: HashSet<u64>,
}

impl PostFilter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn filter_post(&mut self, record: &PostRecord) -> Decision {
        if record.has_person == Some(false) {
            return Decision::Drop(DropReason::NoPerson);
        }
        if is_emoji_only(&record.raw_text) {
            return Decision::Drop(DropReason::EmojiOnly);
        }
        if record.tokens.len() < MIN_TOKENS {
            return Decision::Drop(DropReason::TooShort);
        }
        if let Some(fp) = image_fingerprint(record) {
            if !self.seen.insert(fp) {
                return Decision::Drop(DropReason::Duplicate);
            }
        }
        Decision::Keep
    }
}

/// Applies [`PostFilter`] in order; returns kept records and the drops
/// as `(id, reason)`.
pub fn filter_posts(records: Vec<PostRecord>) -> (Vec<PostRecord>, Vec<(String, DropReason)>) {
    let mut filter = PostFilter::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for r in records {
        match filter.filter_post(&r) {
            Decision::Keep => kept.push(r),
            Decision::Drop(reason) => dropped.push((r.id, reason)),
        }
    }
    (kept, dropped)
}

/// Drops attributes under `threshold`, keeps the most confident value per
/// class (first one on ties), and sorts by confidence descending with
/// class slot order breaking ties.
pub fn filter_attributes(attrs: &[Attribute], threshold: f64) -> Vec<Attribute> {
    let mut best: Vec<Option<&Attribute>> = vec![None; super::AttributeClass::COUNT];
    for a in attrs.iter().filter(|a| a.confidence >= threshold) {
        let slot = &mut best[a.class.slot()];
        if slot.is_none_or(|b| a.confidence > b.confidence) {
            *slot = Some(a);
        }
    }
    let mut out: Vec<Attribute> = best.into_iter().flatten().cloned().collect();
    out.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then(a.class.slot().cmp(&b.class.slot()))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{clean_text, AttributeClass, Region, Role};

    fn post(text: &str, global: f64) -> PostRecord {
        PostRecord {
            id: text.into(),
            raw_text: text.into(),
            tokens: clean_text(text),
            regions: vec![Region {
                role: Role::Global,
                vec: vec![global; 4],
            }],
            attributes: vec![],
            label: None,
            has_person: None,
        }
    }

    #[test]
    fn token_count_boundary() {
        let mut f = PostFilter::new();
        assert_eq!(f.filter_post(&post("a b c d", 0.0)), Decision::Drop(DropReason::TooShort));
        assert_eq!(f.filter_post(&post("a b c d e", 1.0)), Decision::Keep);
    }

    #[test]
    fn duplicate_image_dropped() {
        let mut f = PostFilter::new();
        assert_eq!(f.filter_post(&post("one two three four five", 0.25)), Decision::Keep);
        let dup = post("six seven eight nine ten", 0.25 + 1e-9);
        assert_eq!(f.filter_post(&dup), Decision::Drop(DropReason::Duplicate));
    }

    #[test]
    fn emoji_only_and_no_person() {
        let mut f = PostFilter::new();
        assert_eq!(f.filter_post(&post("😀😀😀😀😀", 0.0)), Decision::Drop(DropReason::EmojiOnly));
        let mut p = post("one two three four five", 3.0);
        p.has_person = Some(false);
        assert_eq!(f.filter_post(&p), Decision::Drop(DropReason::NoPerson));
    }

    #[test]
    fn attribute_threshold() {
        let out = filter_attributes(
            &[
                Attribute::new(AttributeClass::Style, "elegant", 0.9),
                Attribute::new(AttributeClass::Hood, "yes", 0.3),
            ],
            ATTRIBUTE_THRESHOLD,
        );
        assert_eq!(out, vec![Attribute::new(AttributeClass::Style, "elegant", 0.9)]);
        assert!(filter_attributes(&[], 0.5).is_empty());
    }

    #[test]
    fn attribute_per_class_max() {
        let out = filter_attributes(
            &[
                Attribute::new(AttributeClass::Color, "red", 0.6),
                Attribute::new(AttributeClass::Color, "blue", 0.8),
            ],
            ATTRIBUTE_THRESHOLD,
        );
        assert_eq!(out, vec![Attribute::new(AttributeClass::Color, "blue", 0.8)]);
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
    }
}
