//! Golden files for cleaning and post filtering, plus the data-pipeline
//! invariants over random inputs.

use std::collections::HashSet;

use proptest::prelude::*;
use sentifuse_core::data::*;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap()
}

#[derive(serde::Deserialize, serde::Serialize)]
struct CleanCase {
    raw: String,
    tokens: Vec<String>,
}

#[test]
fn clean_text_golden() {
    let golden = fixture("clean_golden.jsonl");
    let mut produced = String::new();
    for line in golden.lines() {
        let case: CleanCase = serde_json::from_str(line).unwrap();
        let tokens = clean_text(&case.raw);
        produced.push_str(&serde_json::to_string(&CleanCase { raw: case.raw, tokens }).unwrap());
        produced.push('\n');
    }
    assert_eq!(produced, golden);
}

#[test]
fn filter_rules_golden() {
    let records = load_dataset(format!("{FIXTURES}/filter_input.jsonl"), LoadMode::Training, 4).unwrap();
    let mut filter = PostFilter::new();
    let mut produced = String::new();
    for r in &records {
        let decision = match filter.filter_post(r) {
            Decision::Keep => "keep",
            Decision::Drop(reason) => reason.name(),
        };
        produced.push_str(&format!("{}\t{decision}\t{}\n", r.id, detokenize(&r.tokens)));
    }
    assert_eq!(produced, fixture("filter_expected.tsv"));
}

#[test]
fn loading_three_valid_lines() {
    let text = fixture("filter_input.jsonl");
    let three: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
    let records = read_dataset(three.as_bytes(), LoadMode::Training, 4).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[2].id, "p03");
    assert!(read_dataset(&b""[..], LoadMode::Training, 4).unwrap().is_empty());
}

#[test]
fn missing_label_names_the_line() {
    let text = fixture("filter_input.jsonl");
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[1] = lines[1].replace(",\"label\":\"positive\"", "").replace(", \"label\": \"positive\"", "");
    let err = read_dataset(lines.join("\n").as_bytes(), LoadMode::Training, 4).unwrap_err();
    assert_eq!(err.to_string(), "line 2: label: missing in training mode");
    assert!(read_dataset(lines.join("\n").as_bytes(), LoadMode::Prediction, 4).is_ok());
}

fn text_strategy() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[a-zA-Z]{1,8}",
        "#[a-z]{1,5}",
        "@[a-z]{1,5}",
        Just("https://x.co/a".to_string()),
        Just("www.shop.com".to_string()),
        "[!?.,:;()]{1,3}",
        Just("😀".to_string()),
        Just("❤️".to_string()),
        Just("\u{1FAE0}".to_string()),
        "[0-9]{1,3}",
        Just("Café".to_string()),
        Just("#".to_string()),
        Just("@".to_string()),
    ];
    prop::collection::vec((piece, prop_oneof![Just(" "), Just(""), Just("\t")]), 0..90)
        .prop_map(|v| v.into_iter().map(|(p, s)| format!("{p}{s}")).collect())
}

fn attribute_strategy() -> impl Strategy<Value = Attribute> {
    (0..AttributeClass::COUNT, "[a-z]{1,6}", 0.0..=1.0f64)
        .prop_map(|(c, v, conf)| Attribute::new(AttributeClass::ALL[c], v, conf))
}

fn record(id: usize, global: Vec<f64>) -> PostRecord {
    PostRecord {
        id: format!("r{id}"),
        raw_text: "a b c d e".into(),
        tokens: clean_text("a b c d e"),
        regions: vec![Region {
            role: Role::Global,
            vec: global,
        }],
        attributes: Vec::new(),
        label: Some(Label::ALL[id % 3]),
        has_person: None,
    }
}

proptest! {
    #[test]
    fn clean_text_is_idempotent(raw in text_strategy()) {
        let once = clean_text(&raw);
        prop_assert!(once.len() <= MAX_TOKENS);
        prop_assert!(once.iter().filter(|t| is_hashtag(t)).count() <= MAX_HASHTAGS);
        prop_assert_eq!(clean_text(&detokenize(&once)), once);
    }

    #[test]
    fn filtered_attributes_are_sorted_and_above_threshold(
        attrs in prop::collection::vec(attribute_strategy(), 0..30),
        threshold in 0.0..=1.0f64,
    ) {
        let out = filter_attributes(&attrs, threshold);
        prop_assert!(out.iter().all(|a| a.confidence >= threshold));
        prop_assert!(out.windows(2).all(|w| w[0].confidence >= w[1].confidence));
        let classes: HashSet<_> = out.iter().map(|a| a.class).collect();
        prop_assert_eq!(classes.len(), out.len());
        for a in &out {
            let best = attrs.iter().filter(|b| b.class == a.class).map(|b| b.confidence).fold(f64::MIN, f64::max);
            prop_assert_eq!(a.confidence, best);
        }
    }

    #[test]
    fn split_proportions_within_one_record(n in 10usize..400, seed in any::<u64>()) {
        let records: Vec<_> = (0..n).map(|i| record(i, vec![i as f64, 0.0])).collect();
        let split = split_dataset(records, seed).unwrap();
        let exact = |p: f64| p * n as f64;
        prop_assert!((split.train.len() as f64 - exact(0.8)).abs() <= 1.0 + 1e-9);
        prop_assert!((split.val.len() as f64 - exact(0.1)).abs() <= 1.0);
        prop_assert!((split.test.len() as f64 - exact(0.1)).abs() <= 1.0);
        let ids: HashSet<_> = split.train.iter().chain(&split.val).chain(&split.test).map(|r| r.id.clone()).collect();
        prop_assert_eq!(ids.len(), n);
    }

    #[test]
    fn kept_records_have_distinct_fingerprints(picks in prop::collection::vec(0usize..6, 1..40)) {
        let pool: Vec<Vec<f64>> = (0..6).map(|k| vec![k as f64 * 0.25, 1.0 - k as f64 * 0.1, 0.5]).collect();
        let records: Vec<_> = picks.iter().enumerate().map(|(i, &k)| record(i, pool[k].clone())).collect();
        let (kept, dropped) = filter_posts(records);
        let prints: HashSet<_> = kept.iter().map(|r| image_fingerprint(r).unwrap()).collect();
        prop_assert_eq!(prints.len(), kept.len());
        let distinct: HashSet<_> = picks.iter().collect();
        prop_assert_eq!(kept.len(), distinct.len());
        prop_assert!(dropped.iter().all(|(_, r)| *r == DropReason::Duplicate));
    }
}
