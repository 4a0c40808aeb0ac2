//! Synthetic posts with a plantable class signal.
//!
//! Every sample has a gold label and, independently per modality, a *cue*
//! class: the label with probability `signal`, otherwise a uniformly drawn
//! class. Each modality is generated from its own cue only, so at
//! `signal = 0` all features are independent of the label and at
//! `signal = 1` every modality agrees with it.
//!
//! Within a modality the cue is sparse. A few sentiment words sit among
//! class-free filler words, a face region sits among item regions, and one
//! or two attribute values among neutral ones, so mean pooling dilutes
//! what attention can pick out.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::record::{Attribute, AttributeClass, Label, PostRecord, Region, Role, VISION_DIM};
use super::clean::clean_text;

const WORLD_SEED: u64 = 0x5E47_1F05;

const CUE_WORDS: [&[&str]; 3] = [
    &[
        "love", "gorgeous", "beautiful", "amazing", "happy", "perfect", "stunning", "adorable",
        "lovely", "fabulous", "obsessed", "best", "cute", "wonderful", "elegant",
    ],
    &[
        "ugly", "hate", "awful", "worst", "terrible", "disgusting", "tacky", "horrible", "gross",
        "cringe", "disappointed", "ridiculous", "boring", "weird", "sad",
    ],
    &[
        "available", "sale", "shop", "discount", "order", "link", "sizes", "shipping", "new",
        "collection", "restock", "price", "store", "launch", "details",
    ],
];

const CUE_EMOJI: [&[&str]; 3] = [
    &["😍", "🥰", "😊", "💕"],
    &["😡", "🤮", "😒", "👎"],
    &["👗", "🛍", "📸", "👠"],
];

const FUNCTION_WORDS: &[&str] = &[
    "the", "my", "this", "with", "today", "outfit", "wearing", "and", "a", "for", "of", "in",
    "look", "on", "it", "is", "so", "to", "at", "just",
];

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ren", "tu", "sa", "vo", "pel", "ni", "dra", "che", "bo", "fi", "gan", "ru",
    "tes", "ma", "zu", "lin", "ko",
];

const HASHTAGS: &[&str] = &["#ootd", "#fashion", "#style", "#tbt", "#streetstyle", "#instafashion"];

const CUE_VALUES: [&[&str]; 3] = [
    &["elegant", "chic", "floral", "glamorous", "vibrant", "graceful"],
    &["ripped", "stained", "mismatched", "faded", "shabby", "clashing"],
    &["plain", "basic", "standard", "regular", "simple", "classic"],
];

const NEUTRAL_VALUES: &[&str] = &[
    "cotton", "denim", "black and white", "long", "short", "slim", "round", "adult", "female",
    "male", "dress", "jacket", "shirt", "wool", "midi", "v neck", "striped", "solid", "loose",
    "high",
];

/// Knobs of the generator; [`SynthConfig::new`] gives the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub seed: u64,
    pub signal: f64,
    pub vision_dim: usize,
    /// Inclusive text length range in words.
    pub text_len: (usize, usize),
    /// Inclusive number of sentiment words per text.
    pub cue_words: (usize, usize),
    /// Inclusive number of item regions.
    pub items: (usize, usize),
    /// Inclusive number of attributes.
    pub attributes: (usize, usize),
}

impl SynthConfig {
    pub fn new(n: usize, seed: u64, signal: f64) -> Self {
        Self {
            n,
            seed,
            signal,
            vision_dim: VISION_DIM,
            text_len: (8, 24),
            cue_words: (1, 2),
            items: (1, 5),
            attributes: (3, 7),
        }
    }

    pub fn with_vision_dim(mut self, dim: usize) -> Self {
        self.vision_dim = dim;
        self
    }
}

/// Published-width records; see [`generate_with`].
pub fn generate_synthetic(n: usize, seed: u64, signal_strength: f64) -> Vec<PostRecord> {
    generate_with(&SynthConfig::new(n, seed, signal_strength))
}

struct World {
    class_dirs: Vec<Vec<f64>>,
    face_dir: Vec<f64>,
    fillers: Vec<String>,
}

fn unit_gaussian(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

impl World {
    /// Class directions and vocabulary shared by every generated dataset
    /// of a given width, so separately generated files agree.
    fn new(dim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(WORLD_SEED ^ dim as u64);
        let class_dirs = (0..3).map(|_| unit_gaussian(&mut rng, dim)).collect();
        let face_dir = unit_gaussian(&mut rng, dim);
        let mut fillers: Vec<String> = FUNCTION_WORDS.iter().map(|s| s.to_string()).collect();
        for a in SYLLABLES {
            for b in SYLLABLES {
                fillers.push(format!("{a}{b}"));
            }
        }
        Self {
            class_dirs,
            face_dir,
            fillers,
        }
    }
}

fn noisy(rng: &mut impl Rng, parts: &[(f64, &[f64])], dim: usize) -> Vec<f64> {
    let sigma = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|i| {
            let base: f64 = parts.iter().map(|(w, v)| w * v[i]).sum();
            base + sigma * rng.sample::<f64, _>(StandardNormal)
        })
        .collect()
}

fn cue(rng: &mut impl Rng, label: usize, signal: f64) -> usize {
    if rng.random::<f64>() < signal {
        label
    } else {
        rng.random_range(0..3)
    }
}

pub fn generate_with(cfg: &SynthConfig) -> Vec<PostRecord> {
    let world = World::new(cfg.vision_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut labels: Vec<usize> = (0..cfg.n).map(|i| i % 3).collect();
    labels.shuffle(&mut rng);
    let dim = cfg.vision_dim;

    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let (cv, ct, ca) = (
                cue(&mut rng, label, cfg.signal),
                cue(&mut rng, label, cfg.signal),
                cue(&mut rng, label, cfg.signal),
            );

            let class_dir = world.class_dirs[cv].as_slice();
            let mut regions = vec![Region {
                role: Role::Global,
                vec: noisy(&mut rng, &[(0.5, class_dir)], dim),
            }];
            let faces = rng.random_range(0..=2);
            for _ in 0..faces {
                regions.push(Region {
                    role: Role::Face,
                    vec: noisy(&mut rng, &[(1.0, &world.face_dir), (1.0, class_dir)], dim),
                });
            }
            for _ in 0..rng.random_range(cfg.items.0..=cfg.items.1) {
                let item_dir = unit_gaussian(&mut rng, dim);
                regions.push(Region {
                    role: Role::Item,
                    vec: noisy(&mut rng, &[(1.5, &item_dir)], dim),
                });
            }
            regions[1..].shuffle(&mut rng);

            let len = rng.random_range(cfg.text_len.0..=cfg.text_len.1);
            let n_cue = rng.random_range(cfg.cue_words.0..=cfg.cue_words.1).min(len);
            let mut words: Vec<String> = (0..len - n_cue)
                .map(|_| world.fillers.choose(&mut rng).unwrap().clone())
                .collect();
            for _ in 0..n_cue {
                words.push(CUE_WORDS[ct].choose(&mut rng).unwrap().to_string());
            }
            words.shuffle(&mut rng);
            if rng.random_bool(0.3) {
                words.push(CUE_EMOJI[ct].choose(&mut rng).unwrap().to_string());
            }
            if rng.random_bool(0.5) {
                words.push(HASHTAGS.choose(&mut rng).unwrap().to_string());
            }
            let raw_text = words.join(" ");

            let n_attr = rng.random_range(cfg.attributes.0..=cfg.attributes.1);
            let classes: Vec<AttributeClass> =
                AttributeClass::ALL.choose_multiple(&mut rng, n_attr).copied().collect();
            let n_cue_attr = rng.random_range(1..=2).min(n_attr);
            let attributes = classes
                .into_iter()
                .enumerate()
                .map(|(k, class)| {
                    let value = if k < n_cue_attr {
                        CUE_VALUES[ca].choose(&mut rng).unwrap()
                    } else {
                        NEUTRAL_VALUES.choose(&mut rng).unwrap()
                    };
                    Attribute::new(class, *value, rng.random_range(0.5..=1.0))
                })
                .collect();

            PostRecord {
                id: format!("synth-{}-{i:05}", cfg.seed),
                tokens: clean_text(&raw_text),
                raw_text,
                regions,
                attributes,
                label: Label::from_index(label),
                has_person: Some(true),
            }
        })
        .collect()
}
