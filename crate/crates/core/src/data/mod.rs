//! Records, text cleaning, post filters, dataset files, splits and the
//! synthetic generator.

mod clean;
mod emoji_table;
mod filter;
mod io;
mod record;
mod split;
mod synth;

pub use clean::{
    clean_text, clean_text_with, detokenize, is_emoji_char, is_emoji_only, is_hashtag, translate, EmojiMap,
    MAX_HASHTAGS, MAX_TOKENS,
};
pub use filter::{
    filter_attributes, filter_posts, fnv1a, image_fingerprint, Decision, DropReason, PostFilter,
    ATTRIBUTE_THRESHOLD, MIN_TOKENS,
};
pub use io::{load_dataset, parse_record, read_dataset, record_to_line, save_dataset, write_dataset, LoadMode};
pub use record::{Attribute, AttributeClass, Label, PostRecord, Region, Role, VISION_DIM};
pub use split::{split_dataset, DatasetSplit, MIN_SPLIT_RECORDS};
pub use synth::{generate_synthetic, generate_with, SynthConfig};
