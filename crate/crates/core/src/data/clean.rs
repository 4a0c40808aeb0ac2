//! Token-level cleaning of raw post text.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::emoji_table::EMOJI_TABLE;

pub const MAX_TOKENS: usize = 64;
pub const MAX_HASHTAGS: usize = 5;

/// Emoji codepoint sequences mapped to ASCII tokens, matched longest first.
#[derive(Debug, Clone)]
pub struct EmojiMap {
    names: HashMap<String, &'static str>,
    longest: usize,
}

impl EmojiMap {
    pub fn from_pairs(pairs: &[(&str, &'static str)]) -> Self {
        let names: HashMap<String, &'static str> =
            pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        let longest = names.keys().map(|k| k.chars().count()).max().unwrap_or(0);
        Self { names, longest }
    }

    /// The table shipped with the crate.
    pub fn shipped() -> &'static EmojiMap {
        static MAP: OnceLock<EmojiMap> = OnceLock::new();
        MAP.get_or_init(|| EmojiMap::from_pairs(EMOJI_TABLE))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, seq: &str) -> Option<&'static str> {
        self.names.get(seq).copied()
    }

    /// Replaces known sequences by ` name ` and deletes any other emoji
    /// codepoint.
    pub fn replace(&self, text: &str) -> String {
        let chars: Vec<char> = text.chars().collect();
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        'outer: while i < chars.len() {
            let c = chars[i];
            if !is_emoji_char(c) {
                out.push(c);
                i += 1;
                continue;
            }
            for len in (1..=self.longest.min(chars.len() - i)).rev() {
                let seq: String = chars[i..i + len].iter().collect();
                if let Some(name) = self.get(&seq) {
                    out.push(' ');
                    out.push_str(name);
                    out.push(' ');
                    i += len;
                    continue 'outer;
                }
            }
            out.push(' ');
            i += 1;
        }
        out
    }
}

/// Codepoints treated as emoji, including joiners and modifiers.
pub fn is_emoji_char(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF
        | 0x2300..=0x23FF
        | 0x2600..=0x27BF
        | 0x2B00..=0x2BFF
        | 0x200D
        | 0x20E3
        | 0xFE0F
        | 0xE0020..=0xE007F)
}

/// Non-empty text made only of emoji and whitespace.
pub fn is_emoji_only(text: &str) -> bool {
    let mut any = false;
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        if !is_emoji_char(c) {
            return false;
        }
        any = true;
    }
    any
}

/// Translation hook. Texts are taken as already English; a real
/// translator would slot in here.
pub fn translate(text: &str) -> &str {
    text
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_mention(word: &str) -> bool {
    word.starts_with('@') && word.chars().count() > 1
}

fn is_url(word: &str) -> bool {
    let lower = word.to_lowercase();
    ["http://", "https://", "www."]
        .iter()
        .any(|p| lower.starts_with(p))
}

pub fn is_hashtag(token: &str) -> bool {
    token.starts_with('#') && token.len() > 1
}

/// Splits one lowercased word: runs of word characters (optionally led by
/// `#`) form tokens, any other character stands alone.
fn split_word(word: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = word.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let start = i;
        if chars[i] == '#' && chars.get(i + 1).is_some_and(|&c| is_word_char(c)) {
            i += 1;
        }
        if is_word_char(chars[i]) {
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
        } else {
            i += 1;
        }
        out.push(chars[start..i].iter().collect());
    }
}

/// Cleans with the shipped emoji table.
pub fn clean_text(raw: &str) -> Vec<String> {
    clean_text_with(raw, EmojiMap::shipped())
}

/// Emoji to names, drop mentions and links, lowercase, tokenize, keep the
/// first five hashtags, cap at [`MAX_TOKENS`].
pub fn clean_text_with(raw: &str, emoji: &EmojiMap) -> Vec<String> {
    let text = emoji.replace(translate(raw));
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        if is_mention(word) || is_url(word) {
            continue;
        }
        split_word(&word.to_lowercase(), &mut tokens);
    }
    let mut hashtags = 0;
    tokens.retain(|t| {
        if !is_hashtag(t) {
            return true;
        }
        hashtags += 1;
        hashtags <= MAX_HASHTAGS
    });
    tokens.truncate(MAX_TOKENS);
    tokens
}

pub fn detokenize(tokens: &[String]) -> String {
    tokens.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn mention_link_and_emoji() {
        assert_eq!(
            clean_text("@bob see https://x.co 😀 nice"),
            toks(&["see", "grinning_face", "nice"])
        );
    }

    #[test]
    fn empty_text() {
        assert!(clean_text("").is_empty());
    }

    #[test]
    fn sixth_hashtag_dropped() {
        assert_eq!(
            clean_text("#a #b #c #d #e #f ok"),
            toks(&["#a", "#b", "#c", "#d", "#e", "ok"])
        );
    }

    #[test]
    fn punctuation_splits_off() {
        assert_eq!(
            clean_text("Love it!!! so,cute"),
            toks(&["love", "it", "!", "!", "!", "so", ",", "cute"])
        );
        assert_eq!(clean_text("#OOTD#tbt"), toks(&["#ootd", "#tbt"]));
        assert_eq!(clean_text("# 1"), toks(&["#", "1"]));
    }

    #[test]
    fn longest_emoji_match_and_unknown_removed() {
        assert_eq!(clean_text("so \u{2764}\u{FE0F}"), toks(&["so", "red_heart"]));
        assert_eq!(clean_text("a\u{1FAE0}b"), toks(&["a", "b"]));
        assert_eq!(clean_text("hi😀😀"), toks(&["hi", "grinning_face", "grinning_face"]));
    }

    #[test]
    fn urls_are_case_insensitive_and_lone_at_kept() {
        assert_eq!(clean_text("WWW.shop.com HTTPS://A.b @ x"), toks(&["@", "x"]));
    }

    #[test]
    fn truncates_to_cap() {
        let raw = "w ".repeat(100);
        assert_eq!(clean_text(&raw).len(), MAX_TOKENS);
    }

    #[test]
    fn emoji_only_detection() {
        assert!(is_emoji_only("😀 \u{2764}\u{FE0F}"));
        assert!(!is_emoji_only("😀 ok"));
        assert!(!is_emoji_only("  "));
    }

    #[test]
    fn shipped_table_size_and_names() {
        let map = EmojiMap::shipped();
        assert!(map.len() >= 200);
        for (_, name) in EMOJI_TABLE {
            assert!(name.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_'), "{name}");
        }
    }
}
