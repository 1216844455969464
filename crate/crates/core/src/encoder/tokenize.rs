use serde::{Deserialize, Serialize};

use crate::seed::fnv1a;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerConfig {
    pub bucket_count: usize,
    pub use_word_tokens: bool,
    pub use_char_trigrams: bool,
    pub max_query_tokens: usize,
    pub max_item_tokens: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            bucket_count: 65536,
            use_word_tokens: true,
            use_char_trigrams: true,
            max_query_tokens: 512,
            max_item_tokens: 256,
        }
    }
}

impl TokenizerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.bucket_count < 256 || !self.bucket_count.is_power_of_two() {
            return Err(format!(
                "bucket_count must be a power of two >= 256, got {}",
                self.bucket_count
            ));
        }
        if self.max_query_tokens == 0 || self.max_item_tokens == 0 {
            return Err("max token lengths must be at least 1".into());
        }
        if !self.use_word_tokens && !self.use_char_trigrams {
            return Err("at least one token kind must be enabled".into());
        }
        Ok(())
    }
}

/// Token strings in emission order: each word, then its boundary-padded
/// character trigrams.
pub fn token_strings(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    for word in lower.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
        if cfg.use_word_tokens {
            out.push(format!("w:{word}"));
        }
        if cfg.use_char_trigrams {
            let padded: Vec<char> = std::iter::once('<')
                .chain(word.chars())
                .chain(std::iter::once('>'))
                .collect();
            for w in padded.windows(3) {
                let mut t = String::from("t:");
                t.extend(w);
                out.push(t);
            }
        }
    }
    out
}

/// Bucket ids for `text`, keeping the first `limit` tokens.
pub fn tokenize(text: &str, cfg: &TokenizerConfig, limit: usize) -> Vec<u32> {
    let mask = (cfg.bucket_count - 1) as u64;
    token_strings(text, cfg)
        .into_iter()
        .take(limit)
        .map(|t| (fnv1a(t.as_bytes()) & mask) as u32)
        .collect()
}
