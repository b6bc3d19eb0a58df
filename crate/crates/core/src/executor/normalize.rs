use serde::{Deserialize, Serialize};

/// Steps of the SQuAD-style answer normalization. All on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizeOptions {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub strip_articles: bool,
    pub collapse_whitespace: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            lowercase: true,
            strip_punctuation: true,
            strip_articles: true,
            collapse_whitespace: true,
        }
    }
}

/// Lower-case, drop ASCII punctuation, drop the articles a/an/the, and
/// collapse whitespace.
pub fn normalize_answer(text: &str) -> String {
    normalize_with(text, &NormalizeOptions::default())
}

pub fn normalize_with(text: &str, opts: &NormalizeOptions) -> String {
    let mut s = if opts.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    if opts.strip_punctuation {
        s.retain(|c| !c.is_ascii_punctuation());
    }
    if opts.strip_articles {
        // Articles are replaced by a space, as in the reference script, so
        // the surrounding words stay separate.
        let words: Vec<&str> = s
            .split_whitespace()
            .map(|w| if matches!(w, "a" | "an" | "the") { "" } else { w })
            .collect();
        s = if opts.collapse_whitespace {
            words.into_iter().filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ")
        } else {
            words.join(" ")
        };
    } else if opts.collapse_whitespace {
        s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    }
    s
}

/// Whitespace tokens of the normalized text.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    normalize_answer(text)
        .split_whitespace()
        .map(str::to_string)
        .collect()
}
