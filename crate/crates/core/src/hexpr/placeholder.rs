use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// One placeholder occurrence inside a question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceholderRef {
    /// 1-based answer slot.
    pub index: usize,
    pub surface_form: String,
    /// Byte range of `surface_form` in the scanned text.
    #[serde(skip)]
    pub span: (usize, usize),
}

static DEFAULT_PATTERN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:(?i:ans))?#(\d+)").expect("valid placeholder pattern"));

static WITH_BARE_A: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?:(?i:ans))?#(\d+)|\bA(\d+)\b").expect("valid placeholder pattern")
});

/// Finds placeholder tokens. The default accepts `Ans#k` and `#k`; the
/// `A{k}` spelling is opt-in because it collides with ordinary text.
#[derive(Debug, Clone)]
pub struct PlaceholderRecognizer {
    regex: Regex,
}

impl Default for PlaceholderRecognizer {
    fn default() -> Self {
        PlaceholderRecognizer {
            regex: DEFAULT_PATTERN.clone(),
        }
    }
}

impl PlaceholderRecognizer {
    pub fn with_bare_a() -> Self {
        PlaceholderRecognizer {
            regex: WITH_BARE_A.clone(),
        }
    }

    /// Custom recognizer. Every match must carry the slot number in some
    /// capture group; the first participating group is used.
    pub fn from_pattern(pattern: &str) -> Result<Self, regex::Error> {
        let regex = Regex::new(pattern)?;
        if regex.captures_len() < 2 {
            return Err(regex::Error::Syntax(
                "placeholder pattern needs a capture group for the index".into(),
            ));
        }
        Ok(PlaceholderRecognizer { regex })
    }

    pub fn find(&self, text: &str) -> Vec<PlaceholderRef> {
        self.regex
            .captures_iter(text)
            .filter_map(|caps| {
                let whole = caps.get(0)?;
                let digits = caps.iter().skip(1).flatten().next()?;
                let index: usize = digits.as_str().parse().ok()?;
                (index >= 1).then(|| PlaceholderRef {
                    index,
                    surface_form: whole.as_str().to_string(),
                    span: (whole.start(), whole.end()),
                })
            })
            .collect()
    }
}

/// Placeholders in `text` under the default recognizer, in order of
/// appearance.
pub fn find_placeholders(text: &str) -> Vec<PlaceholderRef> {
    PlaceholderRecognizer::default().find(text)
}
