use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::{normalize, Corpus, CorpusError, Document, Tag};

pub const DEFAULT_STOPWORDS_VERSION: &str = "en-v1";
const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords-en-v1.txt");

/// A versioned stopword list. Lines starting with `#` are comments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords {
    pub version: String,
    words: HashSet<String>,
}

impl Stopwords {
    pub fn parse(version: impl Into<String>, text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.nfc().collect::<String>().to_lowercase())
            .collect();
        Stopwords {
            version: version.into(),
            words,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::parse(format!("file:{}", path.display()), &text))
    }

    pub fn empty() -> Self {
        Stopwords {
            version: "none".into(),
            words: HashSet::new(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The list in sorted order, for reports.
    pub fn sorted(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.words.iter().map(String::as_str).collect();
        v.sort_unstable();
        v
    }
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS_VERSION, DEFAULT_STOPWORDS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerOptions {
    /// Tokens shorter than this many characters are dropped.
    pub min_len: usize,
    pub stem: bool,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        TokenizerOptions {
            min_len: 2,
            stem: true,
        }
    }
}

/// The token stream of one document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub doc_id: String,
    #[serde(default)]
    pub tags: BTreeSet<Tag>,
    /// Stemmed tokens after stopword and length filtering.
    pub tokens: Vec<String>,
    /// The same tokens before stemming, used for dictionary lookups.
    pub words: Vec<String>,
    /// Token count before stopword and length filtering.
    pub raw_token_count: usize,
}

/// Splits, filters and stems normalised text. Holds the stemmer and the
/// stopword set so both are built once per corpus.
pub struct Tokenizer {
    options: TokenizerOptions,
    stopwords: Stopwords,
    stemmer: Stemmer,
}

impl fmt::Debug for Tokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tokenizer")
            .field("options", &self.options)
            .field("stopwords", &self.stopwords.version)
            .finish()
    }
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::new(TokenizerOptions::default(), Stopwords::default())
    }
}

impl Tokenizer {
    pub fn new(options: TokenizerOptions, stopwords: Stopwords) -> Self {
        Tokenizer {
            options,
            stopwords,
            stemmer: Stemmer::create(Algorithm::English),
        }
    }

    pub fn options(&self) -> &TokenizerOptions {
        &self.options
    }

    pub fn stopwords(&self) -> &Stopwords {
        &self.stopwords
    }

    /// Tokenizes already-normalised text. The result has an empty `doc_id`.
    pub fn tokenize(&self, normalized_text: &str) -> TokenizedDoc {
        let text: String = normalized_text.nfc().collect();
        let mut out = TokenizedDoc::default();
        for piece in text.split(|c: char| !c.is_alphanumeric()) {
            if piece.is_empty() {
                continue;
            }
            out.raw_token_count += 1;
            let word = piece.to_lowercase();
            if word.chars().count() < self.options.min_len || self.stopwords.contains(&word) {
                continue;
            }
            let token = if self.options.stem {
                self.stemmer.stem(&word).into_owned()
            } else {
                word.clone()
            };
            out.tokens.push(token);
            out.words.push(word);
        }
        out
    }

    /// Normalises and tokenizes a document, carrying over its id and tags.
    pub fn tokenize_document(&self, doc: &Document) -> TokenizedDoc {
        let mut t = self.tokenize(&normalize(&doc.raw_text));
        t.doc_id = doc.id.clone();
        t.tags = doc.tags.clone();
        t
    }
}

/// Tokenizes with the default stopword list.
pub fn tokenize(normalized_text: &str, options: &TokenizerOptions) -> TokenizedDoc {
    Tokenizer::new(options.clone(), Stopwords::default()).tokenize(normalized_text)
}

pub fn tokenize_corpus(corpus: &Corpus, tokenizer: &Tokenizer) -> Vec<TokenizedDoc> {
    corpus
        .iter()
        .map(|d| tokenizer.tokenize_document(d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s, &TokenizerOptions::default()).tokens
    }

    #[test]
    fn stems_like_porter() {
        assert_eq!(toks("people"), ["peopl"]);
        assert_eq!(
            toks("mansplaining triggered oppression"),
            ["mansplain", "trigger", "oppress"]
        );
        assert_eq!(toks("indigenous"), ["indigen"]);
    }

    #[test]
    fn empty_input() {
        let t = tokenize("", &TokenizerOptions::default());
        assert!(t.tokens.is_empty());
        assert_eq!(t.raw_token_count, 0);
    }

    #[test]
    fn stopwords_and_short_tokens_count_as_raw() {
        let t = tokenize("i like the woke x", &TokenizerOptions::default());
        assert_eq!(t.tokens, ["like", "woke"]);
        assert_eq!(t.words, ["like", "woke"]);
        assert_eq!(t.raw_token_count, 5);
    }

    #[test]
    fn hashtag_bodies_stay_whole() {
        assert_eq!(
            toks("whiteprivilege staywoke"),
            ["whiteprivileg", "staywok"]
        );
    }

    #[test]
    fn splits_on_punctuation() {
        let t = tokenize("don't...stop-believing!", &TokenizerOptions::default());
        assert_eq!(t.words, ["don", "stop", "believing"]);
        assert_eq!(t.raw_token_count, 4);
    }

    #[test]
    fn unstemmed_mode() {
        let opts = TokenizerOptions {
            stem: false,
            min_len: 3,
        };
        assert_eq!(tokenize("people go home", &opts).tokens, ["people", "home"]);
    }

    #[test]
    fn nfc_makes_composed_and_decomposed_equal() {
        let composed = toks("caf\u{e9}");
        let decomposed = toks("cafe\u{301}");
        assert_eq!(composed, decomposed);
    }

    #[test]
    fn default_list_is_small_and_keeps_like_and_got() {
        let s = Stopwords::default();
        assert_eq!(s.version, DEFAULT_STOPWORDS_VERSION);
        assert!(s.contains("the"));
        assert!(!s.contains("like"));
        assert!(!s.contains("got"));
        assert!(s.len() < 100);
    }

    proptest! {
        #[test]
        fn tokens_are_clean(s in "\\PC{0,80}") {
            let t = tokenize(&normalize(&s), &TokenizerOptions::default());
            prop_assert!(t.raw_token_count >= t.tokens.len());
            prop_assert_eq!(t.tokens.len(), t.words.len());
            for tok in &t.tokens {
                prop_assert!(!tok.is_empty());
                prop_assert!(!tok.chars().any(|c| c.is_whitespace() || c == '#' || c == '@'));
            }
        }
    }
}
