//! Documents, corpora and the text preparation steps applied before any
//! scoring or modeling: ingestion, normalisation, deduplication, filtering
//! and tokenisation.

mod ingest;
mod normalize;
mod tokenize;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ingest::{ingest_jsonl, parse_jsonl, IngestOptions};
pub use normalize::{dedup_key, normalize, strip_retweet_prefix};
pub use tokenize::{
    tokenize, tokenize_corpus, Stopwords, TokenizedDoc, Tokenizer, TokenizerOptions,
    DEFAULT_STOPWORDS_VERSION,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("document id must be nonempty")]
    EmptyId,
    #[error("invalid phrase {0:?}: nothing left after removing whitespace")]
    InvalidPhrase(String),
    #[error("invalid tag {0:?}")]
    InvalidTag(String),
}

/// A hashtag body: lowercase, no whitespace, no `#`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Tag(String);

impl Tag {
    /// Builds a tag from any phrase or hashtag spelling, see [`to_hashtag`].
    pub fn new(raw: &str) -> Result<Self, CorpusError> {
        let value: String = raw
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '#')
            .flat_map(char::to_lowercase)
            .collect();
        if value.is_empty() {
            return Err(CorpusError::InvalidTag(raw.to_string()));
        }
        Ok(Tag(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Display form with the leading `#`.
    pub fn hashtag(&self) -> String {
        format!("#{}", self.0)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl TryFrom<String> for Tag {
    type Error = CorpusError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Tag::new(&value)
    }
}

impl From<Tag> for String {
    fn from(tag: Tag) -> String {
        tag.0
    }
}

/// Turns a seed phrase into its hashtag by lowercasing and removing all
/// whitespace: `"Stay woke"` becomes `#staywoke`.
pub fn to_hashtag(phrase: &str) -> Result<Tag, CorpusError> {
    Tag::new(phrase).map_err(|_| CorpusError::InvalidPhrase(phrase.to_string()))
}

/// One text unit (a tweet, post or comment).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<Utc>>,
    #[serde(default)]
    pub tags: BTreeSet<Tag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            raw_text: raw_text.into(),
            created_at: None,
            tags: BTreeSet::new(),
            author: None,
        }
    }

    pub fn with_tags<I, S>(mut self, tags: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for t in tags {
            self.tags.insert(Tag::new(t.as_ref())?);
        }
        Ok(self)
    }

    pub fn has_tag(&self, tag: &Tag) -> bool {
        self.tags.contains(tag)
    }
}

/// Where a corpus came from and how it was read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    pub options: IngestOptions,
    /// Processing steps applied after ingestion, in order.
    #[serde(default)]
    pub steps: Vec<String>,
}

/// An ordered collection of documents with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    documents: Vec<Document>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        Self::with_provenance(documents, Provenance::default())
    }

    pub fn with_provenance(
        documents: Vec<Document>,
        provenance: Provenance,
    ) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if doc.id.is_empty() {
                return Err(CorpusError::EmptyId);
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus {
            documents,
            provenance,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Subset of an already-valid corpus; ids stay unique.
    fn derived(&self, documents: Vec<Document>, step: String) -> Corpus {
        let mut provenance = self.provenance.clone();
        provenance.steps.push(step);
        Corpus {
            documents,
            provenance,
        }
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

/// Drops retweets and exact reposts, keeping the first document of each
/// duplicate class. Two documents are duplicates when their normalised texts
/// match after removing any leading `RT @handle:` marker.
pub fn dedup(corpus: &Corpus) -> Corpus {
    let mut seen = HashSet::new();
    let kept: Vec<Document> = corpus
        .iter()
        .filter(|doc| seen.insert(dedup_key(&doc.raw_text)))
        .cloned()
        .collect();
    let dropped = corpus.len() - kept.len();
    corpus.derived(kept, format!("dedup(dropped={dropped})"))
}

/// Decides which documents survive a filtering pass. This is the seam for
/// external classifiers (spam, troll or bot detectors).
pub trait DocumentFilter {
    fn keep(&self, doc: &Document) -> bool;

    fn name(&self) -> String {
        "filter".to_string()
    }
}

impl<F> DocumentFilter for F
where
    F: Fn(&Document) -> bool,
{
    fn keep(&self, doc: &Document) -> bool {
        self(doc)
    }
}

/// Keeps documents carrying at least one of the given tags.
#[derive(Debug, Clone)]
pub struct AnyTagFilter(pub BTreeSet<Tag>);

impl DocumentFilter for AnyTagFilter {
    fn keep(&self, doc: &Document) -> bool {
        doc.tags.iter().any(|t| self.0.contains(t))
    }

    fn name(&self) -> String {
        let tags: Vec<_> = self.0.iter().map(Tag::hashtag).collect();
        format!("any_tag({})", tags.join(","))
    }
}

/// Drops documents whose author is on a block list.
#[derive(Debug, Clone)]
pub struct AuthorBlockList(pub HashSet<String>);

impl DocumentFilter for AuthorBlockList {
    fn keep(&self, doc: &Document) -> bool {
        doc.author.as_ref().is_none_or(|a| !self.0.contains(a))
    }

    fn name(&self) -> String {
        format!("author_block_list(n={})", self.0.len())
    }
}

pub fn apply_filter<F: DocumentFilter + ?Sized>(corpus: &Corpus, filter: &F) -> Corpus {
    let kept: Vec<Document> = corpus.iter().filter(|d| filter.keep(d)).cloned().collect();
    corpus.derived(kept, filter.name())
}
