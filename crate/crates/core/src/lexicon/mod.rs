//! LIWC-style category dictionaries and percentage-of-words scoring.
//!
//! A dictionary declares numbered categories and maps word patterns to one
//! or more of them. A pattern is either an exact word or a prefix ending in
//! `*` (`abandon*` matches `abandon`, `abandoned`, `abandonment`).

mod score;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use score::{
    score_doc, signature, signature_table, write_scores_csv, Aggregation, CategoryScores,
    SignatureRow, ALL_GROUP,
};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid lexicon: {0}")]
    Invalid(String),
    #[error("no document carries tag {0:?}")]
    EmptyGroup(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

/// One dictionary line: a pattern and the categories it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub pattern: String,
    pub categories: BTreeSet<u32>,
}

impl LexiconEntry {
    pub fn is_prefix(&self) -> bool {
        self.pattern.ends_with('*')
    }

    fn stem(&self) -> &str {
        self.pattern.strip_suffix('*').unwrap_or(&self.pattern)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub name: String,
    categories: BTreeMap<u32, String>,
    entries: Vec<LexiconEntry>,
    exact: HashMap<String, usize>,
    prefix: HashMap<String, usize>,
}

impl Lexicon {
    pub fn new(
        name: impl Into<String>,
        categories: BTreeMap<u32, String>,
        entries: Vec<LexiconEntry>,
    ) -> Result<Self, LexiconError> {
        let mut names = BTreeSet::new();
        for n in categories.values() {
            if n.is_empty() || !names.insert(n.as_str()) {
                return Err(LexiconError::Invalid(format!(
                    "duplicate or empty category name {n:?}"
                )));
            }
        }
        let mut exact = HashMap::new();
        let mut prefix = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if let Some(msg) = entry_problem(e, &categories) {
                return Err(LexiconError::Invalid(msg));
            }
            let slot = if e.is_prefix() {
                &mut prefix
            } else {
                &mut exact
            };
            if slot.insert(e.stem().to_string(), i).is_some() {
                return Err(LexiconError::Invalid(format!(
                    "duplicate pattern {:?}",
                    e.pattern
                )));
            }
        }
        Ok(Lexicon {
            name: name.into(),
            categories,
            entries,
            exact,
            prefix,
        })
    }

    pub fn empty() -> Self {
        Lexicon::new("empty", BTreeMap::new(), Vec::new()).expect("empty lexicon is valid")
    }

    /// Category ids and names in id order.
    pub fn categories(&self) -> &BTreeMap<u32, String> {
        &self.categories
    }

    pub fn category_names(&self) -> Vec<&str> {
        self.categories.values().map(String::as_str).collect()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    /// Ids of every category whose patterns match `token`.
    pub fn match_ids(&self, token: &str) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        if let Some(&i) = self.exact.get(token) {
            out.extend(&self.entries[i].categories);
        }
        if !self.prefix.is_empty() {
            for (end, c) in token.char_indices() {
                let cut = end + c.len_utf8();
                if let Some(&i) = self.prefix.get(&token[..cut]) {
                    out.extend(&self.entries[i].categories);
                }
            }
        }
        out
    }

    /// Names of every category whose patterns match `token`.
    pub fn match_token(&self, token: &str) -> BTreeSet<String> {
        self.match_ids(token)
            .into_iter()
            .map(|id| self.categories[&id].clone())
            .collect()
    }

    pub fn from_path(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "lexicon".into());
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            parse_json_str(&name, &text)
        } else {
            parse_dic_str(&name, &text)
        }
    }

    /// Serialises to the JSON lexicon layout.
    pub fn to_json(&self) -> serde_json::Value {
        let cats: BTreeMap<String, &String> = self
            .categories
            .iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let entries: Vec<(&str, Vec<u32>)> = self
            .entries
            .iter()
            .map(|e| (e.pattern.as_str(), e.categories.iter().copied().collect()))
            .collect();
        serde_json::json!({ "categories": cats, "entries": entries })
    }
}

fn entry_problem(e: &LexiconEntry, categories: &BTreeMap<u32, String>) -> Option<String> {
    let stem = e.stem();
    if stem.is_empty() {
        return Some("empty pattern".into());
    }
    if stem.contains('*') {
        return Some(format!(
            "'*' is only allowed at the end of a pattern: {:?}",
            e.pattern
        ));
    }
    if stem.chars().any(|c| c.is_uppercase() || c.is_whitespace()) {
        return Some(format!(
            "pattern must be a lowercase single word: {:?}",
            e.pattern
        ));
    }
    if e.categories.is_empty() {
        return Some(format!("pattern {:?} has no categories", e.pattern));
    }
    e.categories
        .iter()
        .find(|id| !categories.contains_key(id))
        .map(|id| {
            format!(
                "pattern {:?} references undeclared category {id}",
                e.pattern
            )
        })
}

/// Reads a LIWC `.dic` file:
///
/// ```text
/// %
/// 1	anger
/// 2	anxiety
/// %
/// hate	1
/// abandon*	2
/// ```
#[allow(clippy::tabs_in_doc_comments)]
pub fn parse_dic(path: &Path) -> Result<Lexicon, LexiconError> {
    Lexicon::from_path(path)
}

pub fn parse_dic_str(name: &str, text: &str) -> Result<Lexicon, LexiconError> {
    let perr = |line: usize, message: String| LexiconError::Parse { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, "%")) => {}
        Some((n, _)) => return Err(perr(n, "expected opening '%'".into())),
        None => return Err(perr(1, "empty dictionary, expected '%'".into())),
    }

    let mut categories = BTreeMap::new();
    let mut closed = false;
    for (n, line) in lines.by_ref() {
        if line == "%" {
            closed = true;
            break;
        }
        let (id, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| perr(n, format!("expected '<id><TAB><name>', got {line:?}")))?;
        let id: u32 = id
            .parse()
            .map_err(|_| perr(n, format!("category id {id:?} is not an integer")))?;
        if categories.insert(id, rest.trim().to_string()).is_some() {
            return Err(perr(n, format!("category {id} declared twice")));
        }
    }
    if !closed {
        return Err(perr(
            text.lines().count().max(1),
            "missing closing '%' after categories".into(),
        ));
    }

    let mut entries = Vec::new();
    let mut seen = HashMap::new();
    for (n, line) in lines {
        let mut fields = line.split_whitespace();
        let pattern = fields.next().unwrap_or_default().to_lowercase();
        let mut ids = BTreeSet::new();
        for f in fields {
            let id: u32 = f
                .parse()
                .map_err(|_| perr(n, format!("category id {f:?} is not an integer")))?;
            ids.insert(id);
        }
        let entry = LexiconEntry {
            pattern,
            categories: ids,
        };
        if let Some(msg) = entry_problem(&entry, &categories) {
            return Err(perr(n, msg));
        }
        if let Some(prev) = seen.insert(entry.pattern.clone(), n) {
            return Err(perr(
                n,
                format!("pattern {:?} already defined on line {prev}", entry.pattern),
            ));
        }
        entries.push(entry);
    }
    Lexicon::new(name, categories, entries)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonLexicon {
    categories: BTreeMap<String, String>,
    entries: Vec<(String, Vec<u32>)>,
}

/// Reads the JSON layout `{"categories": {"1": "anger"}, "entries": [["hate", [1]]]}`.
pub fn parse_json_str(name: &str, text: &str) -> Result<Lexicon, LexiconError> {
    let raw: JsonLexicon = serde_json::from_str(text).map_err(|e| LexiconError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut categories = BTreeMap::new();
    for (k, v) in raw.categories {
        let id: u32 = k
            .parse()
            .map_err(|_| LexiconError::Invalid(format!("category id {k:?} is not an integer")))?;
        categories.insert(id, v);
    }
    let entries = raw
        .entries
        .into_iter()
        .map(|(p, ids)| LexiconEntry {
            pattern: p.to_lowercase(),
            categories: ids.into_iter().collect(),
        })
        .collect();
    Lexicon::new(name, categories, entries)
}

const EMOTION_DIC: &str = include_str!("../../data/lexicons/emotion.dic");
const MORAL_DIC: &str = include_str!("../../data/lexicons/moral_foundations.dic");

/// Small stand-in emotion dictionary (anger, anxiety, sadness).
pub fn builtin_emotion() -> Lexicon {
    parse_dic_str("emotion", EMOTION_DIC).expect("bundled emotion dictionary is valid")
}

/// Small stand-in moral-foundations dictionary (harm, fairness, ingroup,
/// authority, purity; virtue and vice words merged).
pub fn builtin_moral_foundations() -> Lexicon {
    parse_dic_str("moral_foundations", MORAL_DIC)
        .expect("bundled moral foundations dictionary is valid")
}

/// Resolves `builtin:emotion` / `builtin:moral_foundations`, or reads a file.
pub fn load(spec: &str) -> Result<Lexicon, LexiconError> {
    match spec {
        "builtin:emotion" => Ok(builtin_emotion()),
        "builtin:moral_foundations" => Ok(builtin_moral_foundations()),
        path => Lexicon::from_path(Path::new(path)),
    }
}
