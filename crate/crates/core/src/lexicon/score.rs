use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Lexicon, LexiconError};
use crate::corpus::{Tag, TokenizedDoc};

/// Row label for the whole-corpus signature.
pub const ALL_GROUP: &str = "ALL";

/// Percent of words falling in each category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryScores {
    pub scores: BTreeMap<String, f64>,
    /// Raw (pre-filtering) tokens the scores were computed over.
    pub token_count: usize,
}

impl CategoryScores {
    pub fn get(&self, category: &str) -> Option<f64> {
        self.scores.get(category).copied()
    }

    fn zeros(lexicon: &Lexicon) -> Self {
        CategoryScores {
            scores: lexicon
                .categories()
                .values()
                .map(|n| (n.clone(), 0.0))
                .collect(),
            token_count: 0,
        }
    }
}

/// How per-document scores are combined into a group signature.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Unweighted mean of per-document percentages.
    #[default]
    Mean,
    /// Percentages over the pooled token counts of the group.
    Pooled,
}

fn category_counts(doc: &TokenizedDoc, lexicon: &Lexicon) -> BTreeMap<u32, usize> {
    let mut counts: BTreeMap<u32, usize> = lexicon.categories().keys().map(|&k| (k, 0)).collect();
    for w in &doc.words {
        for id in lexicon.match_ids(w) {
            *counts.get_mut(&id).expect("matched ids are declared") += 1;
        }
    }
    counts
}

fn to_scores(counts: &BTreeMap<u32, usize>, denom: usize, lexicon: &Lexicon) -> CategoryScores {
    let scores = counts
        .iter()
        .map(|(id, &c)| {
            let s = if denom == 0 {
                0.0
            } else {
                100.0 * c as f64 / denom as f64
            };
            (lexicon.categories()[id].clone(), s)
        })
        .collect();
    CategoryScores {
        scores,
        token_count: denom,
    }
}

/// Percentage of a document's raw tokens matching each category. A token
/// matching several categories counts toward each of them.
pub fn score_doc(doc: &TokenizedDoc, lexicon: &Lexicon) -> CategoryScores {
    to_scores(&category_counts(doc, lexicon), doc.raw_token_count, lexicon)
}

/// Category signature of every document, or of the documents carrying
/// `group_by`.
pub fn signature(
    docs: &[TokenizedDoc],
    lexicon: &Lexicon,
    group_by: Option<&Tag>,
    aggregation: Aggregation,
) -> Result<CategoryScores, LexiconError> {
    let selected: Vec<&TokenizedDoc> = docs
        .iter()
        .filter(|d| group_by.is_none_or(|t| d.tags.contains(t)))
        .collect();
    if selected.is_empty() {
        let label = group_by.map_or(ALL_GROUP.to_string(), Tag::hashtag);
        return Err(LexiconError::EmptyGroup(label));
    }
    let token_count = selected.iter().map(|d| d.raw_token_count).sum();
    match aggregation {
        Aggregation::Mean => {
            let mut acc = CategoryScores::zeros(lexicon);
            for d in &selected {
                for (k, v) in score_doc(d, lexicon).scores {
                    *acc.scores.get_mut(&k).expect("same lexicon") += v;
                }
            }
            let n = selected.len() as f64;
            acc.scores.values_mut().for_each(|v| *v /= n);
            acc.token_count = token_count;
            Ok(acc)
        }
        Aggregation::Pooled => {
            let mut pooled: BTreeMap<u32, usize> = BTreeMap::new();
            for d in &selected {
                for (k, c) in category_counts(d, lexicon) {
                    *pooled.entry(k).or_default() += c;
                }
            }
            Ok(to_scores(&pooled, token_count, lexicon))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureRow {
    /// Tag body, or [`ALL_GROUP`].
    pub group: String,
    pub n_docs: usize,
    pub scores: CategoryScores,
}

/// One row per distinct tag (sorted), followed by the whole-corpus row.
pub fn signature_table(
    docs: &[TokenizedDoc],
    lexicon: &Lexicon,
    aggregation: Aggregation,
) -> Result<Vec<SignatureRow>, LexiconError> {
    let tags: BTreeSet<&Tag> = docs.iter().flat_map(|d| d.tags.iter()).collect();
    let mut rows = Vec::with_capacity(tags.len() + 1);
    for tag in tags {
        rows.push(SignatureRow {
            group: tag.as_str().to_string(),
            n_docs: docs.iter().filter(|d| d.tags.contains(tag)).count(),
            scores: signature(docs, lexicon, Some(tag), aggregation)?,
        });
    }
    rows.push(SignatureRow {
        group: ALL_GROUP.to_string(),
        n_docs: docs.len(),
        scores: signature(docs, lexicon, None, aggregation)?,
    });
    Ok(rows)
}

/// Writes `group,n_docs,token_count,<category...>` with categories in
/// lexicon id order.
pub fn write_scores_csv<W: Write>(
    out: W,
    lexicon: &Lexicon,
    rows: &[SignatureRow],
) -> Result<(), LexiconError> {
    let mut w = csv::Writer::from_writer(out);
    let names = lexicon.category_names();
    let mut header = vec!["group", "n_docs", "token_count"];
    header.extend(names.iter().copied());
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![
            row.group.clone(),
            row.n_docs.to_string(),
            row.scores.token_count.to_string(),
        ];
        rec.extend(names.iter().map(|n| row.scores.scores[*n].to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
