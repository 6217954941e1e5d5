use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{TrendError, MAX_YEAR, MIN_YEAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRecord {
    pub year: i32,
    pub match_count: u64,
    pub volume_count: u64,
}

/// Year-sorted counts of one ngram.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearCounts {
    pub records: Vec<YearRecord>,
}

impl YearCounts {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn match_count(&self, year: i32) -> u64 {
        self.records
            .binary_search_by_key(&year, |r| r.year)
            .map_or(0, |i| self.records[i].match_count)
    }

    fn from_map(map: BTreeMap<i32, (u64, u64)>) -> Self {
        YearCounts {
            records: map
                .into_iter()
                .map(|(year, (match_count, volume_count))| YearRecord {
                    year,
                    match_count,
                    volume_count,
                })
                .collect(),
        }
    }
}

fn read(path: &Path) -> Result<String, TrendError> {
    std::fs::read_to_string(path).map_err(|source| TrendError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_int<T: std::str::FromStr>(field: &str, what: &str, line: usize) -> Result<T, TrendError> {
    field.trim().parse().map_err(|_| TrendError::Parse {
        line,
        message: format!("{what} {field:?} is not a nonnegative integer"),
    })
}

fn check_year(year: i32, line: usize) -> Result<i32, TrendError> {
    if (MIN_YEAR..=MAX_YEAR).contains(&year) {
        Ok(year)
    } else {
        Err(TrendError::Parse {
            line,
            message: format!("year {year} outside [{MIN_YEAR}, {MAX_YEAR}]"),
        })
    }
}

pub fn parse_ngram_tsv(path: &Path) -> Result<BTreeMap<String, YearCounts>, TrendError> {
    parse_ngram_str(&read(path)?)
}

/// Groups rows by ngram; rows repeating a (term, year) pair are summed.
pub fn parse_ngram_str(text: &str) -> Result<BTreeMap<String, YearCounts>, TrendError> {
    let mut acc: BTreeMap<String, BTreeMap<i32, (u64, u64)>> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let n = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(TrendError::Parse {
                line: n,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let year = check_year(parse_int(fields[1], "year", n)?, n)?;
        let matches: u64 = parse_int(fields[2], "match_count", n)?;
        let volumes: u64 = parse_int(fields[3], "volume_count", n)?;
        let slot = acc
            .entry(fields[0].to_string())
            .or_default()
            .entry(year)
            .or_default();
        slot.0 += matches;
        slot.1 += volumes;
    }
    Ok(acc
        .into_iter()
        .map(|(k, v)| (k, YearCounts::from_map(v)))
        .collect())
}

fn add_into(
    acc: &mut BTreeMap<String, BTreeMap<i32, (u64, u64)>>,
    key: String,
    counts: YearCounts,
) {
    let slot = acc.entry(key).or_default();
    for r in counts.records {
        let e = slot.entry(r.year).or_default();
        e.0 += r.match_count;
        e.1 += r.volume_count;
    }
}

/// Sums several parsed exports term by term.
pub fn merge_exports<I>(exports: I) -> BTreeMap<String, YearCounts>
where
    I: IntoIterator<Item = BTreeMap<String, YearCounts>>,
{
    let mut acc = BTreeMap::new();
    for map in exports {
        for (term, counts) in map {
            add_into(&mut acc, term, counts);
        }
    }
    acc.into_iter()
        .map(|(k, v)| (k, YearCounts::from_map(v)))
        .collect()
}

/// Merges case variants (`Woke`, `woke`, `WOKE`) under the lowercase key.
pub fn fold_case(map: BTreeMap<String, YearCounts>) -> BTreeMap<String, YearCounts> {
    let mut acc = BTreeMap::new();
    for (term, counts) in map {
        add_into(&mut acc, term.to_lowercase(), counts);
    }
    acc.into_iter()
        .map(|(k, v)| (k, YearCounts::from_map(v)))
        .collect()
}

pub fn parse_totals(path: &Path) -> Result<BTreeMap<i32, u64>, TrendError> {
    parse_totals_str(&read(path)?)
}

/// Whitespace-separated `year,match_count,page_count,volume_count` records.
pub fn parse_totals_str(text: &str) -> Result<BTreeMap<i32, u64>, TrendError> {
    let mut out = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let n = idx + 1;
        for record in line.split_whitespace() {
            let fields: Vec<&str> = record.split(',').collect();
            if fields.len() != 4 {
                return Err(TrendError::Parse {
                    line: n,
                    message: format!(
                        "expected year,match_count,page_count,volume_count, got {record:?}"
                    ),
                });
            }
            let year = check_year(parse_int(fields[0], "year", n)?, n)?;
            let matches: u64 = parse_int(fields[1], "match_count", n)?;
            parse_int::<u64>(fields[2], "page_count", n)?;
            parse_int::<u64>(fields[3], "volume_count", n)?;
            if out.insert(year, matches).is_some() {
                return Err(TrendError::Parse {
                    line: n,
                    message: format!("year {year} listed twice"),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs() {
        assert!(parse_ngram_str("").unwrap().is_empty());
        assert!(parse_totals_str("").unwrap().is_empty());
    }

    #[test]
    fn three_rows_one_term() {
        let m = parse_ngram_str("woke\t2001\t5\t2\nwoke\t1999\t3\t1\nwoke\t2000\t0\t0\n").unwrap();
        let c = &m["woke"];
        assert_eq!(c.len(), 3);
        let years: Vec<i32> = c.records.iter().map(|r| r.year).collect();
        assert_eq!(years, [1999, 2000, 2001]);
        assert_eq!(c.match_count(2001), 5);
        assert_eq!(c.match_count(1850), 0);
    }

    #[test]
    fn duplicate_rows_sum() {
        let m = parse_ngram_str("woke\t2001\t5\t1\nwoke\t2001\t7\t2\n").unwrap();
        assert_eq!(
            m["woke"].records,
            [YearRecord {
                year: 2001,
                match_count: 12,
                volume_count: 3
            }]
        );
    }

    #[test]
    fn bad_rows() {
        for (text, line) in [
            ("woke\t2001\t5\t1\nwoke\tx\t1\t1\n", 2),
            ("woke\t1200\t5\t1\n", 1),
            ("woke\t2001\t-5\t1\n", 1),
            ("woke\t2001\t5\n", 1),
        ] {
            match parse_ngram_str(text) {
                Err(TrendError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn totals() {
        let t = parse_totals_str("1984,100,10,1").unwrap();
        assert_eq!(t, BTreeMap::from([(1984, 100)]));
        let t = parse_totals_str(" 1984,100,10,1\t1985,200,20,2\n1986,5,1,1").unwrap();
        assert_eq!(t.len(), 3);
        assert!(parse_totals_str("1984,100,10,1 1984,5,1,1").is_err());
        assert!(parse_totals_str("1984,100,10").is_err());
    }

    #[test]
    fn case_folding_sums_variants() {
        let m = parse_ngram_str("Woke\t2001\t5\t1\nwoke\t2001\t7\t2\nWOKE\t2002\t1\t1\n").unwrap();
        let f = fold_case(m);
        assert_eq!(f.len(), 1);
        assert_eq!(f["woke"].match_count(2001), 12);
        assert_eq!(f["woke"].match_count(2002), 1);
    }

    #[test]
    fn merging_files_sums_counts() {
        let a = parse_ngram_str("woke\t2001\t5\t1\nlit\t2001\t1\t1\n").unwrap();
        let b = parse_ngram_str("woke\t2001\t2\t1\nwoke\t2002\t4\t1\n").unwrap();
        let m = merge_exports([a, b]);
        assert_eq!(m["woke"].match_count(2001), 7);
        assert_eq!(m["woke"].match_count(2002), 4);
        assert_eq!(m["lit"].len(), 1);
    }
}
