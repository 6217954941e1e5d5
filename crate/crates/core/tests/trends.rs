use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shibboleth::seeds::default_seed_terms;
use shibboleth::trends::{
    combine, fold_case, onset_year, parse_ngram_str, parse_totals_str, relative_series, smooth,
};

/// Synthetic export: one TSV block per seed term with a term-specific onset
/// and growth, some years missing, and a capitalised variant for a few terms.
fn fixture() -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let mut tsv = String::new();
    let mut totals = String::new();
    for year in 1900..=2019 {
        totals.push_str(&format!(
            "{year},{},{},{} ",
            1_000_000 + (year - 1900) * 20_000,
            5000,
            900
        ));
    }
    for (i, term) in default_seed_terms().iter().enumerate() {
        let onset = 1950 + (i as i32 * 7) % 60;
        for year in onset..=2019 {
            if rng.random::<f64>() < 0.1 {
                continue;
            }
            let count = rng.random_range(1..50u64) * (year - onset + 1) as u64;
            tsv.push_str(&format!(
                "{}\t{year}\t{count}\t{}\n",
                term.phrase,
                count / 3 + 1
            ));
            if i % 9 == 0 {
                tsv.push_str(&format!(
                    "{}\t{year}\t{}\t1\n",
                    term.phrase.to_uppercase(),
                    count / 4
                ));
            }
        }
    }
    (tsv, totals)
}

#[test]
fn combined_series_equals_brute_force_sum() {
    let (tsv, totals) = fixture();
    let totals = parse_totals_str(&totals).unwrap();
    let raw = parse_ngram_str(&tsv).unwrap();
    let counts = fold_case(raw.clone());
    assert_eq!(counts.len(), 60);

    let per_term: Vec<_> = counts
        .iter()
        .map(|(t, c)| relative_series(t, c, &totals, 1900..=2019).unwrap())
        .collect();
    let combined = combine(&per_term).unwrap();

    // oracle: walk the raw rows once, folding case by hand
    let mut by_year: BTreeMap<i32, f64> = (1900..=2019).map(|y| (y, 0.0)).collect();
    let mut cell: BTreeMap<(String, i32), u64> = BTreeMap::new();
    for line in tsv.lines() {
        let f: Vec<&str> = line.split('\t').collect();
        *cell
            .entry((f[0].to_lowercase(), f[1].parse().unwrap()))
            .or_default() += f[2].parse::<u64>().unwrap();
    }
    for ((_, year), c) in &cell {
        *by_year.get_mut(year).unwrap() += *c as f64 / totals[year] as f64;
    }
    for (&(y, f), (&oy, &of)) in combined.points.iter().zip(&by_year) {
        assert_eq!(y, oy);
        assert!((f - of).abs() <= 1e-12 * of.max(1e-12), "{y}: {f} vs {of}");
    }

    let first = per_term.iter().filter_map(onset_year).min();
    assert_eq!(onset_year(&combined), first);
    assert_eq!(first, Some(1950));

    let smoothed = smooth(&combined, 3);
    let sum_of_smoothed =
        combine(&per_term.iter().map(|s| smooth(s, 3)).collect::<Vec<_>>()).unwrap();
    for (a, b) in smoothed.points.iter().zip(&sum_of_smoothed.points) {
        assert!((a.1 - b.1).abs() <= 1e-12 * a.1.max(1e-12));
    }
}

#[test]
fn onset_of_a_late_term() {
    let mut tsv = String::new();
    for year in 1984..=2000 {
        tsv.push_str(&format!("intersectionality\t{year}\t{}\t1\n", year - 1980));
    }
    let totals: BTreeMap<i32, u64> = (1950..=2000).map(|y| (y, 10_000)).collect();
    let counts = &parse_ngram_str(&tsv).unwrap()["intersectionality"];
    let s = relative_series("intersectionality", counts, &totals, 1950..=2000).unwrap();
    assert_eq!(onset_year(&s), Some(1984));
}
