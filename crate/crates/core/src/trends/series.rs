use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{TrendError, YearCounts};

pub const DEFAULT_SMOOTHING: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub term_label: String,
    /// `(year, relative_frequency)`, years strictly increasing.
    pub points: Vec<(i32, f64)>,
    pub smoothing: usize,
}

impl TrendSeries {
    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }

    fn span(&self) -> Option<(i32, i32)> {
        Some((self.points.first()?.0, self.points.last()?.0))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    #[default]
    Sum,
    Mean,
}

pub fn relative_series(
    label: &str,
    counts: &YearCounts,
    totals: &BTreeMap<i32, u64>,
    years: RangeInclusive<i32>,
) -> Result<TrendSeries, TrendError> {
    let mut points = Vec::new();
    for year in years {
        let total = *totals.get(&year).ok_or(TrendError::Coverage(year))?;
        if total == 0 {
            return Err(TrendError::ZeroTotal(year));
        }
        points.push((year, counts.match_count(year) as f64 / total as f64));
    }
    Ok(TrendSeries {
        term_label: label.to_string(),
        points,
        smoothing: 0,
    })
}

pub fn combine(series: &[TrendSeries]) -> Result<TrendSeries, TrendError> {
    combine_with(series, CombineMode::Sum)
}

/// Pointwise sum (or mean) over series sharing a year span and smoothing.
/// Years missing from one series inside the span count as zero.
pub fn combine_with(series: &[TrendSeries], mode: CombineMode) -> Result<TrendSeries, TrendError> {
    let first = series
        .first()
        .ok_or_else(|| TrendError::Input("nothing to combine".into()))?;
    for s in &series[1..] {
        if s.span() != first.span() {
            return Err(TrendError::Input(format!(
                "year range of {:?} differs from {:?}",
                s.term_label, first.term_label
            )));
        }
        if s.smoothing != first.smoothing {
            return Err(TrendError::Input(format!(
                "smoothing of {:?} differs from {:?}",
                s.term_label, first.term_label
            )));
        }
    }
    let mut acc: BTreeMap<i32, f64> = BTreeMap::new();
    for s in series {
        for &(y, f) in &s.points {
            *acc.entry(y).or_default() += f;
        }
    }
    let n = series.len() as f64;
    let points = acc
        .into_iter()
        .map(|(y, f)| (y, if mode == CombineMode::Mean { f / n } else { f }))
        .collect();
    Ok(TrendSeries {
        term_label: series
            .iter()
            .map(|s| s.term_label.as_str())
            .collect::<Vec<_>>()
            .join("+"),
        points,
        smoothing: first.smoothing,
    })
}

/// Centered moving average over `2s+1` points; near the ends the window is
/// cut to the points available.
pub fn smooth(series: &TrendSeries, s: usize) -> TrendSeries {
    let n = series.points.len();
    let points = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(s);
            let hi = (i + s).min(n - 1);
            let window = &series.points[lo..=hi];
            let mean = window.iter().map(|p| p.1).sum::<f64>() / window.len() as f64;
            (series.points[i].0, mean)
        })
        .collect();
    TrendSeries {
        term_label: series.term_label.clone(),
        points,
        smoothing: series.smoothing + s,
    }
}

pub fn onset_year(series: &TrendSeries) -> Option<i32> {
    series.points.iter().find(|p| p.1 > 0.0).map(|p| p.0)
}

/// Long-format `term,year,frequency`.
pub fn write_tidy_csv<W: Write>(out: W, series: &[TrendSeries]) -> Result<(), TrendError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "year", "frequency"])?;
    for s in series {
        for &(y, f) in &s.points {
            w.write_record([s.term_label.clone(), y.to_string(), format!("{f:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Wide plot data: a `year` column then one column per series. Years
/// missing from a series are written as zero.
pub fn write_plot_csv<W: Write>(out: W, series: &[TrendSeries]) -> Result<(), TrendError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["year".to_string()];
    header.extend(series.iter().map(|s| s.term_label.clone()));
    w.write_record(&header)?;
    let mut years: Vec<i32> = series.iter().flat_map(|s| s.years()).collect();
    years.sort_unstable();
    years.dedup();
    for y in years {
        let mut row = vec![y.to_string()];
        row.extend(
            series
                .iter()
                .map(|s| format!("{:e}", s.get(y).unwrap_or(0.0))),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
