use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    coherence, fit_lda, CoherenceMeasure, CoherenceOptions, TopicError, TopicModel,
    TopicModelConfig,
};
use crate::corpus::TokenizedDoc;
use crate::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: usize,
    pub coherence: f64,
}

/// Coherence by number of topics, in increasing k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub measure: CoherenceMeasure,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn from_points(measure: CoherenceMeasure, mut points: Vec<SweepPoint>) -> Self {
        points.sort_by_key(|p| p.k);
        points.dedup_by_key(|p| p.k);
        SweepResult { measure, points }
    }

    pub fn ks(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.k).collect()
    }
}

/// `start, start + step, ...` up to and including `end`.
pub fn linear_schedule(start: usize, end: usize, step: usize) -> Vec<usize> {
    (start..=end).step_by(step.max(1)).collect()
}

fn check_schedule(schedule: &[usize]) -> Result<(), TopicError> {
    if schedule.is_empty() {
        return Err(TopicError::Input("empty k schedule".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TopicError::Input(
            "k schedule must be strictly increasing".into(),
        ));
    }
    if schedule[0] < 2 {
        return Err(TopicError::Input("coherence sweeps need k >= 2".into()));
    }
    Ok(())
}

/// Per-k model configuration: the base settings with `k` replaced, `alpha`
/// left at its `1/k` default unless fixed, and a seed mixed from the base
/// seed and k.
pub fn config_for_k(base: &TopicModelConfig, k: usize) -> TopicModelConfig {
    TopicModelConfig {
        k,
        seed: derive_seed(base.seed, k as u64),
        ..base.clone()
    }
}

/// Fits one model per k (in parallel) and scores each.
pub fn sweep_k_models(
    docs: &[TokenizedDoc],
    schedule: &[usize],
    base: &TopicModelConfig,
    opts: &CoherenceOptions,
) -> Result<Vec<(TopicModel, f64)>, TopicError> {
    check_schedule(schedule)?;
    schedule
        .par_iter()
        .map(|&k| {
            let at_k = |e| TopicError::AtK {
                k,
                source: Box::new(e),
            };
            let model = fit_lda(docs, &config_for_k(base, k)).map_err(at_k)?;
            let score = coherence(&model, docs, opts).map_err(at_k)?.score;
            Ok((model, score))
        })
        .collect()
}

pub fn sweep_k(
    docs: &[TokenizedDoc],
    schedule: &[usize],
    base: &TopicModelConfig,
    opts: &CoherenceOptions,
) -> Result<SweepResult, TopicError> {
    let points = sweep_k_models(docs, schedule, base, opts)?
        .into_iter()
        .map(|(m, c)| SweepPoint {
            k: m.k(),
            coherence: c,
        })
        .collect();
    Ok(SweepResult::from_points(opts.measure, points))
}

/// The fine-step ks between the coarse neighbours of the currently selected
/// k that have not been evaluated yet.
pub fn refine_schedule(coarse: &SweepResult, delta: f64, fine_step: usize) -> Vec<usize> {
    let Some(sel) = select_k(coarse, delta, f64::NEG_INFINITY) else {
        return Vec::new();
    };
    let ks = coarse.ks();
    let pos = ks
        .iter()
        .position(|&k| k == sel.k)
        .expect("selected k is in the sweep");
    let lo = ks[pos.saturating_sub(1)];
    let hi = ks[(pos + 1).min(ks.len() - 1)];
    linear_schedule(lo, hi, fine_step)
        .into_iter()
        .filter(|k| !ks.contains(k))
        .collect()
}

/// A coarse sweep followed by a fine sweep around the coarse selection.
pub fn sweep_two_phase(
    docs: &[TokenizedDoc],
    coarse_schedule: &[usize],
    fine_step: usize,
    delta: f64,
    base: &TopicModelConfig,
    opts: &CoherenceOptions,
) -> Result<SweepResult, TopicError> {
    let coarse = sweep_k(docs, coarse_schedule, base, opts)?;
    let fine = refine_schedule(&coarse, delta, fine_step);
    if fine.is_empty() {
        return Ok(coarse);
    }
    let fine = sweep_k(docs, &fine, base, opts)?;
    let mut points = coarse.points;
    points.extend(fine.points);
    Ok(SweepResult::from_points(opts.measure, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub k: usize,
    pub coherence: f64,
    pub accepted: bool,
    pub delta: f64,
    pub acceptance: f64,
}

/// Elbow rule: the smallest k after which no later point improves on its
/// coherence by `delta` or more. The selection is accepted when its
/// coherence reaches `acceptance`.
pub fn select_k(sweep: &SweepResult, delta: f64, acceptance: f64) -> Option<Selection> {
    let pts = &sweep.points;
    let mut best_later = f64::NEG_INFINITY;
    let mut later_max = vec![f64::NEG_INFINITY; pts.len()];
    for i in (0..pts.len()).rev() {
        later_max[i] = best_later;
        best_later = best_later.max(pts[i].coherence);
    }
    pts.iter()
        .zip(&later_max)
        .find(|(p, &m)| m - p.coherence < delta)
        .map(|(p, _)| Selection {
            k: p.k,
            coherence: p.coherence,
            accepted: p.coherence >= acceptance,
            delta,
            acceptance,
        })
}

pub fn write_sweep_csv<W: Write>(out: W, sweep: &SweepResult) -> Result<(), TopicError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "coherence"])?;
    for p in &sweep.points {
        w.write_record([p.k.to_string(), p.coherence.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sweep(points: &[(usize, f64)]) -> SweepResult {
        SweepResult::from_points(
            CoherenceMeasure::CV,
            points
                .iter()
                .map(|&(k, c)| SweepPoint { k, coherence: c })
                .collect(),
        )
    }

    #[test]
    fn schedules() {
        assert_eq!(
            linear_schedule(2, 56, 6),
            [2, 8, 14, 20, 26, 32, 38, 44, 50, 56]
        );
        assert_eq!(linear_schedule(2, 2, 6), [2]);
    }

    #[test]
    fn single_point_below_threshold() {
        let s = select_k(&sweep(&[(4, 0.3564)]), 0.01, 0.5).unwrap();
        assert_eq!(s.k, 4);
        assert!(!s.accepted);
    }

    #[test]
    fn increasing_sweep_picks_largest() {
        let s = select_k(&sweep(&[(2, 0.1), (3, 0.2), (4, 0.3)]), 0.01, 0.5).unwrap();
        assert_eq!(s.k, 4);
    }

    #[test]
    fn plateau_picks_its_start() {
        let pts = [
            (2, 0.30),
            (8, 0.42),
            (14, 0.50),
            (20, 0.55),
            (30, 0.58),
            (37, 0.60),
            (44, 0.601),
            (50, 0.598),
        ];
        let s = select_k(&sweep(&pts), 0.01, 0.5).unwrap();
        assert_eq!(s.k, 37);
        assert!(s.accepted);
    }

    #[test]
    fn empty_sweep() {
        assert!(select_k(&sweep(&[]), 0.01, 0.5).is_none());
    }

    #[test]
    fn refine_around_selection() {
        let coarse = sweep(&[(2, 0.2), (8, 0.4), (14, 0.6), (20, 0.6)]);
        assert_eq!(
            refine_schedule(&coarse, 0.01, 1),
            [9, 10, 11, 12, 13, 15, 16, 17, 18, 19]
        );
    }

    #[test]
    fn schedule_validation() {
        let base = TopicModelConfig::new(2, 0);
        let opts = CoherenceOptions::default();
        for bad in [vec![], vec![3, 3], vec![1, 2]] {
            assert!(matches!(
                sweep_k(&[], &bad, &base, &opts),
                Err(TopicError::Input(_))
            ));
        }
    }

    proptest! {
        #[test]
        fn appending_point_within_delta_keeps_selection(
            cs in prop::collection::vec(0.0f64..1.0, 1..12),
            new in 0.0f64..1.2,
        ) {
            let delta = 0.05;
            let pts: Vec<(usize, f64)> = cs.iter().enumerate().map(|(i, &c)| (2 + i, c)).collect();
            let sel = select_k(&sweep(&pts), delta, 0.5).unwrap();
            let mut extended = pts.clone();
            extended.push((2 + cs.len(), new));
            let after = select_k(&sweep(&extended), delta, 0.5).unwrap();
            if new - sel.coherence < delta {
                prop_assert_eq!(after.k, sel.k);
            } else {
                prop_assert!(after.k > sel.k);
            }
        }
    }
}
