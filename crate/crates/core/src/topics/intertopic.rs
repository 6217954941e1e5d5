use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{TopicError, TopicModel};
use crate::linalg::symmetric_eigen;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Classical (Torgerson) MDS treating divergences as distances.
    #[default]
    Mds,
    /// Principal components of the rows of the divergence matrix.
    Pca,
}

/// Two-dimensional topic layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertopicMap {
    pub projection: Projection,
    pub points: Vec<[f64; 2]>,
    /// Share of corpus tokens assigned to each topic.
    pub weights: Vec<f64>,
    /// Pairwise Jensen-Shannon divergences (natural log).
    pub divergence: Vec<Vec<f64>>,
}

/// Jensen-Shannon divergence in nats; bounded by ln 2.
pub fn jensen_shannon(p: &[f64], q: &[f64]) -> f64 {
    let kl_to_mid = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &y)| x * (x / (0.5 * (x + y))).ln())
            .sum()
    };
    (0.5 * kl_to_mid(p, q) + 0.5 * kl_to_mid(q, p)).max(0.0)
}

/// Classical MDS of a distance matrix into `dims` coordinates. Negative
/// eigenvalues (non-Euclidean residue) map to zero coordinates.
pub fn classical_mds(dist: &[Vec<f64>], dims: usize) -> Vec<Vec<f64>> {
    let n = dist.len();
    let sq: Vec<Vec<f64>> = dist
        .iter()
        .map(|r| r.iter().map(|d| d * d).collect())
        .collect();
    let row_mean: Vec<f64> = sq
        .iter()
        .map(|r| r.iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| -0.5 * (sq[i][j] - row_mean[i] - row_mean[j] + grand))
                .collect()
        })
        .collect();
    let eig = symmetric_eigen(&b);
    (0..n)
        .map(|i| {
            (0..dims)
                .map(|d| match (eig.values.get(d), eig.vectors.get(d)) {
                    (Some(&l), Some(v)) if l > 0.0 => v[i] * l.sqrt(),
                    _ => 0.0,
                })
                .collect()
        })
        .collect()
}

fn pca_rows(rows: &[Vec<f64>], dims: usize) -> Vec<Vec<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let means: Vec<f64> = (0..m)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&means).map(|(x, mu)| x - mu).collect())
        .collect();
    let cov: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| centered.iter().map(|r| r[a] * r[b]).sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    let eig = symmetric_eigen(&cov);
    centered
        .iter()
        .map(|r| {
            (0..dims)
                .map(|d| {
                    eig.vectors
                        .get(d)
                        .map_or(0.0, |v| r.iter().zip(v).map(|(x, y)| x * y).sum())
                })
                .collect()
        })
        .collect()
}

#[allow(clippy::needless_range_loop)]
pub fn intertopic_map(
    model: &TopicModel,
    projection: Projection,
) -> Result<IntertopicMap, TopicError> {
    let k = model.k();
    if k < 2 {
        return Err(TopicError::Input(
            "an intertopic map needs at least 2 topics".into(),
        ));
    }
    let mut divergence = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = jensen_shannon(&model.phi[i], &model.phi[j]);
            divergence[i][j] = d;
            divergence[j][i] = d;
        }
    }
    let coords = match projection {
        Projection::Mds => classical_mds(&divergence, 2),
        Projection::Pca => pca_rows(&divergence, 2),
    };
    Ok(IntertopicMap {
        projection,
        points: coords.into_iter().map(|c| [c[0], c[1]]).collect(),
        weights: model.weights.clone(),
        divergence,
    })
}

/// `topic,x,y,weight`, one row per topic.
pub fn write_intertopic_csv<W: Write>(out: W, map: &IntertopicMap) -> Result<(), TopicError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["topic", "x", "y", "weight"])?;
    for (t, (p, wt)) in map.points.iter().zip(&map.weights).enumerate() {
        w.write_record([
            t.to_string(),
            p[0].to_string(),
            p[1].to_string(),
            wt.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::TopicModelConfig;

    fn model(phi: Vec<Vec<f64>>) -> TopicModel {
        let k = phi.len();
        let v = phi[0].len();
        TopicModel {
            config: TopicModelConfig::new(k, 0),
            vocab: (0..v).map(|i| format!("w{i}")).collect(),
            phi,
            theta: vec![],
            doc_ids: vec![],
            corpus_term_counts: vec![1; v],
            weights: vec![1.0 / k as f64; k],
        }
    }

    fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    #[test]
    fn jsd_bounds() {
        assert_eq!(jensen_shannon(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        let d = jensen_shannon(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((d - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn identical_topics_coincide() {
        let m = intertopic_map(
            &model(vec![vec![0.2, 0.8], vec![0.2, 0.8]]),
            Projection::Mds,
        )
        .unwrap();
        assert_eq!(m.divergence[0][1], 0.0);
        assert!(dist(m.points[0], m.points[1]) < 1e-15);
    }

    #[test]
    fn two_topics_embed_isometrically() {
        let m = intertopic_map(
            &model(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]]),
            Projection::Mds,
        )
        .unwrap();
        let jsd = m.divergence[0][1];
        assert!((dist(m.points[0], m.points[1]) - jsd).abs() < 1e-15);
    }

    #[test]
    fn needs_two_topics() {
        assert!(intertopic_map(&model(vec![vec![1.0]]), Projection::Mds).is_err());
    }

    #[test]
    fn pca_projection_runs() {
        let m = intertopic_map(
            &model(vec![
                vec![0.7, 0.2, 0.1],
                vec![0.1, 0.3, 0.6],
                vec![0.3, 0.4, 0.3],
            ]),
            Projection::Pca,
        )
        .unwrap();
        assert_eq!(m.points.len(), 3);
        assert!(m.points.iter().flatten().all(|x| x.is_finite()));
    }
}
