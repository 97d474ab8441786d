//! QD metrics, rolling offspring statistics and genotype effective dimensionality.

mod jacobi;
mod pca;
mod rolling;

use serde::{Deserialize, Serialize};

use crate::cvt_archive::CvtArchive;
use crate::error::{Error, Result};

pub use jacobi::{symmetric_eigenvalues, JacobiOptions};
pub use pca::{effective_dimensionality, EffectiveDimReport, DEFAULT_VARIANCE_THRESHOLD};
pub use rolling::{rolling_stats, OffspringStats, RollingPoint, DEFAULT_WINDOW};

/// One row of `metrics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub generation: usize,
    pub qd_score: f64,
    pub coverage: f64,
    pub max_fitness: f64,
    pub offspring_added: usize,
    pub qd_score_added: f64,
}

/// Sum over elites of `fitness − min_fitness`.
pub fn qd_score(archive: &CvtArchive, min_fitness: f64) -> f64 {
    qd_score_of(archive.iter().map(|(_, s)| s.fitness), min_fitness)
}

pub fn qd_score_of(fitnesses: impl IntoIterator<Item = f64>, min_fitness: f64) -> f64 {
    fitnesses.into_iter().map(|f| f - min_fitness).sum()
}

/// Fraction of occupied cells.
pub fn coverage(archive: &CvtArchive) -> f64 {
    archive.occupied_count() as f64 / archive.capacity() as f64
}

/// Highest raw fitness in the archive.
pub fn max_fitness(archive: &CvtArchive) -> Result<f64> {
    max_fitness_of(archive.iter().map(|(_, s)| s.fitness))
}

pub fn max_fitness_of(fitnesses: impl IntoIterator<Item = f64>) -> Result<f64> {
    fitnesses
        .into_iter()
        .reduce(f64::max)
        .ok_or(Error::EmptyArchive)
}

pub fn metrics_to_csv(records: &[MetricsRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record([
            "generation",
            "qd_score",
            "coverage",
            "max_fitness",
            "offspring_added",
            "qd_score_added",
        ])
        .expect("in-memory write");
    }
    for r in records {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

pub fn metrics_from_csv(text: &str) -> Result<Vec<MetricsRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::Parse(format!("metrics row {}: {e}", i + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cvt_archive::CentroidSet;
    use crate::genome::{BehaviorDescriptor, Genotype, ScoredSolution};

    fn line_archive(k: usize, fitnesses: &[f64]) -> CvtArchive {
        let points = (0..k).map(|j| vec![j as f64]).collect();
        let set = CentroidSet::from_points(points, vec![(0.0, k as f64)]).unwrap();
        let mut a = CvtArchive::new(Arc::new(set), 1);
        for (j, &f) in fitnesses.iter().enumerate() {
            a.try_insert(ScoredSolution::new(
                Genotype::zeros(1),
                f,
                BehaviorDescriptor::new(vec![j as f64]),
            ))
            .unwrap();
        }
        a
    }

    #[test]
    fn qd_score_examples() {
        assert_eq!(qd_score(&line_archive(4, &[]), 0.0), 0.0);
        assert_eq!(qd_score(&line_archive(4, &[1.0, 2.0, 3.0]), 0.0), 6.0);
        assert_eq!(qd_score(&line_archive(4, &[-1.0, 2.0]), -5.0), 11.0);
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(&line_archive(1024, &[])), 0.0);
        assert_eq!(coverage(&line_archive(1024, &[0.0; 3])), 3.0 / 1024.0);
        assert_eq!(coverage(&line_archive(8, &[0.0; 8])), 1.0);
    }

    #[test]
    fn max_fitness_examples() {
        assert_eq!(max_fitness(&line_archive(2, &[2.5])).unwrap(), 2.5);
        assert_eq!(max_fitness(&line_archive(2, &[-3.0, -1.0])).unwrap(), -1.0);
        assert_eq!(max_fitness(&line_archive(2, &[])), Err(Error::EmptyArchive));
    }

    #[test]
    fn metrics_csv_round_trip() {
        let rows = vec![
            MetricsRecord {
                generation: 1,
                qd_score: 12.5,
                coverage: 0.25,
                max_fitness: -0.1,
                offspring_added: 3,
                qd_score_added: 1e-7,
            },
            MetricsRecord {
                generation: 2,
                qd_score: 13.0,
                coverage: 0.5,
                max_fitness: 0.0,
                offspring_added: 0,
                qd_score_added: 0.0,
            },
        ];
        let text = metrics_to_csv(&rows);
        assert!(text.starts_with(
            "generation,qd_score,coverage,max_fitness,offspring_added,qd_score_added\n"
        ));
        assert_eq!(metrics_from_csv(&text).unwrap(), rows);
        assert_eq!(metrics_from_csv(&metrics_to_csv(&[])).unwrap(), vec![]);
    }
}
