use serde::{Deserialize, Serialize};

use super::MetricsRecord;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 500;

/// Anything carrying per-generation offspring counts.
pub trait OffspringStats {
    fn generation(&self) -> usize;
    fn offspring_added(&self) -> usize;
    fn qd_score_added(&self) -> f64;
}

impl OffspringStats for MetricsRecord {
    fn generation(&self) -> usize {
        self.generation
    }
    fn offspring_added(&self) -> usize {
        self.offspring_added
    }
    fn qd_score_added(&self) -> f64 {
        self.qd_score_added
    }
}

/// One row of `analysis.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingPoint {
    pub generation: usize,
    pub offspring_added: f64,
    pub qd_score_added_per_offspring: f64,
}

/// Trailing-window statistics. The window at position `t` covers the last
/// `min(window, t + 1)` entries. The per-offspring value is the windowed QD
/// sum over the windowed offspring sum, or 0 when nothing was added.
pub fn rolling_stats<S: OffspringStats>(series: &[S], window: usize) -> Result<Vec<RollingPoint>> {
    if window == 0 {
        return Err(Error::invalid("window", "must be >= 1"));
    }
    Ok((0..series.len())
        .map(|t| {
            let start = (t + 1).saturating_sub(window);
            let span = &series[start..=t];
            let mut added = 0usize;
            let mut qd = 0.0;
            for s in span {
                added += s.offspring_added();
                qd += s.qd_score_added();
            }
            RollingPoint {
                generation: series[t].generation(),
                offspring_added: added as f64 / span.len() as f64,
                qd_score_added_per_offspring: if added == 0 { 0.0 } else { qd / added as f64 },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(generation: usize, offspring_added: usize, qd_score_added: f64) -> MetricsRecord {
        MetricsRecord {
            generation,
            qd_score: 0.0,
            coverage: 0.0,
            max_fitness: 0.0,
            offspring_added,
            qd_score_added,
        }
    }

    #[test]
    fn constant_series() {
        let series: Vec<_> = (1..=1200).map(|g| record(g, 4, 1.0)).collect();
        let out = rolling_stats(&series, 500).unwrap();
        assert!(out.iter().all(|p| p.offspring_added == 4.0));
        assert!(out.iter().all(|p| p.qd_score_added_per_offspring == 0.25));
    }

    #[test]
    fn truncated_window() {
        let series = vec![record(1, 2, 1.0), record(2, 4, 1.0), record(3, 0, 0.0)];
        let out = rolling_stats(&series, 500).unwrap();
        assert_eq!(out[0].offspring_added, 2.0);
        assert_eq!(out[1].offspring_added, 3.0);
        assert_eq!(out[2].offspring_added, 2.0);
        assert_eq!(out[2].generation, 3);
    }

    #[test]
    fn per_offspring_ratio() {
        let series = vec![record(1, 1, 2.0), record(2, 1, 2.0)];
        let out = rolling_stats(&series, 2).unwrap();
        assert_eq!(out[1].qd_score_added_per_offspring, 2.0);
    }

    #[test]
    fn no_additions_gives_zero() {
        let series = vec![record(1, 0, 0.0), record(2, 0, 0.0)];
        let out = rolling_stats(&series, 2).unwrap();
        assert_eq!(out[1].qd_score_added_per_offspring, 0.0);
        assert!(rolling_stats(&series, 0).is_err());
    }
}
