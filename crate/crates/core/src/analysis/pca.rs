use serde::{Deserialize, Serialize};

use super::jacobi::{symmetric_eigenvalues, JacobiOptions};
use crate::error::{Error, Result};

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.95;

/// Number of principal components needed to reach a variance threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveDimReport {
    pub num_components: usize,
    /// Per-component variance fractions, descending, summing to 1.
    pub variance_fractions: Vec<f64>,
    /// Sample-covariance eigenvalues (divisor `M − 1`), descending, clipped at 0.
    pub eigenvalues: Vec<f64>,
}

/// PCA effective dimensionality of the rows of an `M × N` genotype matrix.
///
/// Columns are centred (not scaled). The nonzero covariance spectrum is taken
/// from the smaller of the `M × M` Gram matrix and the `N × N` covariance.
pub fn effective_dimensionality<R: AsRef<[f64]>>(
    rows: &[R],
    threshold: f64,
) -> Result<EffectiveDimReport> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid("threshold", "must lie in (0, 1]"));
    }
    let m = rows.len();
    if m < 2 {
        return Err(Error::DegenerateData("need at least two genotypes"));
    }
    let n = rows[0].as_ref().len();
    if n == 0 {
        return Err(Error::DegenerateData("genotypes are empty"));
    }
    for r in rows {
        if r.as_ref().len() != n {
            return Err(Error::DimensionMismatch {
                what: "genotype row",
                expected: n,
                found: r.as_ref().len(),
            });
        }
        if r.as_ref().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { what: "genotype row" });
        }
    }
    if rows.iter().all(|r| r.as_ref() == rows[0].as_ref()) {
        return Err(Error::DegenerateData("all genotypes identical"));
    }

    let mut mean = vec![0.0; n];
    for r in rows {
        for (acc, v) in mean.iter_mut().zip(r.as_ref()) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    let centred: Vec<f64> = rows
        .iter()
        .flat_map(|r| r.as_ref().iter().zip(&mean).map(|(v, mu)| v - mu))
        .collect();

    let denom = (m - 1) as f64;
    let (size, matrix) = if m <= n {
        let mut g = vec![0.0; m * m];
        for i in 0..m {
            let ri = &centred[i * n..(i + 1) * n];
            for j in i..m {
                let rj = &centred[j * n..(j + 1) * n];
                let v = ri.iter().zip(rj).map(|(a, b)| a * b).sum::<f64>() / denom;
                g[i * m + j] = v;
                g[j * m + i] = v;
            }
        }
        (m, g)
    } else {
        let mut c = vec![0.0; n * n];
        for row in centred.chunks_exact(n) {
            for i in 0..n {
                for j in i..n {
                    c[i * n + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let v = c[i * n + j] / denom;
                c[i * n + j] = v;
                c[j * n + i] = v;
            }
        }
        (n, c)
    };

    let eigenvalues: Vec<f64> = symmetric_eigenvalues(&matrix, size, JacobiOptions::default())?
        .into_iter()
        .map(|v| v.max(0.0))
        .collect();
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateData("zero total variance"));
    }
    let variance_fractions: Vec<f64> = eigenvalues.iter().map(|v| v / total).collect();
    let mut cumulative = 0.0;
    let mut num_components = variance_fractions.len();
    for (i, f) in variance_fractions.iter().enumerate() {
        cumulative += f;
        if cumulative >= threshold {
            num_components = i + 1;
            break;
        }
    }
    Ok(EffectiveDimReport {
        num_components,
        variance_fractions,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose, StreamKey};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn rng(seed: u64) -> crate::rng::StreamRng {
        stream(seed, StreamKey::new(Purpose::Auxiliary, 0, 0))
    }

    #[test]
    fn plane_in_five_dims() {
        let mut r = rng(1);
        let origin: Vec<f64> = (0..5).map(|_| r.random_range(-1.0..1.0)).collect();
        let u: Vec<f64> = (0..5).map(|_| r.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..5).map(|_| r.random_range(-1.0..1.0)).collect();
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| {
                let (a, b): (f64, f64) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
                (0..5).map(|i| origin[i] + a * u[i] + b * v[i]).collect()
            })
            .collect();
        // Rank-2 spectrum: the rest is rounding noise.
        let rep = effective_dimensionality(&rows, 1.0 - 1e-9).unwrap();
        assert_eq!(rep.num_components, 2);
    }

    #[test]
    fn isotropic_cloud_needs_all_components() {
        let mut r = rng(2);
        let rows: Vec<Vec<f64>> = (0..10_000)
            .map(|_| (0..4).map(|_| r.sample(StandardNormal)).collect())
            .collect();
        let rep = effective_dimensionality(&rows, 0.95).unwrap();
        assert_eq!(rep.num_components, 4);
        let sum: f64 = rep.variance_fractions.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(rep.variance_fractions.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn gram_and_covariance_paths_agree() {
        // M > N takes the covariance path; padding columns with zeros forces the Gram path.
        let small = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]];
        let cov = effective_dimensionality(&small, 1.0).unwrap();
        let wide: Vec<Vec<f64>> = small
            .iter()
            .map(|r| vec![r[0], r[1], 0.0, 0.0])
            .collect();
        let gram = effective_dimensionality(&wide, 1.0).unwrap();
        for (x, y) in cov.eigenvalues.iter().zip(&gram.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_inputs() {
        let same = vec![vec![1.0, 2.0]; 5];
        assert!(matches!(
            effective_dimensionality(&same, 0.95),
            Err(Error::DegenerateData(_))
        ));
        assert!(effective_dimensionality(&[vec![1.0]], 0.95).is_err());
        assert!(effective_dimensionality(&[vec![1.0], vec![1.0, 2.0]], 0.95).is_err());
        assert!(effective_dimensionality(&[vec![1.0], vec![2.0]], 0.0).is_err());
    }

    #[test]
    fn threshold_is_inclusive() {
        // Eigenvalue fractions exactly (0.5, 0.5): threshold 0.5 needs one component.
        let rows = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        assert_eq!(effective_dimensionality(&rows, 0.5).unwrap().num_components, 1);
        assert_eq!(effective_dimensionality(&rows, 0.51).unwrap().num_components, 2);
    }
}
