//! Cyclic Jacobi eigenvalue iteration for real symmetric matrices.
//!
//! Sweeps over all `(p, q)` pairs with `p < q`, zeroing `a[p][q]` by a plane
//! rotation, until the off-diagonal Frobenius norm falls below
//! `rel_tol · max(|trace|, ‖A‖_F)` or `max_sweeps` is exhausted.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOptions {
    pub rel_tol: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions {
            rel_tol: 1e-12,
            max_sweeps: 100,
        }
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += 2.0 * a[p * n + q] * a[p * n + q];
        }
    }
    s.sqrt()
}

/// Eigenvalues of the symmetric `n × n` row-major matrix, sorted descending.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize, opts: JacobiOptions) -> Result<Vec<f64>> {
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            what: "jacobi matrix",
            expected: n * n,
            found: matrix.len(),
        });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            what: "jacobi matrix",
        });
    }
    let mut a = matrix.to_vec();
    let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
    let frobenius = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = trace.abs().max(frobenius);
    let target = opts.rel_tol * scale;

    for _ in 0..opts.max_sweeps {
        if off_diagonal_norm(&a, n) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    if off_diagonal_norm(&a, n) > target {
        return Err(Error::DegenerateData("jacobi iteration did not converge"));
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose, StreamKey};
    use rand::Rng;

    fn random_orthogonal(n: usize, seed: u64) -> Vec<f64> {
        // Gram-Schmidt on a random matrix; rows are the basis vectors.
        let mut rng = stream(seed, StreamKey::new(Purpose::Auxiliary, 0, 0));
        let mut q: Vec<Vec<f64>> = Vec::new();
        while q.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for u in &q {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                q.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        q.concat()
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b, d) = (2.0, 1.0, 3.0);
        let eig = symmetric_eigenvalues(&[a, b, b, d], 2, JacobiOptions::default()).unwrap();
        let mid = (a + d) / 2.0;
        let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        assert!((eig[0] - (mid + r)).abs() < 1e-12);
        assert!((eig[1] - (mid - r)).abs() < 1e-12);
    }

    #[test]
    fn recovers_planted_spectrum() {
        let n = 12;
        let q = random_orthogonal(n, 4);
        let lambda: Vec<f64> = (0..n).map(|i| (n - i) as f64 * 0.75 - 2.0).collect();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).map(|k| q[k * n + i] * lambda[k] * q[k * n + j]).sum();
            }
        }
        let eig = symmetric_eigenvalues(&m, n, JacobiOptions::default()).unwrap();
        for (got, want) in eig.iter().zip(&lambda) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn diagonal_and_empty() {
        let eig = symmetric_eigenvalues(&[1.0, 0.0, 0.0, 5.0], 2, JacobiOptions::default()).unwrap();
        assert_eq!(eig, vec![5.0, 1.0]);
        assert!(symmetric_eigenvalues(&[], 0, JacobiOptions::default())
            .unwrap()
            .is_empty());
        assert!(symmetric_eigenvalues(&[1.0, 2.0], 2, JacobiOptions::default()).is_err());
    }
}
