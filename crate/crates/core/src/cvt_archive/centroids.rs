use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::all_finite;
use crate::rng::{self, Purpose, StreamKey};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Parameters for building a centroid set with Lloyd's algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvtParams {
    pub k: usize,
    pub samples: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl CvtParams {
    pub fn new(k: usize, samples: usize) -> Self {
        CvtParams {
            k,
            samples,
            max_iters: 100,
            tol: 1e-6,
        }
    }
}

/// Fixed set of `k` centroids in a bounded descriptor space.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    dim: usize,
    points: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

pub(crate) fn check_bounds(bounds: &[(f64, f64)]) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::invalid("bounds", "need at least one dimension"));
    }
    for (dim, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidBounds { dim });
        }
    }
    Ok(())
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest row of `points` (row length `dim`); ties go to the lowest index.
#[inline]
fn nearest_row(points: &[f64], dim: usize, query: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in points.chunks_exact(dim).enumerate() {
        let d = squared_distance(c, query);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    (best, best_d)
}

impl CentroidSet {
    /// Wraps explicit centroids. Checks bounds, dimensions, containment and distinctness.
    pub fn from_points(points: Vec<Vec<f64>>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        check_bounds(&bounds)?;
        if points.is_empty() {
            return Err(Error::invalid("k", "need at least one centroid"));
        }
        let dim = bounds.len();
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "centroid",
                    expected: dim,
                    found: p.len(),
                });
            }
            if !all_finite(p) {
                return Err(Error::NonFiniteValue { what: "centroid" });
            }
            if p.iter().zip(&bounds).any(|(v, &(lo, hi))| *v < lo || *v > hi) {
                return Err(Error::invalid("centroids", "centroid outside bounds"));
            }
            flat.extend_from_slice(p);
        }
        let mut sorted = points;
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("centroids", "duplicate centroid"));
        }
        Ok(CentroidSet {
            dim,
            points: flat,
            bounds,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn centroid(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    /// Exact nearest centroid by Euclidean distance, lowest index on ties.
    pub fn nearest(&self, descriptor: &[f64]) -> Result<usize> {
        if descriptor.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "descriptor",
                expected: self.dim,
                found: descriptor.len(),
            });
        }
        Ok(nearest_row(&self.points, self.dim, descriptor).0)
    }

    /// CSV with a header row, one row per centroid.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index");
        for d in 0..self.dim {
            out.push_str(&format!(",c{d}"));
        }
        out.push('\n');
        for (j, c) in self.iter().enumerate() {
            out.push_str(&j.to_string());
            for v in c {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let mut lines = text.lines();
        lines
            .next()
            .ok_or_else(|| Error::Parse("empty centroid file".into()))?;
        let mut points = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').skip(1).map(|s| s.trim().parse::<f64>()).collect();
            let row =
                row.map_err(|e| Error::Parse(format!("centroid line {}: {e}", lineno + 2)))?;
            points.push(row);
        }
        CentroidSet::from_points(points, bounds)
    }
}

/// Builds `k` centroids by Lloyd's algorithm over uniform samples in `bounds`.
pub fn build_centroids(params: &CvtParams, bounds: &[(f64, f64)], seed: u64) -> Result<CentroidSet> {
    build_centroids_traced(params, bounds, seed).map(|(set, _)| set)
}

/// Like [`build_centroids`], also returning the quantization error (mean squared
/// sample-to-centroid distance) observed at each assignment step.
pub fn build_centroids_traced(
    params: &CvtParams,
    bounds: &[(f64, f64)],
    seed: u64,
) -> Result<(CentroidSet, Vec<f64>)> {
    check_bounds(bounds)?;
    let CvtParams {
        k,
        samples,
        max_iters,
        tol,
    } = *params;
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if samples < k {
        return Err(Error::invalid("samples", format!("need at least k={k} samples")));
    }
    let dim = bounds.len();
    let mut rng = rng::stream(seed, StreamKey::new(Purpose::Centroids, 0, 0));

    let mut data = Vec::with_capacity(samples * dim);
    for _ in 0..samples {
        for &(lo, hi) in bounds {
            data.push(rng.random_range(lo..hi));
        }
    }

    let mut centroids = Vec::with_capacity(k * dim);
    for i in index::sample(&mut rng, samples, k).into_iter() {
        centroids.extend_from_slice(&data[i * dim..(i + 1) * dim]);
    }

    let mut errors = Vec::new();
    let mut labels = vec![0usize; samples];
    let mut dists = vec![0.0f64; samples];
    for _ in 0..max_iters {
        assign(&data, dim, &centroids, &mut labels, &mut dists);
        errors.push(dists.iter().sum::<f64>() / samples as f64);

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (row, &label) in data.chunks_exact(dim).zip(&labels) {
            counts[label] += 1;
            for (s, v) in sums[label * dim..(label + 1) * dim].iter_mut().zip(row) {
                *s += v;
            }
        }

        // Empty clusters take the samples farthest from their assigned centroid.
        let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
        let mut donors = Vec::new();
        if !empty.is_empty() {
            let mut order: Vec<usize> = (0..samples).collect();
            order.sort_by(|&a, &b| dists[b].total_cmp(&dists[a]).then(a.cmp(&b)));
            donors = order.into_iter().take(empty.len()).collect();
        }

        let mut movement = 0.0f64;
        let mut next = centroids.clone();
        for j in 0..k {
            let target = &mut next[j * dim..(j + 1) * dim];
            if counts[j] > 0 {
                for (t, s) in target.iter_mut().zip(&sums[j * dim..(j + 1) * dim]) {
                    *t = s / counts[j] as f64;
                }
            }
        }
        for (&j, &donor) in empty.iter().zip(&donors) {
            next[j * dim..(j + 1) * dim].copy_from_slice(&data[donor * dim..(donor + 1) * dim]);
        }
        for (old, new) in centroids.chunks_exact(dim).zip(next.chunks_exact(dim)) {
            movement = movement.max(squared_distance(old, new).sqrt());
        }
        centroids = next;
        if movement < tol {
            break;
        }
    }

    let set = CentroidSet {
        dim,
        points: centroids,
        bounds: bounds.to_vec(),
    };
    Ok((set, errors))
}

fn assign(data: &[f64], dim: usize, centroids: &[f64], labels: &mut [usize], dists: &mut [f64]) {
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_exact(dim)
            .zip(labels.par_iter_mut().zip(dists.par_iter_mut()))
            .for_each(|(row, (label, dist))| {
                let (j, d) = nearest_row(centroids, dim, row);
                *label = j;
                *dist = d;
            });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (row, (label, dist)) in data
            .chunks_exact(dim)
            .zip(labels.iter_mut().zip(dists.iter_mut()))
        {
            let (j, d) = nearest_row(centroids, dim, row);
            *label = j;
            *dist = d;
        }
    }
}
