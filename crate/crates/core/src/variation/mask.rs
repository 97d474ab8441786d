//! Poisson-process crossover masks.
//!
//! Given genotype length `N` and rate `λ`:
//!
//! 1. `K = max(1, ⌊λN⌋)` crossover events.
//! 2. `K` gaps `d_i ~ Exp(1)`, cumulative sums `c_i`.
//! 3. Event positions `z_i = ⌊(c_i / c_K)(N − 1)⌋`, so the last event always sits on gene `N − 1`.
//! 4. Gene `j` (0-based) takes parent a (bit 1) when an even number of events satisfy `j ≥ z_i`.
//!
//! Coincident positions are kept; two events on the same gene cancel.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::genome::Genotype;

/// Binary per-gene parent selector; `true` picks parent a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossoverMask {
    bits: Vec<bool>,
    events: usize,
}

impl CrossoverMask {
    /// Builds a mask directly from bits. `events` is recorded as the number of value changes.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let events = bits.windows(2).filter(|w| w[0] != w[1]).count();
        CrossoverMask { bits, events }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of crossover events `K` used to build the mask.
    pub fn event_count(&self) -> usize {
        self.events
    }

    /// Number of maximal constant-value runs.
    pub fn runs(&self) -> usize {
        if self.bits.is_empty() {
            return 0;
        }
        1 + self.bits.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Bits as 0/1 bytes.
    pub fn to_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }
}

/// `K = max(1, ⌊λN⌋)`.
pub fn event_count(n: usize, lambda_cross: f64) -> usize {
    ((lambda_cross * n as f64).floor() as usize).max(1)
}

/// Samples a fresh mask of length `n`.
pub fn generate_mask<R: Rng + ?Sized>(n: usize, lambda_cross: f64, rng: &mut R) -> CrossoverMask {
    let k = event_count(n, lambda_cross);
    let gaps: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    mask_from_gaps(n, &gaps).expect("exponential gaps are finite and non-negative")
}

/// Deterministic part of mask construction: turns `K` inter-event gaps into the mask.
pub fn mask_from_gaps(n: usize, gaps: &[f64]) -> Result<CrossoverMask> {
    if n == 0 {
        return Err(Error::invalid("n", "genotype length must be at least 1"));
    }
    if gaps.is_empty() {
        return Err(Error::invalid("gaps", "need at least one event"));
    }
    if gaps.iter().any(|g| !g.is_finite() || *g < 0.0) {
        return Err(Error::invalid("gaps", "gaps must be finite and non-negative"));
    }
    let positions = event_positions(n, gaps);

    let mut bits = Vec::with_capacity(n);
    let mut crossed = 0;
    for j in 0..n {
        while crossed < positions.len() && positions[crossed] <= j {
            crossed += 1;
        }
        bits.push(crossed % 2 == 0);
    }
    Ok(CrossoverMask {
        bits,
        events: gaps.len(),
    })
}

/// `z_i = ⌊(c_i / c_K)(N − 1)⌋`, non-decreasing.
pub fn event_positions(n: usize, gaps: &[f64]) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(gaps.len());
    let mut total = 0.0;
    for g in gaps {
        total += g;
        cumulative.push(total);
    }
    let span = (n - 1) as f64;
    cumulative
        .iter()
        .map(|&c| {
            let ratio = if total > 0.0 { c / total } else { 1.0 };
            ((ratio * span).floor() as usize).min(n - 1)
        })
        .collect()
}

/// Gene `j` from `a` where the mask bit is set, from `b` otherwise.
pub fn crossover(a: &Genotype, b: &Genotype, mask: &CrossoverMask) -> Result<Genotype> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "crossover parent",
            expected: a.len(),
            found: b.len(),
        });
    }
    if mask.len() != a.len() {
        return Err(Error::DimensionMismatch {
            what: "crossover mask",
            expected: a.len(),
            found: mask.len(),
        });
    }
    Ok(Genotype::new(
        a.genes()
            .iter()
            .zip(b.genes())
            .zip(mask.bits())
            .map(|((&x, &y), &m)| if m { x } else { y })
            .collect(),
    ))
}
