//! Variation operators: Iso, IsoCross, Iso+LineDD and IsoLineCross.
//!
//! All operators draw from the caller's RNG in a fixed order:
//!
//! * Iso: `N` iso normals.
//! * Iso+LineDD: the line scalar `s`, then `N` iso normals.
//! * IsoCross / IsoLineCross: `s`, `N` iso normals for offspring a, `N` iso
//!   normals for offspring b, the crossover coin `u`, then `K` mask gaps (only
//!   when crossing).
//!
//! Offspring a of the crossover operators is built with exactly the draws
//! Iso+LineDD uses, so IsoLineCross with `p_cross = 0` reproduces Iso+LineDD
//! bit-for-bit under the same stream.

mod mask;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::Genotype;

pub use mask::{
    crossover, event_count, event_positions, generate_mask, mask_from_gaps, CrossoverMask,
};

/// Operator hyperparameters. Defaults are the values shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub sigma_iso: f64,
    pub sigma_line: f64,
    pub lambda_cross: f64,
    pub p_cross: f64,
}

impl Default for OperatorParams {
    fn default() -> Self {
        OperatorParams {
            sigma_iso: 0.005,
            sigma_line: 0.05,
            lambda_cross: 0.1,
            p_cross: 0.5,
        }
    }
}

impl OperatorParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        nonneg("sigma_iso", self.sigma_iso)?;
        nonneg("sigma_line", self.sigma_line)?;
        if !(self.lambda_cross.is_finite() && self.lambda_cross > 0.0) {
            return Err(Error::invalid(
                "lambda_cross",
                format!("must be finite and > 0, got {}", self.lambda_cross),
            ));
        }
        if !(0.0..=1.0).contains(&self.p_cross) {
            return Err(Error::invalid(
                "p_cross",
                format!("must lie in [0, 1], got {}", self.p_cross),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Iso,
    IsoCross,
    IsoLineDd,
    IsoLineCross,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] = [
        OperatorKind::Iso,
        OperatorKind::IsoCross,
        OperatorKind::IsoLineDd,
        OperatorKind::IsoLineCross,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorKind::Iso => "iso",
            OperatorKind::IsoCross => "iso_cross",
            OperatorKind::IsoLineDd => "iso_line_dd",
            OperatorKind::IsoLineCross => "iso_line_cross",
        }
    }

    pub fn uses_crossover(&self) -> bool {
        matches!(self, OperatorKind::IsoCross | OperatorKind::IsoLineCross)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "operator",
                    format!("unknown operator `{s}` (expected iso, iso_cross, iso_line_dd, iso_line_cross)"),
                )
            })
    }
}

/// An operator kind bound to validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationOperator {
    kind: OperatorKind,
    params: OperatorParams,
}

impl VariationOperator {
    pub fn new(kind: OperatorKind, params: OperatorParams) -> Result<Self> {
        params.validate()?;
        Ok(VariationOperator { kind, params })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    /// Line intensity actually applied: zero for Iso and IsoCross.
    pub fn effective_sigma_line(&self) -> f64 {
        match self.kind {
            OperatorKind::Iso | OperatorKind::IsoCross => 0.0,
            OperatorKind::IsoLineDd | OperatorKind::IsoLineCross => self.params.sigma_line,
        }
    }

    /// Produces one offspring. `parent_j` is ignored by Iso.
    pub fn vary<R: Rng + ?Sized>(
        &self,
        parent_i: &Genotype,
        parent_j: &Genotype,
        rng: &mut R,
    ) -> Result<Genotype> {
        let p = &self.params;
        match self.kind {
            OperatorKind::Iso => Ok(iso_mutate(parent_i, p.sigma_iso, rng)),
            OperatorKind::IsoLineDd => {
                line_dd_mutate(parent_i, parent_j, p.sigma_iso, p.sigma_line, rng)
            }
            OperatorKind::IsoCross | OperatorKind::IsoLineCross => {
                check_same_len(parent_i, parent_j)?;
                let sigma_line = self.effective_sigma_line();
                let s: f64 = rng.sample(StandardNormal);
                let line_step = sigma_line * s;
                let a = directed(parent_i, parent_j, p.sigma_iso, line_step, rng);
                let b = directed(parent_j, parent_i, p.sigma_iso, line_step, rng);
                let u: f64 = rng.random();
                if u < p.p_cross {
                    let mask = generate_mask(a.len(), p.lambda_cross, rng);
                    crossover(&a, &b, &mask)
                } else {
                    Ok(a)
                }
            }
        }
    }
}

/// `x + σ_iso·N(0, I)`.
pub fn iso_mutate<R: Rng + ?Sized>(parent: &Genotype, sigma_iso: f64, rng: &mut R) -> Genotype {
    Genotype::new(
        parent
            .genes()
            .iter()
            .map(|&g| g + sigma_iso * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
}

/// `x_i + σ_iso·N(0, I) + σ_line·(x_j − x_i)·s` with one scalar `s ~ N(0, 1)` per offspring.
pub fn line_dd_mutate<R: Rng + ?Sized>(
    parent_i: &Genotype,
    parent_j: &Genotype,
    sigma_iso: f64,
    sigma_line: f64,
    rng: &mut R,
) -> Result<Genotype> {
    check_same_len(parent_i, parent_j)?;
    let s: f64 = rng.sample(StandardNormal);
    Ok(directed(parent_i, parent_j, sigma_iso, sigma_line * s, rng))
}

// from + iso noise + line_step·(toward − from). With from/toward swapped this
// is the negated-line-term offspring b of the crossover operators, since
// (x_i − x_j) = −(x_j − x_i).
fn directed<R: Rng + ?Sized>(
    from: &Genotype,
    toward: &Genotype,
    sigma_iso: f64,
    line_step: f64,
    rng: &mut R,
) -> Genotype {
    Genotype::new(
        from.genes()
            .iter()
            .zip(toward.genes())
            .map(|(&x, &y)| {
                let z: f64 = rng.sample(StandardNormal);
                x + sigma_iso * z + line_step * (y - x)
            })
            .collect(),
    )
}

fn check_same_len(a: &Genotype, b: &Genotype) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "parent genotype",
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}
