//! Quality-diversity search with CVT-MAP-Elites.
//!
//! The crate is organised bottom-up:
//!
//! * [`genome`] holds the value types every other module passes around.
//! * [`cvt_archive`] builds the centroidal Voronoi niches and keeps one elite per niche.
//! * [`variation`] implements the four variation operators and the Poisson crossover mask.
//! * [`tasks`] provides the evaluation functions (planar arm, Rastrigin, MLP point controller).
//! * [`qd_loop`] is the generational driver.
//! * [`analysis`] computes QD metrics, rolling offspring statistics and PCA effective dimensionality.
//! * [`rng`] defines how random streams are split so results never depend on thread scheduling.

pub mod analysis;
pub mod cvt_archive;
pub mod error;
pub mod genome;
pub mod qd_loop;
pub mod rng;
pub mod tasks;
pub mod variation;

pub use error::{Error, Result};
pub use genome::{BehaviorDescriptor, Genotype, ScoredSolution};
