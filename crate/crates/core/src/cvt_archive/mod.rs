//! CVT niche construction and the one-elite-per-niche archive.

mod archive;
mod centroids;
mod snapshot;

pub use archive::{CvtArchive, InsertOutcome};
pub use centroids::{build_centroids, build_centroids_traced, CentroidSet, CvtParams};
pub use snapshot::{read_snapshot, SnapshotRecord};
