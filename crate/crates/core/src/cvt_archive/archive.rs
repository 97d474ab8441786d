use std::sync::Arc;

use rand::Rng;

use super::centroids::CentroidSet;
use super::snapshot::SnapshotRecord;
use crate::error::{Error, Result};
use crate::genome::{ScoredSolution, TaskDims};

/// Result of offering a candidate to the archive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InsertOutcome {
    /// Cell was empty.
    Inserted { cell: usize },
    /// Cell held a strictly worse elite.
    Replaced { cell: usize, previous_fitness: f64 },
    /// Cell held an elite at least as good; archive unchanged.
    Discarded { cell: usize },
}

impl InsertOutcome {
    pub fn cell(&self) -> usize {
        match *self {
            InsertOutcome::Inserted { cell }
            | InsertOutcome::Replaced { cell, .. }
            | InsertOutcome::Discarded { cell } => cell,
        }
    }

    pub fn is_added(&self) -> bool {
        !matches!(self, InsertOutcome::Discarded { .. })
    }
}

/// MAP-Elites archive over a fixed centroid set, at most one elite per cell.
#[derive(Debug, Clone)]
pub struct CvtArchive {
    centroids: Arc<CentroidSet>,
    genotype_dim: usize,
    cells: Vec<Option<ScoredSolution>>,
    // Occupied cells in first-fill order; used for uniform selection.
    occupied: Vec<usize>,
}

impl CvtArchive {
    pub fn new(centroids: Arc<CentroidSet>, genotype_dim: usize) -> Self {
        let k = centroids.len();
        CvtArchive {
            centroids,
            genotype_dim,
            cells: vec![None; k],
            occupied: Vec::new(),
        }
    }

    pub fn centroids(&self) -> &CentroidSet {
        &self.centroids
    }

    pub fn centroids_arc(&self) -> Arc<CentroidSet> {
        Arc::clone(&self.centroids)
    }

    pub fn dims(&self) -> TaskDims {
        TaskDims::new(self.genotype_dim, self.centroids.dim())
    }

    /// Number of cells `k`.
    pub fn capacity(&self) -> usize {
        self.cells.len()
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn get(&self, cell: usize) -> Option<&ScoredSolution> {
        self.cells.get(cell).and_then(Option::as_ref)
    }

    /// Occupied cells in ascending cell order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &ScoredSolution)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.as_ref().map(|s| (j, s)))
    }

    /// Validates the candidate, clamps its descriptor into bounds, and stores it
    /// if its cell is empty or holds a strictly lower fitness.
    pub fn try_insert(&mut self, mut candidate: ScoredSolution) -> Result<InsertOutcome> {
        candidate.validate(self.dims())?;
        candidate.descriptor.clamp_to(self.centroids.bounds());
        let cell = self.centroids.nearest(candidate.descriptor.values())?;
        let outcome = match &self.cells[cell] {
            None => {
                self.occupied.push(cell);
                InsertOutcome::Inserted { cell }
            }
            Some(incumbent) if candidate.fitness > incumbent.fitness => InsertOutcome::Replaced {
                cell,
                previous_fitness: incumbent.fitness,
            },
            Some(_) => return Ok(InsertOutcome::Discarded { cell }),
        };
        self.cells[cell] = Some(candidate);
        Ok(outcome)
    }

    /// Draws `n` occupied cell indices uniformly with replacement.
    pub fn sample_cells<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>> {
        if self.occupied.is_empty() {
            return Err(Error::EmptyArchive);
        }
        Ok((0..n)
            .map(|_| self.occupied[rng.random_range(0..self.occupied.len())])
            .collect())
    }

    /// Draws `n` elites uniformly with replacement.
    pub fn sample_elites<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<&ScoredSolution>> {
        Ok(self
            .sample_cells(n, rng)?
            .into_iter()
            .map(|j| self.cells[j].as_ref().expect("occupied"))
            .collect())
    }

    pub fn snapshot(&self) -> Vec<SnapshotRecord> {
        self.iter()
            .map(|(j, s)| SnapshotRecord {
                cell_index: j,
                centroid: self.centroids.centroid(j).to_vec(),
                fitness: s.fitness,
                descriptor: s.descriptor.values().to_vec(),
                genotype: s.genotype.genes().to_vec(),
            })
            .collect()
    }

    /// JSON-lines export, one record per occupied cell in ascending cell order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in self.snapshot() {
            out.push_str(&serde_json::to_string(&record).expect("plain data serializes"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{BehaviorDescriptor, Genotype};
    use crate::rng::{stream, Purpose, StreamKey};

    fn two_cells() -> Arc<CentroidSet> {
        Arc::new(
            CentroidSet::from_points(
                vec![vec![0.0, 0.0], vec![1.0, 1.0]],
                vec![(0.0, 1.0), (0.0, 1.0)],
            )
            .unwrap(),
        )
    }

    fn sol(fitness: f64, desc: [f64; 2]) -> ScoredSolution {
        ScoredSolution::new(
            Genotype::new(vec![fitness, 0.0]),
            fitness,
            BehaviorDescriptor::new(desc.to_vec()),
        )
    }

    #[test]
    fn insert_replace_discard() {
        let mut a = CvtArchive::new(two_cells(), 2);
        assert_eq!(
            a.try_insert(sol(2.0, [0.1, 0.1])).unwrap(),
            InsertOutcome::Inserted { cell: 0 }
        );
        assert_eq!(
            a.try_insert(sol(3.0, [0.2, 0.0])).unwrap(),
            InsertOutcome::Replaced {
                cell: 0,
                previous_fitness: 2.0
            }
        );
        assert_eq!(
            a.try_insert(sol(3.0, [0.0, 0.2])).unwrap(),
            InsertOutcome::Discarded { cell: 0 }
        );
        // Incumbent kept on ties.
        assert_eq!(a.get(0).unwrap().descriptor.values(), &[0.2, 0.0]);
        assert_eq!(a.occupied_count(), 1);
    }

    #[test]
    fn descriptor_clamped_before_assignment() {
        let mut a = CvtArchive::new(two_cells(), 2);
        let out = a.try_insert(sol(1.0, [7.0, 9.0])).unwrap();
        assert_eq!(out.cell(), 1);
        assert_eq!(a.get(1).unwrap().descriptor.values(), &[1.0, 1.0]);
    }

    #[test]
    fn invalid_candidate_rejected() {
        let mut a = CvtArchive::new(two_cells(), 3);
        assert!(a.try_insert(sol(1.0, [0.0, 0.0])).is_err());
        assert!(a.is_empty());
    }

    #[test]
    fn sampling_single_and_empty() {
        let mut a = CvtArchive::new(two_cells(), 2);
        let mut rng = stream(0, StreamKey::new(Purpose::Auxiliary, 0, 0));
        assert_eq!(a.sample_elites(3, &mut rng).unwrap_err(), Error::EmptyArchive);
        a.try_insert(sol(1.5, [0.9, 0.9])).unwrap();
        let picks = a.sample_elites(4, &mut rng).unwrap();
        assert_eq!(picks.len(), 4);
        assert!(picks.iter().all(|s| s.fitness == 1.5));
    }

    #[test]
    fn sampling_is_uniform() {
        let mut a = CvtArchive::new(two_cells(), 2);
        a.try_insert(sol(1.0, [0.0, 0.0])).unwrap();
        a.try_insert(sol(1.0, [1.0, 1.0])).unwrap();
        let mut rng = stream(42, StreamKey::new(Purpose::Auxiliary, 0, 0));
        let cells = a.sample_cells(10_000, &mut rng).unwrap();
        let zeros = cells.iter().filter(|&&c| c == 0).count() as i64;
        assert!((zeros - 5000).abs() <= 300, "{zeros}");
    }

    #[test]
    fn jsonl_has_one_line_per_elite() {
        let mut a = CvtArchive::new(two_cells(), 2);
        a.try_insert(sol(1.0, [1.0, 1.0])).unwrap();
        a.try_insert(sol(0.5, [0.0, 0.0])).unwrap();
        let text = a.to_jsonl();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("{\"cell_index\":0,"));
    }
}
