//! Partition-based sliding-window coresets (SWMEB).
//!
//! The window of the last `N` points is split into `N / L` partitions of
//! `L` points. When a partition is sealed, one AOMEB instance scans it from
//! its newest point back to its oldest and a snapshot of that instance
//! becomes an index whenever its radius has grown by a factor `1 + ε₂`
//! since the previous snapshot. Every index instance then keeps absorbing
//! new points, and the instance at the earliest live index answers queries.

use std::collections::VecDeque;

use crate::aomeb::AomebState;
use crate::error::{check_dims, check_unit_interval, MebError, Result};
use crate::geometry::Point;
use crate::space::{Coreset, Space};

/// One index on a partition: an AOMEB instance covering `[position, t]`.
#[derive(Clone, Debug)]
pub struct PartitionIndex {
    position: u64,
    instance: AomebState,
    radius_at_creation: f64,
    forced: bool,
}

impl PartitionIndex {
    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn instance(&self) -> &AomebState {
        &self.instance
    }

    pub fn radius_at_creation(&self) -> f64 {
        self.radius_at_creation
    }

    /// Whether the index exists only because of the spacing cap.
    pub fn forced(&self) -> bool {
        self.forced
    }
}

/// A sealed partition; `indices[0]` sits at the newest batch and positions
/// decrease along the list.
#[derive(Clone, Debug)]
pub struct Partition {
    first: u64,
    last: u64,
    indices: Vec<PartitionIndex>,
}

impl Partition {
    pub fn first_position(&self) -> u64 {
        self.first
    }

    pub fn last_position(&self) -> u64 {
        self.last
    }

    pub fn indices(&self) -> &[PartitionIndex] {
        &self.indices
    }
}

#[derive(Clone, Debug)]
pub struct Swmeb {
    space: Space,
    window: u64,
    partition_len: u64,
    batch: u64,
    max_gap: u64,
    eps1: f64,
    eps2: f64,
    partitions: VecDeque<Partition>,
    buffer: Vec<Point>,
    dim: Option<usize>,
    now: u64,
}

impl Swmeb {
    /// Single-update mode with window `window` and partition length
    /// `partition_len`, which must divide the window.
    pub fn new(space: Space, window: u64, partition_len: u64, eps1: f64, eps2: f64) -> Result<Self> {
        Self::with_batch(space, window, partition_len, 1, eps1, eps2)
    }

    /// Mini-batch mode: points arrive in batches of `batch`, which must
    /// divide the partition length.
    pub fn with_batch(space: Space, window: u64, partition_len: u64, batch: u64, eps1: f64, eps2: f64) -> Result<Self> {
        if window == 0 || partition_len == 0 || batch == 0 {
            return Err(MebError::InvalidConfig("window, partition and batch sizes must be positive".into()));
        }
        if window % partition_len != 0 {
            return Err(MebError::InvalidConfig(format!(
                "partition length {partition_len} does not divide window {window}"
            )));
        }
        if partition_len % batch != 0 {
            return Err(MebError::InvalidConfig(format!(
                "batch size {batch} does not divide partition length {partition_len}"
            )));
        }
        check_unit_interval("eps1", eps1).map_err(as_config)?;
        check_unit_interval("eps2", eps2).map_err(as_config)?;
        Ok(Swmeb {
            space,
            window,
            partition_len,
            batch,
            max_gap: (partition_len / 10).max(1),
            eps1,
            eps2,
            partitions: VecDeque::new(),
            buffer: Vec::with_capacity(partition_len as usize),
            dim: None,
            now: 0,
        })
    }

    /// Default partition length, a tenth of the window.
    pub fn default_partition_len(window: u64) -> u64 {
        (window / 10).max(1)
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn partition_len(&self) -> u64 {
        self.partition_len
    }

    pub fn batch_size(&self) -> u64 {
        self.batch
    }

    /// Position of the latest point (positions start at 1).
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn partitions(&self) -> impl Iterator<Item = &Partition> {
        self.partitions.iter()
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    pub fn index_count(&self) -> usize {
        self.partitions.iter().map(|p| p.indices.len()).sum()
    }

    /// Points held by all instances plus the buffer.
    pub fn stored_points(&self) -> usize {
        let held: usize = self
            .partitions
            .iter()
            .flat_map(|p| p.indices.iter())
            .map(|ix| ix.instance.coreset_len())
            .sum();
        held + self.buffer.len()
    }

    /// First position of the current window.
    pub fn window_start(&self) -> u64 {
        (self.now + 1).saturating_sub(self.window).max(1)
    }

    pub fn insert(&mut self, p: Point) -> Result<()> {
        if self.batch != 1 {
            return Err(MebError::InvalidInput(format!("expected batches of {} points", self.batch)));
        }
        self.insert_batch(std::slice::from_ref(&p))
    }

    pub fn insert_batch(&mut self, batch: &[Point]) -> Result<()> {
        if batch.len() as u64 != self.batch {
            return Err(MebError::InvalidInput(format!(
                "expected a batch of {} points, got {}",
                self.batch,
                batch.len()
            )));
        }
        let m = *self.dim.get_or_insert(batch[0].dim());
        for p in batch {
            check_dims(m, p.dim())?;
        }
        let start = self.now + 1;
        self.now += self.batch;
        self.buffer.extend_from_slice(batch);

        // Phase 1: seal the buffer as a new partition, dropping the oldest
        // one once the window is full.
        let mut sealed = false;
        if self.buffer.len() as u64 == self.partition_len {
            if self.partitions.len() as u64 == self.window / self.partition_len {
                self.partitions.pop_front();
            }
            // Phase 2
            let partition = self.build_partition()?;
            self.partitions.push_back(partition);
            self.buffer.clear();
            sealed = true;
        }

        // Phase 3: expire indices before the window start. The newest index
        // of the oldest partition never expires before its partition does.
        let window_start = self.window_start();
        if let Some(oldest) = self.partitions.front_mut() {
            while oldest.indices.len() > 1 && oldest.indices.last().is_some_and(|ix| ix.position < window_start) {
                oldest.indices.pop();
            }
        }

        // Phase 4: feed the batch to every instance that has not seen it.
        let fresh = if sealed { self.partitions.len() - 1 } else { self.partitions.len() };
        for partition in self.partitions.iter_mut().take(fresh) {
            for ix in partition.indices.iter_mut() {
                if batch.len() == 1 {
                    ix.instance.update_at(batch[0].clone(), start)?;
                } else {
                    ix.instance.update_batch_at(batch, start)?;
                }
            }
        }
        Ok(())
    }

    /// Runs one AOMEB instance over the buffer from newest to oldest point,
    /// snapshotting indices at batch boundaries.
    fn build_partition(&self) -> Result<Partition> {
        let len = self.partition_len;
        let first = self.now + 1 - len;
        let mut indices: Vec<PartitionIndex> = Vec::new();
        let mut scan: Option<AomebState> = None;
        let mut last_radius = 0.0;
        for k in (0..len).rev() {
            let pos = first + k;
            let p = self.buffer[k as usize].clone();
            match scan.as_mut() {
                None => scan = Some(AomebState::new_at(self.space, self.eps1, p, pos)?),
                Some(inst) => {
                    inst.update_at(p, pos)?;
                }
            }
            if k % self.batch != 0 {
                continue;
            }
            let inst = scan.as_ref().expect("instance exists after the first point");
            let r = inst.radius();
            let grown = r > 0.0 && r >= (1.0 + self.eps2) * last_radius;
            let forced = indices.last().is_some_and(|ix| ix.position - pos >= self.max_gap);
            if indices.is_empty() || grown || forced {
                indices.push(PartitionIndex {
                    position: pos,
                    instance: inst.clone(),
                    radius_at_creation: r,
                    forced: forced && !grown,
                });
                last_radius = r;
            }
        }
        Ok(Partition { first, last: self.now, indices })
    }

    /// The coreset of the instance at the earliest live index.
    pub fn query(&self) -> Result<Coreset> {
        self.query_instance().map(AomebState::coreset)
    }

    pub fn query_instance(&self) -> Result<&AomebState> {
        self.partitions
            .front()
            .and_then(|p| p.indices.last())
            .map(|ix| &ix.instance)
            .ok_or(MebError::WarmUp)
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }
}

fn as_config(e: MebError) -> MebError {
    match e {
        MebError::InvalidInput(msg) => MebError::InvalidConfig(msg),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(Swmeb::new(Space::Euclidean, 10, 5, 0.1, 0.1).is_ok());
        assert!(matches!(Swmeb::new(Space::Euclidean, 10, 3, 0.1, 0.1), Err(MebError::InvalidConfig(_))));
        assert!(Swmeb::new(Space::Euclidean, 10, 5, 0.0, 0.1).is_err());
        assert!(Swmeb::with_batch(Space::Euclidean, 100, 10, 3, 0.1, 0.1).is_err());
        assert_eq!(Swmeb::default_partition_len(100_000), 10_000);
    }

    #[test]
    fn warm_up_then_first_partition() {
        let mut sw = Swmeb::new(Space::Euclidean, 10, 5, 0.1, 0.1).unwrap();
        for i in 0..4 {
            sw.insert(pt(&[i as f64])).unwrap();
            assert_eq!(sw.partitions().count(), 0);
            assert!(matches!(sw.query(), Err(MebError::WarmUp)));
        }
        assert_eq!(sw.buffered(), 4);
        sw.insert(pt(&[4.0])).unwrap();
        assert_eq!(sw.partitions().count(), 1);
        assert_eq!(sw.buffered(), 0);
        let inst = sw.query_instance().unwrap();
        assert_eq!(inst.start_index(), 1);
        assert_eq!(inst.last_index(), 5);
    }

    #[test]
    fn four_collinear_points() {
        let mut sw = Swmeb::new(Space::Euclidean, 4, 2, 0.1, 0.1).unwrap();
        for x in 0..4 {
            sw.insert(pt(&[x as f64])).unwrap();
        }
        let parts: Vec<&Partition> = sw.partitions().collect();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].indices()[0].position(), 2);
        assert_eq!(parts[1].indices()[0].position(), 4);
        // partition 1 = {p1, p2}: the reverse scan grows the radius at p1
        assert_eq!(parts[0].indices().last().unwrap().position(), 1);
        let cs = sw.query().unwrap();
        let r = cs.ball().radius();
        let c = cs.ball().as_euclidean().unwrap().center()[0];
        for x in 0..4 {
            assert!((x as f64 - c).abs() <= (2f64.sqrt() + 0.25) * r);
        }
        assert!((r - 1.5).abs() < 1e-9);
    }

    #[test]
    fn oldest_partition_dropped_when_window_full() {
        let mut sw = Swmeb::new(Space::Euclidean, 6, 2, 0.1, 0.1).unwrap();
        for i in 0..20 {
            sw.insert(pt(&[(i as f64).sin(), (i as f64).cos()])).unwrap();
            assert!(sw.partitions().count() <= 3);
            if i >= 5 && sw.buffered() == 0 {
                assert_eq!(sw.partitions().count(), 3);
            }
            if let Ok(inst) = sw.query_instance() {
                assert!(inst.start_index() >= sw.window_start());
            }
        }
    }

    #[test]
    fn batch_size_is_enforced() {
        let mut sw = Swmeb::with_batch(Space::Euclidean, 20, 10, 5, 0.1, 0.1).unwrap();
        assert!(sw.insert(pt(&[1.0])).is_err());
        assert!(sw.insert_batch(&vec![pt(&[1.0]); 4]).is_err());
        sw.insert_batch(&vec![pt(&[1.0]); 5]).unwrap();
        assert!(sw.insert_batch(&vec![pt(&[1.0, 2.0]); 5]).is_err());
    }
}
