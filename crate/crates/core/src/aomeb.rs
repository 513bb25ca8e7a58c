//! Append-only streaming coresets (AOMEB).
//!
//! A point joins the coreset only when it falls outside the `(1 + ε₁)`
//! expansion of the current ball, after which the ball is re-solved on the
//! grown coreset. The returned coreset expanded by `√2 + ε₁` covers every
//! point seen so far, and each growth step enlarges the radius by at least
//! a factor `1 + ε₁²/8`.

use crate::batch::core_meb_working;
use crate::error::{check_dims, check_unit_interval, MebError, Result};
use crate::geometry::Point;
use crate::space::{Coreset, MebBall, Space, WorkingSet};

/// Outcome of a single-point update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Update {
    Unchanged,
    Grew,
}

/// One append-only coreset instance.
#[derive(Clone, Debug)]
pub struct AomebState {
    eps: f64,
    tolerance: f64,
    set: WorkingSet,
    points_seen: u64,
    first_pos: u64,
    last_pos: u64,
}

/// Re-solve tolerance for an instance with parameter `eps`.
///
/// The center returned by the dual solver is off by about `√(2·tol)·r`, and
/// both growth and coverage arguments need that error well below `ε₁·r`.
pub fn resolve_tolerance(eps: f64) -> f64 {
    (eps / 10.0).min(eps * eps / 100.0)
}

impl AomebState {
    /// Single-update mode: the coreset starts as `{first}` with radius zero.
    /// `first` gets stream position 0.
    pub fn new(space: Space, eps: f64, first: Point) -> Result<Self> {
        Self::new_at(space, eps, first, 0)
    }

    /// As [`Self::new`], placing `first` at stream position `position`.
    pub fn new_at(space: Space, eps: f64, first: Point, position: u64) -> Result<Self> {
        check_unit_interval("eps1", eps)?;
        Ok(AomebState {
            eps,
            tolerance: resolve_tolerance(eps),
            set: WorkingSet::new(space, first, position),
            points_seen: 1,
            first_pos: position,
            last_pos: position,
        })
    }

    /// Mini-batch mode: the coreset starts as CoreMEB of the first batch,
    /// whose points occupy positions `start..start + batch.len()`.
    pub fn init_batch(space: Space, eps: f64, batch: &[Point], start: u64) -> Result<Self> {
        check_unit_interval("eps1", eps)?;
        if batch.is_empty() {
            return Err(MebError::InvalidInput("initial batch is empty".into()));
        }
        let tolerance = resolve_tolerance(eps);
        let mut set = core_meb_working(space, batch, eps, start)?;
        if set.len() > 1 {
            set.resolve(tolerance)?;
        }
        Ok(AomebState {
            eps,
            tolerance,
            set,
            points_seen: batch.len() as u64,
            first_pos: start,
            last_pos: start + batch.len() as u64 - 1,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn space(&self) -> Space {
        self.set.space()
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn points_seen(&self) -> u64 {
        self.points_seen
    }

    /// Earliest stream position this instance has processed.
    pub fn start_index(&self) -> u64 {
        self.first_pos
    }

    /// Latest stream position this instance has processed.
    pub fn last_index(&self) -> u64 {
        self.last_pos
    }

    pub fn radius(&self) -> f64 {
        self.set.radius()
    }

    pub fn ball(&self) -> &MebBall {
        self.set.ball()
    }

    pub fn coreset(&self) -> Coreset {
        self.set.coreset()
    }

    pub fn coreset_len(&self) -> usize {
        self.set.len()
    }

    /// Dual weights aligned with the coreset members.
    pub fn weights(&self) -> &[f64] {
        self.set.weights()
    }

    /// Processes the point following the latest one seen.
    pub fn update(&mut self, p: Point) -> Result<Update> {
        let pos = self.last_pos + 1;
        self.update_at(p, pos)
    }

    /// Processes `p` as the point at stream position `position`.
    ///
    /// Positions need not be increasing: the sliding-window index builder
    /// feeds a partition back to front.
    pub fn update_at(&mut self, p: Point, position: u64) -> Result<Update> {
        check_dims(self.dim(), p.dim())?;
        self.note_position(position, 1);
        if self.set.covers(&p, 1.0 + self.eps) {
            return Ok(Update::Unchanged);
        }
        self.set.append(p, position);
        self.set.resolve(self.tolerance)?;
        Ok(Update::Grew)
    }

    /// Processes a batch following the latest point seen; returns the number
    /// of points added to the coreset.
    pub fn update_batch(&mut self, batch: &[Point]) -> Result<usize> {
        let start = self.last_pos + 1;
        self.update_batch_at(batch, start)
    }

    /// Batch update with positions `start..start + batch.len()`.
    ///
    /// Membership is decided against the ball before the batch; the ball is
    /// re-solved once afterwards.
    pub fn update_batch_at(&mut self, batch: &[Point], start: u64) -> Result<usize> {
        if batch.is_empty() {
            return Err(MebError::InvalidInput("batch is empty".into()));
        }
        for p in batch {
            check_dims(self.dim(), p.dim())?;
        }
        let outside: Vec<usize> = batch
            .iter()
            .enumerate()
            .filter(|(_, p)| !self.set.covers(p, 1.0 + self.eps))
            .map(|(i, _)| i)
            .collect();
        self.note_position(start, batch.len() as u64);
        if outside.is_empty() {
            return Ok(0);
        }
        for &i in &outside {
            self.set.append(batch[i].clone(), start + i as u64);
        }
        self.set.resolve(self.tolerance)?;
        Ok(outside.len())
    }

    fn note_position(&mut self, start: u64, count: u64) {
        self.points_seen += count;
        self.first_pos = self.first_pos.min(start);
        self.last_pos = self.last_pos.max(start + count - 1);
    }
}
