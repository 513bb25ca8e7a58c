//! Sliding-window coresets with a single pruned index sequence (SWMEB+).
//!
//! Every arriving point (or batch) starts a new AOMEB instance. Whenever the
//! radii two indices apart are within a factor `1 + ε₂`, the index between
//! them is redundant and is deleted. At most one expired index is kept, to
//! bound the radius of the window from above.

use crate::aomeb::AomebState;
use crate::error::{check_dims, check_unit_interval, MebError, Result};
use crate::geometry::Point;
use crate::space::{Coreset, Space};

/// `ε₂` as a function of an index's rank in the sequence (1-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsSchedule {
    Constant(f64),
    /// `min(base · ratio^(i-1), cap)`
    Geometric { base: f64, ratio: f64, cap: f64 },
}

impl EpsSchedule {
    /// `min(4^(i-1) · ε₁/10, 0.1)`.
    pub fn default_for(eps1: f64) -> Self {
        EpsSchedule::Geometric { base: eps1 / 10.0, ratio: 4.0, cap: 0.1 }
    }

    pub fn at(&self, rank: usize) -> f64 {
        match *self {
            EpsSchedule::Constant(e) => e,
            EpsSchedule::Geometric { base, ratio, cap } => {
                let exp = rank.saturating_sub(1).min(i32::MAX as usize) as i32;
                (base * ratio.powi(exp)).min(cap)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            EpsSchedule::Constant(e) => check_unit_interval("eps2", e),
            EpsSchedule::Geometric { base, ratio, cap } => {
                check_unit_interval("eps2 base", base)?;
                check_unit_interval("eps2 cap", cap)?;
                if ratio >= 1.0 && ratio.is_finite() {
                    Ok(())
                } else {
                    Err(MebError::InvalidInput(format!("eps2 ratio must be >= 1, got {ratio}")))
                }
            }
        }
        .map_err(|e| match e {
            MebError::InvalidInput(msg) => MebError::InvalidConfig(msg),
            other => other,
        })
    }
}

#[derive(Clone, Debug)]
struct Index {
    position: u64,
    instance: AomebState,
}

#[derive(Clone, Debug)]
pub struct SwmebPlus {
    space: Space,
    window: u64,
    eps1: f64,
    schedule: EpsSchedule,
    indices: Vec<Index>,
    dim: Option<usize>,
    now: u64,
}

impl SwmebPlus {
    pub fn new(space: Space, window: u64, eps1: f64, schedule: EpsSchedule) -> Result<Self> {
        if window == 0 {
            return Err(MebError::InvalidConfig("window size must be positive".into()));
        }
        check_unit_interval("eps1", eps1).map_err(|e| MebError::InvalidConfig(e.to_string()))?;
        schedule.validate()?;
        Ok(SwmebPlus { space, window, eps1, schedule, indices: Vec::new(), dim: None, now: 0 })
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn schedule(&self) -> EpsSchedule {
        self.schedule
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    /// Position of the latest point (positions start at 1).
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn window_start(&self) -> u64 {
        (self.now + 1).saturating_sub(self.window).max(1)
    }

    pub fn index_count(&self) -> usize {
        self.indices.len()
    }

    pub fn index_positions(&self) -> Vec<u64> {
        self.indices.iter().map(|ix| ix.position).collect()
    }

    /// Radii `r[xᵢ, t]` along the index sequence.
    pub fn radii(&self) -> Vec<f64> {
        self.indices.iter().map(|ix| ix.instance.radius()).collect()
    }

    pub fn instances(&self) -> impl Iterator<Item = (u64, &AomebState)> {
        self.indices.iter().map(|ix| (ix.position, &ix.instance))
    }

    pub fn stored_points(&self) -> usize {
        self.indices.iter().map(|ix| ix.instance.coreset_len()).sum()
    }

    pub fn insert(&mut self, p: Point) -> Result<()> {
        self.insert_batch(std::slice::from_ref(&p))
    }

    /// Processes a batch; one index is created per call.
    pub fn insert_batch(&mut self, batch: &[Point]) -> Result<()> {
        let first = batch
            .first()
            .ok_or_else(|| MebError::InvalidInput("batch is empty".into()))?;
        let m = *self.dim.get_or_insert(first.dim());
        for p in batch {
            check_dims(m, p.dim())?;
        }
        let start = self.now + 1;

        // Phase 1: a new index at the batch start.
        let fresh = AomebState::init_batch(self.space, self.eps1, batch, start)?;
        self.now += batch.len() as u64;
        self.indices.push(Index { position: start, instance: fresh });

        // Phase 2: keep at most one expired index.
        let window_start = self.window_start();
        let expired = self.indices.iter().take_while(|ix| ix.position < window_start).count();
        if expired > 1 {
            self.indices.drain(..expired - 1);
        }

        // Phase 3
        let older = self.indices.len() - 1;
        for ix in &mut self.indices[..older] {
            if batch.len() == 1 {
                ix.instance.update_at(batch[0].clone(), start)?;
            } else {
                ix.instance.update_batch_at(batch, start)?;
            }
        }

        // Phase 4: delete x_{i+1} while r[xᵢ] <= (1 + ε₂(i)) r[x_{i+2}],
        // always at the lowest such i.
        let mut i = 0;
        while i + 2 < self.indices.len() {
            let eps2 = self.schedule.at(i + 1);
            if self.indices[i].instance.radius() <= (1.0 + eps2) * self.indices[i + 2].instance.radius() {
                self.indices.remove(i + 1);
                // Only the pair ending at the new neighbour can have changed.
                i = i.saturating_sub(1);
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    /// `S[x₁, t]` if `x₁` is inside the window, otherwise `S[x₂, t]`.
    pub fn query(&self) -> Result<Coreset> {
        self.query_instance().map(AomebState::coreset)
    }

    pub fn query_instance(&self) -> Result<&AomebState> {
        let first = self.indices.first().ok_or(MebError::WarmUp)?;
        if first.position >= self.window_start() {
            Ok(&first.instance)
        } else {
            Ok(&self.indices[1].instance)
        }
    }
}
