//! The geometry a coreset lives in, and balls expressed in either geometry.

use crate::error::{check_dims, MebError, Result};
use crate::geometry::{containment_tolerance, sq_dist, Ball, Point};
use crate::kernel::{clamp_sq, KernelCenter, KernelSpec};
use crate::solver::{frank_wolfe, GramMatrix, MAX_ITERATIONS};

/// Where balls are measured: explicit Euclidean space or a kernel's
/// feature space.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Space {
    #[default]
    Euclidean,
    Kernel(KernelSpec),
}

impl Space {
    /// The squared distance between the images of two points.
    pub fn sq_distance(&self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            Space::Euclidean => sq_dist(p, q),
            Space::Kernel(spec) => {
                clamp_sq(spec.self_eval(p) + spec.self_eval(q) - 2.0 * spec.eval_raw(p, q))
            }
        }
    }
}

/// A ball in Euclidean or feature space.
#[derive(Clone, Debug)]
pub enum MebBall {
    Euclidean(Ball),
    Kernel {
        center: KernelCenter,
        radius: f64,
        spec: KernelSpec,
    },
}

impl MebBall {
    pub fn radius(&self) -> f64 {
        match self {
            MebBall::Euclidean(b) => b.radius(),
            MebBall::Kernel { radius, .. } => *radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MebBall::Euclidean(b) => b.dim(),
            MebBall::Kernel { center, .. } => center.dim(),
        }
    }

    /// Distance from the center to (the image of) `p`.
    pub fn distance(&self, p: &Point) -> Result<f64> {
        check_dims(self.dim(), p.dim())?;
        Ok(self.distance_unchecked(p))
    }

    pub(crate) fn distance_unchecked(&self, p: &[f64]) -> f64 {
        match self {
            MebBall::Euclidean(b) => sq_dist(b.center(), p).sqrt(),
            MebBall::Kernel { center, spec, .. } => clamp_sq(center.sq_distance_raw(spec, p)).sqrt(),
        }
    }

    /// Containment in the `mu`-expansion, with the geometry tolerance.
    pub fn contains_expanded(&self, p: &Point, mu: f64) -> Result<bool> {
        if !(mu >= 1.0) {
            return Err(MebError::InvalidInput(format!("expansion factor must be >= 1, got {mu}")));
        }
        let r = self.radius();
        Ok(self.distance(p)? <= mu * r + containment_tolerance(r))
    }

    pub fn as_euclidean(&self) -> Option<&Ball> {
        match self {
            MebBall::Euclidean(b) => Some(b),
            MebBall::Kernel { .. } => None,
        }
    }

    pub fn as_kernel(&self) -> Option<&KernelCenter> {
        match self {
            MebBall::Euclidean(_) => None,
            MebBall::Kernel { center, .. } => Some(center),
        }
    }

    /// The (exact) smallest ball of a single point.
    pub(crate) fn point(space: Space, p: &Point) -> MebBall {
        match space {
            Space::Euclidean => MebBall::Euclidean(Ball::new(p.clone(), 0.0).expect("zero radius is valid")),
            Space::Kernel(spec) => MebBall::Kernel {
                center: KernelCenter::point_mass(&spec, p.clone()),
                radius: 0.0,
                spec,
            },
        }
    }
}

/// A subset of a stream together with the MEB of that subset.
#[derive(Clone, Debug)]
pub struct Coreset {
    members: Vec<Point>,
    positions: Vec<u64>,
    ball: MebBall,
}

impl Coreset {
    /// Coreset members in insertion order.
    pub fn members(&self) -> &[Point] {
        &self.members
    }

    /// Stream positions (or input indices) of the members.
    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    pub fn ball(&self) -> &MebBall {
        &self.ball
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A growing point set with its warm-startable dual solution.
///
/// This is the engine behind CoreMEB and every AOMEB instance: members are
/// only ever appended, the kernel matrix grows by one row per member, and
/// re-solves start from the previous weights.
#[derive(Clone, Debug)]
pub(crate) struct WorkingSet {
    space: Space,
    members: Vec<Point>,
    positions: Vec<u64>,
    weights: Vec<f64>,
    gram: GramMatrix,
    ball: MebBall,
}

impl WorkingSet {
    pub fn new(space: Space, first: Point, position: u64) -> Self {
        let ball = MebBall::point(space, &first);
        let mut ws = WorkingSet {
            space,
            members: Vec::new(),
            positions: Vec::new(),
            weights: Vec::new(),
            gram: GramMatrix::default(),
            ball,
        };
        ws.append(first, position);
        ws.weights[0] = 1.0;
        ws
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn ball(&self) -> &MebBall {
        &self.ball
    }

    pub fn radius(&self) -> f64 {
        self.ball.radius()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn coreset(&self) -> Coreset {
        Coreset { members: self.members.clone(), positions: self.positions.clone(), ball: self.ball.clone() }
    }

    /// Adds a member with zero weight; the ball is stale until [`Self::resolve`].
    pub fn append(&mut self, p: Point, position: u64) {
        let entries: Vec<f64> = match self.space {
            // Linear kernel on points translated by the first member.
            Space::Euclidean => {
                let origin = self.members.first().unwrap_or(&p).clone();
                let shifted: Vec<f64> = p.iter().zip(origin.iter()).map(|(a, o)| a - o).collect();
                self.members
                    .iter()
                    .chain(std::iter::once(&p))
                    .map(|q| q.iter().zip(origin.iter()).zip(&shifted).map(|((x, o), s)| (x - o) * s).sum())
                    .collect()
            }
            Space::Kernel(spec) => self
                .members
                .iter()
                .chain(std::iter::once(&p))
                .map(|q| spec.eval_raw(q, &p))
                .collect(),
        };
        self.gram.push(entries);
        self.members.push(p);
        self.positions.push(position);
        self.weights.push(0.0);
    }

    /// Re-solves the MEB of the members, warm-started from current weights.
    pub fn resolve(&mut self, tolerance: f64) -> Result<()> {
        debug_assert_eq!(self.gram.len(), self.members.len());
        let sol = frank_wolfe(&mut self.gram, Some(&self.weights), tolerance, MAX_ITERATIONS)?;
        let radius = sol.value.sqrt();
        self.ball = match self.space {
            Space::Euclidean => {
                let m = self.dim();
                let mut c = vec![0.0; m];
                for (p, &a) in self.members.iter().zip(&sol.weights) {
                    if a > 0.0 {
                        for (ci, x) in c.iter_mut().zip(p.iter()) {
                            *ci += a * x;
                        }
                    }
                }
                MebBall::Euclidean(Ball::new(Point::new(c)?, radius)?)
            }
            Space::Kernel(spec) => {
                let (support, alpha): (Vec<Point>, Vec<f64>) = self
                    .members
                    .iter()
                    .zip(&sol.weights)
                    .filter(|(_, &a)| a > 0.0)
                    .map(|(p, &a)| (p.clone(), a))
                    .unzip();
                MebBall::Kernel { center: KernelCenter::from_parts(support, alpha, sol.norm2), radius, spec }
            }
        };
        self.weights = sol.weights;
        Ok(())
    }

    /// Whether `p` lies in the `mu`-expansion of the current ball.
    #[inline]
    pub fn covers(&self, p: &[f64], mu: f64) -> bool {
        let r = self.ball.radius();
        self.ball.distance_unchecked(p) <= mu * r + containment_tolerance(r)
    }
}
