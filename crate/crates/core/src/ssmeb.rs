//! Single-ball streaming baseline (SSMEB).
//!
//! Keeps one ball; a point outside it grows the ball to the smallest ball
//! containing both the old ball and the point. The result is within a
//! factor 1.5 of the optimal radius.

use crate::error::{check_dims, Result};
use crate::geometry::{sq_dist, Ball, Point};
use crate::kernel::{clamp_sq, KernelCenter, KernelSpec};
use crate::space::{MebBall, Space};

#[derive(Clone, Debug)]
enum Center {
    Explicit(Vec<f64>),
    /// Convex combination `Σ αᵢ φ(pᵢ)` with cached `|c|²`.
    Implicit {
        spec: KernelSpec,
        support: Vec<Point>,
        alpha: Vec<f64>,
        norm2: f64,
    },
}

#[derive(Clone, Debug)]
pub struct SsmebState {
    center: Center,
    radius: f64,
    points_seen: u64,
    dim: usize,
}

impl SsmebState {
    pub fn new(space: Space, first: Point) -> Self {
        let dim = first.dim();
        let center = match space {
            Space::Euclidean => Center::Explicit(first.to_vec()),
            Space::Kernel(spec) => Center::Implicit {
                spec,
                norm2: spec.self_eval(&first),
                support: vec![first],
                alpha: vec![1.0],
            },
        };
        SsmebState { center, radius: 0.0, points_seen: 1, dim }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points_seen(&self) -> u64 {
        self.points_seen
    }

    /// Number of stored points: 1 in Euclidean space, the support size in
    /// feature space.
    pub fn stored_points(&self) -> usize {
        match &self.center {
            Center::Explicit(_) => 1,
            Center::Implicit { support, .. } => support.len(),
        }
    }

    pub fn ball(&self) -> MebBall {
        match &self.center {
            Center::Explicit(c) => MebBall::Euclidean(
                Ball::new(Point::new(c.clone()).expect("center stays finite"), self.radius).expect("radius >= 0"),
            ),
            Center::Implicit { spec, support, alpha, norm2 } => MebBall::Kernel {
                center: KernelCenter::from_parts(support.clone(), alpha.clone(), *norm2),
                radius: self.radius,
                spec: *spec,
            },
        }
    }

    pub fn update(&mut self, p: Point) -> Result<()> {
        check_dims(self.dim, p.dim())?;
        self.points_seen += 1;
        match &mut self.center {
            Center::Explicit(c) => {
                let d = sq_dist(c, &p).sqrt();
                if d <= self.radius {
                    return Ok(());
                }
                let r_new = 0.5 * (self.radius + d);
                let step = 1.0 - r_new / d;
                for (ci, x) in c.iter_mut().zip(p.iter()) {
                    *ci += step * (x - *ci);
                }
                self.radius = r_new;
            }
            Center::Implicit { spec, support, alpha, norm2 } => {
                let inner: f64 = support.iter().zip(alpha.iter()).map(|(q, a)| a * spec.eval_raw(q, &p)).sum();
                let kpp = spec.self_eval(&p);
                let d = clamp_sq(*norm2 + kpp - 2.0 * inner).sqrt();
                if d <= self.radius {
                    return Ok(());
                }
                let r_new = 0.5 * (self.radius + d);
                let step = 1.0 - r_new / d;
                // c' = (1 - s) c + s φ(p)
                *norm2 = (1.0 - step).powi(2) * *norm2 + 2.0 * step * (1.0 - step) * inner + step * step * kpp;
                alpha.iter_mut().for_each(|a| *a *= 1.0 - step);
                support.push(p);
                alpha.push(step);
                self.radius = r_new;
            }
        }
        Ok(())
    }
}
