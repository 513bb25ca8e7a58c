//! Dense points, the Euclidean metric and explicit balls.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{check_dims, MebError, Result};

/// Relative slack used by every containment test.
///
/// Boundary points of a ball are recomputed through different arithmetic
/// paths by different algorithms; without a small slack they flip in and out.
pub const CONTAINMENT_EPS: f64 = 1e-12;

/// Absolute containment tolerance for a ball of the given radius.
#[inline]
pub fn containment_tolerance(radius: f64) -> f64 {
    CONTAINMENT_EPS * radius.max(1.0)
}

/// An immutable dense point. Cloning is cheap (shared storage).
#[derive(Clone, PartialEq)]
pub struct Point(Arc<[f64]>);

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(MebError::InvalidInput("point has no coordinates".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(MebError::InvalidInput(format!("coordinate {i} is not finite")));
        }
        Ok(Point(coords.into()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = MebError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl TryFrom<&[f64]> for Point {
    type Error = MebError;
    fn try_from(v: &[f64]) -> Result<Self> {
        Point::new(v.to_vec())
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    Ok(sq_dist(p, q).sqrt())
}

/// A Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(MebError::InvalidInput(format!("radius must be finite and >= 0, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Whether `p` lies in the ball scaled by `mu` about its center.
    pub fn contains_expanded(&self, p: &Point, mu: f64) -> Result<bool> {
        contains_expanded(self, p, mu)
    }
}

/// The smallest ball with `p` and `q` on its boundary.
pub fn two_point_ball(p: &Point, q: &Point) -> Result<Ball> {
    check_dims(p.dim(), q.dim())?;
    let center: Vec<f64> = p.iter().zip(q.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
    let radius = 0.5 * sq_dist(p, q).sqrt();
    Ball::new(Point::new(center)?, radius)
}

/// Containment in the `mu`-expansion of `ball`, with the module tolerance.
pub fn contains_expanded(ball: &Ball, p: &Point, mu: f64) -> Result<bool> {
    if !(mu >= 1.0) {
        return Err(MebError::InvalidInput(format!("expansion factor must be >= 1, got {mu}")));
    }
    let d = distance(&ball.center, p)?;
    Ok(d <= mu * ball.radius + containment_tolerance(ball.radius))
}
