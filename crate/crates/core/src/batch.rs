//! Batch MEB machinery: the Frank-Wolfe MEB solver, CoreMEB coreset
//! construction, and an exact randomized solver for small dimensions.

use rand::{rngs::StdRng, seq::SliceRandom, SeedableRng};

use crate::error::{check_dims, check_unit_interval, MebError, Result};
use crate::geometry::{sq_dist, Ball, Point};
use crate::solver::{frank_wolfe, solve_augmented, LazyGram, MAX_ITERATIONS};
use crate::space::{Coreset, Space, WorkingSet};

/// Largest dimension accepted by [`welzl_exact`].
pub const MAX_EXACT_DIM: usize = 12;

/// Result of [`solve_meb`].
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub ball: Ball,
    /// Dual weights aligned with the input points; the center is `Σ αᵢ pᵢ`.
    pub weights: Vec<f64>,
    pub iterations: usize,
    /// `max distance / radius - 1` at termination.
    pub residual: f64,
}

fn check_points(points: &[Point]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| MebError::InvalidInput("point set is empty".into()))?;
    let m = first.dim();
    for p in points {
        check_dims(m, p.dim())?;
    }
    Ok(m)
}

/// Euclidean MEB by Frank-Wolfe.
///
/// The returned radius is the dual value, so it never exceeds the true MEB
/// radius, and every point lies within `(1 + tolerance)` times it.
pub fn solve_meb(points: &[Point], tolerance: f64) -> Result<SolveReport> {
    let m = check_points(points)?;
    check_unit_interval("tolerance", tolerance)?;
    let mut gram = LazyGram::euclidean(points);
    let sol = frank_wolfe(&mut gram, None, tolerance, MAX_ITERATIONS)?;
    let mut center = vec![0.0; m];
    for (p, &a) in points.iter().zip(&sol.weights) {
        if a > 0.0 {
            for (c, x) in center.iter_mut().zip(p.iter()) {
                *c += a * x;
            }
        }
    }
    Ok(SolveReport {
        ball: Ball::new(Point::new(center)?, sol.value.sqrt())?,
        residual: sol.residual(),
        iterations: sol.iterations,
        weights: sol.weights,
    })
}

/// CoreMEB in Euclidean space: a coreset whose ball, expanded by `1 + eps`,
/// covers every input point.
pub fn core_meb(points: &[Point], eps: f64) -> Result<Coreset> {
    core_meb_in(Space::Euclidean, points, eps)
}

/// CoreMEB in the given space. Member positions are indices into `points`.
pub fn core_meb_in(space: Space, points: &[Point], eps: f64) -> Result<Coreset> {
    Ok(core_meb_working(space, points, eps, 0)?.coreset())
}

fn furthest_from(points: &[Point], space: Space, from: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = space.sq_distance(from, p);
        if d > best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// CoreMEB returning the solver state, with member positions offset by
/// `base`.
pub(crate) fn core_meb_working(space: Space, points: &[Point], eps: f64, base: u64) -> Result<WorkingSet> {
    check_points(points)?;
    check_unit_interval("eps", eps)?;
    let inner_tol = eps / 10.0;
    let a = furthest_from(points, space, &points[0]);
    let b = furthest_from(points, space, &points[a]);

    let mut ws = WorkingSet::new(space, points[a].clone(), base + a as u64);
    let mut in_set = vec![false; points.len()];
    in_set[a] = true;
    if b != a {
        ws.append(points[b].clone(), base + b as u64);
        in_set[b] = true;
        ws.resolve(inner_tol)?;
    }

    loop {
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if in_set[i] {
                continue;
            }
            let d = ws.ball().distance_unchecked(p);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        match far {
            Some(i) if !ws.covers(&points[i], 1.0 + eps) => {
                ws.append(points[i].clone(), base + i as u64);
                in_set[i] = true;
                ws.resolve(inner_tol)?;
            }
            _ => return Ok(ws),
        }
    }
}

/// Exact Euclidean MEB by Welzl's move-to-front recursion.
///
/// Intended as a reference oracle; practical for dimension up to
/// [`MAX_EXACT_DIM`] and inputs of a few thousand points.
pub fn welzl_exact(points: &[Point]) -> Result<Ball> {
    let m = check_points(points)?;
    if m > MAX_EXACT_DIM {
        return Err(MebError::UnsupportedDimension { dim: m, max: MAX_EXACT_DIM });
    }
    let pts: Vec<&[f64]> = points.iter().map(|p| p.coords()).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut StdRng::seed_from_u64(0x5eed_ba11));

    let mut solver = Welzl { pts: &pts, order, boundary: Vec::with_capacity(m + 1), dim: m };
    let mut sphere = solver.mtf(solver.pts.len());
    // Re-run with any point that round-off left outside at the front.
    for _ in 0..8 {
        let (worst, excess) = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (i, sq_dist(&sphere.center, p) - sphere.r2))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if excess <= sphere.slack() {
            break;
        }
        let pos = solver.order.iter().position(|&i| i == worst).expect("index present");
        solver.order[..=pos].rotate_right(1);
        sphere = solver.mtf(solver.pts.len());
    }
    let radius = pts
        .iter()
        .map(|p| sq_dist(&sphere.center, p))
        .fold(0.0f64, f64::max)
        .sqrt();
    Ball::new(Point::new(sphere.center)?, radius)
}

struct Sphere {
    center: Vec<f64>,
    /// Squared radius; negative for the empty ball.
    r2: f64,
}

impl Sphere {
    fn slack(&self) -> f64 {
        1e-12 * self.r2.max(1e-300)
    }

    fn contains(&self, p: &[f64]) -> bool {
        self.r2 >= 0.0 && sq_dist(&self.center, p) <= self.r2 + self.slack()
    }
}

struct Welzl<'a> {
    pts: &'a [&'a [f64]],
    order: Vec<usize>,
    boundary: Vec<usize>,
    dim: usize,
}

impl Welzl<'_> {
    fn mtf(&mut self, end: usize) -> Sphere {
        let mut ball = self.boundary_sphere().unwrap_or(Sphere { center: vec![0.0; self.dim], r2: -1.0 });
        if self.boundary.len() == self.dim + 1 {
            return ball;
        }
        for i in 0..end {
            let idx = self.order[i];
            if ball.contains(self.pts[idx]) {
                continue;
            }
            self.boundary.push(idx);
            let candidate = self.mtf(i);
            self.boundary.pop();
            // An affinely dependent boundary has no circumsphere; keep the
            // previous ball and let the outer verification pass fix it.
            if candidate.r2 >= 0.0 && candidate.contains(self.pts[idx]) {
                ball = candidate;
            }
            self.order[..=i].rotate_right(1);
        }
        ball
    }

    /// Smallest sphere with every boundary point on its surface.
    fn boundary_sphere(&self) -> Option<Sphere> {
        let (&first, rest) = self.boundary.split_first()?;
        let q0 = self.pts[first];
        if rest.is_empty() {
            return Some(Sphere { center: q0.to_vec(), r2: 0.0 });
        }
        let k = rest.len();
        let v: Vec<Vec<f64>> = rest
            .iter()
            .map(|&i| self.pts[i].iter().zip(q0).map(|(a, b)| a - b).collect())
            .collect();
        // 2 (vⱼ·vₗ) λₗ = vⱼ·vⱼ
        let mut a = Vec::with_capacity(k * (k + 1));
        for j in 0..k {
            a.extend((0..k).map(|l| 2.0 * crate::geometry::dot(&v[j], &v[l])));
            a.push(crate::geometry::dot(&v[j], &v[j]));
        }
        let lambda = solve_augmented(&mut a, k)?;
        let mut center = q0.to_vec();
        for (l, vl) in lambda.iter().zip(&v) {
            for (c, x) in center.iter_mut().zip(vl) {
                *c += l * x;
            }
        }
        let r2 = sq_dist(&center, q0);
        Some(Sphere { center, r2 })
    }
}
