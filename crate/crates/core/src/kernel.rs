//! Kernel functions and implicitly represented centers in feature space.
//!
//! A center `c = Σ αᵢ φ(pᵢ)` is stored as its support points and weights,
//! together with the cached squared norm `α'Kα`. Distances from `c` to a
//! mapped point then cost one kernel evaluation per support point.

use crate::error::{check_dims, check_unit_interval, MebError, Result};
use crate::geometry::{dot, sq_dist, Point};
use crate::solver::{frank_wolfe, LazyGram, MAX_ITERATIONS};

/// Squared feature distances below this are round-off, not solver error.
const NEGATIVE_ROUNDOFF_LIMIT: f64 = -1e-8;

/// A positive semidefinite kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    /// `k(p, q) = p·q`
    Linear,
    /// `k(p, q) = exp(-|p - q|² / γ)`
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(KernelSpec::Gaussian { gamma })
        } else {
            Err(MebError::InvalidInput(format!("gaussian width must be positive, got {gamma}")))
        }
    }

    #[inline]
    pub(crate) fn eval_raw(&self, p: &[f64], q: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(p, q),
            KernelSpec::Gaussian { gamma } => (-sq_dist(p, q) / gamma).exp(),
        }
    }

    #[inline]
    pub(crate) fn self_eval(&self, p: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(p, p),
            KernelSpec::Gaussian { .. } => 1.0,
        }
    }
}

/// Evaluates `k(p, q)`.
pub fn kernel_eval(spec: &KernelSpec, p: &Point, q: &Point) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    Ok(spec.eval_raw(p, q))
}

/// Gaussian width as the mean squared pairwise distance over `sample`,
/// diagonal (zero) terms included.
pub fn estimate_gamma(sample: &[Point]) -> Result<f64> {
    if sample.len() < 2 {
        return Err(MebError::InvalidInput("gamma estimation needs at least two points".into()));
    }
    let m = sample[0].dim();
    for p in sample {
        check_dims(m, p.dim())?;
    }
    let n = sample.len() as f64;
    let mut mean = vec![0.0; m];
    for p in sample {
        for (acc, x) in mean.iter_mut().zip(p.iter()) {
            *acc += x;
        }
    }
    mean.iter_mut().for_each(|x| *x /= n);
    // Σᵢⱼ |pᵢ - pⱼ|² = 2n Σᵢ |pᵢ - mean|²
    let spread: f64 = sample.iter().map(|p| sq_dist(p, &mean)).sum();
    let gamma = 2.0 * spread / n;
    if gamma > 0.0 {
        Ok(gamma)
    } else {
        Err(MebError::DegenerateKernel("all sampled points coincide".into()))
    }
}

/// An implicit feature-space center `Σ αᵢ φ(pᵢ)`.
#[derive(Clone, Debug)]
pub struct KernelCenter {
    support: Vec<Point>,
    alpha: Vec<f64>,
    norm2: f64,
}

impl KernelCenter {
    /// Builds a center and computes `α'Kα` directly.
    pub fn new(spec: &KernelSpec, support: Vec<Point>, alpha: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != alpha.len() {
            return Err(MebError::InvalidInput("support and weights must be nonempty and aligned".into()));
        }
        let m = support[0].dim();
        for p in &support {
            check_dims(m, p.dim())?;
        }
        if alpha.iter().any(|&a| !(a >= 0.0)) {
            return Err(MebError::InvalidInput("weights must be nonnegative".into()));
        }
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(MebError::InvalidInput(format!("weights must sum to 1, got {total}")));
        }
        let norm2 = quadratic_form(spec, &support, &alpha);
        Ok(KernelCenter { support, alpha, norm2 })
    }

    pub(crate) fn from_parts(support: Vec<Point>, alpha: Vec<f64>, norm2: f64) -> Self {
        KernelCenter { support, alpha, norm2 }
    }

    /// A point mass at `p`.
    pub fn point_mass(spec: &KernelSpec, p: Point) -> Self {
        let norm2 = spec.self_eval(&p);
        KernelCenter { support: vec![p], alpha: vec![1.0], norm2 }
    }

    pub fn support(&self) -> &[Point] {
        &self.support
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Cached `α'Kα`, the squared feature-space norm of the center.
    pub fn cached_norm2(&self) -> f64 {
        self.norm2
    }

    pub fn dim(&self) -> usize {
        self.support[0].dim()
    }

    /// `Σ αᵢ k(pᵢ, q)`, the inner product of the center with `φ(q)`.
    pub(crate) fn inner(&self, spec: &KernelSpec, q: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.alpha)
            .map(|(p, a)| a * spec.eval_raw(p, q))
            .sum()
    }

    /// Squared distance to `φ(q)` before clamping.
    pub(crate) fn sq_distance_raw(&self, spec: &KernelSpec, q: &[f64]) -> f64 {
        self.norm2 + spec.self_eval(q) - 2.0 * self.inner(spec, q)
    }
}

fn quadratic_form(spec: &KernelSpec, support: &[Point], alpha: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, (p, a)) in support.iter().zip(alpha).enumerate() {
        total += a * a * spec.self_eval(p);
        for (q, b) in support[..i].iter().zip(alpha) {
            total += 2.0 * a * b * spec.eval_raw(p, q);
        }
    }
    total
}

#[inline]
pub(crate) fn clamp_sq(value: f64) -> f64 {
    debug_assert!(
        value >= NEGATIVE_ROUNDOFF_LIMIT,
        "squared feature distance {value:e} is far below zero"
    );
    value.max(0.0)
}

/// Feature-space distance between `center` and `φ(q)`.
pub fn kernel_distance(center: &KernelCenter, q: &Point, spec: &KernelSpec) -> Result<f64> {
    check_dims(center.dim(), q.dim())?;
    Ok(clamp_sq(center.sq_distance_raw(spec, q)).sqrt())
}

/// `√(α'diag(K) - α'Kα)`, the radius recovered from dual weights.
pub fn kernel_radius(center: &KernelCenter, spec: &KernelSpec) -> f64 {
    let diag: f64 = center
        .support
        .iter()
        .zip(&center.alpha)
        .map(|(p, a)| a * spec.self_eval(p))
        .sum();
    clamp_sq(diag - center.norm2).sqrt()
}

/// Kernelized MEB of `points` by Frank-Wolfe on the simplex-constrained dual.
///
/// Every point ends within `(1 + tolerance)` times the returned radius of the
/// returned center.
pub fn solve_kernel_meb(points: &[Point], spec: &KernelSpec, tolerance: f64) -> Result<(KernelCenter, f64)> {
    if points.is_empty() {
        return Err(MebError::InvalidInput("cannot solve the MEB of an empty set".into()));
    }
    check_unit_interval("tolerance", tolerance)?;
    let m = points[0].dim();
    for p in points {
        check_dims(m, p.dim())?;
    }
    let mut gram = LazyGram::kernel(points, *spec);
    let sol = frank_wolfe(&mut gram, None, tolerance, MAX_ITERATIONS)?;
    let (support, alpha): (Vec<Point>, Vec<f64>) = points
        .iter()
        .zip(&sol.weights)
        .filter(|(_, &a)| a > 0.0)
        .map(|(p, &a)| (p.clone(), a))
        .unzip();
    let center = KernelCenter::from_parts(support, alpha, sol.norm2);
    Ok((center, sol.value.sqrt()))
}
