//! Pairwise Frank-Wolfe for the MEB dual
//!
//! ```text
//! max_α  α'diag(K) - α'Kα   s.t.  α >= 0, Σα = 1
//! ```
//!
//! Each step moves weight from the support point nearest the center to the
//! point furthest from it, with exact line search. The
//! solver only talks to the kernel matrix through [`Gram`], so Euclidean
//! balls (linear kernel on translated points) and feature-space balls share
//! one code path.

use crate::error::{MebError, Result};
use crate::geometry::Point;
use crate::kernel::KernelSpec;

/// Iteration cap for a single solve.
pub const MAX_ITERATIONS: usize = 1_000_000;

/// Iterations between exact recomputations of `Kα`.
const REFRESH_EVERY: usize = 256;

/// Steps between attempts to solve the current support exactly.
const POLISH_EVERY: usize = 16;

/// Column access to a symmetric kernel matrix.
pub(crate) trait Gram {
    fn len(&self) -> usize;
    fn diag(&self, i: usize) -> f64;
    fn column(&mut self, j: usize) -> &[f64];
}

#[derive(Debug, Clone)]
pub(crate) struct FwSolution {
    pub weights: Vec<f64>,
    /// Dual objective, the squared radius of the returned ball.
    pub value: f64,
    /// Largest squared distance from the center to any input.
    pub max_sq: f64,
    /// `α'Kα`
    pub norm2: f64,
    pub iterations: usize,
}

impl FwSolution {
    /// Achieved expansion minus one: `max distance / radius - 1`.
    pub fn residual(&self) -> f64 {
        residual(self.max_sq, self.value)
    }
}

fn residual(max_sq: f64, value: f64) -> f64 {
    if value > 0.0 {
        (max_sq / value).sqrt() - 1.0
    } else if max_sq > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

struct Iterate {
    alpha: Vec<f64>,
    /// `Kα`
    kalpha: Vec<f64>,
}

impl Iterate {
    /// Dual objective `α'diag(K) - α'Kα`.
    fn value(&self, diag: &[f64]) -> f64 {
        self.alpha.iter().zip(diag).zip(&self.kalpha).map(|((a, d), g)| a * (d - g)).sum()
    }

    fn refresh<G: Gram>(&mut self, gram: &mut G) {
        let total: f64 = self.alpha.iter().sum();
        self.alpha.iter_mut().for_each(|a| *a /= total);
        self.kalpha.iter_mut().for_each(|g| *g = 0.0);
        for j in 0..self.alpha.len() {
            let a = self.alpha[j];
            if a > 0.0 {
                for (g, k) in self.kalpha.iter_mut().zip(gram.column(j)) {
                    *g += a * k;
                }
            }
        }
    }
}

/// Runs Frank-Wolfe until every point lies within `(1 + tol)` times the
/// current dual radius.
///
/// `warm` seeds the weights (it is renormalised; negative entries are
/// dropped). Without it the iterate starts as a point mass on index 0.
pub(crate) fn frank_wolfe<G: Gram>(gram: &mut G, warm: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<FwSolution> {
    let n = gram.len();
    assert!(n > 0, "frank_wolfe called on an empty gram matrix");
    let diag: Vec<f64> = (0..n).map(|i| gram.diag(i)).collect();
    let scale = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    // Squared distances are differences of O(scale) quantities.
    let noise = 16.0 * f64::EPSILON * scale;
    let target = (1.0 + tol) * (1.0 + tol);

    let mut alpha = match warm {
        Some(w) if w.len() == n => w.iter().map(|&a| if a > 0.0 { a } else { 0.0 }).collect(),
        _ => vec![0.0; n],
    };
    if !(alpha.iter().sum::<f64>() > 0.0) {
        alpha.iter_mut().for_each(|a| *a = 0.0);
        alpha[0] = 1.0;
    }
    let mut it = Iterate { alpha, kalpha: vec![0.0; n] };
    it.refresh(gram);

    let mut sq = vec![0.0; n];
    let mut fresh = true;
    let mut steps = 0usize;
    let mut next_polish = POLISH_EVERY;

    loop {
        let diag_term: f64 = it.alpha.iter().zip(&diag).map(|(a, d)| a * d).sum();
        let norm2: f64 = it.alpha.iter().zip(&it.kalpha).map(|(a, g)| a * g).sum();
        let value = (diag_term - norm2).max(0.0);

        let mut far = 0;
        let mut near = usize::MAX;
        for i in 0..n {
            let d = (diag[i] - 2.0 * it.kalpha[i] + norm2).max(0.0);
            sq[i] = d;
            if d > sq[far] {
                far = i;
            }
            if it.alpha[i] > 0.0 && (near == usize::MAX || d < sq[near]) {
                near = i;
            }
        }
        let max_sq = sq[far];

        if max_sq <= target * value + noise {
            if fresh {
                return Ok(FwSolution { weights: it.alpha, value, max_sq, norm2, iterations: steps });
            }
            it.refresh(gram);
            fresh = true;
            continue;
        }
        if steps >= max_iter {
            return Err(MebError::Convergence { iterations: steps, residual: residual(max_sq, value) });
        }

        if steps >= next_polish {
            next_polish = steps + POLISH_EVERY;
            if polish(gram, &diag, &mut it) {
                fresh = true;
                continue;
            }
        }

        // Pairwise step: move weight from the nearest support point to the
        // furthest point, with exact line search.
        let k_far_near = gram.column(far)[near];
        let gap = diag[far] + diag[near] - 2.0 * k_far_near;
        let gain = max_sq - sq[near];
        if !(gap > 0.0) || !(gain > 0.0) {
            // far and near coincide in feature space; nothing left to move
            it.refresh(gram);
            fresh = true;
            steps += 1;
            if steps >= max_iter {
                return Err(MebError::Convergence { iterations: steps, residual: residual(max_sq, value) });
            }
            continue;
        }
        let lambda = (gain / (2.0 * gap)).min(it.alpha[near]);
        if lambda >= it.alpha[near] {
            it.alpha[near] = 0.0;
        } else {
            it.alpha[near] -= lambda;
        }
        it.alpha[far] += lambda;
        for (g, k) in it.kalpha.iter_mut().zip(gram.column(far)) {
            *g += lambda * k;
        }
        for (g, k) in it.kalpha.iter_mut().zip(gram.column(near)) {
            *g -= lambda * k;
        }
        steps += 1;
        fresh = false;
        if steps % REFRESH_EVERY == 0 {
            it.refresh(gram);
            fresh = true;
        }
    }
}

/// Active-set refinement: replaces the weights on the current support by
/// the maximiser over the support's affine hull, which puts every support
/// point at the same distance from the center. When that maximiser leaves
/// the simplex, moves towards it up to the boundary, drops the vanishing
/// point and retries. Returns whether the iterate changed. A result with a
/// lower dual value, which a nearly singular system can produce when the
/// support is affinely dependent, is discarded.
fn polish<G: Gram>(gram: &mut G, diag: &[f64], it: &mut Iterate) -> bool {
    let before = it.value(diag);
    let saved = (it.alpha.clone(), it.kalpha.clone());
    let mut support: Vec<usize> = (0..it.alpha.len()).filter(|&i| it.alpha[i] > 0.0).collect();
    let mut changed = false;
    let solved = loop {
        let s = support.len();
        if s == 1 {
            it.alpha.iter_mut().for_each(|a| *a = 0.0);
            it.alpha[support[0]] = 1.0;
            break true;
        }
        let mut k = vec![0.0; s * s];
        for (b, &j) in support.iter().enumerate() {
            let col = gram.column(j);
            for (a, &i) in support.iter().enumerate() {
                k[a * s + b] = col[i];
            }
        }
        // Gram of the support translated by its first member.
        let g = |a: usize, b: usize| k[a * s + b] - k[a * s] - k[b] + k[0];
        let mut system = Vec::with_capacity((s - 1) * s);
        for a in 1..s {
            system.extend((1..s).map(|b| 2.0 * g(a, b)));
            system.push(g(a, a));
        }
        let Some(x) = solve_augmented(&mut system, s - 1) else { break false };
        let mut beta = Vec::with_capacity(s);
        beta.push(1.0 - x.iter().sum::<f64>());
        beta.extend(x);
        if beta.iter().all(|&b| b >= 0.0) {
            for (&i, &b) in support.iter().zip(&beta) {
                it.alpha[i] = b;
            }
            break true;
        }
        // Largest move towards beta that keeps every weight nonnegative.
        let (hit, t) = support
            .iter()
            .zip(&beta)
            .enumerate()
            .filter(|(_, (_, &b))| b < 0.0)
            .map(|(pos, (&i, &b))| (pos, it.alpha[i] / (it.alpha[i] - b)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("some weight is negative");
        for (&i, &b) in support.iter().zip(&beta) {
            it.alpha[i] = (it.alpha[i] + t * (b - it.alpha[i])).max(0.0);
        }
        it.alpha[support[hit]] = 0.0;
        changed = true;
        support.retain(|&i| it.alpha[i] > 0.0);
    };
    if !(solved || changed) {
        return false;
    }
    it.refresh(gram);
    if it.value(diag) < before {
        (it.alpha, it.kalpha) = saved;
        return false;
    }
    true
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)`
/// system stored row-major in `a`. `None` when the system is (numerically)
/// singular.
pub(crate) fn solve_augmented(a: &mut [f64], k: usize) -> Option<Vec<f64>> {
    let w = k + 1;
    debug_assert_eq!(a.len(), k * w);
    let scale = (0..k).flat_map(|r| a[r * w..r * w + k].iter()).fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))?;
        if a[piv * w + col].abs() <= 1e-13 * scale {
            return None;
        }
        if piv != col {
            for c in 0..w {
                a.swap(col * w + c, piv * w + c);
            }
        }
        let (top, bottom) = a.split_at_mut((col + 1) * w);
        let pivot_row = &top[col * w..];
        for row in bottom.chunks_exact_mut(w) {
            let f = row[col] / pivot_row[col];
            if f != 0.0 {
                for c in col..w {
                    row[c] -= f * pivot_row[c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| a[row * w + c] * x[c]).sum();
        x[row] = (a[row * w + k] - s) / a[row * w + row];
    }
    Some(x)
}

enum LazyKernel<'a> {
    /// Linear kernel on points translated by `origin`.
    Translated(&'a [f64]),
    Spec(KernelSpec),
}

impl LazyKernel<'_> {
    #[inline]
    fn eval(&self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            LazyKernel::Translated(o) => p
                .iter()
                .zip(q.iter())
                .zip(o.iter())
                .map(|((a, b), c)| (a - c) * (b - c))
                .sum(),
            LazyKernel::Spec(spec) => spec.eval_raw(p, q),
        }
    }
}

/// Kernel matrix over a point slice, computing columns on first use.
pub(crate) struct LazyGram<'a> {
    points: &'a [Point],
    kernel: LazyKernel<'a>,
    diag: Vec<f64>,
    columns: Vec<Option<Box<[f64]>>>,
}

impl<'a> LazyGram<'a> {
    /// Euclidean geometry: linear kernel on points translated by the first
    /// point, which keeps the entries at the scale of the point spread.
    pub fn euclidean(points: &'a [Point]) -> Self {
        Self::build(points, LazyKernel::Translated(points[0].coords()))
    }

    pub fn kernel(points: &'a [Point], spec: KernelSpec) -> Self {
        Self::build(points, LazyKernel::Spec(spec))
    }

    fn build(points: &'a [Point], kernel: LazyKernel<'a>) -> Self {
        let diag = points.iter().map(|p| kernel.eval(p, p)).collect();
        LazyGram { points, kernel, diag, columns: vec![None; points.len()] }
    }
}

impl Gram for LazyGram<'_> {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    fn column(&mut self, j: usize) -> &[f64] {
        let LazyGram { points, kernel, columns, .. } = self;
        columns[j].get_or_insert_with(|| {
            let pj = &points[j];
            points.iter().map(|p| kernel.eval(p, pj)).collect()
        })
    }
}

/// A fully materialised, incrementally grown kernel matrix.
#[derive(Clone, Debug, Default)]
pub(crate) struct GramMatrix {
    columns: Vec<Vec<f64>>,
}

impl GramMatrix {
    /// Appends a row/column given the kernel values against existing members
    /// followed by the new diagonal entry.
    pub fn push(&mut self, mut entries: Vec<f64>) {
        debug_assert_eq!(entries.len(), self.columns.len() + 1);
        for (col, &k) in self.columns.iter_mut().zip(&entries) {
            col.push(k);
        }
        entries.shrink_to_fit();
        self.columns.push(entries);
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }
}

impl Gram for GramMatrix {
    fn len(&self) -> usize {
        self.columns.len()
    }

    fn diag(&self, i: usize) -> f64 {
        self.columns[i][i]
    }

    fn column(&mut self, j: usize) -> &[f64] {
        &self.columns[j]
    }
}
