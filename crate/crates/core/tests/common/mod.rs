#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sliding_meb::Point;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn pt(c: &[f64]) -> Point {
    Point::new(c.to_vec()).unwrap()
}

pub fn uniform_points(rng: &mut StdRng, n: usize, m: usize, half_width: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new((0..m).map(|_| rng.gen_range(-half_width..half_width)).collect()).unwrap())
        .collect()
}

/// Standard normal coordinates by the Box-Muller transform.
pub fn normal_points(rng: &mut StdRng, n: usize, m: usize) -> Vec<Point> {
    (0..n)
        .map(|_| {
            let coords = (0..m)
                .map(|_| {
                    let u: f64 = 1.0 - rng.gen::<f64>();
                    let v: f64 = rng.gen();
                    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
                })
                .collect();
            Point::new(coords).unwrap()
        })
        .collect()
}

/// A stream drifting through a few clusters, so that windows and radii
/// change over time.
pub fn drifting_stream(rng: &mut StdRng, n: usize, m: usize) -> Vec<Point> {
    let mut center = vec![0.0; m];
    let mut spread = 1.0;
    (0..n)
        .map(|i| {
            if i % 37 == 0 {
                for c in center.iter_mut() {
                    *c += rng.gen_range(-2.0..2.0);
                }
                spread = rng.gen_range(0.1..3.0);
            }
            Point::new(center.iter().map(|c| c + spread * rng.gen_range(-1.0..1.0)).collect()).unwrap()
        })
        .collect()
}

/// Euclidean distance summed in reverse order with compensation; an
/// independent reference for the library's distance.
pub fn reference_distance(p: &[f64], q: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for i in (0..p.len()).rev() {
        let d = p[i] - q[i];
        let y = d * d - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum.sqrt()
}
