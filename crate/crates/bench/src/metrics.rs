//! Relative error of a coreset against the exact window MEB.

use sliding_meb::{core_meb_in, welzl_exact, MebBall, MebError, Point, Space, MAX_EXACT_DIM};

/// Tolerance of the high-precision reference solve.
pub const REFERENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("window has a zero-radius MEB; relative error is undefined")]
    DegenerateWindow,
    #[error(transparent)]
    Meb(#[from] MebError),
}

/// Which solver provides the reference radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    Welzl,
    FrankWolfe,
}

impl Reference {
    pub fn for_space(space: Space, dim: usize) -> Self {
        match space {
            Space::Euclidean if dim <= MAX_EXACT_DIM => Reference::Welzl,
            _ => Reference::FrankWolfe,
        }
    }

    pub fn describe(self) -> String {
        match self {
            Reference::Welzl => "welzl-exact".into(),
            Reference::FrankWolfe => format!("frank-wolfe-coremeb@{REFERENCE_TOLERANCE:e}"),
        }
    }
}

/// MEB radius of the window: exact for low-dimensional Euclidean input,
/// otherwise a CoreMEB solve at [`REFERENCE_TOLERANCE`], whose radius is
/// within that relative tolerance below the optimum.
pub fn exact_window_radius(window: &[Point], space: Space) -> Result<f64, MebError> {
    let first = window.first().ok_or_else(|| MebError::InvalidInput("window is empty".into()))?;
    match Reference::for_space(space, first.dim()) {
        Reference::Welzl => Ok(welzl_exact(window)?.radius()),
        Reference::FrankWolfe => Ok(core_meb_in(space, window, REFERENCE_TOLERANCE)?.ball().radius()),
    }
}

/// Smallest `λ′` with the window inside `λ′ · ball`; infinite when the ball
/// has zero radius and some point lies off its center.
pub fn expansion_ratio(window: &[Point], ball: &MebBall) -> Result<f64, MebError> {
    let far = max_distance(window, ball)?;
    let r = ball.radius();
    Ok(if far == 0.0 { 1.0 } else if r == 0.0 { f64::INFINITY } else { far / r })
}

fn max_distance(window: &[Point], ball: &MebBall) -> Result<f64, MebError> {
    window.iter().try_fold(0.0f64, |acc, p| Ok(acc.max(ball.distance(p)?)))
}

/// `ε′ = (λ′ · r(S) − r*) / r*`, i.e. how far the smallest covering
/// expansion of the coreset ball exceeds the exact radius.
pub fn coreset_error(window: &[Point], ball: &MebBall, exact_r: f64) -> Result<f64, MetricError> {
    if !(exact_r > 0.0) {
        return Err(MetricError::DegenerateWindow);
    }
    let covering = max_distance(window, ball)?;
    Ok((covering - exact_r) / exact_r)
}

/// Error of a ball that already encloses the window: `(r − r*) / r*`.
pub fn radius_error(radius: f64, exact_r: f64) -> Result<f64, MetricError> {
    if !(exact_r > 0.0) {
        return Err(MetricError::DegenerateWindow);
    }
    Ok((radius - exact_r) / exact_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sliding_meb::{core_meb, Ball};

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn square() -> Vec<Point> {
        vec![pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[0.0, 2.0]), pt(&[2.0, 2.0]), pt(&[1.0, 1.2])]
    }

    #[test]
    fn exact_ball_has_zero_error() {
        let w = square();
        let r = exact_window_radius(&w, Space::Euclidean).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let ball = MebBall::Euclidean(Ball::new(pt(&[1.0, 1.0]), r).unwrap());
        assert!((expansion_ratio(&w, &ball).unwrap() - 1.0).abs() < 1e-12);
        assert!(coreset_error(&w, &ball, r).unwrap().abs() < 1e-12);
    }

    #[test]
    fn shrunken_ball_with_right_center() {
        let w = square();
        let r = 2f64.sqrt();
        let ball = MebBall::Euclidean(Ball::new(pt(&[1.0, 1.0]), 0.9 * r).unwrap());
        assert!((expansion_ratio(&w, &ball).unwrap() - 1.0 / 0.9).abs() < 1e-12);
        assert!(coreset_error(&w, &ball, r).unwrap().abs() < 1e-12);
    }

    #[test]
    fn core_meb_error_is_small() {
        let w: Vec<Point> = (0..300)
            .map(|i| {
                let t = i as f64;
                pt(&[(t * 0.37).sin() * 3.0, (t * 1.13).cos(), (t * 0.071).sin() * t.sqrt()])
            })
            .collect();
        let r = exact_window_radius(&w, Space::Euclidean).unwrap();
        let cs = core_meb(&w, 1e-3).unwrap();
        let e = coreset_error(&w, cs.ball(), r).unwrap();
        assert!((-1e-9..=1e-3).contains(&e), "{e}");
    }

    #[test]
    fn dispatch() {
        assert_eq!(Reference::for_space(Space::Euclidean, 12), Reference::Welzl);
        assert_eq!(Reference::for_space(Space::Euclidean, 13), Reference::FrankWolfe);
        let g = sliding_meb::KernelSpec::gaussian(1.0).unwrap();
        assert_eq!(Reference::for_space(Space::Kernel(g), 2), Reference::FrankWolfe);

        let w: Vec<Point> = (0..40).map(|i| pt(&vec![(i as f64 * 0.3).sin(); 13])).collect();
        let hi = exact_window_radius(&w, Space::Euclidean).unwrap();
        let lo: Vec<Point> = w.iter().map(|p| pt(&p[..12])).collect();
        let ex = exact_window_radius(&lo, Space::Euclidean).unwrap();
        // same points up to a scale of sqrt(13/12)
        assert!((hi - ex * (13.0f64 / 12.0).sqrt()).abs() < 1e-8 * hi);
    }

    #[test]
    fn degenerate_window() {
        let w = vec![pt(&[1.0]), pt(&[1.0])];
        let r = exact_window_radius(&w, Space::Euclidean).unwrap();
        assert_eq!(r, 0.0);
        let ball = MebBall::Euclidean(Ball::new(pt(&[1.0]), 0.0).unwrap());
        assert!(matches!(coreset_error(&w, &ball, r), Err(MetricError::DegenerateWindow)));
        assert!(exact_window_radius(&[], Space::Euclidean).is_err());
    }
}
