mod common;

use common::{pt, reference_distance, rng, uniform_points};
use proptest::prelude::*;
use sliding_meb::{contains_expanded, distance, two_point_ball, Ball, MebError, Point};

fn coords(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, m)
}

fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..12).prop_flat_map(|m| (coords(m), coords(m), coords(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn triangle_inequality((a, b, c) in triple()) {
        let (p, q, s) = (pt(&a), pt(&b), pt(&c));
        let direct = distance(&p, &s).unwrap();
        let via = distance(&p, &q).unwrap() + distance(&q, &s).unwrap();
        prop_assert!(direct <= via + 1e-12 * via.max(1.0));
        prop_assert_eq!(distance(&p, &q).unwrap(), distance(&q, &p).unwrap());
    }

    #[test]
    fn two_point_ball_has_both_on_boundary((a, b, _c) in triple()) {
        let (p, q) = (pt(&a), pt(&b));
        let ball = two_point_ball(&p, &q).unwrap();
        let r = ball.radius();
        let tol = 1e-12 * r.max(1.0);
        prop_assert!((distance(ball.center(), &p).unwrap() - r).abs() <= tol);
        prop_assert!((distance(ball.center(), &q).unwrap() - r).abs() <= tol);
        prop_assert!(contains_expanded(&ball, &p, 1.0).unwrap());
        prop_assert!(contains_expanded(&ball, &q, 1.0).unwrap());
    }

    #[test]
    fn containment_is_monotone_in_mu(
        (a, b, _c) in triple(),
        r in 0.0f64..2e3,
        mu in 1.0f64..3.0,
        extra in 0.0f64..2.0,
    ) {
        let ball = Ball::new(pt(&a), r).unwrap();
        let p = pt(&b);
        if contains_expanded(&ball, &p, mu).unwrap() {
            prop_assert!(contains_expanded(&ball, &p, mu + extra).unwrap());
        }
    }
}

#[test]
fn distance_matches_compensated_reference() {
    let mut rng = rng(7);
    let pts = uniform_points(&mut rng, 200, 7, 100.0);
    for pair in pts.chunks_exact(2) {
        let d = distance(&pair[0], &pair[1]).unwrap();
        let reference = reference_distance(&pair[0], &pair[1]);
        assert!((d - reference).abs() <= 1e-12 * reference.max(1.0), "{d} vs {reference}");
    }
}

#[test]
fn distance_examples() {
    assert_eq!(distance(&pt(&[0.0, 0.0]), &pt(&[3.0, 4.0])).unwrap(), 5.0);
    let p = pt(&[1.5, -2.0, 7.0]);
    assert_eq!(distance(&p, &p).unwrap(), 0.0);
    assert!(matches!(
        distance(&pt(&[1.0]), &pt(&[1.0, 2.0])),
        Err(MebError::DimensionMismatch { expected: 1, found: 2 })
    ));
}

#[test]
fn ball_and_point_validation() {
    assert!(Point::new(vec![]).is_err());
    assert!(Point::new(vec![1.0, f64::NAN]).is_err());
    assert!(Point::new(vec![f64::INFINITY]).is_err());
    assert!(Ball::new(pt(&[0.0]), -1.0).is_err());
    assert!(Ball::new(pt(&[0.0]), f64::INFINITY).is_err());
    let b = Ball::new(pt(&[0.0, 0.0]), 1.0).unwrap();
    assert!(contains_expanded(&b, &pt(&[0.0, 1.0]), 0.99).is_err());
    assert!(contains_expanded(&b, &pt(&[0.0]), 1.0).is_err());
}

#[test]
fn containment_examples() {
    let unit = Ball::new(pt(&[0.0, 0.0]), 1.0).unwrap();
    assert!(contains_expanded(&unit, &pt(&[0.0, 1.0]), 1.0).unwrap());
    assert!(contains_expanded(&unit, &pt(&[1.4, 0.0]), 1.5).unwrap());
    assert!(!contains_expanded(&unit, &pt(&[1.4, 0.0]), 1.0).unwrap());
    let point_ball = Ball::new(pt(&[0.0, 0.0]), 0.0).unwrap();
    assert!(contains_expanded(&point_ball, &pt(&[0.0, 0.0]), 1.0).unwrap());
    assert!(!contains_expanded(&point_ball, &pt(&[1e-6, 0.0]), 1.0).unwrap());
}

#[test]
fn two_point_ball_examples() {
    let b = two_point_ball(&pt(&[1.0, 1.0]), &pt(&[4.0, 5.0])).unwrap();
    assert_eq!(b.center().coords(), &[2.5, 3.0]);
    assert_eq!(b.radius(), 2.5);
    let p = pt(&[3.0, -1.0]);
    let d = two_point_ball(&p, &p).unwrap();
    assert_eq!(d.center(), &p);
    assert_eq!(d.radius(), 0.0);
}
