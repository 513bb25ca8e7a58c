mod common;

use common::{drifting_stream, pt, rng, uniform_points};
use proptest::prelude::*;
use rand::Rng;
use sliding_meb::{
    containment_tolerance, welzl_exact, AomebState, EpsSchedule, KernelSpec, MebError, Point, Space, Swmeb, SwmebPlus,
};

const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Worst-case expansion for SWMEB+ with generous slack.
const PLUS_BOUND: f64 = 9.66 + 0.5;

/// `(1+ε₁)(1+ε₂) + √(ε₂(2+ε₂)) − 1`
fn swmeb_eps(eps1: f64, eps2: f64) -> f64 {
    (1.0 + eps1) * (1.0 + eps2) + (eps2 * (2.0 + eps2)).sqrt() - 1.0
}

fn window<'a>(stream: &'a [Point], start: u64, now: u64) -> &'a [Point] {
    &stream[(start - 1) as usize..now as usize]
}

fn max_ratio(inst: &AomebState, pts: &[Point]) -> (f64, f64) {
    let r = inst.radius();
    let d = pts.iter().map(|p| inst.ball().distance(p).unwrap()).fold(0.0, f64::max);
    (d, r)
}

fn check_swmeb_state(sw: &Swmeb, stream: &[Point], bound: f64) -> Result<(), String> {
    let eps2 = sw.eps2();
    for part in sw.partitions() {
        let ix = part.indices();
        for w in ix.windows(2) {
            if w[1].position() >= w[0].position() {
                return Err("index positions must decrease within a partition".into());
            }
            if !w[1].forced() && w[1].radius_at_creation() < (1.0 + eps2) * w[0].radius_at_creation() {
                return Err(format!(
                    "index radii not separated: {} after {}",
                    w[1].radius_at_creation(),
                    w[0].radius_at_creation()
                ));
            }
        }
    }
    let Ok(inst) = sw.query_instance() else {
        return Ok(());
    };
    let start = sw.window_start();
    if inst.start_index() < start {
        return Err(format!("query instance starts at {} before window start {start}", inst.start_index()));
    }
    if sw.now() >= sw.window() && inst.start_index() > start + sw.partition_len() + (sw.partition_len() / 10).max(1) {
        return Err(format!("query instance starts too late: {} vs {start}", inst.start_index()));
    }
    let (d, r) = max_ratio(inst, window(stream, start, sw.now()));
    if d > bound * r + containment_tolerance(r) {
        return Err(format!("window point at {d} outside {bound} * {r}"));
    }
    Ok(())
}

fn check_plus_state(sw: &SwmebPlus, stream: &[Point]) -> Result<(), String> {
    let positions = sw.index_positions();
    let radii = sw.radii();
    let start = sw.window_start();
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("positions not increasing: {positions:?}"));
    }
    if positions.iter().filter(|&&x| x < start).count() > 1 {
        return Err(format!("more than one expired index: {positions:?} at window start {start}"));
    }
    for i in 0..radii.len().saturating_sub(2) {
        if radii[i] <= (1.0 + sw.schedule().at(i + 1)) * radii[i + 2] {
            return Err(format!("two-hop separation violated at rank {}: {radii:?}", i + 1));
        }
    }
    let inst = sw.query_instance().unwrap();
    let (d, r) = max_ratio(inst, window(stream, start, sw.now()));
    if d > PLUS_BOUND * r + containment_tolerance(r) {
        return Err(format!("window point at {d} outside {PLUS_BOUND} * {r}"));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swmeb_single_mode_invariants(seed in any::<u64>(), tenths in 1u64..30, m in 1usize..6, eps2 in 0.01f64..0.3) {
        let partition = tenths;
        let n_window = 10 * partition;
        let eps1 = 1e-2;
        let mut rng = rng(seed);
        let stream = drifting_stream(&mut rng, 3 * n_window as usize, m);
        let mut sw = Swmeb::new(Space::Euclidean, n_window, partition, eps1, eps2).unwrap();
        let bound = SQRT2 + swmeb_eps(eps1, eps2);
        for p in &stream {
            sw.insert(p.clone()).unwrap();
            prop_assert!(sw.buffered() < partition as usize);
            prop_assert!(sw.partitions().count() as u64 <= n_window / partition);
            prop_assert_eq!(check_swmeb_state(&sw, &stream, bound), Ok(()));
        }
    }

    #[test]
    fn swmeb_batch_mode_invariants(seed in any::<u64>(), m in 1usize..6, b in prop::sample::select(vec![1u64, 2, 5, 10])) {
        let (n_window, partition) = (400, 40);
        let (eps1, eps2) = (1e-3, 0.1);
        let mut rng = rng(seed);
        let stream = drifting_stream(&mut rng, 1200, m);
        let mut sw = Swmeb::with_batch(Space::Euclidean, n_window, partition, b, eps1, eps2).unwrap();
        let bound = SQRT2 + swmeb_eps(eps1, eps2);
        for chunk in stream.chunks(b as usize) {
            sw.insert_batch(chunk).unwrap();
            prop_assert_eq!(check_swmeb_state(&sw, &stream, bound), Ok(()));
        }
    }

    #[test]
    fn swmeb_plus_invariants(seed in any::<u64>(), n_window in 5u64..500, m in 1usize..6, constant in any::<bool>()) {
        let eps1 = 1e-2;
        let schedule = if constant { EpsSchedule::Constant(0.1) } else { EpsSchedule::default_for(eps1) };
        let mut rng = rng(seed);
        let stream = drifting_stream(&mut rng, 3 * n_window as usize, m);
        let mut sw = SwmebPlus::new(Space::Euclidean, n_window, eps1, schedule).unwrap();
        for p in &stream {
            sw.insert(p.clone()).unwrap();
            prop_assert_eq!(sw.index_positions().last().copied(), Some(sw.now()));
            prop_assert_eq!(check_plus_state(&sw, &stream), Ok(()));
        }
    }

    #[test]
    fn swmeb_plus_batch_invariants(seed in any::<u64>(), m in 1usize..6, b in prop::sample::select(vec![2usize, 5, 10, 25])) {
        let mut rng = rng(seed);
        let stream = drifting_stream(&mut rng, 1500, m);
        let mut sw = SwmebPlus::new(Space::Euclidean, 500, 1e-3, EpsSchedule::default_for(1e-3)).unwrap();
        for chunk in stream.chunks(b) {
            sw.insert_batch(chunk).unwrap();
            prop_assert_eq!(check_plus_state(&sw, &stream), Ok(()));
        }
    }
}

#[test]
fn swmeb_plus_empirical_error_on_small_windows() {
    // Mean over 100 streams of the relative error at the last position.
    let mut rng = rng(41);
    let mut total = 0.0;
    for _ in 0..100 {
        let n_window = rng.gen_range(50..=500u64);
        let m = rng.gen_range(1..=5);
        let stream = uniform_points(&mut rng, 2 * n_window as usize, m, 1.0);
        let mut sw = SwmebPlus::new(Space::Euclidean, n_window, 1e-3, EpsSchedule::default_for(1e-3)).unwrap();
        for p in &stream {
            sw.insert(p.clone()).unwrap();
        }
        let win = window(&stream, sw.window_start(), sw.now());
        let exact = welzl_exact(win).unwrap().radius();
        let (d, _) = max_ratio(sw.query_instance().unwrap(), win);
        let err = (d - exact) / exact;
        assert!(err >= -1e-9);
        total += err;
    }
    let mean = total / 100.0;
    assert!(mean <= 0.05, "mean relative error {mean}");
}

#[test]
fn swmeb_plus_radii_along_the_sequence() {
    // A later index sees a subset of the points seen by an earlier one, and
    // that subset lies in the earlier ball expanded by √2 + ε₁. Greedy
    // coresets do not make the radii monotone along the list.
    let mut rng = rng(42);
    let eps1 = 1e-3;
    for _ in 0..20 {
        let stream = drifting_stream(&mut rng, 600, 3);
        let mut sw = SwmebPlus::new(Space::Euclidean, 200, eps1, EpsSchedule::default_for(eps1)).unwrap();
        for p in &stream {
            sw.insert(p.clone()).unwrap();
            let radii = sw.radii();
            for w in radii.windows(2) {
                assert!(w[1] <= (SQRT2 + eps1) * w[0] + containment_tolerance(w[0]), "{radii:?}");
            }
        }
    }
}

#[test]
fn swmeb_plus_counting_stream() {
    let eps2 = 0.1;
    let mut sw = SwmebPlus::new(Space::Euclidean, 8, 1e-3, EpsSchedule::Constant(eps2)).unwrap();
    let stream: Vec<Point> = (1..=12).map(|i| pt(&[i as f64])).collect();
    for p in &stream {
        sw.insert(p.clone()).unwrap();
    }
    assert_eq!(sw.window_start(), 5);
    let radii = sw.radii();
    for i in 0..radii.len().saturating_sub(2) {
        assert!(radii[i] > (1.0 + eps2) * radii[i + 2], "{radii:?}");
    }
    let inst = sw.query_instance().unwrap();
    assert!(inst.start_index() >= 5);
    let r = inst.radius();
    for p in &stream[4..] {
        assert!(inst.ball().distance(p).unwrap() <= PLUS_BOUND * r);
    }
}

#[test]
fn swmeb_plus_prefix_matches_plain_aomeb() {
    let mut rng = rng(43);
    let stream = uniform_points(&mut rng, 99, 4, 1.0);
    let mut sw = SwmebPlus::new(Space::Euclidean, 100, 1e-3, EpsSchedule::default_for(1e-3)).unwrap();
    let mut plain = AomebState::new_at(Space::Euclidean, 1e-3, stream[0].clone(), 1).unwrap();
    sw.insert(stream[0].clone()).unwrap();
    for p in &stream[1..] {
        sw.insert(p.clone()).unwrap();
        plain.update(p.clone()).unwrap();
    }
    assert_eq!(sw.index_positions()[0], 1);
    let q = sw.query().unwrap();
    assert_eq!(q.positions(), plain.coreset().positions());
    assert_eq!(q.ball().radius(), plain.radius());
}

#[test]
fn swmeb_collinear_example() {
    let mut sw = Swmeb::new(Space::Euclidean, 4, 2, 1e-3, 0.1).unwrap();
    assert!(matches!(sw.query(), Err(MebError::WarmUp)));
    sw.insert(pt(&[0.0])).unwrap();
    assert_eq!(sw.buffered(), 1);
    assert!(matches!(sw.query(), Err(MebError::WarmUp)));
    for x in 1..4 {
        sw.insert(pt(&[x as f64])).unwrap();
    }
    let parts: Vec<_> = sw.partitions().collect();
    assert_eq!(parts.len(), 2);
    for part in &parts {
        let far = part.indices().last().unwrap();
        assert_eq!(far.position(), part.first_position());
    }
    let inst = sw.query_instance().unwrap();
    let r = inst.radius();
    let bound = SQRT2 + swmeb_eps(1e-3, 0.1);
    for x in 0..4 {
        assert!(inst.ball().distance(&pt(&[x as f64])).unwrap() <= bound * r + 1e-12);
    }

    // the fifth partition drops the first
    for x in 4..6 {
        sw.insert(pt(&[x as f64])).unwrap();
    }
    assert_eq!(sw.partitions().count(), 2);
    assert_eq!(sw.partitions().next().unwrap().first_position(), 3);
}

#[test]
fn sliding_configuration_errors() {
    assert!(matches!(Swmeb::new(Space::Euclidean, 10, 3, 0.1, 0.1), Err(MebError::InvalidConfig(_))));
    assert!(Swmeb::new(Space::Euclidean, 10, 5, 0.1, 0.1).is_ok());
    assert!(matches!(Swmeb::with_batch(Space::Euclidean, 100, 10, 3, 0.1, 0.1), Err(MebError::InvalidConfig(_))));
    assert!(matches!(Swmeb::new(Space::Euclidean, 10, 5, 0.0, 0.1), Err(MebError::InvalidConfig(_))));
    assert!(matches!(SwmebPlus::new(Space::Euclidean, 0, 0.1, EpsSchedule::Constant(0.1)), Err(MebError::InvalidConfig(_))));
    assert!(SwmebPlus::new(Space::Euclidean, 100_000, 1e-3, EpsSchedule::default_for(1e-3)).is_ok());

    let mut sw = Swmeb::with_batch(Space::Euclidean, 100, 10, 5, 0.1, 0.1).unwrap();
    assert!(sw.insert(pt(&[1.0])).is_err());
    assert!(sw.insert_batch(&vec![pt(&[1.0]); 4]).is_err());
    let mut plus = SwmebPlus::new(Space::Euclidean, 10, 0.1, EpsSchedule::Constant(0.1)).unwrap();
    assert!(matches!(plus.query(), Err(MebError::WarmUp)));
    plus.insert(pt(&[1.0, 2.0])).unwrap();
    assert!(matches!(plus.insert(pt(&[1.0])), Err(MebError::DimensionMismatch { .. })));
}

#[test]
fn kernel_sliding_windows() {
    let mut rng = rng(44);
    let spec = KernelSpec::gaussian(3.0).unwrap();
    let stream = drifting_stream(&mut rng, 900, 3);
    let (eps1, eps2) = (1e-3, 0.1);
    let mut sw = Swmeb::with_batch(Space::Kernel(spec), 300, 30, 10, eps1, eps2).unwrap();
    let mut plus = SwmebPlus::new(Space::Kernel(spec), 300, eps1, EpsSchedule::default_for(eps1)).unwrap();
    let bound = SQRT2 + swmeb_eps(eps1, eps2);
    for chunk in stream.chunks(10) {
        sw.insert_batch(chunk).unwrap();
        plus.insert_batch(chunk).unwrap();
        check_swmeb_state(&sw, &stream, bound).unwrap();
        check_plus_state(&plus, &stream).unwrap();
    }
}
