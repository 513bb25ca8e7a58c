//! Coresets for minimum enclosing balls (MEB) over data streams.
//!
//! The crate maintains small subsets of a point stream whose MEB, slightly
//! expanded, covers every point of interest:
//!
//! - [`core_meb`]: batch coreset construction by repeatedly adding the point
//!   furthest from the current center.
//! - [`AomebState`]: append-only streams, deciding each point once.
//! - [`Swmeb`]: sliding windows via equal-length partitions, each carrying a
//!   sequence of AOMEB instances started at ratio-separated positions.
//! - [`SwmebPlus`]: sliding windows via one pruned index sequence whose
//!   radii are kept ratio-separated two hops apart.
//! - [`SsmebState`]: the single-ball 1.5-approximate streaming baseline.
//!
//! Every algorithm runs either in Euclidean space or in the feature space
//! of a kernel ([`Space`]). All balls are solved by one Frank-Wolfe solver
//! over the simplex-constrained dual; [`welzl_exact`] provides an exact
//! reference for small dimensions.
//!
//! ```
//! use sliding_meb::{Point, Space, SwmebPlus, EpsSchedule};
//!
//! let mut sw = SwmebPlus::new(Space::Euclidean, 100, 1e-3, EpsSchedule::default_for(1e-3)).unwrap();
//! for i in 0..500 {
//!     let x = (i as f64 * 0.37).sin();
//!     sw.insert(Point::new(vec![x, 1.0 - x]).unwrap()).unwrap();
//! }
//! let coreset = sw.query().unwrap();
//! assert!(coreset.len() >= 1);
//! ```

pub mod aomeb;
pub mod batch;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod space;
pub mod ssmeb;
pub mod swmeb;
pub mod swmeb_plus;

mod solver;

pub use aomeb::{AomebState, Update};
pub use batch::{core_meb, core_meb_in, solve_meb, welzl_exact, SolveReport, MAX_EXACT_DIM};
pub use error::{MebError, Result};
pub use geometry::{contains_expanded, containment_tolerance, distance, two_point_ball, Ball, Point};
pub use kernel::{
    estimate_gamma, kernel_distance, kernel_eval, kernel_radius, solve_kernel_meb, KernelCenter, KernelSpec,
};
pub use solver::MAX_ITERATIONS;
pub use space::{Coreset, MebBall, Space};
pub use ssmeb::SsmebState;
pub use swmeb::Swmeb;
pub use swmeb_plus::{EpsSchedule, SwmebPlus};
