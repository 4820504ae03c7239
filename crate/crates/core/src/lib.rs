//! Robust multiobjective optimization over finite scenario sets.
//!
//! The crate certifies robust Pareto efficiency and convex-hull efficiency of
//! candidate decisions, evaluates and minimizes worst-case scalarized
//! objectives, and reduces distributionally robust problems over finitely
//! generated ambiguity sets to robust ones.
//!
//! ```
//! use robpareto::{efficiency, fixtures, geometry::Tolerances};
//!
//! let inst = fixtures::problem_1(0.25).unwrap();
//! let report = efficiency::classify(&inst, &Tolerances::default()).unwrap();
//! assert!(report.rows.iter().all(|r| r.robust_efficient));
//! assert!(!report.rows[0].convex_hull_efficient);
//! ```

pub mod distro;
pub mod efficiency;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod linprog;
pub mod model;
pub mod phantom;
pub mod scalarize;
pub mod schema;
pub mod solve;

pub use error::{Error, Result};
pub use model::{
    CandidateSet, Decision, Instance, Matrix, ObjectiveImage, ObjectiveVector, Polyhedron, ScenarioSet, SimplexGrid,
    SimplexPoint, UncertainObjectiveMap,
};
