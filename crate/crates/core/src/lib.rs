pub mod approximation;
pub mod cones;
pub mod convex_solver;
pub mod error;
pub mod geometry;
pub mod norm;
pub mod problem;
pub mod scalarization;
pub mod verification;
pub(crate) mod vecops;

pub use cones::OrderingCone;
pub use error::{Error, Result};
pub use geometry::{Halfspace, Polyhedron, VRep};
pub use norm::Norm;
pub use problem::{catalog, ProblemSpec, QuadraticFunction};
