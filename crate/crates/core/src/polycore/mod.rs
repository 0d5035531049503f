//! Exact rational polyhedral computations: vertex enumeration, affine rank,
//! linear programming, convex-membership testing.

mod dd;
mod linalg;
mod lp;

pub use dd::{dd_enumerate, DdError, VertexSet};
pub use linalg::{affine_rank, matrix_rank};
pub use lp::{in_convex_hull, lp_solve, lp_solve_rows, LpSense, LpStatus, LpResult, RawRow};
