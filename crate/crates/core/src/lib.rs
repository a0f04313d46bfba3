//! Deformation-moduli dimensions of asymptotically conical special Lagrangian
//! submanifolds, plus the numerics that back up the counting formulas.
//!
//! The crate is split along the data flow:
//!
//! * [`link_spectrum`]: Laplace spectra of link components (closed forms, P1 FEM).
//! * [`indicial`]: growth exponents, exceptional weights, weighted harmonic counts.
//! * [`topology`]: exact rational cohomology of a simplicial core with boundary.
//! * [`moduli`]: the dimension formulas assembled from the two above.
//! * [`cone_solver`]: separated radial solves on warped AC models.
//! * [`ac_geometry`]: geodesics, parallel transport and Jacobi fields in boundary charts.
//! * [`cli`]: manifest-driven runner producing JSON reports.

pub mod ac_geometry;
pub mod cli;
pub mod cone_solver;
pub mod error;
pub mod fit;
pub mod indicial;
pub mod jet;
pub mod link_spectrum;
pub mod moduli;
pub mod ode;
pub mod topology;

pub use error::{Error, Result};
