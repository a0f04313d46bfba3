//! Rotationally separated AC models: radial ODEs per link eigenvalue, counts of
//! weighted harmonic functions, the gluing principle and a Fredholm-window probe.

mod glue;
mod probe;
mod profile;
mod radial;

pub use glue::{glue_harmonic, glue_harmonic_with, neck_grid, GlueOptions, GlueResult, RadialSolution};
pub use probe::{fredholm_window_probe, fredholm_window_probe_with, DeltaVerdict, ProbeEntry, ProbeOptions, ProbeReport, Trend};
pub use profile::{AcProfile, ProfileTopology, Warp};
pub use radial::{
    bounded_harmonic_dim, fit_radial_exponent, harmonic_radial_basis, radial_operator, Admissible, BoundedHarmonicDim,
    ModeCount, RadialBasis, RadialOperator, PARALLEL_TOL,
};
