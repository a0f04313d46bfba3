//! Asymptotically conical metrics in boundary coordinates: connection and
//! curvature, decay classes, the rescaled geodesic flow, parallel transport,
//! Jacobi fields and the Jacobi remainder estimate.

mod chart;
mod decay;
mod fields;
mod geodesic;
mod remainder;

pub use chart::{christoffels, curvature_norm, ChartKind, Christoffels, MetricChart, NormalForm, PointGeometry, Rescaled, Vec3, MAX_DIM};
pub use decay::{claimed_christoffel_order, decay_classify, DecayEntry, DecayQuantity, DecayReport, VANISH_TOL};
pub use fields::{Component, FieldClass, VectorFieldSpec};
pub use geodesic::{
    integrate_geodesic, integrate_geodesic_direct, jacobi_field, parallel_transport, Frame, GeodesicState, GeodesicTrajectory,
    TrajectoryKind, VectorTrack,
};
pub use remainder::{
    comparison_bound, comparison_envelope, half_decades, immersion_check, jacobi_remainder, remainder_sweep, rho_envelope,
    ComparisonBound, ImmersionSample, JacobiRemainder, RemainderSweep, SweepPoint, ZDirection,
};
