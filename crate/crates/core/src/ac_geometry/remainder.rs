//! The Jacobi remainder `Q(s) = J(s) − A(s)` and its comparison majorant.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::chart::{curvature_norm, MetricChart, Vec3, MAX_DIM};
use super::fields::{FieldClass, VectorFieldSpec};
use super::geodesic::{integrate_geodesic, Forcing, Payload};
use crate::error::{Error, Result};
use crate::fit::least_squares_slope;
use crate::ode::{integrate, linspace};

/// Base directions `Z` of the geodesic family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum ZDirection {
    /// `x²∂_x`
    Radial,
    /// `x∂_{y^i}` (0-based link index)
    Link(usize),
}

impl ZDirection {
    fn hatted(self, dim: usize) -> Result<Vec3> {
        let mut z = [0.0; MAX_DIM];
        match self {
            ZDirection::Radial => z[0] = 1.0,
            ZDirection::Link(i) if i + 1 < dim => z[1 + i] = 1.0,
            ZDirection::Link(i) => return Err(Error::Argument(format!("link direction {i} out of range for dimension {dim}"))),
        }
        Ok(z)
    }
}

/// `ρ(x) = (sup ‖R‖)^{1/2}` over the shell `1/x − 1 ≤ r ≤ 1/x + 1`, sampled on
/// 9 radii and 24 link points. Registry charts do not depend on `y²`, so the
/// link is sampled along `y¹` only.
pub fn rho_envelope(chart: &MetricChart, x: f64) -> Result<f64> {
    if !chart.is_ac() {
        return Err(Error::Argument("curvature envelopes need an AC chart".into()));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Argument(format!("x must lie in (0, 1], got {x}")));
    }
    let r0 = 1.0 / x;
    let (lo, hi) = ((r0 - 1.0).max(0.5 * r0), r0 + 1.0);
    let mut sup = 0.0f64;
    for i in 0..9 {
        let r = lo + (hi - lo) * i as f64 / 8.0;
        for k in 0..24 {
            let th = if chart.dim == 2 {
                2.0 * std::f64::consts::PI * k as f64 / 24.0
            } else {
                std::f64::consts::PI * (k as f64 + 0.5) / 24.0
            };
            let mut p = vec![1.0 / r, th];
            if chart.dim == 3 {
                p.push(0.0);
            }
            sup = sup.max(curvature_norm(chart, &p)?);
        }
    }
    Ok(sup.sqrt())
}

/// Solution of `ä = ρ² a + ρ² (n_Z + s n_G)`, `a(0) = ȧ(0) = 0`, at `s_out`.
pub fn comparison_envelope(rho: f64, norm_z: f64, norm_grad_v: f64, s_out: &[f64]) -> Result<Vec<f64>> {
    if ![rho, norm_z, norm_grad_v].iter().all(|v| v.is_finite() && *v >= 0.0) {
        return Err(Error::Argument("envelope parameters must be finite and nonnegative".into()));
    }
    let r2 = rho * rho;
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = r2 * y[0] + r2 * (norm_z + s * norm_grad_v);
    };
    let opts = crate::ode::OdeOptions {
        rtol: 1e-12,
        atol: 1e-30,
        ..Default::default()
    };
    Ok(integrate(rhs, 0.0, &[0.0, 0.0], s_out, &opts)?.into_iter().map(|y| y[0]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBound {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub a_end: f64,
    /// `e · ρ · x`
    pub bound: f64,
}

/// Majorant for `‖J − A‖` with the closing estimate `a(1) ≤ e ρ x`.
/// Requires `ρ ≤ x`, `n_Z ≤ 1` and `n_G ≤ x`.
pub fn comparison_bound(rho: f64, x: f64, norm_z: f64, norm_grad_v: f64, s_max: f64) -> Result<ComparisonBound> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Argument(format!("x must be positive, got {x}")));
    }
    if !(rho >= 0.0 && rho <= x) {
        return Err(Error::Argument(format!("need 0 <= rho <= x, got rho = {rho}, x = {x}")));
    }
    if !(norm_z >= 0.0 && norm_z <= 1.0) {
        return Err(Error::Argument(format!("need 0 <= |Z| <= 1, got {norm_z}")));
    }
    if !(norm_grad_v >= 0.0 && norm_grad_v <= x) {
        return Err(Error::Argument(format!("need 0 <= |grad_Z V| <= x, got {norm_grad_v}")));
    }
    if !(s_max > 0.0 && s_max <= 1.0) {
        return Err(Error::Argument(format!("s_max must lie in (0, 1], got {s_max}")));
    }
    let s = linspace(0.0, s_max, 100);
    let a = comparison_envelope(rho, norm_z, norm_grad_v, &s)?;
    if a.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Internal("comparison solution is not monotone".into()));
    }
    let a_end = a[a.len() - 1];
    let bound = std::f64::consts::E * rho * x;
    if a_end > bound {
        return Err(Error::Internal(format!("a({s_max}) = {a_end:e} exceeds e·rho·x = {bound:e}")));
    }
    Ok(ComparisonBound { s, a, a_end, bound })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiRemainder {
    pub x: f64,
    pub y: Vec<f64>,
    pub z: ZDirection,
    pub s: Vec<f64>,
    /// `Q(s)` in hatted components.
    pub q: Vec<Vec<f64>>,
    pub q_norm: Vec<f64>,
    /// `J(1)` in hatted components.
    pub j_end: Vec<f64>,
    pub norm_q_end: f64,
    pub norm_z: f64,
    pub norm_grad_v: f64,
    pub norm_v: f64,
    pub rho: f64,
    /// Majorant `a(s)` from the comparison equation with `ρ = ρ(x)`.
    pub envelope: Vec<f64>,
}

impl JacobiRemainder {
    /// Largest `‖Q(s)‖ / a(s)` over `s > 0`.
    pub fn max_envelope_ratio(&self) -> f64 {
        self.q_norm
            .iter()
            .zip(&self.envelope)
            .skip(1)
            .map(|(q, a)| if *a > 0.0 { q / a } else if *q > 0.0 { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max)
    }
}

/// `J(s) = P(Z) + s P(∇_Z V) + Q(s)` along `s ↦ exp(sV)` from `(x, y)`. `Q` is
/// integrated directly from `∇_s² Q = −R(Q + A, γ̇)γ̇`, `Q(0) = ∇_s Q(0) = 0`.
pub fn jacobi_remainder(chart: &MetricChart, x: f64, y: &[f64], field: &VectorFieldSpec, z: ZDirection) -> Result<JacobiRemainder> {
    if field.class != FieldClass::ScField {
        return Err(Error::Argument("the remainder estimate is stated for sc-fields".into()));
    }
    if !(x > 0.0 && x <= 0.1) {
        return Err(Error::Argument(format!("x must lie in (0, 0.1], got {x}")));
    }
    let d = chart.dim;
    let s = linspace(0.0, 1.0, 20);
    let traj = integrate_geodesic(chart, x, y, field, &s)?;
    let mut p = vec![x];
    p.extend_from_slice(y);
    let mut start = [0.0; MAX_DIM];
    start[0] = 1.0;
    start[1..d].copy_from_slice(y);

    let zh = z.hatted(d)?;
    let scale = |i: usize| if i == 0 { x * x } else { x };
    let zc: Vec<f64> = (0..d).map(|i| scale(i) * zh[i]).collect();
    let gc = field.covariant_derivative(chart, &p, &zc)?;
    let mut gh = [0.0; MAX_DIM];
    for i in 0..d {
        gh[i] = gc[i] / scale(i);
    }
    let vh = field.normalized(&p);
    let norm_v = traj.norm_at(&start, &vh)?;
    if norm_v > 1.0 + 1e-12 {
        return Err(Error::Argument(format!("need |V| <= 1 at the base point, got {norm_v}")));
    }
    let norm_z = traj.norm_at(&start, &zh)?;
    let norm_grad_v = traj.norm_at(&start, &gh)?;

    let zero = [0.0; MAX_DIM];
    let raw = traj.evolve(
        &s,
        &Payload {
            transports: &[zh, gh],
            jacobi: Some((zero, zero)),
            forcing: Some(Forcing { a: 0, b: 1 }),
        },
    )?;
    let mut q = Vec::new();
    let mut q_norm = Vec::new();
    for yv in &raw {
        let qv = yv[4 * d..5 * d].to_vec();
        q_norm.push(traj.norm_at(&yv[..d], &qv)?);
        q.push(qv);
    }
    let last = &raw[raw.len() - 1];
    let j_end: Vec<f64> = (0..d).map(|i| last[4 * d + i] + last[2 * d + i] + last[3 * d + i]).collect();
    let rho = rho_envelope(chart, x)?;
    let envelope = comparison_envelope(rho, norm_z, norm_grad_v, &s)?;
    Ok(JacobiRemainder {
        x,
        y: y.to_vec(),
        z,
        norm_q_end: q_norm[q_norm.len() - 1],
        s,
        q,
        q_norm,
        j_end,
        norm_z,
        norm_grad_v,
        norm_v,
        rho,
        envelope,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub x: f64,
    #[serde(rename = "norm_Q")]
    pub norm_q: f64,
    pub rho_x_times_x: f64,
    /// `‖J(1)‖` in the hatted frame, which should stay bounded as `x → 0`.
    pub norm_j_hat: f64,
    pub max_envelope_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderSweep {
    pub points: Vec<SweepPoint>,
    /// Log-log slope of `‖Q(1)‖` against `ρ(x)·x`; absent when `Q` vanishes.
    pub slope: Option<f64>,
    /// Log-log slope of the hatted `‖J(1)‖` against `x`.
    pub pushforward_slope: f64,
}

/// Half-decade grid `10^{−1}, 10^{−1.5}, …, 10^{−4}`.
pub fn half_decades() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect()
}

pub fn remainder_sweep(chart: &MetricChart, y: &[f64], field: &VectorFieldSpec, z: ZDirection, xs: &[f64]) -> Result<RemainderSweep> {
    if xs.len() < 2 {
        return Err(Error::Argument("a sweep needs at least two x values".into()));
    }
    let mut points = Vec::new();
    for &x in xs {
        let r = jacobi_remainder(chart, x, y, field, z)?;
        let jn = r.j_end.iter().map(|v| v * v).sum::<f64>().sqrt();
        points.push(SweepPoint {
            x,
            norm_q: r.norm_q_end,
            rho_x_times_x: r.rho * x,
            norm_j_hat: jn,
            max_envelope_ratio: r.max_envelope_ratio(),
        });
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.norm_q > 0.0 && p.rho_x_times_x > 0.0)
        .map(|p| (p.rho_x_times_x.ln(), p.norm_q.ln()))
        .collect();
    let vanishes = points.iter().all(|p| p.norm_q <= 1e-12);
    let slope = if vanishes || fit.len() < 2 {
        None
    } else {
        let (xs_, ys_): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
        Some(least_squares_slope(&xs_, &ys_))
    };
    let (lx, lj): (Vec<f64>, Vec<f64>) = points.iter().map(|p| (p.x.ln(), p.norm_j_hat.max(1e-300).ln())).unzip();
    let pushforward_slope = least_squares_slope(&lx, &lj);
    Ok(RemainderSweep { points, slope, pushforward_slope })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionSample {
    pub x: f64,
    pub y: Vec<f64>,
    pub min_singular_value: f64,
}

/// Smallest singular value of `d(exp V)` in hatted frames, sampled on a grid.
/// Descriptive only: positivity on samples says nothing between them.
pub fn immersion_check(chart: &MetricChart, field: &VectorFieldSpec, xs: &[f64], ys: &[Vec<f64>]) -> Result<Vec<ImmersionSample>> {
    let d = chart.dim;
    let mut out = Vec::new();
    for &x in xs {
        for y in ys {
            let mut cols = Vec::new();
            for k in 0..d {
                let z = if k == 0 { ZDirection::Radial } else { ZDirection::Link(k - 1) };
                cols.push(jacobi_remainder(chart, x, y, field, z)?.j_end);
            }
            let m = DMatrix::from_fn(d, d, |i, j| cols[j][i]);
            let sv = m.singular_values();
            out.push(ImmersionSample {
                x,
                y: y.clone(),
                min_singular_value: sv.iter().cloned().fold(f64::INFINITY, f64::min),
            });
        }
    }
    Ok(out)
}
