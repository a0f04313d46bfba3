//! Geodesics, parallel transport and Jacobi fields.
//!
//! Trajectories come in two flavours. `Direct` integrates the geodesic
//! equation in chart coordinates. `Rescaled` integrates the system in
//! `c = (x/x₀, y)` whose coefficients stay smooth up to `x = 0`; vectors along
//! it are carried in hatted components `Ŵ^x = W^x/x₀²`, `Ŵ^i = W^i/x₀`, which
//! are the components in the sc-frame `{x₀²∂_x, x₀∂_{y^i}}` and stay of
//! order one as `x₀ → 0`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::chart::{MetricChart, Vec3, MAX_DIM};
use super::fields::{FieldClass, VectorFieldSpec};
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryKind {
    Rescaled { x0: f64, y0: Vec<f64>, field: VectorFieldSpec },
    Direct { p: Vec<f64>, v: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "frame", rename_all = "snake_case")]
pub enum Frame {
    Coordinate,
    /// sc-frame scaled by the fixed base point `x₀`.
    Hatted { x0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub s: f64,
    /// Integration variables: `(c^x, c^i)` for rescaled runs, coordinates otherwise.
    pub c: Vec<f64>,
    pub c_dot: Vec<f64>,
    /// Chart coordinates `γ(s)`.
    pub gamma: Vec<f64>,
    pub gamma_dot: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTrajectory {
    pub chart: MetricChart,
    pub kind: TrajectoryKind,
    pub states: Vec<GeodesicState>,
}

/// Vectors carried along a trajectory, one per output sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorTrack {
    pub frame: Frame,
    pub s: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

pub(crate) fn ode_opts() -> OdeOptions {
    OdeOptions {
        rtol: 1e-12,
        atol: 1e-20,
        ..OdeOptions::default()
    }
}

fn check_span(s_out: &[f64]) -> Result<()> {
    if s_out.is_empty() || s_out[0] < 0.0 || s_out.windows(2).any(|w| !(w[1] > w[0])) || s_out.iter().any(|s| !s.is_finite()) {
        return Err(Error::Argument("s_span must be nonempty, nonnegative and increasing".into()));
    }
    Ok(())
}

/// Forcing `P_a + s P_b` added to the Jacobi argument of the curvature term,
/// given as indices into the transported vectors.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Forcing {
    pub a: usize,
    pub b: usize,
}

/// Carried vectors: `transports` are parallel; `jacobi` is `(J, ∇_s J)`.
pub(crate) struct Payload<'a> {
    pub transports: &'a [Vec3],
    pub jacobi: Option<(Vec3, Vec3)>,
    pub forcing: Option<Forcing>,
}

impl GeodesicTrajectory {
    pub fn frame(&self) -> Frame {
        match &self.kind {
            TrajectoryKind::Rescaled { x0, .. } => Frame::Hatted { x0: *x0 },
            TrajectoryKind::Direct { .. } => Frame::Coordinate,
        }
    }

    pub fn dim(&self) -> usize {
        self.chart.dim
    }

    pub fn s(&self) -> Vec<f64> {
        self.states.iter().map(|st| st.s).collect()
    }

    pub(crate) fn initial(&self) -> (Vec3, Vec3) {
        let mut pos = [0.0; MAX_DIM];
        let mut vel = [0.0; MAX_DIM];
        let d = self.dim();
        match &self.kind {
            TrajectoryKind::Rescaled { x0, y0, field } => {
                pos[0] = 1.0;
                pos[1..d].copy_from_slice(y0);
                let mut p = vec![*x0];
                p.extend_from_slice(y0);
                let v = field.normalized(&p);
                let f = match field.class {
                    FieldClass::BField => 1.0,
                    FieldClass::ScField => *x0,
                };
                for i in 0..d {
                    vel[i] = f * v[i];
                }
            }
            TrajectoryKind::Direct { p, v } => {
                pos[..d].copy_from_slice(p);
                vel[..d].copy_from_slice(v);
            }
        }
        (pos, vel)
    }

    fn x0(&self) -> Option<f64> {
        match &self.kind {
            TrajectoryKind::Rescaled { x0, .. } => Some(*x0),
            TrajectoryKind::Direct { .. } => None,
        }
    }

    /// Chart point for integration variables.
    pub(crate) fn point_of(&self, pos: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut p = pos[..d].to_vec();
        if let Some(x0) = self.x0() {
            p[0] *= x0;
        }
        p
    }

    /// `g(w, w)^{1/2}` for a vector in this trajectory's frame at integration state `pos`.
    pub fn norm_at(&self, pos: &[f64], w: &[f64]) -> Result<f64> {
        let d = self.dim();
        match self.x0() {
            None => Ok(self.chart.inner(&pos[..d], &w[..d], &w[..d])?.max(0.0).sqrt()),
            Some(_) => {
                let nf = self.chart.normal_form(&self.point_of(pos))?;
                let cx = pos[0];
                let mut q = nf.a.v * w[0] * w[0] / cx.powi(4);
                for i in 0..d - 1 {
                    for j in 0..d - 1 {
                        q += nf.h[i][j].v * w[1 + i] * w[1 + j] / (cx * cx);
                    }
                }
                Ok(q.max(0.0).sqrt())
            }
        }
    }

    /// `g(γ̇, γ̇)` at every sample; needs `x₀ > 0` for rescaled runs.
    pub fn energies(&self) -> Result<Vec<f64>> {
        let d = self.dim();
        self.states
            .iter()
            .map(|st| match self.x0() {
                None => self.chart.inner(&st.gamma, &st.gamma_dot, &st.gamma_dot),
                Some(x0) if x0 > 0.0 => {
                    let v: Vec<f64> = st.c_dot.iter().map(|c| c / x0).collect();
                    let mut pos = [0.0; MAX_DIM];
                    pos[..d].copy_from_slice(&st.c);
                    self.norm_at(&pos, &v).map(|n| n * n)
                }
                Some(_) => Err(Error::Argument("energy is undefined on the boundary".into())),
            })
            .collect()
    }

    /// `s, γ, γ̇` as CSV.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let d = self.dim();
        let mut head = vec!["s".to_string()];
        head.extend((0..d).map(|i| format!("gamma{i}")));
        head.extend((0..d).map(|i| format!("gamma_dot{i}")));
        writeln!(out, "{}", head.join(","))?;
        for st in &self.states {
            let mut row = vec![format!("{:.17e}", st.s)];
            row.extend(st.gamma.iter().chain(&st.gamma_dot).map(|v| format!("{v:.17e}")));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Integrates position, velocity and payload; returns one flat state per output.
    pub(crate) fn evolve(&self, s_out: &[f64], payload: &Payload) -> Result<Vec<Vec<f64>>> {
        let d = self.dim();
        let chart = self.chart;
        let x0 = self.x0();
        let nt = payload.transports.len();
        let (pos, vel) = self.initial();
        let mut y0 = Vec::with_capacity(d * (2 + nt + 2));
        y0.extend_from_slice(&pos[..d]);
        y0.extend_from_slice(&vel[..d]);
        for t in payload.transports {
            y0.extend_from_slice(&t[..d]);
        }
        if let Some((j, w)) = payload.jacobi {
            y0.extend_from_slice(&j[..d]);
            y0.extend_from_slice(&w[..d]);
        }
        if x0 == Some(0.0) && payload.jacobi.is_some() {
            return Err(Error::Argument("Jacobi fields need an interior base point".into()));
        }
        let mut failure: Option<Error> = None;
        let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
            if failure.is_some() {
                dy.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            let mut p = y[..d].to_vec();
            let u = &y[d..2 * d];
            if let Some(x0) = x0 {
                p[0] *= x0;
            }
            let res: Result<()> = (|| {
                let apply: Box<dyn Fn(&[f64], &[f64]) -> Vec3> = match x0 {
                    None => {
                        let geo = chart.geometry(&p)?;
                        Box::new(move |a, b| geo.connection(a, b))
                    }
                    Some(_) => {
                        let r = chart.rescaled(&p)?;
                        let cx = y[0];
                        Box::new(move |a, b| r.apply(d, cx, a, b))
                    }
                };
                dy[..d].copy_from_slice(u);
                let acc = apply(u, u);
                for i in 0..d {
                    dy[d + i] = -acc[i];
                }
                for t in 0..nt {
                    let off = (2 + t) * d;
                    let b = apply(u, &y[off..off + d]);
                    for i in 0..d {
                        dy[off + i] = -b[i];
                    }
                }
                if payload.jacobi.is_some() {
                    let oj = (2 + nt) * d;
                    let ow = oj + d;
                    let mut arg = y[oj..oj + d].to_vec();
                    if let Some(f) = payload.forcing {
                        let (oa, ob) = ((2 + f.a) * d, (2 + f.b) * d);
                        for i in 0..d {
                            arg[i] += y[oa + i] + s * y[ob + i];
                        }
                    }
                    let bj = apply(u, &y[oj..oj + d]);
                    let bw = apply(u, &y[ow..ow + d]);
                    let geo = chart.geometry(&p)?;
                    let curv = match x0 {
                        None => geo.jacobi_term(&arg, u),
                        Some(x0) => {
                            // hatted → coordinate: scale (x₀², x₀, …); velocity γ̇ = (x₀ ċ^x, ċ^i)
                            let sc = |i: usize| if i == 0 { x0 * x0 } else { x0 };
                            let jc: Vec<f64> = (0..d).map(|i| sc(i) * arg[i]).collect();
                            let mut vc = u.to_vec();
                            vc[0] *= x0;
                            let r = geo.jacobi_term(&jc, &vc);
                            let mut out = [0.0; MAX_DIM];
                            for i in 0..d {
                                out[i] = r[i] / sc(i);
                            }
                            out
                        }
                    };
                    for i in 0..d {
                        dy[oj + i] = y[ow + i] - bj[i];
                        dy[ow + i] = -bw[i] - curv[i];
                    }
                }
                Ok(())
            })();
            if let Err(e) = res {
                failure = Some(e);
                dy.iter_mut().for_each(|v| *v = 0.0);
            }
        };
        let out = integrate(rhs, 0.0, &y0, s_out, &ode_opts());
        if let Some(e) = failure {
            return Err(e);
        }
        out
    }

    fn states_from(&self, s_out: &[f64], raw: &[Vec<f64>]) -> Vec<GeodesicState> {
        let d = self.dim();
        raw.iter()
            .zip(s_out)
            .map(|(y, &s)| {
                let c = y[..d].to_vec();
                let c_dot = y[d..2 * d].to_vec();
                let (gamma, gamma_dot) = match self.x0() {
                    Some(x0) => {
                        let mut g = c.clone();
                        g[0] *= x0;
                        let mut gd = c_dot.clone();
                        gd[0] *= x0;
                        (g, gd)
                    }
                    None => (c.clone(), c_dot.clone()),
                };
                GeodesicState { s, c, c_dot, gamma, gamma_dot }
            })
            .collect()
    }
}

fn with_zero(s_span: &[f64]) -> Vec<f64> {
    if s_span[0] == 0.0 {
        s_span.to_vec()
    } else {
        std::iter::once(0.0).chain(s_span.iter().copied()).collect()
    }
}

/// Solves the rescaled geodesic system from `c(0) = (1, y₀)` with `ċ(0)` the
/// b-components of `V` at `(x₀, y₀)`; `γ = (x₀ c^x, c^i)`.
pub fn integrate_geodesic(chart: &MetricChart, x0: f64, y0: &[f64], field: &VectorFieldSpec, s_span: &[f64]) -> Result<GeodesicTrajectory> {
    field.validate(chart)?;
    check_span(s_span)?;
    if !(x0 >= 0.0 && x0.is_finite()) {
        return Err(Error::Argument(format!("x0 must be finite and nonnegative, got {x0}")));
    }
    if y0.len() + 1 != chart.dim {
        return Err(Error::Argument(format!("y0 needs {} entries", chart.dim - 1)));
    }
    let mut traj = GeodesicTrajectory {
        chart: *chart,
        kind: TrajectoryKind::Rescaled {
            x0,
            y0: y0.to_vec(),
            field: field.clone(),
        },
        states: Vec::new(),
    };
    let s_out = with_zero(s_span);
    let raw = traj.evolve(&s_out, &Payload { transports: &[], jacobi: None, forcing: None })?;
    traj.states = traj.states_from(&s_out, &raw);
    if x0 > 0.0 {
        if let Some(st) = traj.states.iter().find(|st| !(st.c[0] > 0.0)) {
            return Err(Error::Numeric(format!("trajectory left the interior at s = {}: c = {:?}", st.s, st.c)));
        }
    }
    Ok(traj)
}

/// Geodesic equation `γ̈ = −Γ(γ̇, γ̇)` in chart coordinates.
pub fn integrate_geodesic_direct(chart: &MetricChart, p: &[f64], v: &[f64], s_span: &[f64]) -> Result<GeodesicTrajectory> {
    check_span(s_span)?;
    if p.len() != chart.dim || v.len() != chart.dim {
        return Err(Error::Argument(format!("point and velocity need {} components", chart.dim)));
    }
    chart.geometry(p)?;
    let mut traj = GeodesicTrajectory {
        chart: *chart,
        kind: TrajectoryKind::Direct { p: p.to_vec(), v: v.to_vec() },
        states: Vec::new(),
    };
    let s_out = with_zero(s_span);
    let raw = traj.evolve(&s_out, &Payload { transports: &[], jacobi: None, forcing: None })?;
    traj.states = traj.states_from(&s_out, &raw);
    Ok(traj)
}

fn track(traj: &GeodesicTrajectory, raw: &[Vec<f64>], offset: usize) -> Result<VectorTrack> {
    let d = traj.dim();
    let s = traj.s();
    let mut vectors = Vec::new();
    let mut norms = Vec::new();
    for y in raw {
        let w = y[offset..offset + d].to_vec();
        norms.push(traj.norm_at(&y[..d], &w)?);
        vectors.push(w);
    }
    Ok(VectorTrack {
        frame: traj.frame(),
        s,
        vectors,
        norms,
    })
}

fn as_vec3(w: &[f64], d: usize) -> Result<Vec3> {
    if w.len() != d {
        return Err(Error::Argument(format!("vector needs {d} components, got {}", w.len())));
    }
    let mut out = [0.0; MAX_DIM];
    out[..d].copy_from_slice(w);
    Ok(out)
}

/// `∇_s Z = 0` along the trajectory, with `Z₀` in the trajectory's frame.
pub fn parallel_transport(traj: &GeodesicTrajectory, z0: &[f64]) -> Result<VectorTrack> {
    let d = traj.dim();
    let z = as_vec3(z0, d)?;
    let s = traj.s();
    let raw = traj.evolve(&s, &Payload { transports: &[z], jacobi: None, forcing: None })?;
    track(traj, &raw, 2 * d)
}

/// `∇_s∇_s J + R(J, γ̇)γ̇ = 0` with `J(0) = J₀`, `∇_s J(0) = J₀'`, in the trajectory's frame.
pub fn jacobi_field(traj: &GeodesicTrajectory, j0: &[f64], j0_prime: &[f64]) -> Result<VectorTrack> {
    let d = traj.dim();
    let j = as_vec3(j0, d)?;
    let w = as_vec3(j0_prime, d)?;
    let s = traj.s();
    let raw = traj.evolve(&s, &Payload { transports: &[], jacobi: Some((j, w)), forcing: None })?;
    track(traj, &raw, 2 * d)
}
