//! Per-mode radial operator `L f = −f'' − (n−1)(w'/w) f' + (λ/w²) f` and
//! shooting-based counts of weighted harmonic functions.

use serde::{Deserialize, Serialize};

use super::profile::{AcProfile, ProfileTopology};
use crate::error::{Error, Result};
use crate::indicial::{check_non_exceptional, critical_eigenvalue, growth_exponents, Branch};
use crate::fit::least_squares_slope;
use crate::ode::{integrate, OdeOptions};

/// Coefficients of `L f = −f'' + p f' + q f`.
#[derive(Debug, Clone)]
pub struct RadialOperator<'a> {
    pub profile: &'a AcProfile,
    pub lambda: f64,
}

impl<'a> RadialOperator<'a> {
    /// `p(t) = −(n−1) w'/w`
    pub fn p(&self, t: f64) -> f64 {
        let (w, dw, _) = self.profile.w_derivs(t);
        -((self.profile.n() - 1) as f64) * dw / w
    }

    /// `q(t) = λ / w²`
    pub fn q(&self, t: f64) -> f64 {
        let w = self.profile.w(t);
        self.lambda / (w * w)
    }

    /// `p'(t)`, from the exact second derivative of the warp.
    pub fn dp(&self, t: f64) -> f64 {
        let (w, dw, ddw) = self.profile.w_derivs(t);
        -((self.profile.n() - 1) as f64) * (ddw * w - dw * dw) / (w * w)
    }

    pub fn apply(&self, t: f64, f: f64, df: f64, ddf: f64) -> f64 {
        -ddf + self.p(t) * df + self.q(t) * f
    }

    /// `y = (f, f')`, `y' = (f', p f' + q f)` for `L f = 0`.
    pub fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = self.p(t) * y[1] + self.q(t) * y[0];
    }
}

pub fn radial_operator(profile: &AcProfile, lambda: f64) -> Result<RadialOperator<'_>> {
    if !(lambda >= 0.0) {
        return Err(Error::Argument(format!("eigenvalue must be nonnegative, got {lambda}")));
    }
    Ok(RadialOperator { profile, lambda })
}

/// The separated harmonic models `r^{a⁺}`, `r^{a⁻}` on the exact cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialBasis {
    pub lambda: f64,
    pub a_plus: f64,
    pub a_minus: f64,
}

impl RadialBasis {
    pub fn eval(&self, branch: Branch, r: f64) -> f64 {
        match branch {
            Branch::APlus => r.powf(self.a_plus),
            Branch::AMinus => r.powf(self.a_minus),
        }
    }
}

pub fn harmonic_radial_basis(lambda: f64, n: usize) -> Result<RadialBasis> {
    let g = growth_exponents(lambda, n)?;
    Ok(RadialBasis {
        lambda,
        a_plus: g.a_plus,
        a_minus: g.a_minus,
    })
}

fn ode_opts() -> OdeOptions {
    OdeOptions {
        rtol: 1e-11,
        atol: 1e-14,
        ..OdeOptions::default()
    }
}

/// Which solutions are bounded by `C r^{−δ}` on one end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissible {
    /// Every solution (both rates below the bound).
    All,
    /// Only the decaying model `r^{a⁻}`.
    Decaying,
    None,
}

fn admissible(lambda: f64, n: usize, delta: f64) -> Admissible {
    let g = growth_exponents(lambda, n).expect("checked eigenvalue");
    if g.a_plus < -delta {
        Admissible::All
    } else if g.a_minus < -delta {
        Admissible::Decaying
    } else {
        Admissible::None
    }
}

/// `(f, f')` at `t_to` of the solution that matches `r^{a⁻}` at `t_from`.
fn shoot_decaying(op: &RadialOperator, a_minus: f64, t_from: f64, t_to: f64) -> Result<[f64; 2]> {
    let (w, dw, _) = op.profile.w_derivs(t_from);
    let y0 = [1.0, a_minus * dw / w];
    let y = integrate(|t, y, dy| op.rhs(t, y, dy), t_from, &y0, &[t_to], &ode_opts())?;
    Ok([y[0][0], y[0][1]])
}

/// `(f, f')` at `t_to` of the solution regular at the cap, `f ≈ t^{a⁺}` near 0.
fn shoot_regular(op: &RadialOperator, a_plus: f64, t_to: f64) -> Result<[f64; 2]> {
    let t0: f64 = 1e-3;
    let y0 = [t0.powf(a_plus), if a_plus == 0.0 { 0.0 } else { a_plus * t0.powf(a_plus - 1.0) }];
    let y = integrate(|t, y, dy| op.rhs(t, y, dy), t0, &y0, &[t_to], &ode_opts())?;
    Ok([y[0][0], y[0][1]])
}

/// `|det[u, v]| / (|u| |v|)`
fn sine_between(u: [f64; 2], v: [f64; 2]) -> f64 {
    let nu = u[0].hypot(u[1]);
    let nv = v[0].hypot(v[1]);
    (u[0] * v[1] - u[1] * v[0]).abs() / (nu * nv)
}

pub const PARALLEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCount {
    pub lambda: f64,
    pub multiplicity: usize,
    pub a_plus: f64,
    pub a_minus: f64,
    pub admissible: Vec<Admissible>,
    /// Sine of the angle between the two one-dimensional constraints, when both are lines.
    pub sine: Option<f64>,
    pub dim_per_eigenfunction: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedHarmonicDim {
    pub delta: f64,
    pub truncation: f64,
    pub lambda_max: f64,
    pub total: usize,
    pub modes: Vec<ModeCount>,
}

/// Counts global harmonic functions bounded by `C r^{−δ}` on every end, mode by
/// mode, by shooting the decaying models inward from `|t| = T` and
/// intersecting the admissible subspaces of the 2-dimensional solution space.
pub fn bounded_harmonic_dim(profile: &AcProfile, delta: f64, lambda_max: f64, truncation: f64) -> Result<BoundedHarmonicDim> {
    let topo = profile.topology();
    if topo == ProfileTopology::ExactCone {
        return Err(Error::Argument("bounded_harmonic_dim needs a complete profile (neck or capped cone)".into()));
    }
    if !(truncation >= 50.0) {
        return Err(Error::Argument(format!("truncation must be at least 50, got {truncation}")));
    }
    check_non_exceptional(delta, &profile.ends)?;
    let n = profile.n();
    let link = &profile.ends.ends[0];
    if link.truncation < lambda_max {
        return Err(Error::Argument(format!(
            "link spectrum is truncated at {} < lambda_max = {lambda_max}",
            link.truncation
        )));
    }
    // Every mode with a⁺ < −δ contributes, so none of them may be cut off.
    let need = critical_eigenvalue(delta, n);
    if delta <= 0.0 && lambda_max < need {
        let missed = link.truncation < need || link.pairs.iter().any(|p| p.lambda > lambda_max && p.lambda <= need);
        if missed {
            return Err(Error::OutOfValidity {
                delta,
                reason: format!("lambda_max = {lambda_max} misses modes up to {need}"),
            });
        }
    }

    let mut modes = Vec::new();
    let mut total = 0;
    for pair in link.pairs.iter().filter(|p| p.lambda <= lambda_max) {
        let lambda = pair.lambda;
        let g = growth_exponents(lambda, n)?;
        let op = radial_operator(profile, lambda)?;
        let adm = admissible(lambda, n, delta);
        let wrap = |e: Error| match e {
            Error::Numeric(m) => Error::Numeric(format!("mode lambda = {lambda}: {m}")),
            other => other,
        };
        let (dim, sine, admissible) = match topo {
            ProfileTopology::TwoEndedNeck => {
                let line = |from: f64| shoot_decaying(&op, g.a_minus, from, 0.0).map_err(wrap);
                match (adm, adm) {
                    (Admissible::All, Admissible::All) => (2, None, vec![adm, adm]),
                    (Admissible::Decaying, Admissible::Decaying) => {
                        let s = sine_between(line(truncation)?, line(-truncation)?);
                        ((s < PARALLEL_TOL) as usize, Some(s), vec![adm, adm])
                    }
                    _ => (0, None, vec![adm, adm]),
                }
            }
            ProfileTopology::OneEndedCap => match adm {
                Admissible::All => (1, None, vec![adm]),
                Admissible::Decaying => {
                    let t_mid = 1.0;
                    let reg = shoot_regular(&op, g.a_plus, t_mid).map_err(wrap)?;
                    let dec = shoot_decaying(&op, g.a_minus, truncation, t_mid).map_err(wrap)?;
                    let s = sine_between(reg, dec);
                    ((s < PARALLEL_TOL) as usize, Some(s), vec![adm])
                }
                Admissible::None => (0, None, vec![adm]),
            },
            ProfileTopology::ExactCone => unreachable!(),
        };
        total += dim * pair.multiplicity;
        modes.push(ModeCount {
            lambda,
            multiplicity: pair.multiplicity,
            a_plus: g.a_plus,
            a_minus: g.a_minus,
            admissible,
            sine,
            dim_per_eigenfunction: dim,
        });
    }
    Ok(BoundedHarmonicDim {
        delta,
        truncation,
        lambda_max,
        total,
        modes,
    })
}

/// Integrates the exact-cone radial equation along one model and fits the
/// log-log slope of `|f|` over `[10, T]`. The growing branch is shot outward
/// from `t = 1`, the decaying branch inward from `T`.
pub fn fit_radial_exponent(profile: &AcProfile, lambda: f64, branch: Branch, truncation: f64) -> Result<f64> {
    if profile.topology() != ProfileTopology::ExactCone {
        return Err(Error::Argument("exponent fit is defined on the exact cone".into()));
    }
    if !(truncation > 20.0) {
        return Err(Error::Argument(format!("truncation must exceed 20, got {truncation}")));
    }
    let g = growth_exponents(lambda, profile.n())?;
    let op = radial_operator(profile, lambda)?;
    let samples = 64;
    let ts: Vec<f64> = (0..samples)
        .map(|i| 10f64 * (truncation / 10.0).powf(i as f64 / (samples - 1) as f64))
        .collect();
    let (values, ts) = match branch {
        Branch::APlus => {
            let y = integrate(|t, y, dy| op.rhs(t, y, dy), 1.0, &[1.0, g.a_plus], &ts, &ode_opts())?;
            (y.into_iter().map(|v| v[0]).collect::<Vec<_>>(), ts)
        }
        Branch::AMinus => {
            let rev: Vec<f64> = ts.iter().rev().copied().collect();
            let y0 = [1.0, g.a_minus / truncation];
            let y = integrate(|t, y, dy| op.rhs(t, y, dy), truncation, &y0, &rev, &ode_opts())?;
            (y.into_iter().map(|v| v[0]).collect(), rev)
        }
    };
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    Ok(least_squares_slope(&xs, &ys))
}
