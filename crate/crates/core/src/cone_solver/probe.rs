//! Smallest singular values of the weighted, truncated radial operator.
//!
//! This is an indicator only: a finite matrix always has some smallest
//! singular value, and only its trend under growing truncation carries
//! information about the continuum operator.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::profile::{AcProfile, ProfileTopology};
use crate::error::{Error, Result};
use crate::indicial::{exceptional_weights, growth_exponents};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Minimum distance between a probed weight and any exceptional weight.
    pub min_distance: f64,
    /// Cells per unit of `asinh T`.
    pub cells_per_unit: f64,
    pub seeds: Vec<u64>,
    /// Relative jitter of interior cell faces (zero for seed 0).
    pub jitter: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            min_distance: 0.05,
            cells_per_unit: 80.0,
            seeds: vec![0, 1, 2],
            jitter: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// `σ_min` stays within a factor 2 across truncations.
    NonDegenerating,
    /// `σ_min(T_max) / σ_min(T_min) < ½`.
    Degenerating,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub delta: f64,
    pub truncation: f64,
    pub seed: u64,
    pub cells: usize,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaVerdict {
    pub delta: f64,
    /// One trend per seed, in seed order.
    pub trends: Vec<Trend>,
    pub reproducible: bool,
    pub trend: Trend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub lambda: f64,
    pub n: usize,
    pub entries: Vec<ProbeEntry>,
    pub verdicts: Vec<DeltaVerdict>,
}

pub fn fredholm_window_probe(profile: &AcProfile, lambda: f64, deltas: &[f64], truncations: &[f64]) -> Result<ProbeReport> {
    fredholm_window_probe_with(profile, lambda, deltas, truncations, &ProbeOptions::default())
}

/// Cell faces on `[0, T]`, uniform in `asinh t`, with interior faces jittered.
fn faces(truncation: f64, cells: usize, seed: u64, jitter: f64) -> Vec<f64> {
    let s_max = truncation.asinh();
    let h = s_max / cells as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=cells)
        .map(|i| {
            let mut s = i as f64 * h;
            if seed != 0 && i > 0 && i < cells {
                s += jitter * h * (rng.random::<f64>() - 0.5);
            }
            s.sinh()
        })
        .map(|t| t.min(truncation))
        .collect()
}

/// Dense `D_Y L_h D_X⁻¹` for the capped cone truncated at `T`.
fn weighted_matrix(profile: &AcProfile, lambda: f64, delta: f64, face: &[f64]) -> DMatrix<f64> {
    let n = profile.n();
    let p = (n - 1) as i32;
    let m = face.len() - 1;
    let t: Vec<f64> = face.windows(2).map(|f| 0.5 * (f[0] + f[1])).collect();
    let mu: Vec<f64> = face.windows(2).map(|f| f[1] - f[0]).collect();
    let wn: Vec<f64> = t.iter().map(|&x| profile.w(x).powi(p)).collect();
    let a_minus = growth_exponents(lambda, n).expect("checked eigenvalue").a_minus;

    // conductance between centres j and j+1 through face j+1
    let cond: Vec<f64> = (0..m - 1)
        .map(|j| profile.w(face[j + 1]).powi(p) / (t[j + 1] - t[j]))
        .collect();
    let mut l = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        let vol = wn[j] * mu[j];
        let mut d = lambda * wn[j] * mu[j] / profile.w(t[j]).powi(2);
        if j > 0 {
            d += cond[j - 1];
            l[(j, j - 1)] = -cond[j - 1] / vol;
        }
        if j + 1 < m {
            d += cond[j];
            l[(j, j + 1)] = -cond[j] / vol;
        }
        l[(j, j)] = d / vol;
    }
    // Origin face: w = 0 there, so the natural flux vanishes for λ = 0 (Neumann);
    // for λ > 0 the potential term forces the regular branch.
    // Outer face: Robin F' = κ F, with F at the face extrapolated from the last centre.
    let big_t = face[m];
    let (w, dw, _) = profile.w_derivs(big_t);
    let kappa = a_minus * dw / w;
    let gap = big_t - t[m - 1];
    let out = w.powi(p) * kappa / (1.0 - kappa * gap);
    l[(m - 1, m - 1)] -= out / (wn[m - 1] * mu[m - 1]);

    let rho = |x: f64| (1.0 + x * x).sqrt();
    let dx: Vec<f64> = (0..m)
        .map(|j| (mu[j] * rho(t[j]).powf(2.0 * delta - n as f64) * wn[j]).sqrt())
        .collect();
    let dy: Vec<f64> = (0..m)
        .map(|j| (mu[j] * rho(t[j]).powf(2.0 * delta + 4.0 - n as f64) * wn[j]).sqrt())
        .collect();
    DMatrix::from_fn(m, m, |i, j| dy[i] * l[(i, j)] / dx[j])
}

fn classify(sigmas: &[f64]) -> Trend {
    let lo = sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sigmas.iter().cloned().fold(0.0, f64::max);
    if hi <= 2.0 * lo {
        Trend::NonDegenerating
    } else if sigmas[sigmas.len() - 1] / sigmas[0] < 0.5 {
        Trend::Degenerating
    } else {
        Trend::Inconclusive
    }
}

pub fn fredholm_window_probe_with(
    profile: &AcProfile,
    lambda: f64,
    deltas: &[f64],
    truncations: &[f64],
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    if profile.topology() != ProfileTopology::OneEndedCap {
        return Err(Error::Argument("the window probe runs on a capped cone".into()));
    }
    if !profile.ends.ends[0].pairs.iter().any(|p| (p.lambda - lambda).abs() <= 1e-12 * lambda.max(1.0)) {
        return Err(Error::Argument(format!("lambda = {lambda} is not in the link spectrum")));
    }
    if truncations.len() < 2 || truncations.windows(2).any(|w| !(w[1] > w[0])) || !(truncations[0] >= 10.0) {
        return Err(Error::Argument("truncations must be increasing, at least two, and start at T >= 10".into()));
    }
    if opts.seeds.is_empty() {
        return Err(Error::Argument("at least one seed is required".into()));
    }
    let g = growth_exponents(lambda, profile.n())?;
    let weights = [-g.a_plus, -g.a_minus];
    let all = exceptional_weights(&profile.ends, f64::NEG_INFINITY, f64::INFINITY);
    for &d in deltas {
        if let Some(&w) = weights
            .iter()
            .chain(all.values().iter())
            .find(|&&w| (w - d).abs() < opts.min_distance)
        {
            return Err(Error::ExceptionalWeight {
                delta: d,
                weight: w,
                tol: opts.min_distance,
            });
        }
    }

    let mut entries = Vec::new();
    let mut verdicts = Vec::new();
    for &delta in deltas {
        let mut trends = Vec::new();
        for &seed in &opts.seeds {
            let mut sig = Vec::new();
            for &big_t in truncations {
                let cells = (opts.cells_per_unit * big_t.asinh()).round() as usize;
                let face = faces(big_t, cells, seed, opts.jitter);
                let a = weighted_matrix(profile, lambda, delta, &face);
                let sv = a.singular_values();
                let s = sv.iter().cloned().fold(f64::INFINITY, f64::min);
                if !s.is_finite() {
                    return Err(Error::Numeric(format!("singular values not finite at delta = {delta}, T = {big_t}")));
                }
                sig.push(s);
                entries.push(ProbeEntry {
                    delta,
                    truncation: big_t,
                    seed,
                    cells,
                    sigma_min: s,
                });
            }
            trends.push(classify(&sig));
        }
        let reproducible = trends.windows(2).all(|w| w[0] == w[1]);
        let trend = if reproducible { trends[0] } else { Trend::Inconclusive };
        verdicts.push(DeltaVerdict {
            delta,
            trends,
            reproducible,
            trend,
        });
    }
    Ok(ProbeReport {
        lambda,
        n: profile.n(),
        entries,
        verdicts,
    })
}
