//! Mode-0 gluing on the two-ended neck: the harmonic function with prescribed
//! limits at each end, by finite volumes on a symmetric stretched grid.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::profile::{AcProfile, ProfileTopology};
use crate::error::{Error, Result};
use crate::fit::least_squares_slope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub lambda: f64,
    pub delta: Option<f64>,
    /// Max-norm of the discrete operator applied to `values`, per unit volume.
    pub residual: f64,
}

impl RadialSolution {
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "t,f")?;
        for (t, f) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{t:.17e},{f:.17e}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let g = &self.grid;
        if t < g[0] || t > g[g.len() - 1] {
            return None;
        }
        let j = g.partition_point(|&x| x <= t).clamp(1, g.len() - 1);
        let s = (t - g[j - 1]) / (g[j] - g[j - 1]);
        Some(self.values[j - 1] * (1.0 - s) + self.values[j] * s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueResult {
    pub solution: RadialSolution,
    pub end_values: [f64; 2],
    /// Fitted exponent of `|F − c₊|` against `r`; absent when `F` is constant.
    pub decay_exponent: Option<f64>,
    pub fit_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlueOptions {
    /// Number of grid points; forced odd so `t = 0` is a node.
    pub points: usize,
    pub tol: f64,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self { points: 2001, tol: 1e-8 }
    }
}

/// Symmetric grid `t = T sinh(α ξ) / sinh(α)`, `α = asinh T`, `ξ ∈ [−1, 1]`:
/// nearly uniform in `t` near the neck and uniform in `log r` on the ends.
pub fn neck_grid(truncation: f64, points: usize) -> Vec<f64> {
    let m = points / 2;
    let alpha = truncation.asinh();
    let mut g: Vec<f64> = (-(m as i64)..=m as i64)
        .map(|k| {
            let xi = k as f64 / m as f64;
            truncation * (alpha * xi).sinh() / alpha.sinh()
        })
        .collect();
    g[0] = -truncation;
    g[2 * m] = truncation;
    g[m] = 0.0;
    g
}

/// `∫ f` over `[a, b]` by 5-point Gauss–Legendre.
fn gauss5(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    h * X.iter().zip(W).map(|(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// Thomas algorithm for `lo[i] x[i−1] + di[i] x[i] + up[i] x[i+1] = rhs[i]`.
pub(crate) fn thomas(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = di.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = di[0];
    if piv == 0.0 {
        return Err(Error::Numeric("zero pivot in tridiagonal solve".into()));
    }
    c[0] = up[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = di[i] - lo[i] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::Numeric(format!("bad pivot {piv} at row {i} of tridiagonal solve")));
        }
        c[i] = if i + 1 < n { up[i] / piv } else { 0.0 };
        d[i] = (rhs[i] - lo[i] * d[i - 1]) / piv;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

pub fn glue_harmonic(profile: &AcProfile, end_values: [f64; 2], truncation: f64) -> Result<GlueResult> {
    glue_harmonic_with(profile, end_values, truncation, &GlueOptions::default())
}

/// Solves `L F = 0` (mode 0) on `[−T, T]` with Robin data `F' = κ (F − c)`,
/// `κ = a⁻ w'/w`, at the cuts. `end_values` are ordered `(t → −∞, t → +∞)`.
pub fn glue_harmonic_with(profile: &AcProfile, end_values: [f64; 2], truncation: f64, opts: &GlueOptions) -> Result<GlueResult> {
    if profile.topology() != ProfileTopology::TwoEndedNeck {
        return Err(Error::Argument("glue_harmonic needs a two-ended neck".into()));
    }
    if !end_values.iter().all(|c| c.is_finite()) {
        return Err(Error::Argument(format!("end values must be finite, got {end_values:?}")));
    }
    if !(truncation >= 40.0 && truncation.is_finite()) {
        return Err(Error::Argument(format!("truncation must be at least 40, got {truncation}")));
    }
    if opts.points < 101 {
        return Err(Error::Argument(format!("need at least 101 grid points, got {}", opts.points)));
    }
    let n = profile.n();
    let p = (n - 1) as i32;
    let a_minus = 2.0 - n as f64;
    let t = neck_grid(truncation, opts.points | 1);
    let m = t.len();

    // Face conductances A = 1 / ∫ w^{1−n}, exact for the flux w^{n−1} F'.
    let cond: Vec<f64> = t
        .windows(2)
        .map(|s| 1.0 / gauss5(s[0], s[1], |x| profile.w(x).powi(-p)))
        .collect();
    let volume: Vec<f64> = (0..m)
        .map(|j| {
            let a = if j == 0 { t[0] } else { 0.5 * (t[j - 1] + t[j]) };
            let b = if j == m - 1 { t[m - 1] } else { 0.5 * (t[j] + t[j + 1]) };
            gauss5(a, b, |x| profile.w(x).powi(p))
        })
        .collect();
    // Robin boundary flux w^{n−1} κ (F − c), written as β (F − c).
    let beta = |x: f64| {
        let (w, dw, _) = profile.w_derivs(x);
        w.powi(p) * a_minus * dw / w
    };
    let (b_lo, b_hi) = (beta(t[0]), beta(t[m - 1]));
    let [c_lo, c_hi] = end_values;

    // Row j: (outflow right) − (outflow left) = 0, i.e. −(flux_{j+½} − flux_{j−½}) = 0.
    let mut lo = vec![0.0; m];
    let mut di = vec![0.0; m];
    let mut up = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for j in 0..m {
        if j > 0 {
            lo[j] = -cond[j - 1];
            di[j] += cond[j - 1];
        }
        if j + 1 < m {
            up[j] = -cond[j];
            di[j] += cond[j];
        }
    }
    // left face flux into the cell is β_lo (F₀ − c₋), entering with a minus sign
    di[0] += b_lo;
    rhs[0] += b_lo * c_lo;
    di[m - 1] -= b_hi;
    rhs[m - 1] -= b_hi * c_hi;
    let f = thomas(&lo, &di, &up, &rhs)?;

    let mut residual = 0.0f64;
    for j in 0..m {
        let mut r = di[j] * f[j] - rhs[j];
        if j > 0 {
            r += lo[j] * f[j - 1];
        }
        if j + 1 < m {
            r += up[j] * f[j + 1];
        }
        residual = residual.max((r / volume[j]).abs());
    }
    if !(residual <= opts.tol) {
        return Err(Error::Numeric(format!("glue residual {residual:e} exceeds {:e}", opts.tol)));
    }

    let (decay_exponent, fit_points) = if (c_hi - c_lo).abs() <= f64::EPSILON * c_hi.abs().max(c_lo.abs()).max(1.0) {
        (None, 0)
    } else {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (&tj, &fj) in t.iter().zip(&f) {
            if tj >= 10.0 && tj <= truncation / 4.0 {
                let d = (fj - c_hi).abs();
                if d > 0.0 {
                    xs.push(profile.w(tj).ln());
                    ys.push(d.ln());
                }
            }
        }
        if xs.len() < 10 {
            return Err(Error::Numeric(format!(
                "decay fit over [10, T/4] has only {} points; increase T or the grid size",
                xs.len()
            )));
        }
        (Some(least_squares_slope(&xs, &ys)), xs.len())
    };

    Ok(GlueResult {
        solution: RadialSolution {
            grid: t,
            values: f,
            lambda: 0.0,
            delta: None,
            residual,
        },
        end_values,
        decay_exponent,
        fit_points,
    })
}
