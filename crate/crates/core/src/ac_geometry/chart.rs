use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Indices run over `(x, y¹, y²)`; only the first `dim` are used.
pub const MAX_DIM: usize = 3;
pub type Vec3 = [f64; MAX_DIM];
pub type Christoffels = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Closed-form metrics. The AC entries have normal form
/// `g = A dx²/x⁴ + h/x²` with `h` a multiple of the round metric on `S^{d−1}`
/// in polar coordinates (`θ` for `d = 2`, `(θ, φ)` for `d = 3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartKind {
    /// `dx²/x⁴ + g_S/x²`: Euclidean space with `r = 1/x`.
    InvertedEuclidean,
    /// `dx²/x⁴ + c² g_S/x²`
    ScaledCone { c: f64 },
    /// `dx²/x⁴ + c² (1 + amp · x cos y¹) g_S/x²`
    PerturbedCone { c: f64, amp: f64 },
    /// Euclidean metric in Cartesian coordinates; an interior chart, not AC.
    FlatCartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricChart {
    #[serde(flatten)]
    pub kind: ChartKind,
    pub dim: usize,
}

/// `A` and `h_ij` as jets in `(x, y)`.
#[derive(Debug, Clone, Copy)]
pub struct NormalForm {
    pub a: Jet,
    pub h: [[Jet; 2]; 2],
}

/// Levi-Civita data at one point, with index order `gamma[k][i][j] = Γ^k_ij`
/// and `dgamma[m][k][i][j] = ∂_m Γ^k_ij`.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub gamma: Christoffels,
    dgamma: [Christoffels; MAX_DIM],
}

/// Combinations of Christoffel symbols that stay smooth up to `x = 0`:
/// `xΓ^x_xx`, `Γ^x_xj`, `Γ^x_ij/x`, `x²Γ^k_xx`, `xΓ^k_xj` and `Γ^k_ij`
/// (link indices shifted down by one).
#[derive(Debug, Clone, Copy, Default)]
pub struct Rescaled {
    pub x_gxx: f64,
    pub gx_xj: [f64; 2],
    pub gx_ij_over_x: [[f64; 2]; 2],
    pub x2_gk_xx: [f64; 2],
    pub x_gk_xj: [[f64; 2]; 2],
    pub gk_ij: [[[f64; 2]; 2]; 2],
}

impl MetricChart {
    pub fn new(kind: ChartKind, dim: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Argument(format!("chart dimension must be 2 or 3, got {dim}")));
        }
        match kind {
            ChartKind::ScaledCone { c } if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::Argument(format!("cone scale must be positive, got {c}")));
            }
            ChartKind::PerturbedCone { c, amp } if !(c > 0.0 && c.is_finite() && amp.abs() < 1.0) => {
                return Err(Error::Argument(format!("perturbed cone needs c > 0 and |amp| < 1, got c = {c}, amp = {amp}")));
            }
            _ => {}
        }
        Ok(Self { kind, dim })
    }

    pub fn inverted_euclidean(dim: usize) -> Self {
        Self::new(ChartKind::InvertedEuclidean, dim).expect("valid")
    }

    pub fn scaled_cone(c: f64, dim: usize) -> Result<Self> {
        Self::new(ChartKind::ScaledCone { c }, dim)
    }

    pub fn perturbed_cone(c: f64, amp: f64, dim: usize) -> Result<Self> {
        Self::new(ChartKind::PerturbedCone { c, amp }, dim)
    }

    pub fn flat(dim: usize) -> Self {
        Self::new(ChartKind::FlatCartesian, dim).expect("valid")
    }

    pub fn is_ac(&self) -> bool {
        self.kind != ChartKind::FlatCartesian
    }

    pub fn name(&self) -> String {
        match self.kind {
            ChartKind::InvertedEuclidean => format!("inverted_euclidean(d={})", self.dim),
            ChartKind::ScaledCone { c } => format!("scaled_cone(c={c}, d={})", self.dim),
            ChartKind::PerturbedCone { c, amp } => format!("perturbed_cone(c={c}, amp={amp}, d={})", self.dim),
            ChartKind::FlatCartesian => format!("flat(d={})", self.dim),
        }
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim || p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("point {p:?} does not fit a {}-dimensional chart", self.dim)));
        }
        Ok(())
    }

    /// Normal-form data, defined up to and including `x = 0`.
    pub fn normal_form(&self, p: &[f64]) -> Result<NormalForm> {
        self.check_point(p)?;
        let mut q = [0.0; MAX_DIM];
        q[..self.dim].copy_from_slice(p);
        let v = Jet::point(&q);
        let (x, th) = (v[0], v[1]);
        let scale = match self.kind {
            ChartKind::InvertedEuclidean => Jet::constant(1.0),
            ChartKind::ScaledCone { c } => Jet::constant(c * c),
            ChartKind::PerturbedCone { c, amp } => (x * th.cos() * amp + 1.0) * (c * c),
            ChartKind::FlatCartesian => {
                return Err(Error::Argument("the flat chart has no boundary normal form".into()));
            }
        };
        let zero = Jet::constant(0.0);
        let mut h = [[zero; 2]; 2];
        h[0][0] = scale;
        if self.dim == 3 {
            let s = th.sin();
            h[1][1] = scale * s * s;
        }
        Ok(NormalForm { a: Jet::constant(1.0), h })
    }

    /// Metric components as jets.
    pub fn metric_jets(&self, p: &[f64]) -> Result<[[Jet; MAX_DIM]; MAX_DIM]> {
        self.check_point(p)?;
        let zero = Jet::constant(0.0);
        let mut g = [[zero; MAX_DIM]; MAX_DIM];
        if !self.is_ac() {
            for (i, row) in g.iter_mut().enumerate().take(self.dim) {
                row[i] = Jet::constant(1.0);
            }
            return Ok(g);
        }
        if !(p[0] > 0.0) {
            return Err(Error::Argument(format!("metric is singular at the boundary point {p:?}")));
        }
        let nf = self.normal_form(p)?;
        let x = Jet::var(p[0], 0);
        let ix2 = (x * x).recip();
        g[0][0] = nf.a * ix2 * ix2;
        for i in 0..self.dim - 1 {
            for j in 0..self.dim - 1 {
                g[i + 1][j + 1] = nf.h[i][j] * ix2;
            }
        }
        Ok(g)
    }

    pub fn metric(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.metric_jets(p)?;
        Ok(DMatrix::from_fn(self.dim, self.dim, |i, j| g[i][j].v))
    }

    /// `g(u, w)` in coordinate components.
    pub fn inner(&self, p: &[f64], u: &[f64], w: &[f64]) -> Result<f64> {
        let g = self.metric(p)?;
        Ok((0..self.dim).map(|i| (0..self.dim).map(|j| g[(i, j)] * u[i] * w[j]).sum::<f64>()).sum())
    }

    pub fn geometry(&self, p: &[f64]) -> Result<PointGeometry> {
        let d = self.dim;
        let gj = self.metric_jets(p)?;
        let g = DMatrix::from_fn(d, d, |i, j| gj[i][j].v);
        let ginv = g
            .clone()
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::Numeric(format!("metric is singular at {p:?}")))?;
        // first kind: [ij, l] = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij), and its derivatives
        let mut first = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        let mut dfirst = [[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    first[l][i][j] = 0.5 * (gj[l][j].g[i] + gj[l][i].g[j] - gj[i][j].g[l]);
                    for m in 0..d {
                        dfirst[m][l][i][j] = 0.5 * (gj[l][j].h[m][i] + gj[l][i].h[m][j] - gj[i][j].h[m][l]);
                    }
                }
            }
        }
        let mut gamma = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    gamma[k][i][j] = (0..d).map(|l| ginv[(k, l)] * first[l][i][j]).sum();
                }
            }
        }
        // ∂_m Γ^k_ij = −g^{ka} ∂_m g_ab Γ^b_ij + g^{kl} ∂_m [ij, l]
        let mut dgamma = [[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for m in 0..d {
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut s = 0.0;
                        for a in 0..d {
                            let mut t = dfirst[m][a][i][j];
                            for b in 0..d {
                                t -= gj[a][b].g[m] * gamma[b][i][j];
                            }
                            s += ginv[(k, a)] * t;
                        }
                        dgamma[m][k][i][j] = s;
                    }
                }
            }
        }
        Ok(PointGeometry { dim: d, g, ginv, gamma, dgamma })
    }

    /// Smooth rescaled connection coefficients from the normal form.
    pub fn rescaled(&self, p: &[f64]) -> Result<Rescaled> {
        let nf = self.normal_form(p)?;
        let m = self.dim - 1;
        let x = p[0];
        let a = nf.a;
        let hv = DMatrix::from_fn(m, m, |i, j| nf.h[i][j].v);
        let hinv = hv
            .try_inverse()
            .ok_or_else(|| Error::Numeric(format!("link metric is singular at {p:?}")))?;
        let mut r = Rescaled {
            x_gxx: 0.5 * x * a.g[0] / a.v - 2.0,
            ..Rescaled::default()
        };
        for i in 0..m {
            r.gx_xj[i] = 0.5 * a.g[1 + i] / a.v;
            r.x2_gk_xx[i] = -0.5 * (0..m).map(|l| hinv[(i, l)] * a.g[1 + l]).sum::<f64>();
            for j in 0..m {
                r.gx_ij_over_x[i][j] = (nf.h[i][j].v - 0.5 * x * nf.h[i][j].g[0]) / a.v;
                r.x_gk_xj[i][j] = 0.5 * x * (0..m).map(|l| hinv[(i, l)] * nf.h[l][j].g[0]).sum::<f64>() - if i == j { 1.0 } else { 0.0 };
            }
        }
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    r.gk_ij[k][i][j] = 0.5
                        * (0..m)
                            .map(|l| hinv[(k, l)] * (nf.h[l][j].g[1 + i] + nf.h[l][i].g[1 + j] - nf.h[i][j].g[1 + l]))
                            .sum::<f64>();
                }
            }
        }
        Ok(r)
    }
}

/// `Γ^σ_μν` at a point.
pub fn christoffels(chart: &MetricChart, p: &[f64]) -> Result<Christoffels> {
    Ok(chart.geometry(p)?.gamma)
}

impl PointGeometry {
    /// `R^r_{s m n}`, with `R(∂_m, ∂_n)∂_s = R^r_{smn} ∂_r`.
    pub fn riemann(&self, r: usize, s: usize, m: usize, n: usize) -> f64 {
        let (g, dg) = (&self.gamma, &self.dgamma);
        let mut v = dg[m][r][n][s] - dg[n][r][m][s];
        for l in 0..self.dim {
            v += g[r][m][l] * g[l][n][s] - g[r][n][l] * g[l][m][s];
        }
        v
    }

    /// `Γ(u, w)^k = Γ^k_ij u^i w^j`
    pub fn connection(&self, u: &[f64], w: &[f64]) -> Vec3 {
        let mut out = [0.0; MAX_DIM];
        for (k, o) in out.iter_mut().enumerate().take(self.dim) {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    *o += self.gamma[k][i][j] * u[i] * w[j];
                }
            }
        }
        out
    }

    /// `R(j, v) v`
    pub fn jacobi_term(&self, j: &[f64], v: &[f64]) -> Vec3 {
        let d = self.dim;
        let mut out = [0.0; MAX_DIM];
        for (r, o) in out.iter_mut().enumerate().take(d) {
            for s in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        if m != n {
                            *o += self.riemann(r, s, m, n) * v[s] * j[m] * v[n];
                        }
                    }
                }
            }
        }
        out
    }

    /// Operator norm of the curvature operator on 2-forms, computed in an
    /// orthonormal frame from the Cholesky factor of `g`.
    pub fn curvature_norm(&self) -> Result<f64> {
        let d = self.dim;
        let chol = self
            .g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numeric("metric is not positive definite".into()))?;
        // columns of L^{-T} form an orthonormal frame
        let frame = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?
            .transpose();
        let mut lowered = vec![0.0; d * d * d * d];
        let idx = |a: usize, b: usize, c: usize, e: usize| ((a * d + b) * d + c) * d + e;
        for a in 0..d {
            for s in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        lowered[idx(a, s, m, n)] = (0..d).map(|r| self.g[(a, r)] * self.riemann(r, s, m, n)).sum();
                    }
                }
            }
        }
        let mut ortho = vec![0.0; d * d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut v = 0.0;
                        for p in 0..d {
                            for q in 0..d {
                                for r in 0..d {
                                    for s in 0..d {
                                        v += lowered[idx(p, q, r, s)] * frame[(p, a)] * frame[(q, b)] * frame[(r, c)] * frame[(s, e)];
                                    }
                                }
                            }
                        }
                        ortho[idx(a, b, c, e)] = v;
                    }
                }
            }
        }
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
        // ⟨R(e_a, e_b) e_d, e_c⟩ = R_{c d a b}
        let mut op = DMatrix::from_fn(pairs.len(), pairs.len(), |i, j| {
            let (a, b) = pairs[i];
            let (c, e) = pairs[j];
            ortho[idx(c, e, a, b)]
        });
        op = (&op + op.transpose()) * 0.5;
        let eig = SymmetricEigen::new(op);
        Ok(eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

/// `‖R‖` at a point.
pub fn curvature_norm(chart: &MetricChart, p: &[f64]) -> Result<f64> {
    chart.geometry(p)?.curvature_norm()
}

impl Rescaled {
    /// The connection in `c`-coordinates acting on hatted components
    /// (`Ŵ^x = W^x/x₀²`, `Ŵ^i = W^i/x₀`), given `ċ` and `c^x`.
    pub fn apply(&self, dim: usize, cx: f64, u: &[f64], w: &[f64]) -> Vec3 {
        let m = dim - 1;
        let mut out = [0.0; MAX_DIM];
        let mut bx = self.x_gxx * u[0] * w[0] / cx;
        for j in 0..m {
            bx += self.gx_xj[j] * (u[0] * w[1 + j] + u[1 + j] * w[0]);
            for i in 0..m {
                bx += cx * self.gx_ij_over_x[i][j] * u[1 + i] * w[1 + j];
            }
        }
        out[0] = bx;
        for k in 0..m {
            let mut bk = self.x2_gk_xx[k] * u[0] * w[0] / (cx * cx);
            for j in 0..m {
                bk += self.x_gk_xj[k][j] * (u[0] * w[1 + j] + u[1 + j] * w[0]) / cx;
                for i in 0..m {
                    bk += self.gk_ij[k][i][j] * u[1 + i] * w[1 + j];
                }
            }
            out[1 + k] = bk;
        }
        out
    }
}
