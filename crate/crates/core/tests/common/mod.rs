//! Independent oracles shared by the geometry tests: closed-form metrics
//! written out by hand and finite-difference connection and curvature.

#![allow(dead_code)]

use acslm::ac_geometry::{integrate_geodesic_direct, jacobi_field, ChartKind, Component, FieldClass, MetricChart, VectorFieldSpec};
use acslm::ode::linspace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Metric matrix at `p`, written directly from the chart formulas.
pub fn metric(chart: &MetricChart, p: &[f64]) -> Vec<Vec<f64>> {
    let d = chart.dim;
    let mut g = vec![vec![0.0; d]; d];
    let x = p[0];
    let scale = match chart.kind {
        ChartKind::FlatCartesian => {
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            return g;
        }
        ChartKind::InvertedEuclidean => 1.0,
        ChartKind::ScaledCone { c } => c * c,
        ChartKind::PerturbedCone { c, amp } => c * c * (1.0 + amp * x * p[1].cos()),
    };
    g[0][0] = x.powi(-4);
    g[1][1] = scale / (x * x);
    if d == 3 {
        g[2][2] = scale * p[1].sin().powi(2) / (x * x);
    }
    g
}

fn inverse(g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = g.len();
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| g[i][j]).try_inverse().unwrap();
    (0..d).map(|i| (0..d).map(|j| m[(i, j)]).collect()).collect()
}

fn shifted(p: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += h;
    q
}

/// Step in coordinate `i`: relative to `x` for the radial direction.
fn step(p: &[f64], i: usize, h: f64) -> f64 {
    if i == 0 {
        h * p[0]
    } else {
        h
    }
}

/// `Γ^k_ij` by central differences of the hand-written metric; `h` is relative.
pub fn fd_christoffels(chart: &MetricChart, p: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let d = chart.dim;
    let dg: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|m| {
            let h = step(p, m, h);
            let gp = metric(chart, &shifted(p, m, h));
            let gm = metric(chart, &shifted(p, m, -h));
            (0..d).map(|i| (0..d).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * h)).collect()).collect()
        })
        .collect();
    let ginv = inverse(&metric(chart, p));
    let mut gamma = vec![vec![vec![0.0; d]; d]; d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                gamma[k][i][j] = (0..d)
                    .map(|l| 0.5 * ginv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]))
                    .sum();
            }
        }
    }
    gamma
}

/// `R^r_{smn}` from finite differences of `fd_christoffels`; `h` is relative.
pub fn fd_riemann(chart: &MetricChart, p: &[f64], h: f64) -> Vec<Vec<Vec<Vec<f64>>>> {
    let d = chart.dim;
    let h1 = h * 1e-2;
    let g = fd_christoffels(chart, p, h1);
    let dgam: Vec<Vec<Vec<Vec<f64>>>> = (0..d)
        .map(|m| {
            let h = step(p, m, h);
            let a = fd_christoffels(chart, &shifted(p, m, h), h1);
            let b = fd_christoffels(chart, &shifted(p, m, -h), h1);
            (0..d)
                .map(|k| (0..d).map(|i| (0..d).map(|j| (a[k][i][j] - b[k][i][j]) / (2.0 * h)).collect()).collect())
                .collect()
        })
        .collect();
    let mut r = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for a in 0..d {
        for s in 0..d {
            for m in 0..d {
                for n in 0..d {
                    let mut v = dgam[m][a][n][s] - dgam[n][a][m][s];
                    for l in 0..d {
                        v += g[a][m][l] * g[l][n][s] - g[a][n][l] * g[l][m][s];
                    }
                    r[a][s][m][n] = v;
                }
            }
        }
    }
    r
}

/// Cartesian image of a point of the inverted Euclidean chart.
pub fn to_cartesian(p: &[f64]) -> Vec<f64> {
    let r = 1.0 / p[0];
    match p.len() {
        2 => vec![r * p[1].cos(), r * p[1].sin()],
        _ => vec![r * p[1].sin() * p[2].cos(), r * p[1].sin() * p[2].sin(), r * p[1].cos()],
    }
}

/// Pushes a coordinate vector at `p` forward to Cartesian components.
pub fn push_cartesian(p: &[f64], w: &[f64]) -> Vec<f64> {
    let h = 1e-6 * p[0];
    let d = p.len();
    let mut out = vec![0.0; d];
    for i in 0..d {
        let step = if i == 0 { h } else { 1e-6 };
        let a = to_cartesian(&shifted(p, i, step));
        let b = to_cartesian(&shifted(p, i, -step));
        for k in 0..d {
            out[k] += (a[k] - b[k]) / (2.0 * step) * w[i];
        }
    }
    out
}

/// Interior point with the polar angle away from the poles.
pub fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut p = vec![rng.random_range(0.02..0.5), rng.random_range(0.7..2.4)];
    if dim == 3 {
        p.push(rng.random_range(-3.0..3.0));
    }
    p
}

/// `∂_h` of the geodesic family through `p + hJ₀` with velocity
/// `v + h(J₀' − Γ(J₀, v))`, by central differences.
pub fn family_difference(chart: &MetricChart, p: &[f64], v: &[f64], j0: &[f64], j0p: &[f64], h: f64) -> Vec<f64> {
    let geo = chart.geometry(p).unwrap();
    let g = geo.connection(j0, v);
    let d = chart.dim;
    let end = |sign: f64| {
        let q: Vec<f64> = (0..d).map(|i| p[i] + sign * h * j0[i]).collect();
        let w: Vec<f64> = (0..d).map(|i| v[i] + sign * h * (j0p[i] - g[i])).collect();
        let t = integrate_geodesic_direct(chart, &q, &w, &[1.0]).unwrap();
        t.states[1].gamma.clone()
    };
    let (a, b) = (end(1.0), end(-1.0));
    (0..d).map(|i| (a[i] - b[i]) / (2.0 * h)).collect()
}

/// Relative error of `J(1)` against the family oracle, worst over 20 random configurations.
pub fn jacobi_vs_family(chart: &MetricChart, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = chart.dim;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_point(&mut rng, d);
        let comps: Vec<f64> = (0..d).map(|_| rng.random_range(-0.6..0.6)).collect();
        let v = VectorFieldSpec::new(FieldClass::ScField, comps.iter().map(|&c| Component::constant(c)).collect()).coordinate(&p)[..d].to_vec();
        let hat = |i: usize| if i == 0 { p[0] * p[0] } else { p[0] };
        let j0: Vec<f64> = (0..d).map(|i| hat(i) * rng.random_range(-1.0..1.0)).collect();
        let j0p: Vec<f64> = (0..d).map(|i| hat(i) * rng.random_range(-1.0..1.0)).collect();
        let t = integrate_geodesic_direct(chart, &p, &v, &linspace(0.0, 1.0, 10)).unwrap();
        let j = jacobi_field(&t, &j0, &j0p).unwrap();
        let j1 = &j.vectors[j.vectors.len() - 1];
        // step 1e−4 in the family parameter, measured in the sc scale of the base point
        let fd = family_difference(chart, &p, &v, &j0, &j0p, 1e-4);
        let err = (0..d).map(|i| ((j1[i] - fd[i]) / hat(i)).powi(2)).sum::<f64>().sqrt()
            / (0..d).map(|i| (fd[i] / hat(i)).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(err);
    }
    worst
}

