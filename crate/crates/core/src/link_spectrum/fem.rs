//! P1 finite elements: cotangent stiffness, lumped mass, shift-invert subspace
//! iteration with Rayleigh–Ritz.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{Skyline, SymSparse};
use super::{merge_clusters, LinkSpectrum, MeshStats, SpectrumSource, TriMesh, FEM_MERGE_GAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FemOptions {
    pub max_iter: usize,
    /// Relative residual `‖Kx − θMx‖_{M⁻¹} / (|θ| + σ)` required of every reported pair.
    pub tol: f64,
    pub seed: u64,
    /// Shift σ > 0 making `K + σM` definite. Defaults to `1/area`.
    pub shift: Option<f64>,
}

impl Default for FemOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-9,
            seed: 0x5eed,
            shift: None,
        }
    }
}

pub fn fem_spectrum(mesh: &TriMesh, count: usize) -> Result<LinkSpectrum> {
    fem_spectrum_with(mesh, count, &FemOptions::default())
}

pub(crate) fn assemble(mesh: &TriMesh) -> (SymSparse, Vec<f64>) {
    let n = mesh.n_vertices();
    let mut k = SymSparse::new(n);
    let mut m = vec![0.0; n];
    for f in &mesh.faces {
        let area = mesh.face_area(f);
        for r in 0..3 {
            let (o, i, j) = (f[r], f[(r + 1) % 3], f[(r + 2) % 3]);
            let (u, v) = mesh.edge_vectors(o, i, j);
            let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            let cot = uv / (2.0 * area);
            k.add_sym(i, j, -0.5 * cot);
            k.add_sym(i, i, 0.5 * cot);
            k.add_sym(j, j, 0.5 * cot);
            m[o] += area / 3.0;
        }
    }
    (k, m)
}

/// Lowest `count` eigenvalues of the P1 Laplacian, extended so the last
/// multiplicity cluster is complete.
pub fn fem_spectrum_with(mesh: &TriMesh, count: usize, opts: &FemOptions) -> Result<LinkSpectrum> {
    mesh.validate()?;
    let n = mesh.n_vertices();
    if count == 0 || count >= n {
        return Err(Error::Argument(format!("count must be in 1..{n}, got {count}")));
    }
    let (k, m) = assemble(mesh);
    let sigma = opts.shift.unwrap_or(1.0 / mesh.area());
    let shifted = Skyline::factor(&k.plus_diag(sigma, &m))?;
    let p = n.min(2 * count + 8);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::<f64>::zeros(n, p);
    for j in 0..p {
        for i in 0..n {
            x[(i, j)] = if j == 0 { 1.0 } else { rng.random::<f64>() - 0.5 };
        }
    }

    let mut target = count;
    let mut theta = vec![0.0; p];
    let mut worst = f64::INFINITY;
    let mut col = vec![0.0; n];
    let mut kx = vec![0.0; n];
    for iter in 1..=opts.max_iter {
        // Y = (K + σM)⁻¹ M X
        let mut y = x.clone();
        for j in 0..p {
            for i in 0..n {
                col[i] = m[i] * x[(i, j)];
            }
            shifted.solve(&mut col);
            y.column_mut(j).copy_from_slice(&col);
        }
        m_orthonormalize(&mut y, &m, &mut rng);

        let mut ky = DMatrix::<f64>::zeros(n, p);
        for j in 0..p {
            col.copy_from_slice(y.column(j).as_slice());
            k.matvec(&col, &mut kx);
            ky.column_mut(j).copy_from_slice(&kx);
        }
        let mut c = y.transpose() * &ky;
        c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c);
        let mut idx: Vec<usize> = (0..p).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let u = DMatrix::from_fn(p, p, |r, cc| eig.eigenvectors[(r, idx[cc])]);
        for (cc, &i) in idx.iter().enumerate() {
            theta[cc] = eig.eigenvalues[i];
        }
        x = &y * &u;
        let kxm = &ky * &u;

        let residual = |j: usize| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                let r = kxm[(i, j)] - theta[j] * m[i] * x[(i, j)];
                s += r * r / m[i];
            }
            s.sqrt() / (theta[j].abs() + sigma)
        };

        loop {
            worst = (0..target).map(residual).fold(0.0, f64::max);
            if worst > opts.tol {
                break;
            }
            let mut ext = target;
            while ext < p - 1 && close(theta[ext - 1], theta[ext]) {
                ext += 1;
            }
            if ext == target {
                let values: Vec<(f64, usize)> = theta[..target].iter().map(|&t| (t, 1)).collect();
                let pairs = merge_clusters(&values, FEM_MERGE_GAP);
                let truncation = pairs.last().map(|p| p.lambda).unwrap_or(0.0);
                return Ok(LinkSpectrum {
                    pairs,
                    truncation,
                    source: SpectrumSource::Fem(MeshStats {
                        vertices: n,
                        faces: mesh.faces.len(),
                        iterations: iter,
                        max_residual: worst,
                    }),
                });
            }
            target = ext;
        }
    }
    Err(Error::Numeric(format!(
        "subspace iteration did not converge in {} iterations: worst relative residual {worst:.3e} over the lowest {target} pairs (tol {:.1e}, block size {p})",
        opts.max_iter, opts.tol
    )))
}

fn close(a: f64, b: f64) -> bool {
    let s = a.abs().max(b.abs());
    s < super::ZERO_SNAP || (b - a).abs() <= FEM_MERGE_GAP * s
}

fn m_dot(a: &[f64], b: &[f64], m: &[f64]) -> f64 {
    a.iter().zip(b).zip(m).map(|((x, y), w)| x * y * w).sum()
}

fn m_orthonormalize(y: &mut DMatrix<f64>, m: &[f64], rng: &mut ChaCha8Rng) {
    let (n, p) = y.shape();
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| y.column(j).iter().copied().collect()).collect();
    for j in 0..p {
        for attempt in 0..3 {
            let before = m_dot(&cols[j], &cols[j], m).sqrt();
            for _ in 0..2 {
                for i in 0..j {
                    let d = m_dot(&cols[i], &cols[j], m);
                    let (head, tail) = cols.split_at_mut(j);
                    let (ci, cj) = (&head[i], &mut tail[0]);
                    for r in 0..n {
                        cj[r] -= d * ci[r];
                    }
                }
            }
            let after = m_dot(&cols[j], &cols[j], m).sqrt();
            if after > 1e-10 * before && after > 0.0 {
                for v in cols[j].iter_mut() {
                    *v /= after;
                }
                break;
            }
            // column collapsed into the span of earlier ones: restart it
            for v in cols[j].iter_mut() {
                *v = rng.random::<f64>() - 0.5;
            }
            debug_assert!(attempt < 2);
        }
    }
    for (j, c) in cols.iter().enumerate() {
        y.column_mut(j).copy_from_slice(c);
    }
}
