use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{EigenPair, LinkSpectrum, SpectrumSource};
use crate::error::{Error, Result};

/// Enumeration of dual-lattice vectors stops with a resource error past this many box points.
pub const DEFAULT_TORUS_CAP: u64 = 20_000_000;

fn binom(n: i64, k: i64) -> u128 {
    if k < 0 || n < k || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Dimension of degree-`k` spherical harmonics on `S^m`.
pub fn sphere_multiplicity(m: usize, k: usize) -> usize {
    let (m, k) = (m as i64, k as i64);
    (binom(k + m, m) - binom(k + m - 2, m)) as usize
}

/// `λ_k = k(k+m−1)/c²` on the round `S^m` of radius `c`, truncated at `lambda_max`.
pub fn sphere_spectrum(m: usize, c: f64, lambda_max: f64) -> Result<LinkSpectrum> {
    if m < 2 {
        return Err(Error::Argument(format!("sphere dimension must be at least 2, got {m}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Argument(format!("sphere radius must be positive, got {c}")));
    }
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(Error::Argument(format!("lambda_max must be finite and nonnegative, got {lambda_max}")));
    }
    let limit = lambda_max * (1.0 + 1e-12);
    let mut pairs = Vec::new();
    for k in 0usize.. {
        let lambda = (k * (k + m - 1)) as f64 / (c * c);
        if lambda > limit {
            break;
        }
        pairs.push(EigenPair {
            lambda,
            multiplicity: sphere_multiplicity(m, k),
        });
    }
    Ok(LinkSpectrum {
        pairs,
        truncation: lambda_max,
        source: SpectrumSource::ClosedForm {
            family: format!("round_sphere(m={m}, c={c})"),
        },
    })
}

pub fn torus_spectrum(lattice: &DMatrix<f64>, lambda_max: f64) -> Result<LinkSpectrum> {
    torus_spectrum_with_cap(lattice, lambda_max, DEFAULT_TORUS_CAP)
}

/// Spectrum of `R^d / B Z^d`: `4π²|μ|²` over the dual lattice `B^{-T} Z^d`.
pub fn torus_spectrum_with_cap(lattice: &DMatrix<f64>, lambda_max: f64, cap: u64) -> Result<LinkSpectrum> {
    let d = lattice.nrows();
    if d < 2 || lattice.ncols() != d {
        return Err(Error::Argument(format!(
            "lattice must be a square matrix of size at least 2, got {}x{}",
            lattice.nrows(),
            lattice.ncols()
        )));
    }
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(Error::Argument(format!("lambda_max must be finite and nonnegative, got {lambda_max}")));
    }
    let col_norms: Vec<f64> = (0..d).map(|j| lattice.column(j).norm()).collect();
    let scale = col_norms.iter().cloned().fold(0.0, f64::max);
    let det = lattice.determinant();
    if !(det.abs() > 1e-12 * scale.powi(d as i32)) {
        return Err(Error::Argument("lattice basis is singular".into()));
    }
    let dual = lattice
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Argument("lattice basis is singular".into()))?
        .transpose();

    // |k_i| = |b_i · μ| ≤ |b_i| |μ|
    let radius = lambda_max.sqrt() / (2.0 * PI);
    let bounds: Vec<i64> = col_norms
        .iter()
        .map(|n| (n * radius * (1.0 + 1e-12)).floor() as i64)
        .collect();
    let mut total: u64 = 1;
    for b in &bounds {
        total = total.saturating_mul((2 * b + 1) as u64);
    }
    if total > cap {
        return Err(Error::Resource(format!(
            "dual-lattice enumeration needs {total} points, cap is {cap}"
        )));
    }

    let limit = lambda_max * (1.0 + 1e-12);
    let mut values = Vec::new();
    let mut k: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut mu = vec![0.0; d];
    loop {
        for (r, m) in mu.iter_mut().enumerate() {
            *m = (0..d).map(|c| dual[(r, c)] * k[c] as f64).sum();
        }
        let lam = 4.0 * PI * PI * mu.iter().map(|v| v * v).sum::<f64>();
        if lam <= limit {
            values.push(lam);
        }
        let mut i = 0;
        loop {
            if i == d {
                break;
            }
            k[i] += 1;
            if k[i] > bounds[i] {
                k[i] = -bounds[i];
                i += 1;
            } else {
                break;
            }
        }
        if i == d {
            break;
        }
    }
    values.sort_by(f64::total_cmp);

    let mut pairs: Vec<EigenPair> = Vec::new();
    for v in values {
        match pairs.last_mut() {
            Some(p) if (v - p.lambda).abs() <= 1e-10 * v.max(1.0) => p.multiplicity += 1,
            _ => pairs.push(EigenPair {
                lambda: if v < 1e-14 { 0.0 } else { v },
                multiplicity: 1,
            }),
        }
    }
    Ok(LinkSpectrum {
        pairs,
        truncation: lambda_max,
        source: SpectrumSource::ClosedForm {
            family: format!("flat_torus(d={d})"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s2_multiplicities() {
        for k in 0..8 {
            assert_eq!(sphere_multiplicity(2, k), 2 * k + 1);
        }
        // S^3: (k+1)^2
        for k in 0..8 {
            assert_eq!(sphere_multiplicity(3, k), (k + 1) * (k + 1));
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(sphere_spectrum(1, 1.0, 1.0).is_err());
        assert!(sphere_spectrum(2, 0.0, 1.0).is_err());
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(torus_spectrum(&singular, 10.0).is_err());
    }

    #[test]
    fn torus_cap_is_a_resource_error() {
        let b = DMatrix::<f64>::identity(3, 3);
        let r = torus_spectrum_with_cap(&b, 1e6, 1000);
        assert!(matches!(r, Err(Error::Resource(_))));
    }
}
