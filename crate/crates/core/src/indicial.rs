//! Growth exponents of separated harmonic functions on cones, exceptional
//! weights, and the dimension counts built on them.
//!
//! On the exact cone `dr² + r² g_M`, an eigenfunction of the link with
//! eigenvalue `λ` times `r^a` is harmonic iff `a(a + n − 2) = λ`. A weight `δ`
//! (decay `r^{−δ}`) is exceptional when `r^{−δ}` is one of these rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_spectrum::LinkSpectrum;

pub const DEDUP_TOL: f64 = 1e-10;
pub const EXCEPTIONAL_TOL: f64 = 1e-9;
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthExponents {
    pub lambda: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub n: usize,
}

/// Roots of `a(a + n − 2) = λ`, computed without cancellation.
pub fn growth_exponents(lambda: f64, n: usize) -> Result<GrowthExponents> {
    if n < 3 {
        return Err(Error::Argument(format!("dimension n must be at least 3, got {n}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Argument(format!("eigenvalue must be finite and nonnegative, got {lambda}")));
    }
    let b = n as f64 - 2.0;
    let root = (b * b + 4.0 * lambda).sqrt();
    let a_minus = -(b + root) / 2.0;
    let a_plus = if lambda == 0.0 { 0.0 } else { 2.0 * lambda / (b + root) };
    Ok(GrowthExponents {
        lambda,
        a_plus,
        a_minus,
        n,
    })
}

/// Link spectra, one per end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndSpectra {
    pub n: usize,
    pub ends: Vec<LinkSpectrum>,
}

impl EndSpectra {
    pub fn new(n: usize, ends: Vec<LinkSpectrum>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Argument(format!("dimension n must be at least 3, got {n}")));
        }
        if ends.is_empty() {
            return Err(Error::validation("/ends", "at least one end is required"));
        }
        for (i, e) in ends.iter().enumerate() {
            e.validate().map_err(|err| match err {
                Error::Validation { pointer, message } => Error::Validation {
                    pointer: format!("/ends/{i}{pointer}"),
                    message,
                },
                other => other,
            })?;
        }
        Ok(Self { n, ends })
    }

    pub fn s(&self) -> usize {
        self.ends.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    APlus,
    AMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSource {
    pub branch: Branch,
    pub lambda: f64,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalWeight {
    pub value: f64,
    pub sources: Vec<WeightSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalWeights {
    pub window: [f64; 2],
    pub weights: Vec<ExceptionalWeight>,
}

impl ExceptionalWeights {
    pub fn values(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.value).collect()
    }
}

fn all_weights(ends: &EndSpectra) -> Vec<ExceptionalWeight> {
    let mut raw: Vec<(f64, WeightSource)> = Vec::new();
    for (end, spec) in ends.ends.iter().enumerate() {
        for p in &spec.pairs {
            let g = growth_exponents(p.lambda, ends.n).expect("validated spectrum");
            // `+ 0.0` turns −0 into 0
            raw.push((-g.a_plus + 0.0, WeightSource { branch: Branch::APlus, lambda: p.lambda, end }));
            raw.push((-g.a_minus, WeightSource { branch: Branch::AMinus, lambda: p.lambda, end }));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<ExceptionalWeight> = Vec::new();
    for (v, src) in raw {
        match out.last_mut() {
            Some(w) if (v - w.value).abs() <= DEDUP_TOL => w.sources.push(src),
            _ => out.push(ExceptionalWeight {
                value: v,
                sources: vec![src],
            }),
        }
    }
    out
}

/// `{−a⁺(λ), −a⁻(λ)}` over every end eigenvalue, restricted to the closed window.
/// A window with `lo ≥ hi` is empty.
pub fn exceptional_weights(ends: &EndSpectra, lo: f64, hi: f64) -> ExceptionalWeights {
    let weights = if lo < hi {
        all_weights(ends)
            .into_iter()
            .filter(|w| w.value >= lo && w.value <= hi)
            .collect()
    } else {
        Vec::new()
    };
    ExceptionalWeights {
        window: [lo, hi],
        weights,
    }
}

/// Errors with the nearest exceptional weight if `delta` is within tolerance of one.
pub fn check_non_exceptional(delta: f64, ends: &EndSpectra) -> Result<()> {
    if !delta.is_finite() {
        return Err(Error::Argument(format!("weight must be finite, got {delta}")));
    }
    let nearest = all_weights(ends)
        .into_iter()
        .map(|w| w.value)
        .min_by(|a, b| (a - delta).abs().total_cmp(&(b - delta).abs()));
    match nearest {
        Some(w) if (w - delta).abs() <= EXCEPTIONAL_TOL => Err(Error::ExceptionalWeight {
            delta,
            weight: w,
            tol: EXCEPTIONAL_TOL,
        }),
        _ => Ok(()),
    }
}

/// The link eigenvalue at which `a⁺(λ) = −delta`, i.e. the largest eigenvalue a
/// weight-`delta` count can depend on.
pub fn critical_eigenvalue(delta: f64, n: usize) -> f64 {
    let a = -delta;
    a * (a + n as f64 - 2.0)
}

/// One counted model: `mult` independent harmonic functions of rate `r^{a⁺}` on `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H0Contribution {
    pub end: usize,
    pub lambda: f64,
    pub a_plus: f64,
    pub multiplicity: usize,
}

/// Models contributing to `dim H⁰_δ`, i.e. eigenpairs with `a⁺(λ) < −δ`.
pub fn h0_contributions(delta: f64, ends: &EndSpectra) -> Result<Vec<H0Contribution>> {
    check_non_exceptional(delta, ends)?;
    if delta > 0.0 {
        return Ok(Vec::new());
    }
    let need = critical_eigenvalue(delta, ends.n);
    for (i, e) in ends.ends.iter().enumerate() {
        if e.truncation < need {
            return Err(Error::OutOfValidity {
                delta,
                reason: format!(
                    "end {i} spectrum is truncated at {} but the count needs every eigenvalue below {need}",
                    e.truncation
                ),
            });
        }
    }
    let mut out = Vec::new();
    for (end, e) in ends.ends.iter().enumerate() {
        for p in &e.pairs {
            let g = growth_exponents(p.lambda, ends.n)?;
            if g.a_plus < -delta {
                out.push(H0Contribution {
                    end,
                    lambda: p.lambda,
                    a_plus: g.a_plus,
                    multiplicity: p.multiplicity,
                });
            }
        }
    }
    Ok(out)
}

/// Dimension of harmonic functions bounded by `C r^{−δ}` on every end.
#[allow(non_snake_case)]
pub fn dim_H0(delta: f64, ends: &EndSpectra) -> Result<usize> {
    Ok(h0_contributions(delta, ends)?.iter().map(|c| c.multiplicity).sum())
}

/// True iff some end carries an eigenvalue in `(0, n − 1)`, i.e. a harmonic
/// model of growth `r^a` with `0 < a < 1`.
pub fn sublinear_growth_exists(ends: &EndSpectra) -> bool {
    let top = ends.n as f64 - 1.0;
    ends.ends
        .iter()
        .any(|e| e.pairs.iter().any(|p| p.lambda > 0.0 && p.lambda < top))
}

/// Dimension of exact harmonic 1-forms `d(H⁰_{η−1})` for `η < n − 1`.
#[allow(non_snake_case)]
pub fn dim_E(eta: f64, ends: &EndSpectra) -> Result<usize> {
    let n = ends.n as f64;
    if eta >= n - 1.0 {
        return Err(Error::OutOfValidity {
            delta: eta,
            reason: format!("formula holds only below n - 1 = {}", n - 1.0),
        });
    }
    check_non_exceptional(eta - 1.0, ends)?;
    if eta < 1.0 {
        // constants are always counted and are killed by d
        Ok(dim_H0(eta - 1.0, ends)? - 1)
    } else {
        Ok(ends.s() - 1)
    }
}

/// Checks that `ε` selects the first gap of non-exceptional weights above −1.
pub fn validate_epsilon(epsilon: f64, ends: &EndSpectra) -> Result<()> {
    if !epsilon.is_finite() {
        return Err(Error::Argument(format!("epsilon must be finite, got {epsilon}")));
    }
    check_non_exceptional(-1.0 + epsilon, ends)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Argument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if let Some(w) = all_weights(ends)
        .into_iter()
        .map(|w| w.value)
        .find(|&w| w > -1.0 + EXCEPTIONAL_TOL && w < -1.0 + epsilon)
    {
        return Err(Error::OutOfValidity {
            delta: -1.0 + epsilon,
            reason: format!("epsilon too large: exceptional weight {w} lies in (-1, -1 + epsilon)"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_spectrum::sphere_spectrum;

    fn s2_ends(count: usize, lambda_max: f64) -> EndSpectra {
        let e = sphere_spectrum(2, 1.0, lambda_max).unwrap();
        EndSpectra::new(3, vec![e; count]).unwrap()
    }

    #[test]
    fn exact_at_lambda_n_minus_one() {
        for n in 3..10 {
            let g = growth_exponents((n - 1) as f64, n).unwrap();
            assert_eq!(g.a_plus, 1.0);
            assert_eq!(g.a_minus, 1.0 - n as f64);
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        assert!(growth_exponents(-1.0, 3).is_err());
        assert!(growth_exponents(1.0, 2).is_err());
    }

    #[test]
    fn truncation_guard() {
        let ends = s2_ends(1, 1.0);
        // needs eigenvalues up to 1.1 * 2.1
        assert!(matches!(dim_H0(-1.1, &ends), Err(Error::OutOfValidity { .. })));
        assert_eq!(dim_H0(-0.5, &ends).unwrap(), 1);
    }

    #[test]
    fn epsilon_rules() {
        let ends = s2_ends(2, 12.0);
        assert!(validate_epsilon(0.1, &ends).is_ok());
        match validate_epsilon(1.0, &ends) {
            Err(Error::ExceptionalWeight { weight, .. }) => assert_eq!(weight, 0.0),
            other => panic!("{other:?}"),
        }
        assert!(validate_epsilon(0.0, &ends).is_err());
        // radius-2 sphere: λ=1.5 gives weight −a⁺ ≈ −0.823 inside (−1, −0.5)
        let big = EndSpectra::new(3, vec![sphere_spectrum(2, 2.0, 4.0).unwrap()]).unwrap();
        assert!(validate_epsilon(0.5, &big).is_err());
        assert!(validate_epsilon(0.1, &big).is_ok());
    }
}
