//! Dimensions of the deformation spaces, assembled from link spectra and the
//! cohomology of the core.
//!
//! * `dim K¹_δ = dim H¹ + dim H⁰_{δ−1} − 1` for `δ ∈ (0, 1)`,
//! * `dim K¹_δ = dim H¹_c` for `δ ∈ (1, n − 1)`,
//! * `dim Def_SL = dim K¹_ε`, and `dim Def_SL^{L²} = dim H¹_c` when the ambient
//!   curvature decays fast enough (asserted by the caller).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicial::{check_non_exceptional, dim_H0, validate_epsilon, EndSpectra, DEFAULT_EPSILON};
use crate::topology::CohomologyReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliInput {
    pub ends: EndSpectra,
    pub cohomology: CohomologyReport,
    pub epsilon: f64,
    /// Caller's assertion that the ambient curvature decays fast enough for the L² count.
    pub l2_theorem_applicable: bool,
}

impl ModuliInput {
    pub fn new(ends: EndSpectra, cohomology: CohomologyReport, epsilon: Option<f64>, l2_theorem_applicable: bool) -> Result<Self> {
        if ends.s() != cohomology.s {
            return Err(Error::validation(
                "/ends",
                format!(
                    "{} link spectra supplied but the boundary has {} components",
                    ends.s(),
                    cohomology.s
                ),
            ));
        }
        let epsilon = epsilon.unwrap_or(DEFAULT_EPSILON);
        validate_epsilon(epsilon, &ends)?;
        Ok(Self {
            ends,
            cohomology,
            epsilon,
            l2_theorem_applicable,
        })
    }

    pub fn n(&self) -> usize {
        self.ends.n
    }
}

#[allow(non_snake_case)]
pub fn dim_K1(delta: f64, input: &ModuliInput) -> Result<usize> {
    let n = input.n() as f64;
    let in_low = delta > 0.0 && delta < 1.0;
    let in_high = delta > 1.0 && delta < n - 1.0;
    if !(in_low || in_high) {
        return Err(Error::OutOfValidity {
            delta,
            reason: format!("formula holds for weights in (0, 1) or (1, {})", n - 1.0),
        });
    }
    check_non_exceptional(delta, &input.ends)?;
    check_non_exceptional(delta - 1.0, &input.ends)?;
    if in_low {
        Ok(input.cohomology.dim_h1 + dim_H0(delta - 1.0, &input.ends)? - 1)
    } else {
        Ok(input.cohomology.dim_h1c)
    }
}

/// `dim H¹ + dim H⁰_{−1+ε} − 1`
pub fn dim_def_sl(input: &ModuliInput) -> Result<usize> {
    Ok(input.cohomology.dim_h1 + dim_H0(-1.0 + input.epsilon, &input.ends)? - 1)
}

/// `dim H¹_c`, available only under the fast-curvature-decay assertion.
pub fn dim_def_sl_l2(input: &ModuliInput) -> Result<usize> {
    if !input.l2_theorem_applicable {
        return Err(Error::Argument(
            "the L2 count needs l2_theorem_applicable = true (fast ambient curvature decay)".into(),
        ));
    }
    Ok(input.cohomology.dim_h1c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K1Entry {
    pub delta: f64,
    pub dim: usize,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliEcho {
    pub n: usize,
    pub s: usize,
    pub epsilon: f64,
    pub dim_h1: usize,
    pub dim_h1c: usize,
    pub rank_i: usize,
    pub dim_h0_eps: usize,
    pub l2_theorem_applicable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliReport {
    pub dim_k1_eps: usize,
    pub dim_def_sl: usize,
    pub dim_def_sl_l2: Option<usize>,
    pub k1_table: Vec<K1Entry>,
    pub inputs: ModuliEcho,
}

pub fn moduli_report(input: &ModuliInput, deltas: &[f64]) -> Result<ModuliReport> {
    let h0_eps = dim_H0(-1.0 + input.epsilon, &input.ends)?;
    let def_sl = dim_def_sl(input)?;
    let k1_eps = dim_K1(input.epsilon, input)?;
    let l2 = if input.l2_theorem_applicable {
        Some(dim_def_sl_l2(input)?)
    } else {
        None
    };
    let c = &input.cohomology;

    let mut table = Vec::with_capacity(deltas.len());
    let mut failures = Vec::new();
    for &d in deltas {
        match dim_K1(d, input) {
            Ok(dim) => {
                let formula = if d < 1.0 {
                    format!("dim H1 + dim H0_(delta-1) - 1 = {} + {} - 1", c.dim_h1, dim + 1 - c.dim_h1)
                } else {
                    format!("dim H1_c = {}", c.dim_h1c)
                };
                table.push(K1Entry { delta: d, dim, formula });
            }
            Err(e) => failures.push((d, e)),
        }
    }
    if let Some((d, first)) = failures.into_iter().next() {
        return Err(match first {
            Error::OutOfValidity { reason, .. } => Error::OutOfValidity { delta: d, reason },
            other => other,
        });
    }

    if k1_eps != def_sl {
        return Err(Error::Internal(format!("dim K1_eps = {k1_eps} differs from dim Def_SL = {def_sl}")));
    }
    if let Some(l2) = l2 {
        let lhs = def_sl as i64 - l2 as i64;
        let rhs = (c.dim_h1 as i64 - c.rank_i as i64) + (h0_eps as i64 - c.s as i64);
        if lhs != rhs || lhs < 0 {
            return Err(Error::Internal(format!(
                "dim Def_SL - dim Def_SL^L2 = {lhs} but (dim H1 - rank i) + (dim H0 - s) = {rhs}"
            )));
        }
    }
    Ok(ModuliReport {
        dim_k1_eps: k1_eps,
        dim_def_sl: def_sl,
        dim_def_sl_l2: l2,
        k1_table: table,
        inputs: ModuliEcho {
            n: input.n(),
            s: c.s,
            epsilon: input.epsilon,
            dim_h1: c.dim_h1,
            dim_h1c: c.dim_h1c,
            rank_i: c.rank_i,
            dim_h0_eps: h0_eps,
            l2_theorem_applicable: input.l2_theorem_applicable,
        },
    })
}
