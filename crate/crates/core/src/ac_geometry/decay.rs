use serde::{Deserialize, Serialize};

use super::chart::{curvature_norm, MetricChart};
use crate::error::{Error, Result};
use crate::fit::{least_squares_slope, logspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayQuantity {
    Christoffels,
    Curvature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEntry {
    pub name: String,
    /// `α` in the claimed class `C^∞ x^α`.
    pub claimed_order: f64,
    /// Fitted log-log slope; `None` when the entry vanishes.
    pub slope: Option<f64>,
    pub vanishes: bool,
    /// `vanishes || slope ≥ α − 0.1`
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub chart: String,
    pub y: Vec<f64>,
    pub xs: Vec<f64>,
    pub entries: Vec<DecayEntry>,
}

/// Below this, `|q| / x^α` counts as identically zero.
pub const VANISH_TOL: f64 = 1e-9;

fn index_name(i: usize) -> String {
    if i == 0 {
        "x".into()
    } else {
        i.to_string()
    }
}

/// Orders of the local-structure lemma: `Γ^k_ij ∈ C^∞`, `Γ^x_ij ∈ C^∞x`,
/// `Γ^k_ix ∈ C^∞x^{−1}`, `Γ^x_ix ∈ C^∞x`, `Γ^k_xx ∈ C^∞x^{−1}`, `Γ^x_xx ∈ C^∞x^{−1}`.
pub fn claimed_christoffel_order(k: usize, i: usize, j: usize) -> f64 {
    let xs = (i == 0) as usize + (j == 0) as usize;
    match (k == 0, xs) {
        (false, 0) => 0.0,
        (true, 0) => 1.0,
        (false, 1) => -1.0,
        (true, 1) => 1.0,
        (false, _) => -1.0,
        (true, _) => -1.0,
    }
}

/// Log-log fit of each entry against `x` over `[1e−4, 1e−1]` at fixed `y`.
pub fn decay_classify(chart: &MetricChart, quantity: DecayQuantity, y: &[f64]) -> Result<DecayReport> {
    if !chart.is_ac() {
        return Err(Error::Argument("decay classes are defined for AC charts".into()));
    }
    if y.len() + 1 != chart.dim {
        return Err(Error::Argument(format!("y needs {} entries", chart.dim - 1)));
    }
    let xs = logspace(1e-4, 1e-1, 13);
    let d = chart.dim;
    let mut series: Vec<(String, f64, Vec<f64>)> = Vec::new();
    match quantity {
        DecayQuantity::Curvature => series.push(("|R|".into(), 2.0, Vec::new())),
        DecayQuantity::Christoffels => {
            for k in 0..d {
                for i in 0..d {
                    for j in i..d {
                        let name = format!("G^{}_{}{}", index_name(k), index_name(i), index_name(j));
                        series.push((name, claimed_christoffel_order(k, i, j), Vec::new()));
                    }
                }
            }
        }
    }
    for &x in &xs {
        let mut p = vec![x];
        p.extend_from_slice(y);
        match quantity {
            DecayQuantity::Curvature => series[0].2.push(curvature_norm(chart, &p)?),
            DecayQuantity::Christoffels => {
                let g = chart.geometry(&p)?.gamma;
                let mut idx = 0;
                for k in 0..d {
                    for i in 0..d {
                        for j in i..d {
                            series[idx].2.push(g[k][i][j]);
                            idx += 1;
                        }
                    }
                }
            }
        }
    }
    let entries = series
        .into_iter()
        .map(|(name, order, vals)| {
            let vanishes = xs.iter().zip(&vals).all(|(x, v)| v.abs() <= VANISH_TOL * x.powf(order));
            let slope = if vanishes {
                None
            } else {
                let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
                let ly: Vec<f64> = vals.iter().map(|v| v.abs().max(f64::MIN_POSITIVE).ln()).collect();
                Some(least_squares_slope(&lx, &ly))
            };
            DecayEntry {
                name,
                claimed_order: order,
                slope,
                vanishes,
                consistent: vanishes || slope.is_some_and(|s| s >= order - 0.1),
            }
        })
        .collect();
    Ok(DecayReport {
        chart: chart.name(),
        y: y.to_vec(),
        xs,
        entries,
    })
}
