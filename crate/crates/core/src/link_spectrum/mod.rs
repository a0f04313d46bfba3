//! Laplace–Beltrami spectra of compact link components.

mod closed_form;
mod fem;
mod mesh;
mod sparse;

pub use closed_form::{sphere_multiplicity, sphere_spectrum, torus_spectrum, torus_spectrum_with_cap, DEFAULT_TORUS_CAP};
pub use fem::{fem_spectrum, fem_spectrum_with, FemOptions};
pub use mesh::{clifford_torus, icosphere, parse_off, read_off, TriMesh};
pub use sparse::{rcm_order, Skyline, SymSparse};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gap under which neighbouring FEM eigenvalues are one multiplicity cluster.
pub const FEM_MERGE_GAP: f64 = 1e-3;

/// Eigenvalues this close to zero are reported as exactly zero.
pub const ZERO_SNAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSource {
    ClosedForm { family: String },
    Fem(MeshStats),
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub faces: usize,
    pub iterations: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpectrum {
    pub pairs: Vec<EigenPair>,
    pub truncation: f64,
    pub source: SpectrumSource,
}

impl LinkSpectrum {
    /// A user-supplied list. Checked against the usual invariants.
    pub fn supplied(pairs: Vec<EigenPair>, truncation: f64) -> Result<Self> {
        let s = Self {
            pairs,
            truncation,
            source: SpectrumSource::Supplied,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .pairs
            .first()
            .ok_or_else(|| Error::validation("/pairs", "spectrum is empty"))?;
        if first.lambda != 0.0 || first.multiplicity != 1 {
            return Err(Error::validation("/pairs/0", "spectrum must start with (0, 1)"));
        }
        for (i, p) in self.pairs.iter().enumerate() {
            if p.multiplicity == 0 {
                return Err(Error::validation(format!("/pairs/{i}"), "multiplicity must be positive"));
            }
            if !(p.lambda >= 0.0) || !p.lambda.is_finite() {
                return Err(Error::validation(format!("/pairs/{i}"), "eigenvalue must be finite and nonnegative"));
            }
            if p.lambda > self.truncation * (1.0 + 1e-12) {
                return Err(Error::validation(format!("/pairs/{i}"), "eigenvalue exceeds truncation"));
            }
            if i > 0 && p.lambda <= self.pairs[i - 1].lambda {
                return Err(Error::validation(format!("/pairs/{i}"), "eigenvalues must strictly increase"));
            }
        }
        Ok(())
    }

    /// `[[lambda, mult], ...]`
    pub fn to_json_pairs(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.pairs
                .iter()
                .map(|p| serde_json::json!([p.lambda, p.multiplicity]))
                .collect(),
        )
    }

    pub fn total_multiplicity(&self) -> usize {
        self.pairs.iter().map(|p| p.multiplicity).sum()
    }
}

#[derive(Debug, Clone)]
pub enum LinkComponent {
    RoundSphere { m: usize, radius: f64 },
    /// The torus `R^d / B Z^d`, lattice vectors in the columns of `B`.
    FlatTorus { lattice: DMatrix<f64> },
    TriangulatedSurface(TriMesh),
}

impl LinkComponent {
    /// Closed forms are truncated at `lambda_max`; meshes return the lowest
    /// `fem_count` eigenvalues (completed to whole clusters).
    pub fn spectrum(&self, lambda_max: f64, fem_count: usize) -> Result<LinkSpectrum> {
        match self {
            LinkComponent::RoundSphere { m, radius } => sphere_spectrum(*m, *radius, lambda_max),
            LinkComponent::FlatTorus { lattice } => torus_spectrum(lattice, lambda_max),
            LinkComponent::TriangulatedSurface(mesh) => fem_spectrum(mesh, fem_count),
        }
    }
}

/// Groups `(lambda, mult)` values whose relative gap is below `rel_gap`,
/// replacing each group by its multiplicity-weighted mean. Repeated to a fixed
/// point so the result does not depend on input order and merging twice is a
/// no-op.
pub fn merge_clusters(values: &[(f64, usize)], rel_gap: f64) -> Vec<EigenPair> {
    let mut cur: Vec<(f64, usize)> = values.to_vec();
    loop {
        cur.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut next: Vec<(f64, usize)> = Vec::with_capacity(cur.len());
        let mut i = 0;
        while i < cur.len() {
            let mut sum = cur[i].0 * cur[i].1 as f64;
            let mut mult = cur[i].1;
            let mut j = i + 1;
            while j < cur.len() && close(cur[j - 1].0, cur[j].0, rel_gap) {
                sum += cur[j].0 * cur[j].1 as f64;
                mult += cur[j].1;
                j += 1;
            }
            next.push((sum / mult as f64, mult));
            i = j;
        }
        let done = next.len() == cur.len();
        cur = next;
        if done {
            break;
        }
    }
    cur.into_iter()
        .map(|(l, m)| EigenPair {
            lambda: if l.abs() < ZERO_SNAP { 0.0 } else { l },
            multiplicity: m,
        })
        .collect()
}

fn close(a: f64, b: f64, rel_gap: f64) -> bool {
    let scale = a.abs().max(b.abs());
    if scale < ZERO_SNAP {
        return true;
    }
    (b - a).abs() <= rel_gap * scale
}
