//! Manifest schema and validation. Every rejection carries a JSON pointer.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ac_geometry::{MetricChart, VectorFieldSpec, ZDirection};
use crate::error::{Error, Result};
use crate::link_spectrum::{icosphere, read_off, EigenPair, LinkComponent, LinkSpectrum};
use crate::topology::{builtin, read_complex, SimplicialComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Spectrum,
    Weights,
    Topology,
    Moduli,
    Cone,
    Geodesic,
}

/// One link component. Spheres and meshes are `S^{n−1}` resp. surfaces (`n = 3`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EndSpec {
    RoundSphere {
        #[serde(default = "one")]
        radius: f64,
    },
    /// Lattice vectors, one per entry.
    FlatTorus { vectors: Vec<Vec<f64>> },
    /// Triangulated surface in OFF format; the lowest `count` FEM eigenvalues.
    Mesh {
        path: PathBuf,
        #[serde(default = "default_fem_count")]
        count: usize,
    },
    /// Subdivided icosahedron projected to the unit sphere.
    Icosphere {
        level: usize,
        #[serde(default = "default_fem_count")]
        count: usize,
    },
    Supplied { pairs: Vec<(f64, usize)>, truncation: f64 },
}

fn one() -> f64 {
    1.0
}

fn default_fem_count() -> usize {
    16
}

fn default_lambda_max() -> f64 {
    12.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TopologySpec {
    Path(PathBuf),
    Builtin { builtin: String },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    pub epsilon: Option<f64>,
    /// Weights for the `dim H⁰_δ` listing.
    #[serde(default)]
    pub deltas: Vec<f64>,
    /// Weights for the `dim K¹_δ` table of the moduli block.
    #[serde(default)]
    pub k1_deltas: Vec<f64>,
    /// Closed window for the exceptional-weight listing; defaults to `[−n, n]`.
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeProfileSpec {
    SmoothedNeck,
    CappedCone {
        #[serde(default = "default_t0")]
        t0: f64,
        #[serde(default = "default_amp")]
        amp: f64,
    },
}

fn default_t0() -> f64 {
    1.5
}

fn default_amp() -> f64 {
    0.5
}

fn default_count_truncation() -> f64 {
    200.0
}

fn default_glue_truncation() -> f64 {
    400.0
}

fn default_probe_truncations() -> Vec<f64> {
    vec![50.0, 100.0, 200.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueSpec {
    pub end_values: [f64; 2],
    #[serde(default = "default_glue_truncation")]
    pub truncation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    #[serde(default)]
    pub lambda: f64,
    pub deltas: Vec<f64>,
    #[serde(default = "default_probe_truncations")]
    pub truncations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub profile: ConeProfileSpec,
    /// Weights for the mode-by-mode count.
    #[serde(default)]
    pub deltas: Vec<f64>,
    /// Highest link eigenvalue the count visits; defaults to the manifest's `lambda_max`.
    pub lambda_max: Option<f64>,
    #[serde(default = "default_count_truncation")]
    pub truncation: f64,
    pub glue: Option<GlueSpec>,
    pub probe: Option<ProbeSpec>,
}

fn default_directions() -> Vec<ZDirection> {
    vec![ZDirection::Radial, ZDirection::Link(0)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub chart: MetricChart,
    pub y: Vec<f64>,
    pub field: VectorFieldSpec,
    #[serde(default = "default_directions")]
    pub directions: Vec<ZDirection>,
    /// Sweep points; defaults to half decades from `1e−1` to `1e−4`.
    pub xs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub ends: Vec<EndSpec>,
    /// Truncation for closed-form spectra.
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    pub topology: Option<TopologySpec>,
    #[serde(default)]
    pub weights: WeightsSpec,
    #[serde(default)]
    pub l2_theorem_applicable: bool,
    pub analyses: Vec<Analysis>,
    pub cone: Option<ConeSpec>,
    pub geometry: Option<GeometrySpec>,
    pub output: Option<PathBuf>,
}

/// A parsed manifest plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub manifest: Manifest,
    pub base: PathBuf,
    pub name: String,
}

/// `ends[0].radius` → `/ends/0/radius`
fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } | Segment::Enum { variant: key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Directory of bundled manifests, addressable by bare name.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("manifests")
}

/// Resolves `arg` to a manifest file: an existing path, or the name of a bundled manifest.
pub fn resolve(arg: &str) -> Result<PathBuf> {
    let p = PathBuf::from(arg);
    if p.is_file() {
        return Ok(p);
    }
    let bundled = bundled_dir().join(format!("{arg}.json"));
    if !arg.contains(['/', '\\']) && bundled.is_file() {
        return Ok(bundled);
    }
    Err(Error::Argument(format!("no manifest file or bundled manifest named {arg:?}")))
}

pub fn parse(text: &str) -> Result<Manifest> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        Error::validation(pointer, e.into_inner().to_string())
    })
}

pub fn load(path: &Path) -> Result<LoadedManifest> {
    let text = std::fs::read_to_string(path)?;
    let manifest = parse(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = manifest
        .name
        .clone()
        .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let loaded = LoadedManifest { manifest, base, name };
    loaded.validate()?;
    Ok(loaded)
}

fn finite(pointer: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(pointer, format!("expected a finite number, got {v}")))
    }
}

impl LoadedManifest {
    pub fn from_manifest(manifest: Manifest, base: PathBuf) -> Result<Self> {
        let name = manifest.name.clone().unwrap_or_else(|| "manifest".into());
        let loaded = Self { manifest, base, name };
        loaded.validate()?;
        Ok(loaded)
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.manifest.analyses.contains(&a)
    }

    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    /// Structural checks that need no numerics.
    pub fn validate(&self) -> Result<()> {
        let m = &self.manifest;
        if m.analyses.is_empty() {
            return Err(Error::validation("/analyses", "at least one analysis is required"));
        }
        for (i, a) in m.analyses.iter().enumerate() {
            if m.analyses[..i].contains(a) {
                return Err(Error::validation(format!("/analyses/{i}"), format!("{a:?} listed twice")));
            }
        }
        if m.n < 3 {
            return Err(Error::validation("/n", format!("dimension must be at least 3, got {}", m.n)));
        }
        if !(m.lambda_max > 0.0 && m.lambda_max.is_finite()) {
            return Err(Error::validation("/lambda_max", "must be positive and finite"));
        }
        let needs_ends = [Analysis::Spectrum, Analysis::Weights, Analysis::Moduli, Analysis::Cone]
            .iter()
            .any(|a| self.wants(*a));
        if needs_ends && m.ends.is_empty() {
            return Err(Error::validation("/ends", "the requested analyses need at least one end"));
        }
        for (i, e) in m.ends.iter().enumerate() {
            let at = format!("/ends/{i}");
            match e {
                EndSpec::RoundSphere { radius } => {
                    if !(*radius > 0.0 && radius.is_finite()) {
                        return Err(Error::validation(format!("{at}/radius"), "radius must be positive"));
                    }
                }
                EndSpec::FlatTorus { vectors } => {
                    let k = m.n - 1;
                    if vectors.len() != k || vectors.iter().any(|v| v.len() != k) {
                        return Err(Error::validation(format!("{at}/vectors"), format!("need {k} lattice vectors of length {k}")));
                    }
                }
                EndSpec::Mesh { path, count } => {
                    if m.n != 3 {
                        return Err(Error::validation(at, "meshed links are surfaces, so n must be 3"));
                    }
                    if !self.path(path).is_file() {
                        return Err(Error::validation(format!("{at}/path"), format!("file {} does not exist", path.display())));
                    }
                    if *count < 2 {
                        return Err(Error::validation(format!("{at}/count"), "need at least 2 eigenvalues"));
                    }
                }
                EndSpec::Icosphere { level, count } => {
                    if m.n != 3 {
                        return Err(Error::validation(at, "meshed links are surfaces, so n must be 3"));
                    }
                    if *level > 6 {
                        return Err(Error::validation(format!("{at}/level"), "level must be at most 6"));
                    }
                    if *count < 2 {
                        return Err(Error::validation(format!("{at}/count"), "need at least 2 eigenvalues"));
                    }
                }
                EndSpec::Supplied { truncation, .. } => finite(&format!("{at}/truncation"), *truncation)?,
            }
        }
        if self.wants(Analysis::Topology) || self.wants(Analysis::Moduli) {
            match &m.topology {
                None => return Err(Error::validation("/topology", "the requested analyses need a complex")),
                Some(TopologySpec::Path(p)) | Some(TopologySpec::File { path: p }) => {
                    if !self.path(p).is_file() {
                        return Err(Error::validation("/topology", format!("file {} does not exist", p.display())));
                    }
                }
                Some(TopologySpec::Builtin { builtin: b }) => {
                    builtin(b).map_err(|e| Error::validation("/topology/builtin", e.to_string()))?;
                }
            }
        }
        if let Some(eps) = m.weights.epsilon {
            finite("/weights/epsilon", eps)?;
        }
        for (i, d) in m.weights.deltas.iter().enumerate() {
            finite(&format!("/weights/deltas/{i}"), *d)?;
        }
        for (i, d) in m.weights.k1_deltas.iter().enumerate() {
            finite(&format!("/weights/k1_deltas/{i}"), *d)?;
        }
        if let Some([lo, hi]) = m.weights.window {
            finite("/weights/window/0", lo)?;
            finite("/weights/window/1", hi)?;
        }
        if self.wants(Analysis::Cone) {
            let c = m.cone.as_ref().ok_or_else(|| Error::validation("/cone", "the cone analysis needs a cone section"))?;
            let want = match c.profile {
                ConeProfileSpec::SmoothedNeck => 2,
                ConeProfileSpec::CappedCone { .. } => 1,
            };
            if m.ends.len() != want {
                return Err(Error::validation("/cone/profile", format!("this profile needs {want} ends, the manifest has {}", m.ends.len())));
            }
            if c.glue.is_some() && want != 2 {
                return Err(Error::validation("/cone/glue", "gluing needs the two-ended neck"));
            }
            if c.probe.is_some() && want != 1 {
                return Err(Error::validation("/cone/probe", "the window probe runs on the capped cone"));
            }
            if c.deltas.is_empty() && c.glue.is_none() && c.probe.is_none() {
                return Err(Error::validation("/cone", "nothing to do: give deltas, glue or probe"));
            }
        }
        if self.wants(Analysis::Geodesic) {
            let g = m
                .geometry
                .as_ref()
                .ok_or_else(|| Error::validation("/geometry", "the geodesic analysis needs a geometry section"))?;
            MetricChart::new(g.chart.kind, g.chart.dim).map_err(|e| Error::validation("/geometry/chart", e.to_string()))?;
            g.field.validate(&g.chart).map_err(|e| Error::validation("/geometry/field", e.to_string()))?;
            if g.y.len() + 1 != g.chart.dim {
                return Err(Error::validation("/geometry/y", format!("need {} link coordinates", g.chart.dim - 1)));
            }
            if g.directions.is_empty() {
                return Err(Error::validation("/geometry/directions", "at least one direction is required"));
            }
        }
        Ok(())
    }

    pub fn end_spectrum(&self, i: usize) -> Result<LinkSpectrum> {
        let m = &self.manifest;
        let at = |e: Error| match e {
            Error::Validation { pointer, message } => Error::validation(format!("/ends/{i}{pointer}"), message),
            other => other,
        };
        let comp = match &m.ends[i] {
            EndSpec::RoundSphere { radius } => LinkComponent::RoundSphere { m: m.n - 1, radius: *radius },
            EndSpec::FlatTorus { vectors } => {
                let k = m.n - 1;
                LinkComponent::FlatTorus {
                    lattice: DMatrix::from_fn(k, k, |r, c| vectors[c][r]),
                }
            }
            EndSpec::Mesh { path, count } => {
                let mesh = read_off(&self.path(path)).map_err(at)?;
                return LinkComponent::TriangulatedSurface(mesh).spectrum(m.lambda_max, *count).map_err(at);
            }
            EndSpec::Icosphere { level, count } => {
                return LinkComponent::TriangulatedSurface(icosphere(*level)).spectrum(m.lambda_max, *count).map_err(at);
            }
            EndSpec::Supplied { pairs, truncation } => {
                let pairs = pairs.iter().map(|&(lambda, multiplicity)| EigenPair { lambda, multiplicity }).collect();
                return LinkSpectrum::supplied(pairs, *truncation).map_err(at);
            }
        };
        comp.spectrum(m.lambda_max, 0).map_err(at)
    }

    pub fn complex(&self) -> Result<(SimplicialComplex, String)> {
        match self.manifest.topology.as_ref().expect("validated") {
            TopologySpec::Builtin { builtin: b } => Ok((builtin(b)?, format!("builtin:{b}"))),
            TopologySpec::Path(p) | TopologySpec::File { path: p } => Ok((read_complex(&self.path(p))?, p.display().to_string())),
        }
    }
}
