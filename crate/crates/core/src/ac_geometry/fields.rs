use serde::{Deserialize, Serialize};

use super::chart::{MetricChart, Vec3, MAX_DIM};
use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldClass {
    /// `V = V^x x∂_x + V^i ∂_{y^i}`
    BField,
    /// `V = V^x x²∂_x + V^i x∂_{y^i}`
    ScField,
}

/// `c + b·x + a·cos(y^k)`, smooth up to `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Component {
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub a: f64,
    /// Link coordinate inside the cosine (0-based).
    #[serde(default)]
    pub k: usize,
}

impl Component {
    pub fn constant(c: f64) -> Self {
        Self { c, ..Self::default() }
    }

    fn jet(&self, p: &[Jet]) -> Jet {
        let mut v = Jet::constant(self.c) + p[0] * self.b;
        if self.a != 0.0 {
            v = v + p[1 + self.k].cos() * self.a;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFieldSpec {
    pub class: FieldClass,
    /// `(V^x, V^1, …)` in the class normalization.
    pub components: Vec<Component>,
}

impl VectorFieldSpec {
    pub fn new(class: FieldClass, components: Vec<Component>) -> Self {
        Self { class, components }
    }

    pub fn zero(class: FieldClass, dim: usize) -> Self {
        Self::new(class, vec![Component::default(); dim])
    }

    /// `−x²∂_x = ∂_r`
    pub fn radial_sc(dim: usize) -> Self {
        let mut comps = vec![Component::default(); dim];
        comps[0] = Component::constant(-1.0);
        Self::new(FieldClass::ScField, comps)
    }

    pub fn validate(&self, chart: &MetricChart) -> Result<()> {
        if self.components.len() != chart.dim {
            return Err(Error::Argument(format!(
                "vector field has {} components, chart dimension is {}",
                self.components.len(),
                chart.dim
            )));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.a != 0.0 && c.k + 1 >= chart.dim {
                return Err(Error::Argument(format!("component {i} refers to link coordinate {} of {}", c.k, chart.dim - 1)));
            }
            if ![c.a, c.b, c.c].iter().all(|v| v.is_finite()) {
                return Err(Error::Argument(format!("component {i} is not finite")));
            }
        }
        if !chart.is_ac() {
            return Err(Error::Argument("b- and sc-fields live on AC charts".into()));
        }
        Ok(())
    }

    /// Class-normalized components `(V^x, V^i)` at `p`.
    pub fn normalized(&self, p: &[f64]) -> Vec3 {
        let mut q = [0.0; MAX_DIM];
        q[..p.len()].copy_from_slice(p);
        let jets = Jet::point(&q);
        let mut out = [0.0; MAX_DIM];
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.jet(&jets).v;
        }
        out
    }

    /// Coordinate components `(V^{∂x}, V^{∂y})` as jets.
    pub fn coordinate_jets(&self, p: &[f64]) -> Vec<Jet> {
        let mut q = [0.0; MAX_DIM];
        q[..p.len()].copy_from_slice(p);
        let jets = Jet::point(&q);
        let x = jets[0];
        let (fx, fy) = match self.class {
            FieldClass::BField => (x, Jet::constant(1.0)),
            FieldClass::ScField => (x * x, x),
        };
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| c.jet(&jets) * if i == 0 { fx } else { fy })
            .collect()
    }

    pub fn coordinate(&self, p: &[f64]) -> Vec3 {
        let mut out = [0.0; MAX_DIM];
        for (o, j) in out.iter_mut().zip(self.coordinate_jets(p)) {
            *o = j.v;
        }
        out
    }

    /// `∇_Z V` in coordinate components at an interior point.
    pub fn covariant_derivative(&self, chart: &MetricChart, p: &[f64], z: &[f64]) -> Result<Vec3> {
        let geo = chart.geometry(p)?;
        let v = self.coordinate_jets(p);
        let vv: Vec<f64> = v.iter().map(|j| j.v).collect();
        let conn = geo.connection(z, &vv);
        let mut out = [0.0; MAX_DIM];
        for mu in 0..chart.dim {
            out[mu] = (0..chart.dim).map(|nu| z[nu] * v[mu].g[nu]).sum::<f64>() + conn[mu];
        }
        Ok(out)
    }
}
