use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

/// Closed triangulated surface embedded in `R^ambient`. The metric is the one
/// induced by the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub ambient: usize,
    pub coords: Vec<f64>,
    pub faces: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(ambient: usize, coords: Vec<f64>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let m = Self { ambient, coords, faces };
        m.validate()?;
        Ok(m)
    }

    pub fn n_vertices(&self) -> usize {
        self.coords.len() / self.ambient
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.ambient..(i + 1) * self.ambient]
    }

    /// Largest coordinate extent, used to make area thresholds scale-free.
    pub fn scale(&self) -> f64 {
        let mut s: f64 = 0.0;
        for a in 0..self.ambient {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for v in 0..self.n_vertices() {
                let c = self.coords[v * self.ambient + a];
                lo = lo.min(c);
                hi = hi.max(c);
            }
            s = s.max(hi - lo);
        }
        s
    }

    pub fn face_area(&self, f: &[usize; 3]) -> f64 {
        let (u, v) = self.edge_vectors(f[0], f[1], f[2]);
        let uu = dot(&u, &u);
        let vv = dot(&v, &v);
        let uv = dot(&u, &v);
        0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
    }

    pub fn area(&self) -> f64 {
        self.faces.iter().map(|f| self.face_area(f)).sum()
    }

    pub(crate) fn edge_vectors(&self, a: usize, b: usize, c: usize) -> (Vec<f64>, Vec<f64>) {
        let pa = self.vertex(a);
        let pb = self.vertex(b);
        let pc = self.vertex(c);
        let u = pb.iter().zip(pa).map(|(x, y)| x - y).collect();
        let v = pc.iter().zip(pa).map(|(x, y)| x - y).collect();
        (u, v)
    }

    /// Closed 2-manifold check: valid indices, non-degenerate faces, every edge in exactly two faces.
    pub fn validate(&self) -> Result<()> {
        if self.ambient < 2 || self.coords.len() % self.ambient != 0 {
            return Err(Error::validation("mesh", "coordinate array does not match ambient dimension"));
        }
        let nv = self.n_vertices();
        if nv < 4 || self.faces.len() < 4 {
            return Err(Error::validation("mesh", "a closed surface needs at least 4 vertices and 4 faces"));
        }
        if self.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation("mesh", "non-finite vertex coordinate"));
        }
        let scale = self.scale();
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&i| i >= nv) {
                return Err(Error::validation(format!("face {fi}"), format!("vertex index out of range in {f:?}")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::validation(format!("face {fi}"), format!("repeated vertex in {f:?}")));
            }
            if self.face_area(f) <= 1e-12 * scale * scale {
                return Err(Error::validation(format!("face {fi}"), format!("degenerate triangle {f:?}")));
            }
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut bad: Vec<_> = edges.iter().filter(|(_, &c)| c != 2).collect();
        bad.sort();
        if let Some(((a, b), c)) = bad.first() {
            return Err(Error::validation(
                format!("edge ({a},{b})"),
                format!("edge shared by {c} triangles; a closed surface needs exactly 2"),
            ));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit icosphere: icosahedron subdivided `level` times, vertices projected to the sphere.
pub fn icosphere(level: usize) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let normalize = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    for v in verts.iter_mut() {
        *v = normalize(*v);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                m[k] = *mid.entry(key).or_insert_with(|| {
                    let (pa, pb) = (verts[a], verts[b]);
                    verts.push(normalize([
                        0.5 * (pa[0] + pb[0]),
                        0.5 * (pa[1] + pb[1]),
                        0.5 * (pa[2] + pb[2]),
                    ]));
                    verts.len() - 1
                });
            }
            next.push([f[0], m[0], m[2]]);
            next.push([f[1], m[1], m[0]]);
            next.push([f[2], m[2], m[1]]);
            next.push([m[0], m[1], m[2]]);
        }
        faces = next;
    }
    TriMesh {
        ambient: 3,
        coords: verts.into_iter().flatten().collect(),
        faces,
    }
}

/// Flat square torus of side `2π`, realized isometrically as the Clifford torus
/// `(cos u, sin u, cos v, sin v)` in `R^4` on an `n × n` grid.
pub fn clifford_torus(n: usize) -> TriMesh {
    assert!(n >= 3, "grid needs at least 3 points per direction");
    let mut coords = Vec::with_capacity(n * n * 4);
    for i in 0..n {
        for j in 0..n {
            let u = 2.0 * PI * i as f64 / n as f64;
            let v = 2.0 * PI * j as f64 / n as f64;
            coords.extend_from_slice(&[u.cos(), u.sin(), v.cos(), v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % n) * n + (j % n);
    let mut faces = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh { ambient: 4, coords, faces }
}

/// ASCII OFF with triangular faces only.
pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty OFF file".into(),
    })?;
    let mut counts_inline: Option<&str> = None;
    if let Some(rest) = header.strip_prefix("OFF") {
        if !rest.trim().is_empty() {
            counts_inline = Some(rest.trim());
        }
    } else {
        return Err(Error::Parse {
            line: ln,
            message: "missing OFF header".into(),
        });
    }
    let (cl, counts) = match counts_inline {
        Some(c) => (ln, c),
        None => lines.next().ok_or(Error::Parse {
            line: ln,
            message: "missing counts line".into(),
        })?,
    };
    let nums: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: cl,
            message: format!("bad counts line: {e}"),
        })?;
    if nums.len() < 2 {
        return Err(Error::Parse {
            line: cl,
            message: "counts line needs vertex and face counts".into(),
        });
    }
    let (nv, nf) = (nums[0], nums[1]);

    let mut coords = Vec::with_capacity(nv * 3);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or(Error::Parse {
            line: cl,
            message: format!("expected {nv} vertex lines"),
        })?;
        let xs: Vec<f64> = s
            .split_whitespace()
            .take(3)
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: l,
                message: format!("bad vertex: {e}"),
            })?;
        if xs.len() != 3 {
            return Err(Error::Parse {
                line: l,
                message: "vertex needs 3 coordinates".into(),
            });
        }
        coords.extend(xs);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or(Error::Parse {
            line: cl,
            message: format!("expected {nf} face lines"),
        })?;
        let idx: Vec<usize> = s
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: l,
                message: format!("bad face: {e}"),
            })?;
        if idx.len() < 4 || idx[0] != 3 {
            return Err(Error::Parse {
                line: l,
                message: "only triangular faces (\"3 i j k\") are supported".into(),
            });
        }
        faces.push([idx[1], idx[2], idx[3]]);
    }
    TriMesh::new(3, coords, faces)
}

pub fn read_off(path: &Path) -> Result<TriMesh> {
    parse_off(&std::fs::read_to_string(path)?)
}
