//! Small built-in complexes: annulus, ball, S²×I, T²×I, barycentric
//! subdivision and random glued assemblies.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::complex::{closure, SimplicialComplex, Simplex};

/// `K × [0, layers]` for a complex given by its top simplices on vertices
/// `0..nv`. Uses the staircase split, consistent across shared faces because
/// it only depends on the global vertex order. Returns the top simplices and
/// the two end copies.
pub fn product_with_interval(top: &[Simplex], nv: usize, layers: usize) -> (Vec<Simplex>, Vec<Simplex>, Vec<Simplex>) {
    let id = |v: usize, l: usize| l * nv + v;
    let mut out = Vec::new();
    for l in 0..layers {
        for s in top {
            let mut s = s.clone();
            s.sort_unstable();
            for j in 0..s.len() {
                let mut t: Simplex = s[..=j].iter().map(|&v| id(v, l)).collect();
                t.extend(s[j..].iter().map(|&v| id(v, l + 1)));
                out.push(t);
            }
        }
    }
    let bottom = top.iter().map(|s| s.iter().map(|&v| id(v, 0)).collect()).collect();
    let topc = top.iter().map(|s| s.iter().map(|&v| id(v, layers)).collect()).collect();
    (out, bottom, topc)
}

fn circle(k: usize) -> Vec<Simplex> {
    (0..k).map(|i| vec![i, (i + 1) % k]).collect()
}

fn tetra_boundary() -> Vec<Simplex> {
    vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
}

fn torus_grid(k: usize) -> Vec<Simplex> {
    let id = |i: usize, j: usize| (i % k) * k + (j % k);
    let mut t = Vec::new();
    for i in 0..k {
        for j in 0..k {
            t.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            t.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    t
}

fn build(top: Vec<Simplex>, mut bnd: Vec<Simplex>, more: Vec<Simplex>) -> SimplicialComplex {
    bnd.extend(more);
    SimplicialComplex::from_top(&top, &bnd).expect("generator produces a valid complex")
}

/// `S¹ × [0, layers]` with a `k`-gon circle; boundary is both circles.
pub fn annulus(k: usize, layers: usize) -> SimplicialComplex {
    assert!(k >= 3 && layers >= 1);
    let (top, a, b) = product_with_interval(&circle(k), k, layers);
    build(top, a, b)
}

/// `S² × [0, layers]` on the boundary of a tetrahedron.
pub fn sphere_shell(layers: usize) -> SimplicialComplex {
    assert!(layers >= 1);
    let (top, a, b) = product_with_interval(&tetra_boundary(), 4, layers);
    build(top, a, b)
}

/// `T² × [0, layers]` on a `k × k` torus grid.
pub fn torus_shell(k: usize, layers: usize) -> SimplicialComplex {
    assert!(k >= 3 && layers >= 1);
    let (top, a, b) = product_with_interval(&torus_grid(k), k * k, layers);
    build(top, a, b)
}

/// The cube `[0, m]³` cut into unit cubes, each split into six tetrahedra
/// (Kuhn triangulation); boundary is the surface of the cube.
pub fn ball(m: usize) -> SimplicialComplex {
    assert!(m >= 1);
    let w = m + 1;
    let id = |p: [usize; 3]| (p[0] * w + p[1]) * w + p[2];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut top = Vec::new();
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                for p in perms {
                    let mut cur = [x, y, z];
                    let mut t = vec![id(cur)];
                    for axis in p {
                        cur[axis] += 1;
                        t.push(id(cur));
                    }
                    top.push(t);
                }
            }
        }
    }
    let coord = |v: usize| [v / (w * w), (v / w) % w, v % w];
    let on_face = |t: &[usize]| {
        (0..3).any(|a| t.iter().all(|&v| coord(v)[a] == 0) || t.iter().all(|&v| coord(v)[a] == m))
    };
    let bnd: Vec<Simplex> = closure(&top).into_iter().filter(|s| s.len() == 3 && on_face(s)).collect();
    build(top, bnd, vec![])
}

/// A single vertex with itself as boundary.
pub fn point() -> SimplicialComplex {
    SimplicialComplex::new(&[vec![0]], &[vec![0]]).unwrap()
}

/// Barycentric subdivision; the boundary is subdivided along with it.
pub fn barycentric(c: &SimplicialComplex) -> SimplicialComplex {
    let all = c.all_simplices();
    let vid: BTreeMap<Simplex, usize> = all.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut chains: Vec<Simplex> = Vec::new();
    let mut bchains: Vec<Simplex> = Vec::new();
    // maximal chains below each simplex, built recursively over facets
    fn flags(s: &Simplex) -> Vec<Vec<Simplex>> {
        if s.len() == 1 {
            return vec![vec![s.clone()]];
        }
        let mut out = Vec::new();
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            for mut fl in flags(&f) {
                fl.push(s.clone());
                out.push(fl);
            }
        }
        out
    }
    for s in &all {
        for fl in flags(s) {
            let mut t: Simplex = fl.iter().map(|f| vid[f]).collect();
            t.sort_unstable();
            if c.is_boundary(s) {
                bchains.push(t.clone());
            }
            chains.push(t);
        }
    }
    SimplicialComplex::from_top(&chains, &bchains).expect("subdivision of a valid complex")
}

/// A piece for random assembly: top simplices, boundary components (each a
/// list of top boundary simplices), and interior vertices.
struct Piece {
    nv: usize,
    top: Vec<Simplex>,
    ends: Vec<Vec<Simplex>>,
}

fn piece(kind: usize, rng: &mut impl Rng) -> Piece {
    match kind {
        0 => {
            let k = rng.random_range(3..6);
            let (top, a, b) = product_with_interval(&circle(k), k, 2);
            Piece { nv: 3 * k, top, ends: vec![a, b] }
        }
        1 => {
            let (top, a, b) = product_with_interval(&tetra_boundary(), 4, 2);
            Piece { nv: 12, top, ends: vec![a, b] }
        }
        2 => {
            let (top, a, b) = product_with_interval(&torus_grid(3), 9, 2);
            Piece { nv: 27, top, ends: vec![a, b] }
        }
        _ => {
            let c = ball(2);
            let top = c.simplices(3).to_vec();
            let ends = vec![c.boundary_simplices(2)];
            Piece { nv: c.n_vertices, top, ends }
        }
    }
}

/// Random connected complex: 1–3 standard pieces joined by bridge edges
/// between interior vertices (extra bridges add loops), with a random
/// nonempty subset of the pieces' boundary components marked as boundary.
pub fn random_glued(rng: &mut impl Rng) -> SimplicialComplex {
    let count = rng.random_range(1..=3);
    let mut top: Vec<Simplex> = Vec::new();
    let mut ends: Vec<Vec<Simplex>> = Vec::new();
    let mut interiors: Vec<Vec<usize>> = Vec::new();
    let mut offset = 0;
    for _ in 0..count {
        let p = piece(rng.random_range(0..4), rng);
        let shift = |s: &Simplex| s.iter().map(|v| v + offset).collect::<Simplex>();
        let bverts: BTreeSet<usize> = p.ends.iter().flatten().flatten().map(|v| v + offset).collect();
        interiors.push((offset..offset + p.nv).filter(|v| !bverts.contains(v)).collect());
        top.extend(p.top.iter().map(shift));
        ends.extend(p.ends.iter().map(|e| e.iter().map(shift).collect()));
        offset += p.nv;
    }
    let bridge = |rng: &mut dyn rand::RngCore, a: &[usize], b: &[usize]| {
        let u = a[rng.random_range(0..a.len())];
        let v = b[rng.random_range(0..b.len())];
        vec![u.min(v), u.max(v)]
    };
    for i in 1..count {
        let j = rng.random_range(0..i);
        top.push(bridge(rng, &interiors[i], &interiors[j]));
    }
    for _ in 0..rng.random_range(0..3) {
        let i = rng.random_range(0..count);
        let j = rng.random_range(0..count);
        let e = bridge(rng, &interiors[i], &interiors[j]);
        if e[0] != e[1] {
            top.push(e);
        }
    }
    ends.shuffle(rng);
    let keep = rng.random_range(1..=ends.len());
    let bnd: Vec<Simplex> = ends.into_iter().take(keep).flatten().collect();
    SimplicialComplex::from_top(&top, &bnd).expect("glued complex is valid")
}
