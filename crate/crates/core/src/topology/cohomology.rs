use serde::{Deserialize, Serialize};

use super::complex::{facets, SimplicialComplex, MAX_DIM};
use super::rational::{q, rank, Echelon, SparseRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub dim_h1: usize,
    pub dim_h1c: usize,
    pub rank_i: usize,
    pub s: usize,
    pub betti: Vec<usize>,
    pub simplex_counts: Vec<usize>,
    pub euler_characteristic: i64,
}

/// Rows of `∂_k` restricted to simplices selected by `keep`: one sparse row
/// per (k−1)-simplex, columns indexed by k-simplices.
fn boundary_rows(c: &SimplicialComplex, k: usize, keep: impl Fn(usize, usize) -> bool) -> Vec<SparseRow> {
    let mut rows: Vec<SparseRow> = vec![SparseRow::new(); c.count(k - 1)];
    for (j, s) in c.simplices(k).iter().enumerate() {
        if !keep(k, j) {
            continue;
        }
        for (i, f) in facets(s) {
            let r = c.index_of(&f).expect("validated complex");
            if keep(k - 1, r) {
                rows[r].insert(j, q(if i % 2 == 0 { 1 } else { -1 }));
            }
        }
    }
    rows
}

fn boundary_rank(c: &SimplicialComplex, k: usize, keep: impl Fn(usize, usize) -> bool) -> usize {
    if k == 0 || k > MAX_DIM {
        return 0;
    }
    rank(boundary_rows(c, k, keep))
}

/// `dim H_k(X; Q) = dim H^k(X; Q)`.
pub fn betti(c: &SimplicialComplex, k: usize) -> Result<usize> {
    if k > MAX_DIM {
        return Err(Error::Argument(format!("degree must be at most {MAX_DIM}, got {k}")));
    }
    let all = |_: usize, _: usize| true;
    Ok(c.count(k) - boundary_rank(c, k, all) - boundary_rank(c, k + 1, all))
}

fn require_boundary(c: &SimplicialComplex) -> Result<()> {
    if c.boundary_is_empty() {
        return Err(Error::validation("boundary", "boundary subcomplex is empty"));
    }
    Ok(())
}

/// `dim H¹(X, ∂X; Q)` from the relative chain complex (simplices off the boundary).
pub fn relative_h1(c: &SimplicialComplex) -> Result<usize> {
    require_boundary(c)?;
    let interior = |k: usize, j: usize| !c.is_boundary_at(k, j);
    let edges = (0..c.count(1)).filter(|&j| interior(1, j)).count();
    Ok(edges - boundary_rank(c, 1, interior) - boundary_rank(c, 2, interior))
}

/// Connected components of the boundary subcomplex.
pub fn ends_count(c: &SimplicialComplex) -> Result<usize> {
    require_boundary(c)?;
    let n = c.n_vertices;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in c.boundary_simplices(1) {
        let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut roots: Vec<usize> = c
        .boundary_simplices(0)
        .iter()
        .map(|v| find(&mut parent, v[0]))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

/// Rank of `H¹(X, ∂X) → H¹(X)`: relative cocycles extended by zero, counted
/// modulo all coboundaries.
pub fn rank_i(c: &SimplicialComplex) -> Result<usize> {
    require_boundary(c)?;
    let ne = c.count(1);
    let interior_edges: Vec<usize> = (0..ne).filter(|&j| !c.is_boundary_at(1, j)).collect();
    let mut col_of = vec![usize::MAX; ne];
    for (i, &e) in interior_edges.iter().enumerate() {
        col_of[e] = i;
    }

    // relative δ¹: one row per interior triangle, columns = interior edges
    let mut cocycle = Echelon::new();
    for (t, s) in c.simplices(2).iter().enumerate() {
        if c.is_boundary_at(2, t) {
            continue;
        }
        let mut row = SparseRow::new();
        for (i, f) in facets(s) {
            let e = c.index_of(&f).expect("validated complex");
            if col_of[e] != usize::MAX {
                row.insert(col_of[e], q(if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        cocycle.insert(row);
    }
    let z1 = cocycle.kernel_basis(interior_edges.len());

    // δ⁰ images: the vertex rows of ∂₁
    let coboundaries = boundary_rows(c, 1, |_, _| true);
    let mut span = Echelon::new();
    for r in coboundaries {
        span.insert(r);
    }
    let b1 = span.rank();
    for z in z1 {
        span.insert(z.into_iter().map(|(col, v)| (interior_edges[col], v)).collect());
    }
    Ok(span.rank() - b1)
}

/// Everything the moduli formulas need, with the exact-sequence check
/// `dim H¹_c = rank i + s − 1`.
pub fn cohomology_report(c: &SimplicialComplex) -> Result<CohomologyReport> {
    require_boundary(c)?;
    let betti: Vec<usize> = (0..=MAX_DIM).map(|k| betti(c, k)).collect::<Result<_>>()?;
    if betti[0] != 1 {
        return Err(Error::validation(
            "complex",
            format!("complex must be connected, found {} components", betti[0]),
        ));
    }
    let dim_h1c = relative_h1(c)?;
    let rank_i = rank_i(c)?;
    let s = ends_count(c)?;
    if dim_h1c != rank_i + s - 1 {
        return Err(Error::Internal(format!(
            "exact sequence violated: dim H1_c = {dim_h1c} but rank i + s - 1 = {rank_i} + {s} - 1"
        )));
    }
    let euler = c.euler_characteristic();
    let alt: i64 = betti
        .iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    if alt != euler {
        return Err(Error::Internal(format!(
            "Euler characteristic mismatch: simplices give {euler}, Betti numbers give {alt}"
        )));
    }
    Ok(CohomologyReport {
        dim_h1: betti[1],
        dim_h1c,
        rank_i,
        s,
        simplex_counts: (0..=MAX_DIM).map(|k| c.count(k)).collect(),
        betti,
        euler_characteristic: euler,
    })
}
