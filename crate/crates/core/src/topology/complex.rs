use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

pub type Simplex = Vec<usize>;

/// Finite simplicial complex of dimension at most 3 with a distinguished
/// boundary subcomplex. Simplices are sorted vertex tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    pub n_vertices: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    in_boundary: Vec<Vec<bool>>,
}

fn normalize(s: &[usize], what: &str) -> Result<Simplex> {
    let mut v = s.to_vec();
    v.sort_unstable();
    if v.is_empty() {
        return Err(Error::validation(what, "empty simplex"));
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::validation(what, format!("repeated vertex in simplex {s:?}")));
    }
    if v.len() > MAX_DIM + 1 {
        return Err(Error::validation(what, format!("simplex {s:?} exceeds dimension {MAX_DIM}")));
    }
    Ok(v)
}

/// All faces of codimension one.
pub fn facets(s: &[usize]) -> impl Iterator<Item = (usize, Simplex)> + '_ {
    (0..s.len()).filter(move |_| s.len() > 1).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (i, f)
    })
}

/// Adds every face of every listed simplex.
pub fn closure(top: &[Simplex]) -> Vec<Simplex> {
    let mut set: BTreeSet<Simplex> = BTreeSet::new();
    let mut stack: Vec<Simplex> = top
        .iter()
        .map(|s| {
            let mut v = s.clone();
            v.sort_unstable();
            v
        })
        .collect();
    while let Some(s) = stack.pop() {
        if set.insert(s.clone()) {
            for (_, f) in facets(&s) {
                stack.push(f);
            }
        }
    }
    set.into_iter().collect()
}

impl SimplicialComplex {
    /// Builds and validates: every face listed, boundary a face-closed subset.
    pub fn new(simplices: &[Simplex], boundary: &[Simplex]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); MAX_DIM + 1];
        for (i, s) in simplices.iter().enumerate() {
            let v = normalize(s, &format!("simplex {i}"))?;
            by_dim[v.len() - 1].insert(v);
        }
        let simplices: Vec<Vec<Simplex>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let index: Vec<HashMap<Simplex, usize>> = simplices
            .iter()
            .map(|l| l.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        if simplices[0].is_empty() {
            return Err(Error::validation("complex", "no vertices"));
        }
        for k in 1..=MAX_DIM {
            for s in &simplices[k] {
                for (_, f) in facets(s) {
                    if !index[k - 1].contains_key(&f) {
                        return Err(Error::validation(
                            format!("face {f:?}"),
                            format!("face {f:?} of simplex {s:?} is missing"),
                        ));
                    }
                }
            }
        }
        let n_vertices = simplices[0].iter().map(|s| s[0]).max().unwrap() + 1;
        let mut in_boundary: Vec<Vec<bool>> = simplices.iter().map(|l| vec![false; l.len()]).collect();
        for (i, s) in boundary.iter().enumerate() {
            let v = normalize(s, &format!("boundary simplex {i}"))?;
            let k = v.len() - 1;
            match index[k].get(&v) {
                Some(&j) => in_boundary[k][j] = true,
                None => {
                    return Err(Error::validation(
                        format!("boundary simplex {i}"),
                        format!("boundary simplex {v:?} is not in the complex"),
                    ))
                }
            }
        }
        let c = Self {
            n_vertices,
            simplices,
            index,
            in_boundary,
        };
        for k in 1..=MAX_DIM {
            for (j, s) in c.simplices[k].iter().enumerate() {
                if !c.in_boundary[k][j] {
                    continue;
                }
                for (_, f) in facets(s) {
                    if !c.is_boundary(&f) {
                        return Err(Error::validation(
                            format!("face {f:?}"),
                            format!("face {f:?} of boundary simplex {s:?} is missing from the boundary"),
                        ));
                    }
                }
            }
        }
        Ok(c)
    }

    /// Closes `top` and `boundary_top` under faces before building.
    pub fn from_top(top: &[Simplex], boundary_top: &[Simplex]) -> Result<Self> {
        Self::new(&closure(top), &closure(boundary_top))
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.simplices.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn dim(&self) -> usize {
        (0..=MAX_DIM).rev().find(|&k| self.count(k) > 0).unwrap_or(0)
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().wrapping_sub(1))?.get(s).copied()
    }

    pub fn is_boundary(&self, s: &[usize]) -> bool {
        let k = s.len() - 1;
        self.index_of(s).map(|j| self.in_boundary[k][j]).unwrap_or(false)
    }

    pub fn is_boundary_at(&self, k: usize, j: usize) -> bool {
        self.in_boundary[k][j]
    }

    pub fn boundary_simplices(&self, k: usize) -> Vec<Simplex> {
        self.simplices(k)
            .iter()
            .zip(&self.in_boundary[k])
            .filter(|(_, &b)| b)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn boundary_is_empty(&self) -> bool {
        self.in_boundary.iter().all(|l| l.iter().all(|b| !b))
    }

    /// Every simplex, lowest dimension first.
    pub fn all_simplices(&self) -> Vec<Simplex> {
        self.simplices.iter().flatten().cloned().collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=MAX_DIM).map(|k| if k % 2 == 0 { 1 } else { -1 } * self.count(k) as i64).sum()
    }
}
