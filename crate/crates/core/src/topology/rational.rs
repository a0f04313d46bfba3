//! Exact elimination over `Q` on sparse rows.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;
pub type SparseRow = BTreeMap<usize, Q>;

pub fn q(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

/// Row echelon form built incrementally: each stored row has a distinct leading
/// column and a leading coefficient of one.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots; keeps it if something survives.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        while let Some((&lead, _)) = row.iter().next() {
            match self.pivots.get(&lead) {
                Some(p) => {
                    let f = row[&lead].clone();
                    axpy(&mut row, &f, p);
                }
                None => {
                    let inv = row[&lead].recip();
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
        false
    }

    /// Basis of the null space `{v : A v = 0}` of the inserted rows, `ncols` wide.
    pub fn kernel_basis(&self, ncols: usize) -> Vec<SparseRow> {
        // back-substitute to reduced form, last pivot first
        let mut reduced: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&lead, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            let later: Vec<usize> = r.keys().copied().filter(|&c| c != lead && reduced.contains_key(&c)).collect();
            for c in later {
                if let Some(f) = r.get(&c).cloned() {
                    axpy(&mut r, &f, &reduced[&c]);
                }
            }
            reduced.insert(lead, r);
        }
        let mut basis = Vec::new();
        for free in (0..ncols).filter(|c| !reduced.contains_key(c)) {
            let mut v = SparseRow::new();
            v.insert(free, Q::one());
            for (&lead, r) in &reduced {
                if let Some(x) = r.get(&free) {
                    v.insert(lead, -x.clone());
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// `row -= f · p`, dropping exact zeros.
fn axpy(row: &mut SparseRow, f: &Q, p: &SparseRow) {
    for (c, pv) in p {
        let e = row.entry(*c).or_insert_with(Q::zero);
        *e -= f * pv;
        if e.is_zero() {
            row.remove(c);
        }
    }
}

pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}
