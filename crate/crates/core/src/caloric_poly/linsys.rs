//! Sparse exact row reduction over the rationals.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Sparse row: column index -> nonzero coefficient.
pub type SparseRow = BTreeMap<usize, BigRational>;

/// Row-echelon basis built incrementally; rows are normalized so the leading
/// coefficient is one.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    /// leading column -> normalized row
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Reduces `row` against the current pivots and keeps it if independent.
    /// Returns whether the rank grew.
    pub fn push(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, _)) = row.iter().next() else { return false };
            match self.pivots.get(&lead) {
                Some(pivot) => {
                    let factor = row[&lead].clone();
                    for (c, v) in pivot {
                        let entry = row.entry(*c).or_insert_with(BigRational::zero);
                        *entry -= &factor * v;
                        if entry.is_zero() {
                            row.remove(c);
                        }
                    }
                }
                None => {
                    let inv = BigRational::one() / &row[&lead];
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    /// Basis of the null space `{v : A v = 0}`, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<BigRational>> {
        // back-substitute into reduced echelon form, last pivot first
        let mut reduced: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&lead, row) in self.pivots.iter().rev() {
            let mut row = row.clone();
            let later: Vec<usize> = row.keys().copied().filter(|c| *c != lead).collect();
            for c in later {
                if let Some(other) = reduced.get(&c) {
                    let Some(factor) = row.get(&c).cloned() else { continue };
                    for (k, v) in other {
                        let entry = row.entry(*k).or_insert_with(BigRational::zero);
                        *entry -= &factor * v;
                        if entry.is_zero() {
                            row.remove(k);
                        }
                    }
                }
            }
            reduced.insert(lead, row);
        }
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.ncols];
                v[f] = BigRational::one();
                for (&lead, row) in &reduced {
                    if let Some(c) = row.get(&f) {
                        v[lead] = -c.clone();
                    }
                }
                v
            })
            .collect()
    }
}
