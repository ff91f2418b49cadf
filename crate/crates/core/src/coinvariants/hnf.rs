use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// The integer row lattice of a matrix, held in row Hermite normal form:
/// echelon rows with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowLattice {
    cols: usize,
    basis: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl RowLattice {
    pub fn new(m: &IntMatrix) -> Self {
        let cols = m.cols();
        let mut rows = m.to_rows();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..cols {
            loop {
                let Some(best) = (top..rows.len())
                    .filter(|&i| !rows[i][col].is_zero())
                    .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()).then(a.cmp(&b)))
                else {
                    break;
                };
                rows.swap(top, best);
                let mut clean = true;
                for i in top + 1..rows.len() {
                    if rows[i][col].is_zero() {
                        continue;
                    }
                    let q = rows[i][col].div_floor(&rows[top][col]);
                    let pivot_row = rows[top].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                    clean &= rows[i][col].is_zero();
                }
                if !clean {
                    continue;
                }
                if rows[top][col].is_negative() {
                    for x in rows[top].iter_mut() {
                        *x = -&*x;
                    }
                }
                let pivot_row = rows[top].clone();
                for row in rows.iter_mut().take(top) {
                    let q = row[col].div_floor(&pivot_row[col]);
                    if !q.is_zero() {
                        for (x, y) in row.iter_mut().zip(&pivot_row) {
                            *x -= &q * y;
                        }
                    }
                }
                pivots.push(col);
                top += 1;
                break;
            }
        }
        rows.truncate(top);
        Self {
            cols,
            basis: rows,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Whether `v` is an integer combination of the rows.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.cols);
        let mut v = v.to_vec();
        let mut next = 0;
        for col in 0..self.cols {
            if self.pivots.get(next) == Some(&col) {
                let row = &self.basis[next];
                let (q, r) = v[col].div_rem(&row[col]);
                if !r.is_zero() {
                    return false;
                }
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &q * y;
                }
                next += 1;
            } else if !v[col].is_zero() {
                return false;
            }
        }
        true
    }

    /// Whether `v` lies in the rational span of the rows.
    pub fn spans(&self, v: &[BigInt]) -> bool {
        let mut m = IntMatrix::from_rows_with_cols(&self.basis, self.cols);
        m = m.stack(&IntMatrix::from_rows_with_cols(&[v.to_vec()], self.cols));
        RowLattice::new(&m).rank() == self.rank()
    }
}
