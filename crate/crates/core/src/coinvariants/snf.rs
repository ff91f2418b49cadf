use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;
use crate::{Error, Result};

/// `U · M · V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfCertificate {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SnfCertificate {
    /// Diagonal of `D`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Re-checks the certificate against `m` from scratch.
    pub fn verify(&self, m: &IntMatrix) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("Smith form certificate: {what}")));
        if self.u.rows() != m.rows() || self.v.cols() != m.cols() {
            return fail("shape mismatch");
        }
        if self.u.mul(m).mul(&self.v) != self.d {
            return fail("U·M·V ≠ D");
        }
        if !self.u.determinant().abs().is_one() || !self.v.determinant().abs().is_one() {
            return fail("transform is not unimodular");
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d[(i, j)].is_zero() {
                    return fail("D is not diagonal");
                }
            }
        }
        let diag = self.diagonal();
        if diag.iter().any(Signed::is_negative) {
            return fail("negative diagonal entry");
        }
        for w in diag.windows(2) {
            let ok = if w[0].is_zero() {
                w[1].is_zero()
            } else {
                w[1].is_multiple_of(&w[0])
            };
            if !ok {
                return fail("divisibility chain broken");
            }
        }
        Ok(())
    }
}

/// Position of the smallest nonzero `|entry|` among `cells`, ties to the
/// first in iteration order (callers iterate in `(row, column)` order).
fn min_pivot(d: &IntMatrix, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let x = d[(i, j)].abs();
        if x.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| x < *b) {
            best = Some(((i, j), x));
        }
    }
    best.map(|(pos, _)| pos)
}

/// Smith normal form with transforms; the certificate is verified by exact
/// re-multiplication and determinants before it is returned.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SnfCertificate> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let block = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j)));
        let Some((pi, pj)) = min_pivot(&d, block) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            for i in t + 1..rows {
                if !d[(i, t)].is_zero() {
                    let q = -d[(i, t)].div_floor(&d[(t, t)]);
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                }
            }
            for j in t + 1..cols {
                if !d[(t, j)].is_zero() {
                    let q = -d[(t, j)].div_floor(&d[(t, t)]);
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                }
            }
            // A remainder smaller than the pivot becomes the new pivot.
            let cross = (t + 1..rows)
                .map(|i| (i, t))
                .chain((t + 1..cols).map(|j| (t, j)));
            if let Some((i, j)) = min_pivot(&d, cross) {
                if i != t {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                } else {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                }
                continue;
            }
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    let cert = SnfCertificate { u, v, d };
    cert.verify(m)?;
    Ok(cert)
}
