//! Lattices in `Q_p^{n+1}` contained in the standard lattice `Z_p^{n+1}`,
//! kept in a canonical column-Hermite form.
//!
//! A lattice is stored as an upper-triangular integer matrix `T` whose
//! columns generate it over `Z_p`: the diagonal entry of column `i` is
//! `p^{e_i}` and every entry above the diagonal in row `i` lies in
//! `[0, p^{e_i})`. This form is unique, so two lattices are equal iff their
//! matrices are identical.
//!
//! Every lattice of index `p^k` contains `p^k Z_p^{n+1}`, so all reductions
//! run modulo `p^k` (or `p^{k+1}` for residue coordinates) in `i128`. The
//! modulus is bounded by `2^62` at construction; larger lattices are
//! rejected with [`Error::Overflow`].

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

const MODULUS_LIMIT: i128 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    p: u64,
    size: usize,
    /// Row-major canonical matrix.
    entries: Vec<i64>,
    exponents: Vec<u32>,
}

impl Lattice {
    /// The standard lattice `Z_p^{size}`.
    pub fn standard(p: u64, size: usize) -> Self {
        let mut entries = vec![0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1;
        }
        Self {
            p,
            size,
            entries,
            exponents: vec![0; size],
        }
    }

    /// The diagonal lattice with the given exponents.
    pub fn diagonal(p: u64, exponents: &[u32]) -> Result<Self> {
        let size = exponents.len();
        let mut m = vec![vec![0i64; size]; size];
        for (i, &e) in exponents.iter().enumerate() {
            m[i][i] = checked_pow(p, e)? as i64;
        }
        canonical_lattice(p, &m)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.size + col]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.size)
            .map(<[i64]>::to_vec)
            .collect()
    }

    pub fn column(&self, col: usize) -> Vec<i64> {
        (0..self.size).map(|r| self.entry(r, col)).collect()
    }

    /// Exponents `e_i` of the diagonal entries `p^{e_i}`.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// `v_p(det)`, i.e. `log_p [Z_p^{n+1} : L]`.
    pub fn det_valuation(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn modulus(&self) -> i128 {
        i128::from(self.p).pow(self.det_valuation())
    }

    /// Smallest `k` with `p^k Z_p^{n+1} ⊆ L`, the largest elementary
    /// divisor exponent.
    pub fn depth(&self) -> u32 {
        let mut k = 0;
        loop {
            let pk = i128::from(self.p).pow(k);
            let all = (0..self.size).all(|i| {
                let mut v = vec![0i128; self.size];
                v[i] = pk;
                self.solve(&v, self.modulus()).is_some()
            });
            if all {
                return k;
            }
            k += 1;
        }
    }

    /// Back-substitution of `T c = v`, reducing the residual modulo
    /// `modulus` after every step. `None` when `v` is not in the lattice.
    fn solve(&self, v: &[i128], modulus: i128) -> Option<Vec<i128>> {
        let w = self.size;
        let mut rest: Vec<i128> = v.iter().map(|x| x.rem_euclid(modulus)).collect();
        let mut coeffs = vec![0i128; w];
        for r in (0..w).rev() {
            let pivot = i128::from(self.p).pow(self.exponents[r]);
            if rest[r] % pivot != 0 {
                return None;
            }
            let c = rest[r] / pivot;
            coeffs[r] = c;
            for (i, x) in rest.iter_mut().enumerate().take(r + 1) {
                let t = i128::from(self.entry(i, r));
                *x = (*x - c * t).rem_euclid(modulus);
            }
        }
        Some(coeffs)
    }

    pub fn contains_vector(&self, v: &[i64]) -> bool {
        let v: Vec<i128> = v.iter().map(|&x| i128::from(x)).collect();
        self.solve(&v, self.modulus().max(1)).is_some()
    }

    /// Whether `p^shift · v ∈ L`.
    pub(crate) fn contains_scaled_vector(&self, v: &[i64], shift: u32) -> bool {
        let m = self.modulus().max(1);
        let factor = i128::from(self.p).pow(shift.min(self.det_valuation()));
        let v: Vec<i128> = v
            .iter()
            .map(|&x| (i128::from(x) * factor).rem_euclid(m))
            .collect();
        self.solve(&v, m).is_some()
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Lattice) -> bool {
        self.contains_scaled(other, 0)
    }

    /// Whether `p^shift · other ⊆ self`.
    pub fn contains_scaled(&self, other: &Lattice, shift: u32) -> bool {
        (0..other.size).all(|j| self.contains_scaled_vector(&other.column(j), shift))
    }

    /// Coordinates of `v ∈ L` in the canonical basis, reduced mod `p`; this
    /// is the image of `v` in `L / pL ≅ F_p^{n+1}`.
    pub fn residue_coordinates(&self, v: &[i64]) -> Option<Vec<u32>> {
        let m = self.modulus() * i128::from(self.p);
        let v: Vec<i128> = v.iter().map(|&x| i128::from(x)).collect();
        let c = self.solve(&v, m)?;
        Some(
            c.into_iter()
                .map(|x| x.rem_euclid(i128::from(self.p)) as u32)
                .collect(),
        )
    }

    /// Integer vector `Σ coeffs_i · t_i` over the canonical columns.
    pub fn combine(&self, coeffs: &[u32]) -> Vec<i64> {
        let mut out = vec![0i64; self.size];
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o += i64::from(c) * self.entry(r, j);
            }
        }
        out
    }

    /// `p · L`.
    pub fn scaled_up(&self) -> Result<Lattice> {
        let p = self.p as i64;
        checked_pow(self.p, self.det_valuation() + self.size as u32)?;
        Ok(Lattice {
            p: self.p,
            size: self.size,
            entries: self.entries.iter().map(|x| x * p).collect(),
            exponents: self.exponents.iter().map(|e| e + 1).collect(),
        })
    }

    /// `p^{-1} · L` when it is still inside the standard lattice.
    pub fn scaled_down(&self) -> Option<Lattice> {
        let p = self.p as i64;
        if self.entries.iter().any(|x| x % p != 0) {
            return None;
        }
        Some(Lattice {
            p: self.p,
            size: self.size,
            entries: self.entries.iter().map(|x| x / p).collect(),
            exponents: self.exponents.iter().map(|e| e - 1).collect(),
        })
    }

    /// `L + Σ Z_p v` for the given integer vectors.
    pub fn sum_with(&self, vectors: &[Vec<i64>]) -> Result<Lattice> {
        let mut gens: Vec<Vec<i128>> = (0..self.size)
            .map(|j| self.column(j).into_iter().map(i128::from).collect())
            .collect();
        for v in vectors {
            if v.len() != self.size {
                return Err(Error::Parameter(format!(
                    "vector of length {} for a rank-{} lattice",
                    v.len(),
                    self.size
                )));
            }
            gens.push(v.iter().map(|&x| i128::from(x)).collect());
        }
        hermite(self.p, self.size, gens, self.det_valuation())
    }
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    let v = p.checked_pow(e).ok_or(Error::Overflow("lattice modulus"))?;
    if i128::from(v) >= MODULUS_LIMIT {
        return Err(Error::Overflow("lattice modulus"));
    }
    Ok(v)
}

/// Canonical form of the `Z_p`-lattice generated by the columns of `m`.
///
/// Integers prime to `p` are units, so any nonsingular integer matrix
/// generates a lattice of index `p^{v_p(det m)}` inside `Z_p^{n+1}`.
pub fn canonical_lattice(p: u64, m: &[Vec<i64>]) -> Result<Lattice> {
    if !crate::is_prime(p) {
        return Err(Error::Parameter(format!("p = {p} is not prime")));
    }
    let size = m.len();
    if size == 0 || m.iter().any(|row| row.len() != size) {
        return Err(Error::Parameter(
            "lattice basis must be a nonempty square matrix".into(),
        ));
    }
    let det = bareiss_det(m);
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let k = valuation(&det, p);
    let gens: Vec<Vec<i128>> = (0..size)
        .map(|j| m.iter().map(|row| i128::from(row[j])).collect())
        .collect();
    let lattice = hermite(p, size, gens, k)?;
    if lattice.det_valuation() != k {
        return Err(Error::Internal(format!(
            "hermite form has index p^{} but det has valuation {k}",
            lattice.det_valuation()
        )));
    }
    Ok(lattice)
}

/// Echelon reduction of `gens` modulo `p^k`, valid whenever the generated
/// lattice contains `p^k Z_p^{size}`.
fn hermite(p: u64, size: usize, gens: Vec<Vec<i128>>, k: u32) -> Result<Lattice> {
    if k == 0 {
        return Ok(Lattice::standard(p, size));
    }
    let q = i128::from(checked_pow(p, k)?);
    let pi = i128::from(p);
    let val = |x: i128| -> u32 {
        if x == 0 {
            return k;
        }
        let mut x = x;
        let mut v = 0;
        while x % pi == 0 {
            x /= pi;
            v += 1;
        }
        v
    };

    let mut cols: Vec<Vec<i128>> = gens
        .into_iter()
        .map(|c| c.into_iter().map(|x| x.rem_euclid(q)).collect::<Vec<_>>())
        .filter(|c| c.iter().any(|&x| x != 0))
        .collect();
    let mut pivots: Vec<Vec<i128>> = vec![Vec::new(); size];
    let mut exponents = vec![0u32; size];

    for row in (0..size).rev() {
        let best = cols.iter().enumerate().map(|(i, c)| (val(c[row]), i)).min();
        match best {
            Some((v, idx)) if v < k => {
                let mut pivot = cols.swap_remove(idx);
                let pv = pi.pow(v);
                let unit = pivot[row] / pv;
                let inv = inverse_mod(unit, q);
                for x in pivot.iter_mut() {
                    *x = (*x * inv).rem_euclid(q);
                }
                for c in cols.iter_mut() {
                    if c[row] == 0 {
                        continue;
                    }
                    let f = c[row] / pv;
                    for (x, y) in c.iter_mut().zip(&pivot) {
                        *x = (*x - f * y).rem_euclid(q);
                    }
                }
                let shifted: Vec<i128> = pivot
                    .iter()
                    .map(|&x| (x * pi.pow(k - v)).rem_euclid(q))
                    .collect();
                cols.push(shifted);
                cols.retain(|c| c.iter().any(|&x| x != 0));
                exponents[row] = v;
                pivots[row] = pivot;
            }
            _ => {
                let mut pivot = vec![0i128; size];
                pivot[row] = q;
                exponents[row] = k;
                pivots[row] = pivot;
            }
        }
    }

    // pivots[j] is column j; clear entries above each diagonal.
    for j in 0..size {
        for i in (0..j).rev() {
            let d = pi.pow(exponents[i]);
            let f = pivots[j][i].div_euclid(d);
            if f != 0 {
                let (left, right) = pivots.split_at_mut(j);
                for (x, y) in right[0].iter_mut().zip(&left[i]).take(i + 1) {
                    *x -= f * y;
                }
            }
        }
    }

    let mut entries = vec![0i64; size * size];
    for (j, col) in pivots.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            entries[i * size + j] = x as i64;
        }
    }
    Ok(Lattice {
        p,
        size,
        entries,
        exponents,
    })
}

fn inverse_mod(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    debug_assert_eq!(old_r, 1, "pivot is not a unit");
    old_s.rem_euclid(m)
}

fn valuation(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

/// Exact determinant by fraction-free elimination.
pub(crate) fn bareiss_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}
