//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's linear algebra.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Nonzero vectors of `F_q^w` whose first nonzero entry is 1.
pub fn normalized_vectors(w: usize, q: u32) -> Vec<Vec<u32>> {
    let total = (q as usize).pow(w as u32);
    let mut out = Vec::new();
    for code in 1..total {
        let mut v = vec![0u32; w];
        let mut c = code;
        for slot in v.iter_mut().rev() {
            *slot = (c % q as usize) as u32;
            c /= q as usize;
        }
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

pub fn dot(a: &[u32], b: &[u32], q: u32) -> u32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<u32>() % q
}

/// Rank over `F_p` by plain Gaussian elimination.
pub fn rank_mod(rows: &[Vec<u64>], p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x % p).collect())
        .collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = (1..p).find(|&y| a[rank][c] * y % p == 1).unwrap();
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + p * p - f * a[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `v` (mod `p`) lies in the span of `basis` over `F_p`.
pub fn in_span_mod(v: &[u64], basis: &[Vec<u64>], p: u64) -> bool {
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    rank_mod(&with, p) == rank_mod(basis, p)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Determinant by cofactor expansion.
pub fn det_laplace(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * det_laplace(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .filter(|&j| m[0][j] != 0)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det_i128(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Smith diagonal from determinantal divisors: `d_k = D_k / D_{k-1}` with
/// `D_k` the gcd of all `k × k` minors. Zero-padded to `min(rows, cols)`.
pub fn determinantal_diagonal(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| i128::from(m[i][j])).collect())
                    .collect();
                g = gcd(g, det_i128(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out.resize(rows.min(cols), 0);
    out
}

/// Smith diagonal by elementary operations with the first nonzero entry as
/// pivot and Euclidean row/column steps; no transforms are kept.
pub fn naive_smith_diagonal(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .find(|&(i, j)| a[i][j] != 0)
        else {
            break;
        };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        // Every swap strictly shrinks |a[t][t]|, so this terminates.
        loop {
            for i in t + 1..rows {
                while a[i][t] != 0 {
                    let q = a[i][t] / a[t][t];
                    for j in 0..cols {
                        a[i][j] -= q * a[t][j];
                    }
                    if a[i][t] != 0 {
                        a.swap(t, i);
                    }
                }
            }
            for j in t + 1..cols {
                while a[t][j] != 0 {
                    let q = a[t][j] / a[t][t];
                    for r in a.iter_mut() {
                        r[j] -= q * r[t];
                    }
                    if a[t][j] != 0 {
                        for r in a.iter_mut() {
                            r.swap(t, j);
                        }
                    }
                }
            }
            if (t + 1..rows).any(|i| a[i][t] != 0) {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % a[t][t] != 0));
            match bad {
                Some(i) => {
                    for j in 0..cols {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out.resize(rows.min(cols), 0);
    out
}

pub fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn is_unit(x: &BigInt) -> bool {
    x.abs() == BigInt::from(1)
}
