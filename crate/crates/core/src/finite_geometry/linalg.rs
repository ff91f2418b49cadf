//! Dense linear algebra over the prime field `F_q`.

pub(crate) fn inv_mod(a: u32, q: u32) -> u32 {
    // q is prime, so a^(q-2) is the inverse.
    let mut base = u64::from(a % q);
    let mut exp = q - 2;
    let mut acc = 1u64;
    let m = u64::from(q);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as u32
}

/// Reduces `rows` (each of length `width`) to reduced row-echelon form in
/// place, drops zero rows and returns the pivot columns.
pub(crate) fn rref(rows: &mut Vec<Vec<u32>>, width: usize, q: u32) -> Vec<usize> {
    let m = u64::from(q);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = u64::from(inv_mod(rows[r][col], q));
        for x in rows[r].iter_mut() {
            *x = (u64::from(*x) * inv % m) as u32;
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col] == 0 {
                continue;
            }
            let f = u64::from(rows[i][col]);
            for j in 0..width {
                let sub = f * u64::from(rows[r][j]) % m;
                rows[i][j] = ((u64::from(rows[i][j]) + m - sub) % m) as u32;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub(crate) fn rank(rows: &[Vec<u32>], width: usize, q: u32) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work, width, q).len()
}

/// Basis (in RREF) of `{x : r · x = 0 for every row r}`.
pub(crate) fn null_space(rows: &[Vec<u32>], width: usize, q: u32) -> Vec<Vec<u32>> {
    let mut work = rows.to_vec();
    let pivots = rref(&mut work, width, q);
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![0u32; width];
        v[f] = 1;
        for (row, &pc) in work.iter().zip(&pivots) {
            v[pc] = (q - row[f] % q) % q;
        }
        basis.push(v);
    }
    rref(&mut basis, width, q);
    basis
}
