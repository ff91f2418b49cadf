//! Lines of `Q_p^{n+1}` truncated to precision `p^m`: primitive vectors
//! over `Z/p^m` up to unit scaling.

use std::fmt;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineClass {
    p: u64,
    precision: u32,
    coords: Vec<u64>,
}

impl LineClass {
    /// Normalizes `coords` so that its first unit coordinate is 1.
    pub fn new(p: u64, precision: u32, coords: &[u64]) -> Result<Self> {
        if precision == 0 {
            return Err(Error::Parameter("precision must be at least 1".into()));
        }
        let modulus = p
            .checked_pow(precision)
            .filter(|&m| m < 1 << 62)
            .ok_or(Error::Overflow("line precision"))?;
        let reduced: Vec<u64> = coords.iter().map(|x| x % modulus).collect();
        let Some(&unit) = reduced.iter().find(|&&x| x % p != 0) else {
            return Err(Error::Parameter(format!(
                "{coords:?} has no unit coordinate"
            )));
        };
        let inv = inverse(unit, modulus);
        let coords = reduced
            .iter()
            .map(|&x| ((u128::from(x) * u128::from(inv)) % u128::from(modulus)) as u64)
            .collect();
        Ok(Self {
            p,
            precision,
            coords,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// A lift to an integer vector with entries in `[0, p^m)`.
    pub fn lift(&self) -> Vec<i64> {
        self.coords.iter().map(|&x| x as i64).collect()
    }

    /// Image under `P^n(Z/p^m) → P^n(Z/p^{m'})` for `m' ≤ m`.
    pub fn reduce(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::Precision {
                required: precision,
                given: self.precision,
            });
        }
        Self::new(self.p, precision, &self.coords)
    }
}

impl fmt::Display for LineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (i128::from(a), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(i128::from(m)) as u64
}

/// Number of points of `P^n(Z/p^m)`: `p^{n(m-1)} (p^{n+1} - 1)/(p - 1)`.
pub fn line_count(p: u64, n: usize, precision: u32) -> u128 {
    let p = u128::from(p);
    p.pow(n as u32 * (precision - 1)) * (p.pow(n as u32 + 1) - 1) / (p - 1)
}

/// All normalized line classes of `P^n(Z/p^m)` in lexicographic order.
pub fn enumerate_lines(p: u64, n: usize, precision: u32) -> Result<Vec<LineClass>> {
    if precision == 0 {
        return Err(Error::Parameter("precision must be at least 1".into()));
    }
    let width = n + 1;
    let modulus = p
        .checked_pow(precision)
        .filter(|m| m.checked_pow(width as u32).is_some_and(|t| t <= 1 << 26))
        .ok_or_else(|| {
            Error::Parameter(format!(
                "P^{n}(Z/{p}^{precision}) is too large to enumerate"
            ))
        })?;
    let mut out = Vec::new();
    let mut v = vec![0u64; width];
    loop {
        if let Some(first) = v.iter().position(|&x| x % p != 0) {
            if v[first] == 1 {
                out.push(LineClass {
                    p,
                    precision,
                    coords: v.clone(),
                });
            }
        }
        let mut k = width;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            v[k] += 1;
            if v[k] < modulus {
                break;
            }
            v[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for (p, n, m) in [
            (2, 2, 1),
            (2, 2, 2),
            (3, 2, 1),
            (3, 2, 2),
            (2, 3, 2),
            (2, 2, 3),
        ] {
            assert_eq!(
                enumerate_lines(p, n, m).unwrap().len() as u128,
                line_count(p, n, m)
            );
        }
        assert_eq!(line_count(2, 2, 2), 28);
        assert_eq!(line_count(3, 2, 2), 117);
    }

    #[test]
    fn normalization() {
        let l = LineClass::new(3, 2, &[3, 2, 5]).unwrap();
        // 2^{-1} = 5 mod 9
        assert_eq!(l.coords(), &[6, 1, 7]);
        assert!(LineClass::new(3, 2, &[3, 6, 0]).is_err());
        assert_eq!(l.reduce(1).unwrap().coords(), &[0, 1, 1]);
        assert!(l.reduce(3).is_err());
    }

    #[test]
    fn enumeration_is_sorted_and_normalized() {
        let lines = enumerate_lines(3, 2, 2).unwrap();
        assert!(lines.windows(2).all(|w| w[0].coords() < w[1].coords()));
        for l in &lines {
            assert_eq!(&LineClass::new(3, 2, l.coords()).unwrap(), l);
        }
    }
}
