//! The residue geometry `PG(n, q)`: subspaces of `F_q^{n+1}` in canonical
//! reduced row-echelon form, their incidence, and complete flags.
//!
//! Every proper nonzero subspace of dimension `r` carries an index: its
//! position in the lexicographic order of all `r`-dimensional RREF basis
//! matrices (rows concatenated, most significant entry first). These
//! indices are the reference numbering for presentation files and
//! relation matrices.

pub(crate) mod linalg;

use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::{is_prime, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeometryParams {
    n: usize,
    q: u32,
}

impl GeometryParams {
    pub fn new(n: usize, q: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "dimension parameter n = {n} must be >= 2"
            )));
        }
        if !is_prime(u64::from(q)) || q > 251 {
            return Err(Error::Parameter(format!(
                "q = {q} must be a prime below 256"
            )));
        }
        Ok(Self { n, q })
    }

    /// Bypasses the `n >= 2` requirement; for degenerate checks of the
    /// projective line only.
    #[cfg(test)]
    pub(crate) fn degenerate(n: usize, q: u32) -> Self {
        Self { n, q }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Dimension `n + 1` of the ambient space `k^{n+1}`.
    pub fn width(&self) -> usize {
        self.n + 1
    }
}

/// A proper nonzero subspace of `F_q^{n+1}` with its canonical index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    dim: usize,
    index: usize,
    basis: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// RREF basis rows.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }
}

/// Result of intersecting two subspaces: zero is kept apart from
/// [`Subspace`], whose dimension is always in `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Zero,
    Nonzero(Subspace),
}

impl Intersection {
    pub fn is_zero(&self) -> bool {
        matches!(self, Intersection::Zero)
    }
}

/// Complete flag `v_1 ⊂ v_2 ⊂ … ⊂ v_n` with `dim v_i = i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chamber {
    flag: Vec<Subspace>,
}

impl Chamber {
    pub fn flag(&self) -> &[Subspace] {
        &self.flag
    }

    pub fn indices(&self) -> Vec<usize> {
        self.flag.iter().map(Subspace::index).collect()
    }
}

/// `[m choose r]_q` from the product formula.
pub fn gaussian_binomial(m: u32, r: u32, q: u32) -> u128 {
    if r > m {
        return 0;
    }
    let q = u128::from(q);
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..r {
        num *= q.pow(m - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

/// Number of complete flags of `F_q^{n+1}`: `∏_{k=1}^{n} (q^{k+1} - 1)/(q - 1)`.
pub fn flag_count(n: u32, q: u32) -> u128 {
    let q = u128::from(q);
    (1..=n).map(|k| (q.pow(k + 1) - 1) / (q - 1)).product()
}

/// Tables of all proper nonzero subspaces of `F_q^{n+1}`.
#[derive(Clone, Debug)]
pub struct ProjectiveGeometry {
    params: GeometryParams,
    tables: Vec<Vec<Subspace>>,
    lookup: HashMap<Vec<Vec<u32>>, (usize, usize)>,
}

impl ProjectiveGeometry {
    pub fn new(params: GeometryParams) -> Self {
        let width = params.width();
        let mut tables = Vec::with_capacity(params.n);
        let mut lookup = HashMap::new();
        for r in 1..=params.n {
            let mut bases = rref_matrices(width, r, params.q);
            bases.sort();
            let table: Vec<Subspace> = bases
                .into_iter()
                .enumerate()
                .map(|(index, basis)| Subspace {
                    dim: r,
                    index,
                    basis,
                })
                .collect();
            for s in &table {
                lookup.insert(s.basis.clone(), (r, s.index));
            }
            tables.push(table);
        }
        Self {
            params,
            tables,
            lookup,
        }
    }

    pub fn params(&self) -> GeometryParams {
        self.params
    }

    /// All `r`-dimensional subspaces in canonical order.
    pub fn subspaces(&self, r: usize) -> Result<&[Subspace]> {
        if r == 0 || r > self.params.n {
            return Err(Error::Parameter(format!(
                "subspace dimension {r} outside 1..={}",
                self.params.n
            )));
        }
        Ok(&self.tables[r - 1])
    }

    pub fn points(&self) -> &[Subspace] {
        &self.tables[0]
    }

    pub fn hyperplanes(&self) -> &[Subspace] {
        &self.tables[self.params.n - 1]
    }

    pub fn subspace(&self, r: usize, index: usize) -> Option<&Subspace> {
        self.tables.get(r.checked_sub(1)?)?.get(index)
    }

    /// Canonical subspace spanned by `vectors` (entries reduced mod q).
    /// Returns `None` for the zero space and for the whole space.
    pub fn span(&self, vectors: &[Vec<u32>]) -> Option<&Subspace> {
        let q = self.params.q;
        let width = self.params.width();
        let mut rows: Vec<Vec<u32>> = vectors
            .iter()
            .map(|v| v.iter().map(|x| x % q).collect())
            .collect();
        linalg::rref(&mut rows, width, q);
        let &(r, index) = self.lookup.get(&rows)?;
        self.subspace(r, index)
    }

    /// Whether `small ⊆ big`.
    pub fn contains(&self, big: &Subspace, small: &Subspace) -> bool {
        if small.dim > big.dim {
            return false;
        }
        let mut rows = big.basis.clone();
        rows.extend(small.basis.iter().cloned());
        linalg::rank(&rows, self.params.width(), self.params.q) == big.dim
    }

    /// Incidence in the link: one of `u`, `v` contains the other.
    pub fn incident(&self, u: &Subspace, v: &Subspace) -> Result<bool> {
        if u == v {
            return Err(Error::Parameter(
                "incidence is defined for distinct subspaces".into(),
            ));
        }
        Ok(self.contains(u, v) || self.contains(v, u))
    }

    pub fn intersect(&self, u: &Subspace, v: &Subspace) -> Intersection {
        let (q, width) = (self.params.q, self.params.width());
        let mut ann = linalg::null_space(&u.basis, width, q);
        ann.extend(linalg::null_space(&v.basis, width, q));
        let meet = linalg::null_space(&ann, width, q);
        if meet.is_empty() {
            return Intersection::Zero;
        }
        let s = self
            .span(&meet)
            .expect("intersection of proper subspaces is proper")
            .clone();
        Intersection::Nonzero(s)
    }

    /// The annihilator of `u` under the standard bilinear form.
    pub fn dual(&self, u: &Subspace) -> &Subspace {
        let ns = linalg::null_space(&u.basis, self.params.width(), self.params.q);
        self.span(&ns)
            .expect("annihilator of a proper subspace is proper")
    }

    /// Number of points off a hyperplane, computed for every hyperplane;
    /// fails if the count depends on the hyperplane.
    pub fn count_points_off_hyperplane(&self) -> Result<usize> {
        let mut counts = self.hyperplanes().iter().map(|h| {
            self.points()
                .iter()
                .filter(|b| self.intersect(b, h).is_zero())
                .count()
        });
        let first = counts.next().unwrap_or(0);
        if let Some(other) = counts.find(|&c| c != first) {
            return Err(Error::Internal(format!(
                "points off a hyperplane vary: {first} vs {other}"
            )));
        }
        Ok(first)
    }

    /// All complete flags, ordered lexicographically by their index lists.
    pub fn chambers(&self) -> Vec<Chamber> {
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(self.params.n);
        self.extend_flags(&mut stack, &mut out);
        out
    }

    fn extend_flags(&self, stack: &mut Vec<Subspace>, out: &mut Vec<Chamber>) {
        let next = stack.len() + 1;
        if next > self.params.n {
            out.push(Chamber {
                flag: stack.clone(),
            });
            return;
        }
        for s in &self.tables[next - 1] {
            if stack.last().is_none_or(|prev| self.contains(s, prev)) {
                stack.push(s.clone());
                self.extend_flags(stack, out);
                stack.pop();
            }
        }
    }

    /// Builds a chamber from a list of subspaces, checking dimensions and nesting.
    pub fn chamber(&self, flag: &[Subspace]) -> Result<Chamber> {
        if flag.len() != self.params.n {
            return Err(Error::IncompleteFlag(format!(
                "expected {} subspaces, got {}",
                self.params.n,
                flag.len()
            )));
        }
        for (i, s) in flag.iter().enumerate() {
            if s.dim != i + 1 {
                return Err(Error::IncompleteFlag(format!(
                    "position {i} has dimension {}",
                    s.dim
                )));
            }
            if i > 0 && !self.contains(s, &flag[i - 1]) {
                return Err(Error::IncompleteFlag(format!(
                    "subspace at position {} does not contain its predecessor",
                    i
                )));
            }
        }
        Ok(Chamber {
            flag: flag.to_vec(),
        })
    }

    /// Canonical index table: `index<TAB>dim<TAB>entries`, dims ascending.
    pub fn export_table(&self) -> String {
        let mut out = String::new();
        for table in &self.tables {
            for s in table {
                let entries: Vec<String> = s
                    .basis
                    .iter()
                    .flat_map(|row| row.iter().map(u32::to_string))
                    .collect();
                let _ = writeln!(out, "{}\t{}\t{}", s.index, s.dim, entries.join(" "));
            }
        }
        out
    }

    /// SHA-256 of [`export_table`](Self::export_table), hex encoded.
    pub fn checksum(&self) -> String {
        let digest = Sha256::digest(self.export_table().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// All `r × width` RREF matrices over `F_q` of full rank `r`.
fn rref_matrices(width: usize, r: usize, q: u32) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(r);
    pivot_sets(width, r, 0, &mut pivots, &mut |piv| {
        let free: Vec<(usize, usize)> = (0..r)
            .flat_map(|i| {
                (piv[i] + 1..width)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let total = (q as usize).pow(free.len() as u32);
        for mut code in 0..total {
            let mut m = vec![vec![0u32; width]; r];
            for (i, &c) in piv.iter().enumerate() {
                m[i][c] = 1;
            }
            for &(i, c) in free.iter().rev() {
                m[i][c] = (code % q as usize) as u32;
                code /= q as usize;
            }
            out.push(m);
        }
    });
    out
}

fn pivot_sets(
    width: usize,
    r: usize,
    start: usize,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if current.len() == r {
        visit(current);
        return;
    }
    for c in start..width {
        current.push(c);
        pivot_sets(width, r, c + 1, current, visit);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(n: usize, q: u32) -> ProjectiveGeometry {
        ProjectiveGeometry::new(GeometryParams::new(n, q).unwrap())
    }

    /// Brute force: distinct spans of all r-tuples of vectors.
    fn brute_force_count(n: usize, q: u32, r: usize) -> usize {
        let width = n + 1;
        let vectors: Vec<Vec<u32>> = (0..(q as usize).pow(width as u32))
            .map(|mut c| {
                (0..width)
                    .map(|_| {
                        let x = (c % q as usize) as u32;
                        c /= q as usize;
                        x
                    })
                    .collect()
            })
            .collect();
        let mut seen = std::collections::HashSet::new();
        let mut idx = vec![0usize; r];
        loop {
            let mut rows: Vec<Vec<u32>> = idx.iter().map(|&i| vectors[i].clone()).collect();
            let piv = linalg::rref(&mut rows, width, q);
            if piv.len() == r {
                seen.insert(rows);
            }
            let mut k = 0;
            loop {
                if k == r {
                    return seen.len();
                }
                idx[k] += 1;
                if idx[k] < vectors.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(geom(2, 2).subspaces(1).unwrap().len(), 7);
        assert_eq!(geom(2, 3).subspaces(1).unwrap().len(), 13);
        assert_eq!(geom(2, 2).subspaces(2).unwrap().len(), 7);
        assert_eq!(brute_force_count(2, 2, 2), 7);
        assert_eq!(brute_force_count(2, 3, 2), 13);
        assert_eq!(brute_force_count(3, 2, 2), 35);
    }

    #[test]
    fn gaussian_binomial_matches_enumeration() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let g = geom(n, q);
            for r in 1..=n {
                assert_eq!(
                    g.subspaces(r).unwrap().len() as u128,
                    gaussian_binomial(n as u32 + 1, r as u32, q),
                    "n={n} q={q} r={r}"
                );
            }
        }
    }

    #[test]
    fn dimension_out_of_range_is_rejected() {
        let g = geom(2, 2);
        assert!(matches!(g.subspaces(0), Err(Error::Parameter(_))));
        assert!(matches!(g.subspaces(3), Err(Error::Parameter(_))));
    }

    #[test]
    fn params_validate() {
        assert!(GeometryParams::new(1, 2).is_err());
        assert!(GeometryParams::new(2, 4).is_err());
        assert!(GeometryParams::new(2, 5).is_ok());
    }

    #[test]
    fn index_round_trip() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let g = geom(n, q);
            for r in 1..=n {
                for s in g.subspaces(r).unwrap() {
                    let back = g.span(s.basis()).unwrap();
                    assert_eq!(back, s);
                    assert_eq!(g.subspace(r, s.index()).unwrap(), s);
                }
            }
        }
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let g = geom(2, 3);
        let pts = g.points();
        assert_eq!(pts[0].basis(), &[vec![0, 0, 1]]);
        assert_eq!(pts[12].basis(), &[vec![1, 2, 2]]);
        assert!(pts.windows(2).all(|w| w[0].basis() < w[1].basis()));
    }

    #[test]
    fn incidence_examples() {
        let g = geom(2, 2);
        let p = g.span(&[vec![1, 0, 0]]).unwrap().clone();
        let line = g.span(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap().clone();
        let other = g.span(&[vec![0, 1, 0]]).unwrap().clone();
        assert!(g.incident(&p, &line).unwrap());
        assert!(g.incident(&line, &p).unwrap());
        assert!(!g.incident(&p, &other).unwrap());
        assert!(g.incident(&p, &p).is_err());
        for pt in g.points() {
            let lines = g.hyperplanes().iter().filter(|l| g.contains(l, pt)).count();
            assert_eq!(lines, 3);
        }
    }

    #[test]
    fn intersection_examples() {
        let g = geom(2, 3);
        let lines = g.hyperplanes();
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                match g.intersect(a, b) {
                    Intersection::Nonzero(p) => {
                        assert_eq!(p.dim(), 1);
                        assert!(g.contains(a, &p) && g.contains(b, &p));
                    }
                    Intersection::Zero => panic!("two lines of a projective plane meet"),
                }
            }
        }
        let p = &g.points()[0];
        let l = lines.iter().find(|l| g.contains(l, p)).unwrap();
        assert_eq!(g.intersect(p, l), Intersection::Nonzero(p.clone()));
        let off = lines.iter().find(|l| !g.contains(l, p)).unwrap();
        assert!(g.intersect(p, off).is_zero());
    }

    #[test]
    fn points_off_hyperplane() {
        assert_eq!(geom(2, 2).count_points_off_hyperplane().unwrap(), 4);
        assert_eq!(geom(2, 3).count_points_off_hyperplane().unwrap(), 9);
        assert_eq!(geom(3, 2).count_points_off_hyperplane().unwrap(), 8);
    }

    #[test]
    fn chamber_counts() {
        assert_eq!(geom(2, 2).chambers().len(), 21);
        assert_eq!(geom(2, 3).chambers().len(), 52);
        assert_eq!(geom(3, 2).chambers().len() as u128, flag_count(3, 2));
        let line = ProjectiveGeometry::new(GeometryParams::degenerate(1, 2));
        assert_eq!(line.chambers().len(), 3);
    }

    #[test]
    fn chamber_constructor_checks_flags() {
        let g = geom(2, 2);
        let c = &g.chambers()[0];
        assert_eq!(&g.chamber(c.flag()).unwrap(), c);
        assert!(matches!(
            g.chamber(&c.flag()[..1]),
            Err(Error::IncompleteFlag(_))
        ));
        let p = g
            .points()
            .iter()
            .find(|p| !g.contains(&c.flag()[1], p))
            .unwrap();
        let bad = vec![p.clone(), c.flag()[1].clone()];
        assert!(matches!(g.chamber(&bad), Err(Error::IncompleteFlag(_))));
    }

    #[test]
    fn duality_reverses_incidence() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let g = geom(n, q);
            for r in 1..=n {
                let table = g.subspaces(r).unwrap();
                let mut images: Vec<usize> = Vec::new();
                for s in table {
                    let d = g.dual(s);
                    assert_eq!(d.dim(), n + 1 - r);
                    assert_eq!(g.dual(d), s);
                    images.push(d.index());
                }
                images.sort_unstable();
                images.dedup();
                assert_eq!(images.len(), table.len());
            }
            for u in g.points() {
                for v in g.hyperplanes() {
                    assert_eq!(g.contains(v, u), g.contains(g.dual(u), g.dual(v)));
                }
            }
        }
    }

    #[test]
    fn export_table_format() {
        let g = geom(2, 2);
        let table = g.export_table();
        assert_eq!(table.lines().count(), 14);
        assert_eq!(table.lines().next().unwrap(), "0\t1\t0 0 1");
        assert_eq!(g.checksum().len(), 64);
    }
}
