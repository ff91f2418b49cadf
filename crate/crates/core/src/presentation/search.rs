//! Exhaustive search for tuple sets.
//!
//! For `n = 2` a valid tuple set is the same thing as an exact cover of the
//! arcs `a → b` (`b ⊂ λ(a)`) by cyclic triangles `a → b → c → a`: V3 says
//! every consecutive pair of a tuple is an arc, V5 says each arc starts
//! exactly one tuple, and V2 closes each triangle under rotation. A fixed
//! tuple `(a, a, a)` covers the loop `a → a` on its own.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{on_hyperplane, PresentationData, Tuple};
use crate::finite_geometry::{GeometryParams, ProjectiveGeometry};
use crate::{Error, Result};

fn check_scope(params: GeometryParams) -> Result<()> {
    if params.n() != 2 {
        return Err(Error::UnsupportedScope(format!(
            "tuple search is implemented for n = 2 only (got n = {})",
            params.n()
        )));
    }
    if !matches!(params.q(), 2 | 3) {
        return Err(Error::UnsupportedScope(format!(
            "tuple search is limited to q in {{2, 3}} (got q = {})",
            params.q()
        )));
    }
    Ok(())
}

/// Points on each hyperplane, ascending.
fn incidence(geometry: &ProjectiveGeometry) -> Vec<Vec<usize>> {
    let points = geometry.points().len();
    (0..geometry.hyperplanes().len())
        .map(|h| {
            (0..points)
                .filter(|&b| on_hyperplane(geometry, h, b))
                .collect()
        })
        .collect()
}

struct Arcs {
    id: Vec<Vec<Option<usize>>>,
    list: Vec<(usize, usize)>,
}

impl Arcs {
    fn new(lambda: &[usize], on: &[Vec<usize>]) -> Self {
        let mut id = vec![vec![None; lambda.len()]; lambda.len()];
        let mut list = Vec::new();
        for (a, &h) in lambda.iter().enumerate() {
            for &b in &on[h] {
                id[a][b] = Some(list.len());
                list.push((a, b));
            }
        }
        Self { id, list }
    }

    /// Arc ids covered by the triangle through arc `k` and the point `c`,
    /// or `None` if some side is not an arc.
    fn triangle(&self, k: usize, c: usize) -> Option<Vec<usize>> {
        let (a, b) = self.list[k];
        let bc = self.id[b][c]?;
        let ca = self.id[c][a]?;
        Some(if a == b && b == c {
            vec![k]
        } else {
            vec![k, bc, ca]
        })
    }
}

struct Cover<'a> {
    arcs: &'a Arcs,
    lambda: &'a [usize],
    on: &'a [Vec<usize>],
    covered: Vec<bool>,
    chosen: Vec<[usize; 3]>,
    found: Vec<Vec<[usize; 3]>>,
}

impl Cover<'_> {
    fn choices(&self, k: usize) -> Vec<(usize, Vec<usize>)> {
        let (_, b) = self.arcs.list[k];
        self.on[self.lambda[b]]
            .iter()
            .filter_map(|&c| self.arcs.triangle(k, c).map(|ids| (c, ids)))
            .filter(|(_, ids)| ids.iter().all(|&i| !self.covered[i]))
            .collect()
    }

    fn place(&mut self, k: usize, c: usize, ids: &[usize], on: bool) {
        for &i in ids {
            self.covered[i] = on;
        }
        if on {
            let (a, b) = self.arcs.list[k];
            self.chosen.push([a, b, c]);
        } else {
            self.chosen.pop();
        }
    }

    fn run(&mut self) {
        let Some(k) = self.covered.iter().position(|c| !c) else {
            self.found.push(self.chosen.clone());
            return;
        };
        for (c, ids) in self.choices(k) {
            self.place(k, c, &ids, true);
            self.run();
            self.place(k, c, &ids, false);
        }
    }
}

fn closure(triangles: &[[usize; 3]]) -> BTreeSet<Tuple> {
    let mut out = BTreeSet::new();
    for &[a, b, c] in triangles {
        out.insert(vec![a, b, c]);
        out.insert(vec![b, c, a]);
        out.insert(vec![c, a, b]);
    }
    out
}

/// Every tuple set compatible with `lambda`, in depth-first order
/// (smallest uncovered arc first, third point ascending).
pub fn search(params: GeometryParams, lambda: &[usize]) -> Result<Vec<PresentationData>> {
    check_scope(params)?;
    let geometry = ProjectiveGeometry::new(params);
    // Range checks come from the constructor.
    PresentationData::new(params, lambda.to_vec(), [])?;
    let distinct: BTreeSet<usize> = lambda.iter().copied().collect();
    if distinct.len() != lambda.len() {
        return Err(Error::Parameter("lambda is not a bijection".into()));
    }

    let on = incidence(&geometry);
    let arcs = Arcs::new(lambda, &on);
    let fresh = || Cover {
        arcs: &arcs,
        lambda,
        on: &on,
        covered: vec![false; arcs.list.len()],
        chosen: Vec::new(),
        found: Vec::new(),
    };
    let first = fresh().choices(0);
    let branches: Vec<Vec<Vec<[usize; 3]>>> = first
        .par_iter()
        .map(|(c, ids)| {
            let mut cover = fresh();
            cover.place(0, *c, ids, true);
            cover.run();
            cover.found
        })
        .collect();
    branches
        .into_iter()
        .flatten()
        .map(|triangles| PresentationData::new(params, lambda.to_vec(), closure(&triangles)))
        .collect()
}

/// Joint search over `λ` and the tuple set: `λ` values are assigned lazily
/// while covering arcs. Returns the first `λ` (in search order) that admits
/// at least one tuple set.
pub fn find_lambda(params: GeometryParams) -> Result<Option<Vec<usize>>> {
    check_scope(params)?;
    let geometry = ProjectiveGeometry::new(params);
    let on = incidence(&geometry);
    let points = on.len();
    let mut joint = Joint {
        on: &on,
        lambda: vec![None; points],
        used: vec![false; points],
        covered: vec![vec![false; points]; points],
    };
    Ok(joint
        .run()
        .then(|| joint.lambda.iter().map(|h| h.unwrap()).collect()))
}

struct Joint<'a> {
    on: &'a [Vec<usize>],
    lambda: Vec<Option<usize>>,
    used: Vec<bool>,
    covered: Vec<Vec<bool>>,
}

impl Joint<'_> {
    fn is_arc(&self, a: usize, b: usize) -> bool {
        self.lambda[a].is_some_and(|h| self.on[h].binary_search(&b).is_ok())
    }

    fn next_arc(&self) -> Option<(usize, usize)> {
        (0..self.lambda.len()).find_map(|a| {
            let h = self.lambda[a]?;
            self.on[h]
                .iter()
                .find(|&&b| !self.covered[a][b])
                .map(|&b| (a, b))
        })
    }

    /// Tries each unused hyperplane (optionally through `through`) as `λ(x)`.
    fn assign(
        &mut self,
        x: usize,
        through: Option<usize>,
        then: &mut dyn FnMut(&mut Self) -> bool,
    ) -> bool {
        for h in 0..self.used.len() {
            if self.used[h] || through.is_some_and(|a| self.on[h].binary_search(&a).is_err()) {
                continue;
            }
            self.lambda[x] = Some(h);
            self.used[h] = true;
            if then(self) {
                return true;
            }
            self.lambda[x] = None;
            self.used[h] = false;
        }
        false
    }

    fn run(&mut self) -> bool {
        let Some((a, b)) = self.next_arc() else {
            return match self.lambda.iter().position(Option::is_none) {
                None => true,
                Some(x) => self.assign(x, None, &mut |s| s.run()),
            };
        };
        if self.lambda[b].is_none() {
            return self.assign(b, None, &mut |s| s.run());
        }
        let candidates = self.on[self.lambda[b].unwrap()].clone();
        for c in candidates {
            if self.covered[b][c] && !(a == b && b == c) {
                continue;
            }
            if self.lambda[c].is_none() {
                if self.assign(c, Some(a), &mut |s| s.close(a, b, c)) {
                    return true;
                }
            } else if self.close(a, b, c) {
                return true;
            }
        }
        false
    }

    /// Covers the triangle `a → b → c → a` if its sides are free arcs.
    fn close(&mut self, a: usize, b: usize, c: usize) -> bool {
        let sides: Vec<(usize, usize)> = if a == b && b == c {
            vec![(a, a)]
        } else {
            vec![(a, b), (b, c), (c, a)]
        };
        if sides
            .iter()
            .any(|&(x, y)| !self.is_arc(x, y) || self.covered[x][y])
        {
            return false;
        }
        for &(x, y) in &sides {
            self.covered[x][y] = true;
        }
        if self.run() {
            return true;
        }
        for &(x, y) in &sides {
            self.covered[x][y] = false;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::validate;

    #[test]
    fn scope() {
        let p3 = GeometryParams::new(3, 2).unwrap();
        assert!(matches!(
            search(p3, &[0; 15]),
            Err(Error::UnsupportedScope(_))
        ));
        assert!(matches!(find_lambda(p3), Err(Error::UnsupportedScope(_))));
        let p5 = GeometryParams::new(2, 5).unwrap();
        assert!(matches!(find_lambda(p5), Err(Error::UnsupportedScope(_))));
    }

    #[test]
    fn q2_search_finds_valid_sets() {
        let params = GeometryParams::new(2, 2).unwrap();
        let lambda = find_lambda(params)
            .unwrap()
            .expect("some lambda admits tuples");
        let sets = search(params, &lambda).unwrap();
        assert!(!sets.is_empty());
        for s in &sets {
            assert_eq!(s.tuples().len(), 21);
            assert!(validate(s).is_valid(), "{}", validate(s));
        }
        assert_eq!(search(params, &lambda).unwrap(), sets);
    }

    #[test]
    fn non_bijection_rejected() {
        let params = GeometryParams::new(2, 2).unwrap();
        assert!(matches!(search(params, &[0; 7]), Err(Error::Parameter(_))));
    }
}
