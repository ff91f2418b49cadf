//! Tuple-set presentations of Ã_n groups.
//!
//! A presentation is a bijection `λ` from points to hyperplanes of
//! `PG(n, q)` together with a set of `(n+1)`-tuples of points, one tuple
//! per complete flag and closed under cyclic rotation. The group has one
//! generator per point and one relation `g_{a_1} ⋯ g_{a_{n+1}} = 1` per tuple.

mod format;
mod search;
mod triples;
pub(crate) mod validate;

use std::collections::{BTreeMap, BTreeSet};

use crate::finite_geometry::{gaussian_binomial, GeometryParams, ProjectiveGeometry};
use crate::{Error, Result};

pub use format::{load, parse, save, to_text, FORMAT_TAG};
pub use search::{find_lambda, search};
pub use triples::{derive_triples, PiVertex, TripleSet};
pub use validate::{validate, CheckResult, ValidationReport};

pub type Tuple = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationData {
    params: GeometryParams,
    lambda: Vec<usize>,
    tuples: BTreeSet<Tuple>,
}

impl PresentationData {
    /// Checks index ranges, tuple lengths and duplicates; semantic checks
    /// are left to [`validate`].
    pub fn new(
        params: GeometryParams,
        lambda: Vec<usize>,
        tuples: impl IntoIterator<Item = Tuple>,
    ) -> Result<Self> {
        let points = point_count(params);
        if lambda.len() != points {
            return Err(Error::Parameter(format!(
                "lambda has {} entries, expected {points}",
                lambda.len()
            )));
        }
        if let Some(&bad) = lambda.iter().find(|&&h| h >= points) {
            return Err(Error::IndexOutOfRange {
                field: "lambda".into(),
                value: bad,
                limit: points,
            });
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != params.width() {
                return Err(Error::Parameter(format!(
                    "tuple {t:?} has length {}, expected {}",
                    t.len(),
                    params.width()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&a| a >= points) {
                return Err(Error::IndexOutOfRange {
                    field: "S".into(),
                    value: bad,
                    limit: points,
                });
            }
            if !set.insert(t.clone()) {
                return Err(Error::DuplicateTuple(t));
            }
        }
        Ok(Self {
            params,
            lambda,
            tuples: set,
        })
    }

    pub fn params(&self) -> GeometryParams {
        self.params
    }

    /// `lambda[i]` is the hyperplane index of `λ(point_i)`.
    pub fn lambda(&self) -> &[usize] {
        &self.lambda
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    /// Cyclic-orbit size → number of orbits of that size.
    pub fn orbit_profile(&self) -> BTreeMap<usize, usize> {
        let mut seen = BTreeSet::new();
        let mut profile = BTreeMap::new();
        for t in &self.tuples {
            if seen.contains(t) {
                continue;
            }
            let mut orbit = BTreeSet::new();
            for r in 0..t.len() {
                orbit.insert(rotate(t, r));
            }
            *profile.entry(orbit.len()).or_insert(0) += 1;
            seen.extend(orbit);
        }
        profile
    }
}

/// `|Π_1| = |Π_n| = (q^{n+1} - 1)/(q - 1)`.
pub fn point_count(params: GeometryParams) -> usize {
    gaussian_binomial(params.width() as u32, 1, params.q()) as usize
}

pub(crate) fn rotate(t: &[usize], r: usize) -> Tuple {
    let k = t.len();
    (0..k).map(|i| t[(i + r) % k]).collect()
}

/// Whether point `b` lies on the hyperplane with index `h`.
pub(crate) fn on_hyperplane(geometry: &ProjectiveGeometry, h: usize, b: usize) -> bool {
    geometry.contains(&geometry.hyperplanes()[h], &geometry.points()[b])
}

fn check_geometry(geometry: &ProjectiveGeometry, params: GeometryParams) -> Result<()> {
    if geometry.params() != params {
        return Err(Error::Parameter(format!(
            "geometry PG({}, {}) does not match presentation PG({}, {})",
            geometry.params().n(),
            geometry.params().q(),
            params.n(),
            params.q()
        )));
    }
    Ok(())
}

/// Relabels a presentation by the collineation `x ↦ A x` of `PG(n, q)`:
/// tuples are mapped pointwise and `λ` is conjugated, `λ' = Â ∘ λ ∘ A^{-1}`.
pub fn apply_collineation(
    geometry: &ProjectiveGeometry,
    data: &PresentationData,
    matrix: &[Vec<u32>],
) -> Result<PresentationData> {
    check_geometry(geometry, data.params)?;
    let q = geometry.params().q();
    let w = geometry.params().width();
    let apply = |v: &[u32]| -> Vec<u32> {
        (0..w)
            .map(|i| (0..w).map(|j| matrix[i][j] * v[j]).sum::<u32>() % q)
            .collect()
    };
    let image = |s: &crate::finite_geometry::Subspace| -> Result<usize> {
        let rows: Vec<Vec<u32>> = s.basis().iter().map(|r| apply(r)).collect();
        geometry
            .span(&rows)
            .filter(|t| t.dim() == s.dim())
            .map(|t| t.index())
            .ok_or_else(|| Error::Parameter("matrix is not invertible over F_q".into()))
    };
    let points: Vec<usize> = geometry.points().iter().map(image).collect::<Result<_>>()?;
    let hyperplanes: Vec<usize> = geometry
        .hyperplanes()
        .iter()
        .map(image)
        .collect::<Result<_>>()?;
    let mut lambda = vec![0; points.len()];
    for (a, &h) in data.lambda.iter().enumerate() {
        lambda[points[a]] = hyperplanes[h];
    }
    let tuples = data
        .tuples
        .iter()
        .map(|t| t.iter().map(|&a| points[a]).collect::<Tuple>());
    PresentationData::new(data.params, lambda, tuples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> GeometryParams {
        GeometryParams::new(2, 2).unwrap()
    }

    #[test]
    fn constructor_checks_ranges() {
        let lambda: Vec<usize> = (0..7).collect();
        assert!(matches!(
            PresentationData::new(params(), vec![0; 6], []),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            PresentationData::new(params(), vec![0, 1, 2, 3, 4, 5, 7], []),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            PresentationData::new(params(), lambda.clone(), [vec![0, 1, 9]]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            PresentationData::new(params(), lambda.clone(), [vec![0, 1, 2], vec![0, 1, 2]]),
            Err(Error::DuplicateTuple(_))
        ));
        assert!(matches!(
            PresentationData::new(params(), lambda, [vec![0, 1]]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn orbit_profile_counts_fixed_tuples() {
        let lambda: Vec<usize> = (0..7).collect();
        let d = PresentationData::new(
            params(),
            lambda,
            [vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1], vec![3, 3, 3]],
        )
        .unwrap();
        let profile = d.orbit_profile();
        assert_eq!(profile.get(&3), Some(&1));
        assert_eq!(profile.get(&1), Some(&1));
    }
}
