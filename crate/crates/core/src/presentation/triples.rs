use std::collections::BTreeSet;

use super::validate::validate_with;
use super::PresentationData;
use crate::finite_geometry::ProjectiveGeometry;
use crate::{Error, Result};

/// A neighbour of the base vertex, named by the subspace of the residue
/// space it corresponds to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PiVertex {
    pub dim: usize,
    pub index: usize,
}

impl PiVertex {
    pub fn new(dim: usize, index: usize) -> Self {
        Self { dim, index }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TripleSet {
    /// `(u, v, w)` with `g_u g_v g_w = 1`.
    pub triples: BTreeSet<[PiVertex; 3]>,
    /// `(u, λ(u))`, i.e. `g_u g_{λ(u)} = 1`.
    pub inverse_pairs: BTreeSet<[PiVertex; 2]>,
    /// Modulus for the type-sum rule, `n + 1`.
    pub modulus: usize,
}

impl TripleSet {
    pub fn is_cyclically_closed(&self) -> bool {
        self.triples
            .iter()
            .all(|&[u, v, w]| self.triples.contains(&[v, w, u]))
            && self
                .inverse_pairs
                .iter()
                .all(|&[u, v]| self.inverse_pairs.contains(&[v, u]))
    }

    /// First triple or pair whose dimensions do not sum to `0 mod (n+1)`.
    pub fn type_sum_violation(&self) -> Option<Vec<PiVertex>> {
        let bad = |vs: &[PiVertex]| vs.iter().map(|v| v.dim).sum::<usize>() % self.modulus != 0;
        self.triples
            .iter()
            .map(|t| t.to_vec())
            .chain(self.inverse_pairs.iter().map(|p| p.to_vec()))
            .find(|vs| bad(vs))
    }
}

/// Reconstructs the triple relations of the original presentation that
/// are visible from the tuple set.
///
/// For `n = 2` and a tuple `(a_1, a_2, a_3)`, `g_{a_1} g_{a_2} g_{a_3} = 1`
/// is itself a triple of points. Splitting after the first entry, the word
/// `g_{a_2} g_{a_3}` is the line generator `g_{λ(a_1)}`, and splitting after
/// the second, `g_{a_1} g_{a_2} = g_{λ(a_3)}`; both splits give inverse
/// pairs. Inverting the relation with `g_a^{-1} = g_{λ(a)}` gives the
/// all-line triple `(λ(a_3), λ(a_2), λ(a_1))`.
pub fn derive_triples(data: &PresentationData) -> Result<TripleSet> {
    let params = data.params();
    if params.n() != 2 {
        return Err(Error::UnsupportedScope(format!(
            "triple derivation needs intermediate-rank lambda, implemented for n = 2 only (got n = {})",
            params.n()
        )));
    }
    let geometry = ProjectiveGeometry::new(params);
    let report = validate_with(&geometry, data);
    if let Some(fail) = report.failures().next() {
        return Err(Error::Validation(format!(
            "{}: {}",
            fail.id,
            fail.witness.as_deref().unwrap_or_default()
        )));
    }
    let lambda = data.lambda();
    let point = |a: usize| PiVertex::new(1, a);
    let line = |a: usize| PiVertex::new(2, lambda[a]);
    let mut out = TripleSet {
        modulus: params.width(),
        ..TripleSet::default()
    };
    for t in data.tuples() {
        let (a1, a2, a3) = (t[0], t[1], t[2]);
        out.triples.insert([point(a1), point(a2), point(a3)]);
        out.triples.insert([line(a3), line(a2), line(a1)]);
        out.inverse_pairs.insert([point(a1), line(a1)]);
        out.inverse_pairs.insert([line(a3), point(a3)]);
    }
    Ok(out)
}
