//! Exhaustive checks that boundary sets `Ω(e)` partition `P^n` as the
//! three partition identities predict, at a fixed line precision.

use rayon::prelude::*;

use super::{edges_from, omega_contains, ChamberChain, DirectedEdge, LatticeClass, LineClass};
use crate::finite_geometry::{ProjectiveGeometry, Subspace};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionKind {
    /// `P^n = ⊔_{o(e) = ξ} Ω(e)`.
    Vertex,
    /// `Ω(e) = ⊔ Ω(e')` over successors `e'` with `Ω(e') ⊂ Ω(e)`.
    Successors,
    /// `P^n = ⊔_i Ω(e_i)` over the `E¹` edges of a chamber.
    Chamber,
}

impl PartitionKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PartitionKind::Vertex => "vertex-partition",
            PartitionKind::Successors => "successor-partition",
            PartitionKind::Chamber => "chamber-partition",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Block {
    pub edge: DirectedEdge,
    /// Residue point labelling the edge, when the edge leaves a vertex
    /// through a point of its residue space.
    pub point: Option<Subspace>,
    /// Indices into [`PartitionReport::universe`].
    pub members: Vec<usize>,
}

/// Outcome of the successor-criterion sweep behind the successor-partition check.
#[derive(Clone, Debug)]
pub struct SuccessorCheck {
    /// `q^n`.
    pub expected: usize,
    /// The hyperplane `(p^{-1} L_0) / L_1` in the residue space at `t(e)`.
    pub hyperplane: Subspace,
    /// Points `b` at `t(e)` whose edge satisfies `Ω(e') ⊂ Ω(e)`.
    pub contained: Vec<usize>,
    /// Points whose `Ω(e')` meets both `Ω(e)` and its complement.
    pub partial: Vec<usize>,
    /// Points whose `Ω(e')` is empty at this precision.
    pub empty: Vec<usize>,
    /// Points where containment disagrees with `b ∩ H = (0)`.
    pub criterion_mismatches: Vec<usize>,
}

impl SuccessorCheck {
    pub fn is_exact(&self) -> bool {
        self.contained.len() == self.expected
            && self.partial.is_empty()
            && self.empty.is_empty()
            && self.criterion_mismatches.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct PartitionReport {
    pub kind: PartitionKind,
    pub precision: u32,
    /// The set being partitioned, in lexicographic order.
    pub universe: Vec<LineClass>,
    pub blocks: Vec<Block>,
    pub uncovered: Vec<usize>,
    pub multiply_covered: Vec<usize>,
    pub successors: Option<SuccessorCheck>,
}

impl PartitionReport {
    pub fn is_exact(&self) -> bool {
        self.uncovered.is_empty()
            && self.multiply_covered.is_empty()
            && self
                .successors
                .as_ref()
                .is_none_or(SuccessorCheck::is_exact)
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.members.len()).collect()
    }
}

fn check_precision(edges: &[&DirectedEdge], precision: u32) -> Result<()> {
    let required = edges
        .iter()
        .map(|e| e.required_precision())
        .max()
        .unwrap_or(1);
    if precision < required {
        return Err(Error::Precision {
            required,
            given: precision,
        });
    }
    Ok(())
}

/// `membership[line][edge]`.
fn memberships(edges: &[&DirectedEdge], lines: &[LineClass]) -> Result<Vec<Vec<bool>>> {
    lines
        .par_iter()
        .map(|l| edges.iter().map(|e| omega_contains(e, l)).collect())
        .collect()
}

fn assemble(
    kind: PartitionKind,
    precision: u32,
    universe: Vec<LineClass>,
    edges: Vec<(Option<Subspace>, DirectedEdge)>,
    membership: &[Vec<bool>],
) -> PartitionReport {
    let mut blocks: Vec<Block> = edges
        .into_iter()
        .map(|(point, edge)| Block {
            edge,
            point,
            members: Vec::new(),
        })
        .collect();
    let mut uncovered = Vec::new();
    let mut multiply_covered = Vec::new();
    for (i, row) in membership.iter().enumerate() {
        let mut hits = 0;
        for (b, &inside) in blocks.iter_mut().zip(row) {
            if inside {
                b.members.push(i);
                hits += 1;
            }
        }
        match hits {
            0 => uncovered.push(i),
            1 => {}
            _ => multiply_covered.push(i),
        }
    }
    PartitionReport {
        kind,
        precision,
        universe,
        blocks,
        uncovered,
        multiply_covered,
        successors: None,
    }
}

/// `P^n` as the disjoint union of `Ω(e)` over the `E¹` edges leaving `vertex`.
pub fn verify_partition_pa(
    vertex: &LatticeClass,
    geometry: &ProjectiveGeometry,
    precision: u32,
) -> Result<PartitionReport> {
    let edges = edges_from(vertex, geometry)?;
    let refs: Vec<&DirectedEdge> = edges.iter().map(|(_, e)| e).collect();
    check_precision(&refs, precision)?;
    let lines = super::enumerate_lines(vertex.p(), geometry.params().n(), precision)?;
    let membership = memberships(&refs, &lines)?;
    let labelled = edges.into_iter().map(|(s, e)| (Some(s), e)).collect();
    Ok(assemble(
        PartitionKind::Vertex,
        precision,
        lines,
        labelled,
        &membership,
    ))
}

/// `Ω(e)` as the disjoint union of the `Ω(e')` with `o(e') = t(e)` and
/// `Ω(e') ⊂ Ω(e)`; also checks there are `q^n` of them and that they are
/// exactly the points `b` off the hyperplane `(p^{-1} L_0)/L_1` at `t(e)`.
pub fn verify_partition_pb(
    edge: &DirectedEdge,
    geometry: &ProjectiveGeometry,
    precision: u32,
) -> Result<PartitionReport> {
    let successors = edges_from(edge.target(), geometry)?;
    let mut refs: Vec<&DirectedEdge> = vec![edge];
    refs.extend(successors.iter().map(|(_, e)| e));
    check_precision(&refs, precision)?;

    let (lower, upper) = edge.frame();
    let coords: Vec<Vec<u32>> = (0..lower.size())
        .map(|j| {
            upper
                .residue_coordinates(&lower.column(j))
                .ok_or_else(|| Error::Internal("edge frame is not nested".into()))
        })
        .collect::<Result<_>>()?;
    let hyperplane = geometry
        .span(&coords)
        .filter(|h| h.dim() == geometry.params().n())
        .ok_or_else(|| Error::Internal("origin does not cut a hyperplane at the target".into()))?
        .clone();

    let all_lines = super::enumerate_lines(edge.origin().p(), geometry.params().n(), precision)?;
    let membership = memberships(&refs, &all_lines)?;

    let mut contained = Vec::new();
    let mut partial = Vec::new();
    let mut empty = Vec::new();
    let mut criterion_mismatches = Vec::new();
    for (k, (point, _)) in successors.iter().enumerate() {
        let (mut inside, mut outside) = (0usize, 0usize);
        for row in &membership {
            if row[k + 1] {
                if row[0] {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }
        let is_contained = match (inside, outside) {
            (0, 0) => {
                empty.push(point.index());
                false
            }
            (_, 0) => {
                contained.push(point.index());
                true
            }
            (0, _) => false,
            _ => {
                partial.push(point.index());
                false
            }
        };
        let off_hyperplane = geometry.intersect(point, &hyperplane).is_zero();
        if is_contained != off_hyperplane {
            criterion_mismatches.push(point.index());
        }
    }

    let q = geometry.params().q() as usize;
    let expected = q.pow(geometry.params().n() as u32);

    let mut universe = Vec::new();
    let mut rows = Vec::new();
    for (line, row) in all_lines.into_iter().zip(&membership) {
        if row[0] {
            universe.push(line);
            rows.push(
                successors
                    .iter()
                    .enumerate()
                    .filter(|(_, (s, _))| contained.contains(&s.index()))
                    .map(|(k, _)| row[k + 1])
                    .collect::<Vec<bool>>(),
            );
        }
    }
    let blocks: Vec<(Option<Subspace>, DirectedEdge)> = successors
        .into_iter()
        .filter(|(s, _)| contained.contains(&s.index()))
        .map(|(s, e)| (Some(s), e))
        .collect();
    let mut report = assemble(
        PartitionKind::Successors,
        precision,
        universe,
        blocks,
        &rows,
    );
    report.successors = Some(SuccessorCheck {
        expected,
        hyperplane,
        contained,
        partial,
        empty,
        criterion_mismatches,
    });
    Ok(report)
}

/// `P^n` as the disjoint union of `Ω(e_i)` over the `n + 1` `E¹` edges of
/// a chamber.
pub fn verify_partition_pc(
    chain: &ChamberChain,
    geometry: &ProjectiveGeometry,
    precision: u32,
) -> Result<PartitionReport> {
    let edges = chain.edges()?;
    let refs: Vec<&DirectedEdge> = edges.iter().collect();
    check_precision(&refs, precision)?;
    let p = edges[0].origin().p();
    let lines = super::enumerate_lines(p, geometry.params().n(), precision)?;
    let membership = memberships(&refs, &lines)?;
    let labelled = edges.into_iter().map(|e| (None, e)).collect();
    Ok(assemble(
        PartitionKind::Chamber,
        precision,
        lines,
        labelled,
        &membership,
    ))
}
