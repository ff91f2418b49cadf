//! Vertices, edges and chambers of the Bruhat-Tits building of
//! `PGL_{n+1}(Q_p)` near the standard vertex, and the boundary sets `Ω(e)`.
//!
//! Lattice classes are represented by their unique lattice `L ⊆ Z_p^{n+1}`
//! with `L ⊄ p Z_p^{n+1}`. The type of a class is `-v_p(det L) mod (n+1)`,
//! which is `log_q vol(L)` for the Haar measure giving `Z_p^{n+1}` volume 1.

mod lattice;
mod line;
mod partition;

use std::fmt;

use crate::finite_geometry::{ProjectiveGeometry, Subspace};
use crate::{is_prime, Error, Result};

pub use lattice::{canonical_lattice, Lattice};
pub use line::{enumerate_lines, line_count, LineClass};
pub use partition::{
    verify_partition_pa, verify_partition_pb, verify_partition_pc, Block, PartitionKind,
    PartitionReport, SuccessorCheck,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalFieldParams {
    p: u64,
    n: usize,
}

impl LocalFieldParams {
    pub fn new(p: u64, n: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Parameter(format!("p = {p} is not prime")));
        }
        if n < 2 {
            return Err(Error::Parameter(format!("n = {n} must be >= 2")));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The class of `Z_p^{n+1}`, the base vertex `v_0`.
    pub fn base_vertex(&self) -> LatticeClass {
        class_of(&Lattice::standard(self.p, self.n + 1))
    }
}

/// A homothety class of lattices, held by its normalized representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClass {
    representative: Lattice,
    vertex_type: u32,
}

impl LatticeClass {
    pub fn representative(&self) -> &Lattice {
        &self.representative
    }

    /// Type in `Z/(n+1)`.
    pub fn vertex_type(&self) -> u32 {
        self.vertex_type
    }

    pub fn p(&self) -> u64 {
        self.representative.p()
    }

    /// `n + 1`.
    pub fn rank(&self) -> usize {
        self.representative.size()
    }

    /// Largest elementary divisor exponent of the representative.
    pub fn depth(&self) -> u32 {
        self.representative.depth()
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .representative
            .rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(i64::to_string).collect();
                cells.join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Scales `l` down until it leaves `p Z_p^{n+1}` and records its type.
pub fn class_of(l: &Lattice) -> LatticeClass {
    let mut rep = l.clone();
    while let Some(smaller) = rep.scaled_down() {
        rep = smaller;
    }
    let modulus = rep.size() as u32;
    let vertex_type = (modulus - rep.det_valuation() % modulus) % modulus;
    LatticeClass {
        representative: rep,
        vertex_type,
    }
}

/// Scaling shift `s ∈ {0, 1}` with `p^s X ⊆ Y ⊆ p^{s-1} X` for the
/// normalized representatives, if one exists.
fn adjacency_shift(x: &Lattice, y: &Lattice) -> Option<u32> {
    if y.contains(x) && x.contains_scaled(y, 1) {
        Some(0)
    } else if y.contains_scaled(x, 1) && x.contains(y) {
        Some(1)
    } else {
        None
    }
}

/// Adjacency of distinct vertices.
pub fn adjacent(c1: &LatticeClass, c2: &LatticeClass) -> Result<bool> {
    if c1 == c2 {
        return Err(Error::Parameter(
            "adjacency is defined for distinct vertices".into(),
        ));
    }
    Ok(adjacency_shift(&c1.representative, &c2.representative).is_some())
}

fn check_geometry(c: &LatticeClass, geometry: &ProjectiveGeometry) -> Result<()> {
    let gp = geometry.params();
    if u64::from(gp.q()) != c.p() || gp.width() != c.rank() {
        return Err(Error::Parameter(format!(
            "geometry PG({}, {}) does not match residue space of rank {} over F_{}",
            gp.n(),
            gp.q(),
            c.rank(),
            c.p()
        )));
    }
    Ok(())
}

/// The lattice `pL + Σ T·lift(v)` for a subspace of the residue space
/// `L/pL` at `c`, in the basis of the canonical columns `T` of `L`.
fn lift_subspace(c: &LatticeClass, s: &Subspace) -> Result<Lattice> {
    let rep = &c.representative;
    let gens: Vec<Vec<i64>> = s.basis().iter().map(|row| rep.combine(row)).collect();
    rep.scaled_up()?.sum_with(&gens)
}

/// All neighbours of `c`, one per proper nonzero subspace of the residue
/// space, in canonical subspace order (dimension first).
pub fn neighbors(
    c: &LatticeClass,
    geometry: &ProjectiveGeometry,
) -> Result<Vec<(Subspace, LatticeClass)>> {
    check_geometry(c, geometry)?;
    let mut out = Vec::new();
    for r in 1..=geometry.params().n() {
        for s in geometry.subspaces(r)? {
            out.push((s.clone(), class_of(&lift_subspace(c, s)?)));
        }
    }
    Ok(out)
}

/// Directed edges of `E¹` leaving `c`, one per point of the residue space.
pub fn edges_from(
    c: &LatticeClass,
    geometry: &ProjectiveGeometry,
) -> Result<Vec<(Subspace, DirectedEdge)>> {
    check_geometry(c, geometry)?;
    geometry
        .points()
        .iter()
        .map(|s| {
            let target = class_of(&lift_subspace(c, s)?);
            Ok((s.clone(), DirectedEdge::new(c.clone(), target)?))
        })
        .collect()
}

/// Lattice chain `L_0 ⊂ L_1 ⊂ … ⊂ L_n ⊂ p^{-1} L_0` realizing a chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberChain {
    lattices: Vec<Lattice>,
}

impl ChamberChain {
    /// `L_0, …, L_n` as integral lattices.
    pub fn lattices(&self) -> &[Lattice] {
        &self.lattices
    }

    pub fn classes(&self) -> Vec<LatticeClass> {
        self.lattices.iter().map(class_of).collect()
    }

    /// The `n + 1` edges `([L_i], [L_{i+1}])` with `L_{n+1} = p^{-1} L_0`.
    pub fn edges(&self) -> Result<Vec<DirectedEdge>> {
        let classes = self.classes();
        let k = classes.len();
        (0..k)
            .map(|i| DirectedEdge::new(classes[i].clone(), classes[(i + 1) % k].clone()))
            .collect()
    }
}

/// Realizes the complete flag `flag` of the residue space at `base`.
pub fn chamber_chain(
    flag: &[Subspace],
    base: &LatticeClass,
    geometry: &ProjectiveGeometry,
) -> Result<ChamberChain> {
    check_geometry(base, geometry)?;
    let chamber = geometry.chamber(flag)?;
    let mut lattices = vec![base.representative.scaled_up()?];
    for s in chamber.flag() {
        lattices.push(lift_subspace(base, s)?);
    }
    Ok(ChamberChain { lattices })
}

/// A directed edge `(x, y)` of `E¹`: adjacent vertices with `τ(y) = τ(x) + 1`.
///
/// The edge keeps a frame `A ⊂ B ⊂ p^{-1} A` of representatives with
/// `[B : A] = p`, plus `pA` and `pB` for the boundary-set test.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedEdge {
    origin: LatticeClass,
    target: LatticeClass,
    lower: Lattice,
    upper: Lattice,
    lower_scaled: Lattice,
    upper_scaled: Lattice,
}

impl DirectedEdge {
    pub fn new(origin: LatticeClass, target: LatticeClass) -> Result<Self> {
        let rank = origin.rank() as u32;
        if origin.p() != target.p() || origin.rank() != target.rank() {
            return Err(Error::NotAnEdge("vertices of different buildings".into()));
        }
        if target.vertex_type != (origin.vertex_type + 1) % rank {
            return Err(Error::NotAnEdge(format!(
                "types {} -> {} do not increase by one",
                origin.vertex_type, target.vertex_type
            )));
        }
        let x = &origin.representative;
        let y = &target.representative;
        let Some(shift) = adjacency_shift(x, y) else {
            return Err(Error::NotAnEdge(format!(
                "{origin} and {target} are not adjacent"
            )));
        };
        let lower = if shift == 0 {
            x.clone()
        } else {
            x.scaled_up()?
        };
        let upper = y.clone();
        if lower.det_valuation() != upper.det_valuation() + 1 {
            return Err(Error::Internal("edge frame does not have index p".into()));
        }
        Ok(Self {
            lower_scaled: lower.scaled_up()?,
            upper_scaled: upper.scaled_up()?,
            origin,
            target,
            lower,
            upper,
        })
    }

    pub fn origin(&self) -> &LatticeClass {
        &self.origin
    }

    pub fn target(&self) -> &LatticeClass {
        &self.target
    }

    /// Representatives `(A, B)` with `A ⊂ B ⊂ p^{-1} A`.
    pub fn frame(&self) -> (&Lattice, &Lattice) {
        (&self.lower, &self.upper)
    }

    /// Membership in `Ω(e)` depends only on a line modulo `p^{depth+1}`,
    /// where `depth` is that of the origin's representative.
    pub fn required_precision(&self) -> u32 {
        self.origin.depth() + 1
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.origin, self.target)
    }
}

/// Whether `ell ∈ Ω(e)`, i.e. `B = A + (ℓ ∩ p^{-1} A)` for the frame `(A, B)`.
///
/// With `a` the lift of `ell` and `t` minimal such that `p^t a ∈ A`, the
/// intersection `ℓ ∩ p^{-1}A` is generated by `p^{t-1} a`; the test compares
/// canonical forms of `pA + Z_p p^t a` and `pB`.
pub fn omega_contains(e: &DirectedEdge, ell: &LineClass) -> Result<bool> {
    let required = e.required_precision();
    if ell.precision() < required {
        return Err(Error::Precision {
            required,
            given: ell.precision(),
        });
    }
    if ell.p() != e.origin.p() || ell.coords().len() != e.origin.rank() {
        return Err(Error::Parameter(
            "line and edge live in different spaces".into(),
        ));
    }
    let a = ell.lift();
    let t = (0..)
        .find(|&t| e.lower.contains_scaled_vector(&a, t))
        .expect("A contains p^k Z_p^{n+1}");
    let p = ell.p() as i64;
    let factor = p.checked_pow(t).ok_or(Error::Overflow("line scaling"))?;
    let generator: Vec<i64> = a
        .iter()
        .map(|&x| x.checked_mul(factor).ok_or(Error::Overflow("line scaling")))
        .collect::<Result<_>>()?;
    Ok(e.lower_scaled.sum_with(&[generator])? == e.upper_scaled)
}
