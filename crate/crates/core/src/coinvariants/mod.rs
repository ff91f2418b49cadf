//! Relation matrices for the coinvariants `C(P^n_K, Z)_Γ` and the
//! certified integer linear algebra that reads group structure off them.
//!
//! Columns are the generators `[a]`, one per point `a`, followed by a
//! separate column for `ε`. The relations are
//!
//! * (C) `ε = Σ_a [a]`,
//! * (A) `[a] = Σ_{b ∩ λ(a) = 0} [b]` for every point `a`,
//! * (B) `Σ_i [a_i] = ε` for every tuple.
//!
//! The group they present surjects onto the coinvariants, so everything
//! computed here is an upper bound, never the coinvariants themselves.

mod hnf;
mod matrix;
mod snf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::finite_geometry::{GeometryParams, ProjectiveGeometry};
use crate::presentation::{PresentationData, Tuple};
use crate::{Error, Result};

pub use hnf::RowLattice;
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfCertificate};

/// The label the report must carry for every presented-group result.
pub const UPPER_BOUND_LABEL: &str = "upper-bound presentation";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    C,
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowLabel {
    C,
    A(usize),
    B(Tuple),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::C => write!(f, "C"),
            RowLabel::A(a) => write!(f, "A[{a}]"),
            RowLabel::B(t) => write!(f, "B{t:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationMatrix {
    pub matrix: IntMatrix,
    pub labels: Vec<RowLabel>,
}

impl RelationMatrix {
    /// Number of point generators; the `ε` column comes right after them.
    pub fn epsilon_column(&self) -> usize {
        self.matrix.cols() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.matrix.rows(), self.matrix.cols())
    }

    pub fn unit_epsilon(&self) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); self.matrix.cols()];
        e[self.epsilon_column()] = BigInt::one();
        e
    }
}

/// Assembles relation rows without checking the data; `tuples` may be
/// empty when only (C) and (A) are wanted.
pub fn relation_rows(
    geometry: &ProjectiveGeometry,
    lambda: &[usize],
    tuples: &BTreeSet<Tuple>,
    include: &[RelationKind],
) -> RelationMatrix {
    let points = geometry.points().len();
    let eps = points;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut labels = Vec::new();
    if include.contains(&RelationKind::C) {
        let mut r = vec![-1; points + 1];
        r[eps] = 1;
        rows.push(r);
        labels.push(RowLabel::C);
    }
    if include.contains(&RelationKind::A) {
        for (a, &h) in lambda.iter().enumerate() {
            let mut r = vec![0; points + 1];
            r[a] += 1;
            for (b, point) in geometry.points().iter().enumerate() {
                if !geometry.contains(&geometry.hyperplanes()[h], point) {
                    r[b] -= 1;
                }
            }
            rows.push(r);
            labels.push(RowLabel::A(a));
        }
    }
    if include.contains(&RelationKind::B) {
        for t in tuples {
            let mut r = vec![0; points + 1];
            for &a in t {
                r[a] += 1;
            }
            r[eps] -= 1;
            rows.push(r);
            labels.push(RowLabel::B(t.clone()));
        }
    }
    RelationMatrix {
        matrix: IntMatrix::from_rows_with_cols(&rows, points + 1),
        labels,
    }
}

fn require_valid(data: &PresentationData) -> Result<ProjectiveGeometry> {
    let geometry = ProjectiveGeometry::new(data.params());
    let report = crate::presentation::validate::validate_with(&geometry, data);
    let failure = report.failures().next().map(|f| {
        Error::Validation(format!(
            "{}: {}",
            f.id,
            f.witness.as_deref().unwrap_or_default()
        ))
    });
    match failure {
        None => Ok(geometry),
        Some(e) => Err(e),
    }
}

pub fn build_relation_matrix(
    data: &PresentationData,
    include: &[RelationKind],
) -> Result<RelationMatrix> {
    let geometry = require_valid(data)?;
    Ok(relation_rows(
        &geometry,
        data.lambda(),
        data.tuples(),
        include,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroupStructure {
    /// `d_1 | d_2 | …`, each at least 2.
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianGroupStructure {
    /// The group `Z^cols / (row lattice)`.
    pub fn from_relations(m: &IntMatrix) -> Result<Self> {
        let cert = smith_normal_form(m)?;
        let diag = cert.diagonal();
        let rank = cert.rank();
        Ok(Self {
            invariant_factors: diag.into_iter().filter(|d| *d > BigInt::one()).collect(),
            free_rank: m.cols() - rank,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    /// `dim_{F_p} p^{k-1} G / p^k G`: the number of cyclic factors whose order
    /// is divisible by `p^k`, free summands included.
    pub fn p_rank(&self, p: u64, k: u32) -> usize {
        let pk = BigInt::from(p).pow(k);
        self.free_rank
            + self
                .invariant_factors
                .iter()
                .filter(|d| d.is_multiple_of(&pk))
                .count()
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

fn prime_factors(mut x: BigInt) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while x > BigInt::one() {
        let bp = BigInt::from(p);
        if (&bp * &bp) > x {
            out.push(x.to_u64().expect("prime factor fits in u64"));
            break;
        }
        if x.is_multiple_of(&bp) {
            out.push(p);
            while x.is_multiple_of(&bp) {
                x /= &bp;
            }
        }
        p += 1;
    }
    out
}

/// Necessary condition for `quotient` to be a quotient of `group`: the free
/// rank and every `p`-rank `dim p^{k-1}Q/p^kQ` are bounded by the group's.
pub fn quotient_compatible(
    quotient: &AbelianGroupStructure,
    group: &AbelianGroupStructure,
) -> bool {
    if quotient.free_rank > group.free_rank {
        return false;
    }
    let mut primes = BTreeSet::new();
    for d in quotient
        .invariant_factors
        .iter()
        .chain(&group.invariant_factors)
    {
        primes.extend(prime_factors(d.clone()));
    }
    primes.into_iter().all(|p| {
        let bp = BigInt::from(p);
        let top = quotient
            .invariant_factors
            .iter()
            .map(|d| {
                let (mut d, mut k) = (d.clone(), 0u32);
                while d.is_multiple_of(&bp) {
                    d /= &bp;
                    k += 1;
                }
                k
            })
            .max()
            .unwrap_or(0);
        (1..=top).all(|k| quotient.p_rank(p, k) <= group.p_rank(p, k))
    })
}

/// `q^n − 1`.
pub fn epsilon_bound(params: GeometryParams) -> u64 {
    u64::from(params.q()).pow(params.n() as u32) - 1
}

/// The group on `[a]` and `ε` with all of (C), (A), (B); labelled
/// [`UPPER_BOUND_LABEL`] in reports.
pub fn presented_group(data: &PresentationData) -> Result<AbelianGroupStructure> {
    let m = build_relation_matrix(data, &[RelationKind::C, RelationKind::A, RelationKind::B])?;
    AbelianGroupStructure::from_relations(&m.matrix)
}

/// Exact order of `ε` in the presented group, by lattice membership of
/// `k · e_ε` for `k = 1, 2, …`.
pub fn epsilon_order(data: &PresentationData) -> Result<u64> {
    let m = build_relation_matrix(data, &[RelationKind::C, RelationKind::A, RelationKind::B])?;
    let lattice = RowLattice::new(&m.matrix);
    let e = m.unit_epsilon();
    if !lattice.spans(&e) {
        return Err(Error::Falsified(format!(
            "ε has infinite order in the {UPPER_BOUND_LABEL} (relation rank {} of {})",
            lattice.rank(),
            m.matrix.cols()
        )));
    }
    let bound = epsilon_bound(data.params());
    let mut k = 1u64;
    loop {
        let v: Vec<BigInt> = e.iter().map(|x| x * k).collect();
        if lattice.contains(&v) {
            break;
        }
        k += 1;
    }
    if !bound.is_multiple_of(k) {
        return Err(Error::Falsified(format!(
            "ε has order {k}, which does not divide q^n - 1 = {bound}"
        )));
    }
    Ok(k)
}

/// `Γ^ab`: generators `g_a`, one relation `Σ_i g_{a_i} = 0` per tuple.
pub fn abelianization(data: &PresentationData) -> Result<AbelianGroupStructure> {
    require_valid(data)?;
    AbelianGroupStructure::from_relations(&abelianization_rows(data))
}

fn abelianization_rows(data: &PresentationData) -> IntMatrix {
    let points = data.lambda().len();
    let rows: Vec<Vec<i64>> = data
        .tuples()
        .iter()
        .map(|t| {
            let mut r = vec![0; points];
            for &a in t {
                r[a] += 1;
            }
            r
        })
        .collect();
    IntMatrix::from_rows_with_cols(&rows, points)
}

/// Outcome of checking that `g_a ↦ [a]` induces `Γ^ab ↠ G/⟨ε⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaCheck {
    /// `G/⟨ε⟩` with `G` the presented group.
    pub quotient: AbelianGroupStructure,
    pub abelianization: AbelianGroupStructure,
    /// First tuple relation of `Γ^ab` that fails to hold in `G/⟨ε⟩`.
    pub violated_relation: Option<Tuple>,
    /// Adding the `Γ^ab` relations to those of `G/⟨ε⟩` leaves its Smith
    /// form unchanged.
    pub stacked_agrees: bool,
    /// `G/⟨ε⟩` passes [`quotient_compatible`] against `Γ^ab`.
    pub quotient_compatible: bool,
}

impl ThetaCheck {
    pub fn holds(&self) -> bool {
        self.violated_relation.is_none() && self.stacked_agrees && self.quotient_compatible
    }
}

pub fn theta_check(data: &PresentationData) -> Result<ThetaCheck> {
    let m = build_relation_matrix(data, &[RelationKind::C, RelationKind::A, RelationKind::B])?;
    let eps_row = IntMatrix::from_rows_with_cols(&[m.unit_epsilon()], m.matrix.cols());
    let q_rows = m.matrix.stack(&eps_row);
    let quotient = AbelianGroupStructure::from_relations(&q_rows)?;

    let ab_rows = abelianization_rows(data);
    let abelianization = AbelianGroupStructure::from_relations(&ab_rows)?;

    // Γ^ab relations, with a zero ε entry.
    let lifted: Vec<Vec<BigInt>> = ab_rows
        .to_rows()
        .into_iter()
        .map(|mut r| {
            r.push(BigInt::zero());
            r
        })
        .collect();
    let lattice = RowLattice::new(&q_rows);
    let violated_relation = data
        .tuples()
        .iter()
        .zip(&lifted)
        .find(|(_, r)| !lattice.contains(r))
        .map(|(t, _)| t.clone());
    let stacked = q_rows.stack(&IntMatrix::from_rows_with_cols(&lifted, q_rows.cols()));
    let stacked_agrees = AbelianGroupStructure::from_relations(&stacked)? == quotient;
    let quotient_compatible = quotient_compatible(&quotient, &abelianization);
    Ok(ThetaCheck {
        quotient,
        abelianization,
        violated_relation,
        stacked_agrees,
        quotient_compatible,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Finite group: no nonzero invariant integer-valued distribution.
    Certified,
    Inconclusive {
        free_rank: usize,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Certified => write!(f, "CERTIFIED"),
            Verdict::Inconclusive { free_rank } => {
                write!(f, "INCONCLUSIVE (free rank {free_rank})")
            }
        }
    }
}

pub fn distribution_certificate(g: &AbelianGroupStructure) -> Verdict {
    if g.is_finite() {
        Verdict::Certified
    } else {
        Verdict::Inconclusive {
            free_rank: g.free_rank,
        }
    }
}

/// Whether `(q^n − 1) · e_ε` lies in the row lattice of (C) and (A) alone.
/// The identity holds for every bijection `λ`, so the index-order
/// bijection is used and no tuple set is needed.
pub fn epsilon_torsion_from_ca(params: GeometryParams) -> Result<bool> {
    let geometry = ProjectiveGeometry::new(params);
    let lambda: Vec<usize> = (0..geometry.points().len()).collect();
    let m = relation_rows(
        &geometry,
        &lambda,
        &BTreeSet::new(),
        &[RelationKind::C, RelationKind::A],
    );
    let lattice = RowLattice::new(&m.matrix);
    let bound = epsilon_bound(params);
    let v: Vec<BigInt> = m.unit_epsilon().iter().map(|x| x * bound).collect();
    Ok(lattice.contains(&v))
}

/// Invariant factors as plain integers, for reports and tests.
pub fn factors_u64(g: &AbelianGroupStructure) -> Vec<u64> {
    g.invariant_factors
        .iter()
        .map(|d| d.to_u64().expect("invariant factor fits in u64"))
        .collect()
}

/// Histogram of `Γ^ab` or presented-group structures over many inputs.
pub fn tally<'a>(
    groups: impl IntoIterator<Item = &'a AbelianGroupStructure>,
) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for g in groups {
        *out.entry(g.to_string()).or_insert(0) += 1;
    }
    out
}
