use std::collections::BTreeMap;
use std::fmt;

use super::{on_hyperplane, rotate, PresentationData};
use crate::finite_geometry::{flag_count, ProjectiveGeometry};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub id: &'static str,
    pub description: &'static str,
    /// First offending datum, when the check fails.
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "{} pass  {}", c.id, c.description)?,
                Some(w) => writeln!(f, "{} FAIL  {}  witness: {w}", c.id, c.description)?,
            }
        }
        Ok(())
    }
}

/// Runs V1–V5 in order. Failures are report entries, never errors.
pub fn validate(data: &PresentationData) -> ValidationReport {
    let geometry = ProjectiveGeometry::new(data.params());
    validate_with(&geometry, data)
}

pub(crate) fn validate_with(
    geometry: &ProjectiveGeometry,
    data: &PresentationData,
) -> ValidationReport {
    let params = data.params();
    let lambda = data.lambda();
    let tuples = data.tuples();
    let mut checks = Vec::with_capacity(5);

    let mut preimage: BTreeMap<usize, usize> = BTreeMap::new();
    let mut v1 = None;
    for (a, &h) in lambda.iter().enumerate() {
        if let Some(prev) = preimage.insert(h, a) {
            v1 = Some(format!("lambda({prev}) = lambda({a}) = {h}"));
            break;
        }
    }
    checks.push(CheckResult {
        id: "V1",
        description: "lambda is a bijection onto hyperplanes",
        witness: v1,
    });

    let v2 = tuples.iter().find_map(|t| {
        (1..t.len())
            .map(|r| rotate(t, r))
            .find(|r| !tuples.contains(r))
            .map(|r| format!("{t:?} present but rotation {r:?} missing"))
    });
    checks.push(CheckResult {
        id: "V2",
        description: "tuples closed under cyclic rotation",
        witness: v2,
    });

    let v3 = tuples.iter().find_map(|t| {
        (0..t.len()).find_map(|i| {
            let (a, b) = (t[i], t[(i + 1) % t.len()]);
            (!on_hyperplane(geometry, lambda[a], b)).then(|| {
                format!(
                    "{t:?} position {i}: point {b} not on lambda({a}) = {}",
                    lambda[a]
                )
            })
        })
    });
    checks.push(CheckResult {
        id: "V3",
        description: "consecutive entries satisfy a_(i+1) in lambda(a_i)",
        witness: v3,
    });

    let expected = flag_count(params.n() as u32, params.q());
    checks.push(CheckResult {
        id: "V4",
        description: "tuple count equals complete flag count",
        witness: (tuples.len() as u128 != expected)
            .then(|| format!("{} tuples, expected {expected}", tuples.len())),
    });

    // Complete flags of the quotient by a fixed point-in-hyperplane pair.
    let per_pair = if params.n() >= 2 {
        flag_count(params.n() as u32 - 2, params.q())
    } else {
        1
    };
    let mut starts: BTreeMap<(usize, usize), u128> = BTreeMap::new();
    for t in tuples {
        *starts.entry((t[0], t[1])).or_insert(0) += 1;
    }
    let mut v5 = None;
    'pairs: for a in 0..lambda.len() {
        for b in 0..lambda.len() {
            if !on_hyperplane(geometry, lambda[a], b) {
                continue;
            }
            let count = starts.get(&(a, b)).copied().unwrap_or(0);
            if count != per_pair {
                v5 = Some(format!(
                    "pair ({a}, {b}) starts {count} tuples, expected {per_pair}"
                ));
                break 'pairs;
            }
        }
    }
    checks.push(CheckResult {
        id: "V5",
        description:
            "each incident pair (a, b) with b in lambda(a) starts the right number of tuples",
        witness: v5,
    });

    ValidationReport { checks }
}
