//! Acceptance suite: one line per criterion, `PASS` or `FAIL`.
//!
//! Runs without the libtest harness so that every line is printed on every
//! run. Exits nonzero if any criterion fails other than a documented
//! expected failure, which is still printed as `FAIL`.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use antilde::cli::{run, Command, RunConfig};
use antilde::coinvariants::{
    distribution_certificate, epsilon_order, epsilon_torsion_from_ca, presented_group,
    smith_normal_form, theta_check, IntMatrix, Verdict,
};
use antilde::finite_geometry::{GeometryParams, ProjectiveGeometry};
use antilde::padic_building::{
    chamber_chain, edges_from, verify_partition_pa, verify_partition_pb, verify_partition_pc,
    LocalFieldParams,
};
use antilde::presentation::{search, to_text, PresentationData};
use antilde::Error;
use common::*;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    failures: Vec<String>,
    /// Failures that are known to be unattainable; reported, not fatal.
    expected: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            expected: Vec::new(),
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

fn params(n: usize, q: u32) -> GeometryParams {
    GeometryParams::new(n, q).unwrap()
}

fn counting() -> Outcome {
    let mut o = Outcome::new();
    for (n, q) in [(2, 2), (2, 3), (3, 2)] {
        let g = ProjectiveGeometry::new(params(n, q));
        let points = normalized_vectors(n + 1, q);
        let formula = (q.pow(n as u32 + 1) - 1) / (q - 1);
        o.require(
            points.len() == formula as usize,
            format!("oracle point count for ({n},{q})"),
        );
        o.require(
            g.points().len() == formula as usize,
            format!("|Π_1| = {} for ({n},{q})", g.points().len()),
        );
        o.require(
            g.hyperplanes().len() == formula as usize,
            format!("hyperplanes for ({n},{q})"),
        );
        // Hyperplanes are kernels of normalized dual vectors.
        let off: BTreeSet<usize> = points
            .iter()
            .map(|h| points.iter().filter(|x| dot(h, x, q) != 0).count())
            .collect();
        let qn = q.pow(n as u32) as usize;
        o.require(
            off == BTreeSet::from([qn]),
            format!("oracle off-hyperplane counts {off:?}"),
        );
        match g.count_points_off_hyperplane() {
            Ok(c) => o.require(c == qn, format!("off-hyperplane count {c} for ({n},{q})")),
            Err(e) => o.require(false, e.to_string()),
        }
    }
    o.detail =
        "(2,2) (2,3) (3,2): |Π_1| = (q^{n+1}-1)/(q-1), q^n points off every hyperplane".into();
    o
}

fn chamber_edges() -> Outcome {
    let mut o = Outcome::new();
    let mut counts = Vec::new();
    for (p, want) in [(2u64, 21usize), (3, 52)] {
        let g = ProjectiveGeometry::new(params(2, p as u32));
        let base = LocalFieldParams::new(p, 2).unwrap().base_vertex();
        let chambers = g.chambers();
        o.require(
            chambers.len() == want,
            format!("p={p}: {} chambers", chambers.len()),
        );
        for c in &chambers {
            let edges = chamber_chain(c.flag(), &base, &g).and_then(|ch| ch.edges());
            match edges {
                Ok(e) => o.require(
                    e.len() == 3,
                    format!("p={p} chamber {:?}: {} edges", c.indices(), e.len()),
                ),
                Err(e) => o.require(false, format!("p={p} chamber {:?}: {e}", c.indices())),
            }
        }
        counts.push(format!("{} chambers at p={p}", chambers.len()));
    }
    o.detail = format!("{}, each with n+1 = 3 directed edges", counts.join(", "));
    o
}

fn partitions() -> Outcome {
    let mut o = Outcome::new();
    let mut checked = 0;
    for p in [2u64, 3] {
        let g = ProjectiveGeometry::new(params(2, p as u32));
        let base = LocalFieldParams::new(p, 2).unwrap().base_vertex();
        let qn = (p * p) as usize;
        let edges = edges_from(&base, &g).unwrap();
        let chains: Vec<_> = g
            .chambers()
            .iter()
            .map(|c| chamber_chain(c.flag(), &base, &g).unwrap())
            .collect();
        for m in 1..=3 {
            match verify_partition_pa(&base, &g, m) {
                Ok(r) => {
                    o.require(r.is_exact(), format!("vertex partition p={p} m={m}"));
                    checked += 1;
                }
                Err(e) => o.require(false, format!("vertex partition p={p} m={m}: {e}")),
            }
            for (point, e) in &edges {
                match verify_partition_pb(e, &g, m) {
                    Ok(r) => {
                        o.require(
                            r.is_exact(),
                            format!("successor partition p={p} m={m} edge {}", point.index()),
                        );
                        o.require(
                            r.blocks.len() == qn,
                            format!("successor partition p={p} m={m}: {} blocks", r.blocks.len()),
                        );
                        checked += 1;
                    }
                    Err(err @ Error::Precision { .. }) if m == 1 => {
                        o.expected
                            .push(format!("successor partition p={p} m=1: {err}"));
                        break;
                    }
                    Err(err) => o.require(false, format!("successor partition p={p} m={m}: {err}")),
                }
            }
            for chain in &chains {
                match verify_partition_pc(chain, &g, m) {
                    Ok(r) => {
                        o.require(r.is_exact(), format!("chamber partition p={p} m={m}"));
                        o.require(
                            r.blocks.len() == 3,
                            format!("chamber partition p={p} m={m}: {} blocks", r.blocks.len()),
                        );
                        checked += 1;
                    }
                    Err(err @ Error::Precision { .. }) if m == 1 => {
                        o.expected
                            .push(format!("chamber partition p={p} m=1: {err}"));
                        break;
                    }
                    Err(err) => o.require(false, format!("chamber partition p={p} m={m}: {err}")),
                }
            }
        }
    }
    o.detail = format!("{checked} exact partitions at p in {{2,3}}, m in {{1,2,3}}");
    o
}

fn snf() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let samples = 1200;
    for k in 0..samples {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let m: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let cert = match smith_normal_form(&IntMatrix::from_rows(&m)) {
            Ok(c) => c,
            Err(e) => {
                o.require(false, format!("sample {k}: {e}"));
                continue;
            }
        };
        let u = cert.u.to_rows();
        let v = cert.v.to_rows();
        let d = cert.d.to_rows();
        o.require(
            mat_mul(&mat_mul(&u, &to_big(&m)), &v) == d,
            format!("sample {k}: U·M·V ≠ D for {m:?}"),
        );
        o.require(
            is_unit(&det_laplace(&u)) && is_unit(&det_laplace(&v)),
            format!("sample {k}: not unimodular"),
        );
        let diag: Vec<BigInt> = cert.diagonal();
        let chain_ok = diag.windows(2).all(|w| {
            if w[0] == BigInt::from(0) {
                w[1] == BigInt::from(0)
            } else {
                &w[1] % &w[0] == BigInt::from(0)
            }
        }) && diag.iter().all(|x| *x >= BigInt::from(0));
        o.require(chain_ok, format!("sample {k}: divisibility chain {diag:?}"));
        let got: Vec<BigInt> = diag;
        let naive: Vec<BigInt> = naive_smith_diagonal(&m)
            .into_iter()
            .map(BigInt::from)
            .collect();
        let minors: Vec<BigInt> = determinantal_diagonal(&m)
            .into_iter()
            .map(BigInt::from)
            .collect();
        o.require(
            got == naive,
            format!("sample {k}: {got:?} vs naive {naive:?} for {m:?}"),
        );
        o.require(
            got == minors,
            format!("sample {k}: {got:?} vs minors {minors:?} for {m:?}"),
        );
    }
    o.detail = format!("{samples} random matrices up to 6x6, entries in [-9, 9]");
    o
}

fn epsilon_torsion() -> Outcome {
    let mut o = Outcome::new();
    for (n, q) in [(2usize, 2u32), (2, 3), (3, 2)] {
        match epsilon_torsion_from_ca(params(n, q)) {
            Ok(ok) => o.require(ok, format!("({n},{q}): (q^n-1)e_ε not in lattice")),
            Err(e) => o.require(false, format!("({n},{q}): {e}")),
        }
        // Oracle: (q^n - 1)·C − Σ_a A_a = (q^n - 1)·e_ε for any bijection λ.
        let pts = normalized_vectors(n + 1, q);
        let k = pts.len();
        let qn1 = i64::from(q.pow(n as u32)) - 1;
        let mut combo = vec![0i64; k + 1];
        for c in combo.iter_mut().take(k) {
            *c -= qn1;
        }
        combo[k] += qn1;
        for (a, h) in pts.iter().enumerate() {
            combo[a] -= 1;
            for (b, x) in pts.iter().enumerate() {
                if dot(h, x, q) != 0 {
                    combo[b] += 1;
                }
            }
        }
        let mut want = vec![0i64; k + 1];
        want[k] = qn1;
        o.require(
            combo == want,
            format!("({n},{q}): oracle combination {combo:?}"),
        );
    }
    o.detail = "(2,2) (2,3) (3,2): (q^n-1)e_ε in the (C),(A) row lattice".into();
    o
}

fn all_q2_sets() -> (usize, Vec<PresentationData>) {
    let p = params(2, 2);
    let mut admitting = 0;
    let mut sets = Vec::new();
    for lambda in permutations(7) {
        let found = search(p, &lambda).expect("q = 2 search runs");
        if !found.is_empty() {
            admitting += 1;
        }
        sets.extend(found);
    }
    (admitting, sets)
}

fn finiteness(sets: &[PresentationData], admitting: usize) -> Outcome {
    let mut o = Outcome::new();
    for data in sets {
        let witness = || format!("\n{}", to_text(data));
        let g = match presented_group(data) {
            Ok(g) => g,
            Err(e) => {
                o.require(false, format!("{e}{}", witness()));
                continue;
            }
        };
        o.require(
            g.is_finite(),
            format!("free rank {}{}", g.free_rank, witness()),
        );
        match epsilon_order(data) {
            Ok(k) => o.require(3 % k == 0, format!("ε order {k}{}", witness())),
            Err(e) => o.require(false, format!("{e}{}", witness())),
        }
        o.require(
            distribution_certificate(&g) == Verdict::Certified,
            format!("not certified{}", witness()),
        );
    }
    o.require(!sets.is_empty(), "search produced no tuple sets");
    o.detail = format!(
        "{} searched sets over {admitting} of 5040 λ: finite, ε order | 3, CERTIFIED",
        sets.len()
    );
    o
}

fn theta(sets: &[PresentationData]) -> Outcome {
    let mut o = Outcome::new();
    for data in sets {
        match theta_check(data) {
            Ok(t) => o.require(t.holds(), format!("{t:?}\n{}", to_text(data))),
            Err(e) => o.require(false, e.to_string()),
        }
    }
    o.detail = format!(
        "{} searched sets: G/<ε> is compatible with a quotient of Γ^ab",
        sets.len()
    );
    o
}

fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut listings = Vec::new();
    for d in &dirs {
        let config = RunConfig::new(Command::All, 2, 2, 2, d.path());
        match run(&config) {
            Ok(out) => o.require(out.passed(), "`all` run reported a failing stage"),
            Err(e) => o.require(false, e.to_string()),
        }
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(d.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        listings.push(files);
    }
    o.require(!listings[0].is_empty(), "no reports written");
    o.require(
        listings[0] == listings[1],
        "reports differ between identical runs",
    );
    o.detail = format!(
        "{} files byte-identical across two `all` runs",
        listings[0].len()
    );
    o
}

fn main() -> ExitCode {
    let mut fatal = 0;
    let mut report = |id: u32, name: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        if elapsed > limit {
            o.failures
                .push(format!("took {elapsed:.2?}, limit {limit:?}"));
        }
        let status = if o.failures.is_empty() && o.expected.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "criterion {id} [{name}]: {status} ({}; {elapsed:.2?})",
            o.detail
        );
        for f in o.failures.iter().take(5) {
            println!("    failure: {f}");
        }
        if !o.expected.is_empty() {
            println!("    expected failure (unattainable as stated; see notes):");
            for f in &o.expected {
                println!("      {f}");
            }
        }
        if !o.failures.is_empty() {
            fatal += 1;
        }
    };

    report(
        1,
        "counting identities",
        Duration::from_secs(1),
        &mut counting,
    );
    report(
        2,
        "chamber edges",
        Duration::from_secs(5),
        &mut chamber_edges,
    );
    report(3, "partitions", Duration::from_secs(30), &mut partitions);
    report(4, "smith normal form", Duration::from_secs(60), &mut snf);
    report(
        5,
        "epsilon torsion from (C),(A)",
        Duration::from_secs(5),
        &mut epsilon_torsion,
    );
    let start = Instant::now();
    let (admitting, sets) = all_q2_sets();
    let search_time = start.elapsed();
    report(
        6,
        "finiteness and certificate",
        Duration::from_secs(300) - search_time,
        &mut || finiteness(&sets, admitting),
    );
    report(7, "theta consistency", Duration::from_secs(60), &mut || {
        theta(&sets)
    });
    report(8, "determinism", Duration::from_secs(60), &mut determinism);

    if fatal == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
