use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{write_file, Header, Report};
use super::{Command, RunConfig, RunOutcome, StageOutcome};
use crate::coinvariants::{
    abelianization, build_relation_matrix, distribution_certificate, epsilon_bound, epsilon_order,
    factors_u64, presented_group, quotient_compatible, theta_check, AbelianGroupStructure,
    RelationKind, Verdict, UPPER_BOUND_LABEL,
};
use crate::finite_geometry::{flag_count, gaussian_binomial, GeometryParams, ProjectiveGeometry};
use crate::padic_building::{
    canonical_lattice, chamber_chain, class_of, edges_from, verify_partition_pa,
    verify_partition_pb, verify_partition_pc, LocalFieldParams, PartitionReport,
};
use crate::presentation::{self, find_lambda, load, search, to_text, PresentationData};
use crate::{Error, Result};

/// Random lattices checked per run by the canonical-form sweep.
const SWEEP_SAMPLES: usize = 64;

pub(super) struct Pipeline<'a> {
    config: &'a RunConfig,
    params: GeometryParams,
    geometry: ProjectiveGeometry,
    header: Header,
    outcome: RunOutcome,
    searched: Option<Vec<PresentationData>>,
}

impl<'a> Pipeline<'a> {
    pub(super) fn new(config: &'a RunConfig, params: GeometryParams) -> Self {
        let geometry = ProjectiveGeometry::new(params);
        let header = Header {
            config: config.echo(),
            seed: config.seed,
            checksum: geometry.checksum(),
        };
        Self {
            config,
            params,
            geometry,
            header,
            outcome: RunOutcome::default(),
            searched: None,
        }
    }

    pub(super) fn run(mut self) -> Result<RunOutcome> {
        match self.config.command {
            Command::Geometry => self.geometry_stage()?,
            Command::BuildingVerify => self.building_stage()?,
            Command::Validate => self.validate_stage()?,
            Command::Search => self.search_stage()?,
            Command::Coinvariants => self.coinvariants_stage()?,
            Command::Abelianization => self.abelianization_stage()?,
            Command::Certify => self.certify_stage()?,
            Command::All => {
                self.geometry_stage()?;
                self.building_stage()?;
                self.search_stage()?;
                self.validate_stage()?;
                self.coinvariants_stage()?;
                self.abelianization_stage()?;
                self.certify_stage()?;
            }
        }
        Ok(self.outcome)
    }

    fn report(&self, stage: &'static str) -> Report {
        Report::new(stage, &self.header)
    }

    fn finish(&mut self, report: Report) -> Result<()> {
        let stage = report.stage();
        let (path, passed) = report.finish(&self.config.out)?;
        self.outcome.stages.push(StageOutcome {
            stage,
            report: path,
            passed,
        });
        Ok(())
    }

    /// The presentation file if one was given, otherwise every tuple set
    /// found for the default `λ`.
    fn presentations(&mut self) -> Result<Vec<PresentationData>> {
        if let Some(path) = &self.config.presentation {
            return Ok(vec![self.load_file(path)?]);
        }
        if self.searched.is_none() {
            let (_, sets) = self.run_search()?;
            self.searched = Some(sets);
        }
        Ok(self.searched.clone().unwrap_or_default())
    }

    fn load_file(&self, path: &std::path::Path) -> Result<PresentationData> {
        let data = load(path)?;
        if data.params() != self.params {
            return Err(Error::Parameter(format!(
                "{} is for n = {}, q = {}, but the run is configured for n = {}, q = {}",
                path.display(),
                data.params().n(),
                data.params().q(),
                self.params.n(),
                self.params.q()
            )));
        }
        Ok(data)
    }

    fn run_search(&self) -> Result<(Vec<usize>, Vec<PresentationData>)> {
        let lambda = match &self.config.presentation {
            Some(path) => self.load_file(path)?.lambda().to_vec(),
            None => find_lambda(self.params)?.unwrap_or_default(),
        };
        if lambda.is_empty() {
            return Ok((lambda, Vec::new()));
        }
        let sets = search(self.params, &lambda)?;
        Ok((lambda, sets))
    }

    fn witness(
        &self,
        stage: &str,
        index: usize,
        data: &PresentationData,
        note: &str,
    ) -> Result<String> {
        let name = format!("witness-{stage}-{index:03}.antpres");
        let mut text = String::new();
        for line in note.lines() {
            text.push_str(&format!("# {line}\n"));
        }
        text.push_str(&to_text(data));
        write_file(&self.config.out.join(&name), &text)?;
        Ok(name)
    }

    fn geometry_stage(&mut self) -> Result<()> {
        let mut r = self.report("geometry");
        let (n, q) = (self.params.n(), self.params.q());
        r.section("subspaces");
        for dim in 1..=n {
            let got = self.geometry.subspaces(dim)?.len() as u128;
            let want = gaussian_binomial(self.params.width() as u32, dim as u32, q);
            r.check(
                &format!("dim-{dim}"),
                got == want,
                format!("{got}, expected {want}"),
            );
        }
        r.section("points-off-hyperplane");
        let want = u64::from(q).pow(n as u32) as usize;
        match self.geometry.count_points_off_hyperplane() {
            Ok(got) => r.check(
                "count",
                got == want,
                format!("{got}, expected q^n = {want}"),
            ),
            Err(e) => r.fail("count", e),
        }
        r.section("chambers");
        let got = self.geometry.chambers().len() as u128;
        let want = flag_count(n as u32, q);
        r.check("count", got == want, format!("{got}, expected {want}"));
        self.finish(r)
    }

    fn building_stage(&mut self) -> Result<()> {
        let mut r = self.report("building");
        let p = self.config.p;
        let m = self.config.precision;
        let field = LocalFieldParams::new(p, self.params.n())?;
        let base = field.base_vertex();
        let g = &self.geometry;

        r.section("chamber-edges");
        let chambers = g.chambers();
        let chains = chambers
            .iter()
            .map(|c| chamber_chain(c.flag(), &base, g))
            .collect::<Result<Vec<_>>>()?;
        let bad = chains
            .iter()
            .zip(&chambers)
            .find_map(|(chain, c)| match chain.edges() {
                Ok(e) if e.len() == self.params.width() => None,
                Ok(e) => Some(format!("chamber {:?} has {} edges", c.indices(), e.len())),
                Err(err) => Some(format!("chamber {:?}: {err}", c.indices())),
            });
        r.kv("chambers", chains.len());
        r.check(
            "edges-per-chamber",
            bad.is_none(),
            bad.unwrap_or_else(|| format!("all {}", self.params.width())),
        );

        let mut precision_error = None;
        r.section("vertex-partition");
        match verify_partition_pa(&base, g, m) {
            Ok(rep) => partition_lines(&mut r, &rep, None),
            Err(e @ Error::Precision { .. }) => precision_error = Some(e),
            Err(e) => return Err(e),
        }

        r.section("successor-partition");
        if precision_error.is_none() {
            let expected = (p as usize).pow(self.params.n() as u32);
            for (point, edge) in edges_from(&base, g)? {
                match verify_partition_pb(&edge, g, m) {
                    Ok(rep) => {
                        let key = format!("edge-{}", point.index());
                        partition_lines(&mut r, &rep, Some(&key));
                        r.check(
                            &format!("{key}.blocks"),
                            rep.blocks.len() == expected,
                            format!("{}, expected q^n = {expected}", rep.blocks.len()),
                        );
                    }
                    Err(e @ Error::Precision { .. }) => {
                        precision_error = Some(e);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }

        r.section("chamber-partition");
        if precision_error.is_none() {
            for (chain, chamber) in chains.iter().zip(&chambers) {
                match verify_partition_pc(chain, g, m) {
                    Ok(rep) => {
                        let key = format!("chamber-{}", join(&chamber.indices()));
                        partition_lines(&mut r, &rep, Some(&key));
                        r.check(
                            &format!("{key}.blocks"),
                            rep.blocks.len() == self.params.width(),
                            rep.blocks.len(),
                        );
                    }
                    Err(e @ Error::Precision { .. }) => {
                        precision_error = Some(e);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }

        r.section("canonical-sweep");
        let (checked, failure) = canonical_sweep(p, self.params.width(), self.config.seed)?;
        r.kv("samples", checked);
        r.check("invariance", failure.is_none(), failure.unwrap_or_default());

        if let Some(e) = precision_error {
            r.section("error");
            r.fail("precision", &e);
            self.finish(r)?;
            return Err(e);
        }
        self.finish(r)
    }

    fn search_stage(&mut self) -> Result<()> {
        let mut r = self.report("search");
        let (lambda, sets) = self.run_search()?;
        r.section("lambda");
        r.kv(
            "source",
            if self.config.presentation.is_some() {
                "file"
            } else {
                "joint-search"
            },
        );
        r.kv("lambda", format!("[{}]", join(&lambda)));
        r.section("tuple-sets");
        r.check("count", !sets.is_empty(), sets.len());
        let want = flag_count(self.params.n() as u32, self.params.q()) as usize;
        for (i, data) in sets.iter().enumerate() {
            let key = format!("set-{i:03}");
            let name = format!("presentation-{i:03}.antpres");
            write_file(&self.config.out.join(&name), &to_text(data))?;
            r.kv(&format!("{key}.file"), &name);
            let profile = data.orbit_profile();
            let covered: usize = profile.iter().map(|(size, count)| size * count).sum();
            let orbits: Vec<String> = profile.iter().map(|(s, c)| format!("{c}x{s}")).collect();
            r.kv(&format!("{key}.orbits"), orbits.join(" "));
            r.check(
                &format!("{key}.tuples"),
                data.tuples().len() == want && covered == want,
                format!("{}, expected {want}", data.tuples().len()),
            );
            let valid = presentation::validate(data).is_valid();
            r.check(&format!("{key}.validate"), valid, "");
        }
        self.searched = Some(sets);
        self.finish(r)
    }

    fn validate_stage(&mut self) -> Result<()> {
        let mut r = self.report("validate");
        for (i, data) in self.presentations()?.iter().enumerate() {
            r.section(&format!("presentation-{i:03}"));
            for c in presentation::validate(data).checks {
                match &c.witness {
                    None => r.check(c.id, true, c.description),
                    Some(w) => r.fail(c.id, format!("{}; witness: {w}", c.description)),
                }
            }
        }
        self.finish(r)
    }

    fn coinvariants_stage(&mut self) -> Result<()> {
        struct Row {
            key: String,
            shape: (usize, usize),
            group: AbelianGroupStructure,
            epsilon: std::result::Result<u64, String>,
        }
        let mut r = self.report("coinvariants");
        r.kv("label", UPPER_BOUND_LABEL);
        let bound = epsilon_bound(self.params);
        let sets = self.presentations()?;
        let all = [RelationKind::C, RelationKind::A, RelationKind::B];
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        let mut witnesses = Vec::new();
        for (i, data) in sets.iter().enumerate() {
            let key = format!("presentation-{i:03}");
            let matrix = match build_relation_matrix(data, &all) {
                Ok(m) => m,
                Err(e @ Error::Validation(_)) => {
                    failures.push((key, e.to_string()));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let group = presented_group(data)?;
            let epsilon = match epsilon_order(data) {
                Ok(k) => Ok(k),
                Err(Error::Falsified(msg)) => {
                    witnesses.push((i, msg.clone()));
                    Err(msg)
                }
                Err(e) => return Err(e),
            };
            if !group.is_finite() {
                witnesses.push((i, format!("free rank {} in {group}", group.free_rank)));
            }
            // Dropping the tuple relations can only enlarge the group.
            let ca = build_relation_matrix(data, &[RelationKind::C, RelationKind::A])?;
            let ca_group = AbelianGroupStructure::from_relations(&ca.matrix)?;
            if !quotient_compatible(&group, &ca_group) {
                failures.push((
                    key.clone(),
                    format!("{group} is not a quotient of the (C),(A) group {ca_group}"),
                ));
            }
            rows.push(Row {
                key,
                shape: matrix.shape(),
                group,
                epsilon,
            });
        }

        r.section("matrix-shape");
        for row in &rows {
            r.kv(&row.key, format!("{} x {}", row.shape.0, row.shape.1));
        }
        r.section("invariant-factors");
        for row in &rows {
            r.kv(&row.key, format!("[{}]", join(&factors_u64(&row.group))));
        }
        r.section("free-rank");
        for row in &rows {
            r.check(&row.key, row.group.is_finite(), row.group.free_rank);
        }
        r.section("epsilon-order");
        for row in &rows {
            match &row.epsilon {
                Ok(k) => r.check(
                    &row.key,
                    bound.is_multiple_of(*k),
                    format!("{k}, divides q^n - 1 = {bound}"),
                ),
                Err(msg) => r.fail(&row.key, msg),
            }
        }
        r.section("verdict");
        for row in &rows {
            r.kv(&row.key, distribution_certificate(&row.group));
        }
        if !failures.is_empty() || !witnesses.is_empty() {
            r.section("witnesses");
            for (key, message) in failures {
                r.fail(&key, message);
            }
            for (i, message) in witnesses {
                let file = self.witness("coinvariants", i, &sets[i], &message)?;
                r.fail(
                    &format!("presentation-{i:03}"),
                    format!("{message}; serialized to {file}"),
                );
            }
        }
        self.finish(r)
    }

    fn abelianization_stage(&mut self) -> Result<()> {
        let mut r = self.report("abelianization");
        for (i, data) in self.presentations()?.iter().enumerate() {
            let key = format!("presentation-{i:03}");
            r.section(&key);
            let (ab, theta) = match abelianization(data).and_then(|ab| Ok((ab, theta_check(data)?)))
            {
                Ok(v) => v,
                Err(e @ Error::Validation(_)) => {
                    r.fail("input", e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            r.kv("gamma-ab", &ab);
            r.kv("gamma-ab.free-rank", ab.free_rank);
            r.kv("epsilon-quotient", &theta.quotient);
            r.check(
                "relations-hold",
                theta.violated_relation.is_none(),
                theta
                    .violated_relation
                    .as_ref()
                    .map(|t| format!("tuple {t:?}"))
                    .unwrap_or_default(),
            );
            r.check("stacked-snf-agrees", theta.stacked_agrees, "");
            r.check(
                "quotient-compatible",
                theta.quotient_compatible,
                format!("{} onto {}", theta.abelianization, theta.quotient),
            );
            if !theta.holds() {
                let file = self.witness(
                    "abelianization",
                    i,
                    data,
                    "epsilon quotient is not a quotient of the abelianization",
                )?;
                r.kv("witness", file);
            }
        }
        self.finish(r)
    }

    fn certify_stage(&mut self) -> Result<()> {
        let mut r = self.report("certificate");
        let mut overall = Verdict::Certified;
        r.section("presentations");
        for (i, data) in self.presentations()?.iter().enumerate() {
            let key = format!("presentation-{i:03}");
            match presented_group(data) {
                Ok(g) => {
                    let v = distribution_certificate(&g);
                    r.check(&key, v == Verdict::Certified, &v);
                    if v != Verdict::Certified && overall == Verdict::Certified {
                        overall = v;
                    }
                }
                Err(e @ Error::Validation(_)) => {
                    r.fail(&key, e);
                    overall = Verdict::Inconclusive { free_rank: 0 };
                }
                Err(e) => return Err(e),
            }
        }
        r.section("verdict");
        r.kv("label", UPPER_BOUND_LABEL);
        r.check("certificate", overall == Verdict::Certified, &overall);
        self.outcome.verdict = Some(overall);
        self.finish(r)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn partition_lines(r: &mut Report, rep: &PartitionReport, prefix: Option<&str>) {
    let key = |k: &str| prefix.map_or_else(|| k.to_string(), |p| format!("{p}.{k}"));
    r.kv(&key("lines"), rep.universe.len());
    r.kv(&key("block-sizes"), join(&rep.block_sizes()));
    r.check(
        &key("uncovered"),
        rep.uncovered.is_empty(),
        rep.uncovered.len(),
    );
    r.check(
        &key("multiply-covered"),
        rep.multiply_covered.is_empty(),
        rep.multiply_covered.len(),
    );
    if let Some(s) = &rep.successors {
        r.check(
            &key("successor-criterion"),
            s.is_exact(),
            format!(
                "{} contained, {} partial, {} empty, {} mismatches",
                s.contained.len(),
                s.partial.len(),
                s.empty.len(),
                s.criterion_mismatches.len()
            ),
        );
    }
}

/// Canonical forms must not change under unimodular column operations or
/// unit rescaling of the generators, and classes must not change under
/// scaling by `p`. Returns the number of samples and the first failure.
fn canonical_sweep(p: u64, width: usize, seed: u64) -> Result<(usize, Option<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = (p * p) as i64;
    for _ in 0..SWEEP_SAMPLES {
        let (m, lattice) = loop {
            let m: Vec<Vec<i64>> = (0..width)
                .map(|_| (0..width).map(|_| rng.gen_range(-bound..=bound)).collect())
                .collect();
            match canonical_lattice(p, &m) {
                Ok(l) => break (m, l),
                Err(Error::Parameter(_)) | Err(Error::Singular) => continue,
                Err(e) => return Err(e),
            }
        };
        let mut t = m.clone();
        for _ in 0..6 {
            let (i, j) = (rng.gen_range(0..width), rng.gen_range(0..width));
            match rng.gen_range(0..3) {
                0 if i != j => {
                    let k = rng.gen_range(-2..=2i64);
                    for row in t.iter_mut() {
                        row[i] += k * row[j];
                    }
                }
                1 => {
                    for row in t.iter_mut() {
                        row.swap(i, j);
                    }
                }
                _ => {
                    let unit = loop {
                        let u = rng.gen_range(1..=bound) * if rng.gen_bool(0.5) { 1 } else { -1 };
                        if u.rem_euclid(p as i64) != 0 {
                            break u;
                        }
                    };
                    for row in t.iter_mut() {
                        row[i] *= unit;
                    }
                }
            }
        }
        if canonical_lattice(p, &t)? != lattice {
            return Ok((
                SWEEP_SAMPLES,
                Some(format!(
                    "generators {m:?} and {t:?} give different canonical forms"
                )),
            ));
        }
        let scaled: Vec<Vec<i64>> = m
            .iter()
            .map(|row| row.iter().map(|x| x * p as i64).collect())
            .collect();
        if class_of(&canonical_lattice(p, &scaled)?) != class_of(&lattice) {
            return Ok((
                SWEEP_SAMPLES,
                Some(format!("class of {m:?} changes under scaling by p")),
            ));
        }
    }
    Ok((SWEEP_SAMPLES, None))
}
