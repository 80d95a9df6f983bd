//! The staged verification run and its deterministic text report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use bialg_core::checks::{Check, CheckReport};
use bialg_core::coalgebra::{is_cotriangular, verify_coalgebra, Coalgebra, Vect};
use bialg_core::free_tensor::{verify_duality, verify_free_bialgebra, TensorElement};
use bialg_core::hopf::{
    antipode_general, antipode_systems, antipode_triangular, closure_iterate, closure_minimality,
    perturbation_uniqueness, verify_hopf_quotient, verify_y_coproduct, AntipodeTable, ClosureResult,
};
use bialg_core::lifting::{verify_lift, verify_lift_oracle};
use bialg_core::realization::{relation_persistence, verify_coideal, KernelPersistence, RelationSpace};
use bialg_core::CoreError;
use serde::Serialize;

use crate::input::{render_document, AntipodeMode, InputDocument, Lit, RawTerms};

/// Seed of the perturbation trials, fixed so reports are reproducible.
pub const PERTURBATION_SEED: u64 = 0x5eed;
pub const PERTURBATION_TRIALS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    VerifyCoalgebras,
    VerifyFreeBialgebra,
    VerifyLift,
    Relations,
    CoidealCheck,
    Antipode,
    Closure,
    HopfCheck,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::VerifyCoalgebras,
        Stage::VerifyFreeBialgebra,
        Stage::VerifyLift,
        Stage::Relations,
        Stage::CoidealCheck,
        Stage::Antipode,
        Stage::Closure,
        Stage::HopfCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::VerifyCoalgebras => "verify-coalgebras",
            Stage::VerifyFreeBialgebra => "verify-free-bialgebra",
            Stage::VerifyLift => "verify-lift",
            Stage::Relations => "relations",
            Stage::CoidealCheck => "coideal-check",
            Stage::Antipode => "antipode",
            Stage::Closure => "closure",
            Stage::HopfCheck => "hopf-check",
        }
    }

    /// Stages whose failure makes this one meaningless.
    pub fn depends_on(self) -> &'static [Stage] {
        match self {
            Stage::VerifyCoalgebras => &[],
            Stage::VerifyFreeBialgebra | Stage::VerifyLift => &[Stage::VerifyCoalgebras],
            Stage::Relations | Stage::Antipode => &[Stage::VerifyLift],
            Stage::CoidealCheck => &[Stage::Relations],
            Stage::Closure => &[Stage::Relations, Stage::Antipode],
            Stage::HopfCheck => &[Stage::Closure],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.name() == s.trim()).ok_or_else(|| format!("unknown stage `{}`", s.trim()))
    }
}

/// Parses a comma-separated stage list; `all` selects every stage.
pub fn parse_stages(list: &str) -> Result<BTreeSet<Stage>, String> {
    let mut out = BTreeSet::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        if part.trim() == "all" {
            out.extend(Stage::ALL);
        } else {
            out.insert(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err("empty stage list".into());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    FailedPrecondition(String),
    Skipped { after: Stage },
}

impl Status {
    pub fn passed(&self) -> bool {
        matches!(self, Status::Pass)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => f.write_str("PASS"),
            Status::Fail => f.write_str("FAIL"),
            Status::FailedPrecondition(_) => f.write_str("FAILED-PRECONDITION"),
            Status::Skipped { after } => write!(f, "SKIPPED ({after} did not pass)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub stage: Stage,
    pub status: Status,
    pub lines: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub header: Vec<String>,
    pub sections: Vec<Section>,
    /// Machine-readable results, written with `--emit`.
    pub emitted: String,
}

impl Report {
    /// Every executed stage passed.
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.status.passed())
    }

    pub fn section(&self, stage: Stage) -> Option<&Section> {
        self.sections.iter().find(|s| s.stage == stage)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.header {
            writeln!(f, "{line}")?;
        }
        for s in &self.sections {
            writeln!(f)?;
            writeln!(f, "== {}: {} ==", s.stage, s.status)?;
            for line in &s.lines {
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

#[derive(Default, Serialize)]
struct Emitted {
    stages: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    relations: BTreeMap<String, Vec<RawTerms>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    antipode: BTreeMap<String, RawTerms>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closure: Option<EmittedClosure>,
}

#[derive(Serialize)]
struct EmittedClosure {
    stabilized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    stable_at: Option<usize>,
    stage_dims: Vec<usize>,
    generators: Vec<RawTerms>,
    quotient_dims: BTreeMap<String, usize>,
}

/// Why an intermediate result is unavailable.
#[derive(Clone, Debug)]
struct Unavailable {
    precondition: bool,
    message: String,
}

impl Unavailable {
    fn status(self) -> (Status, Vec<String>) {
        let status = if self.precondition { Status::FailedPrecondition(self.message.clone()) } else { Status::Fail };
        (status, vec![self.message])
    }
}

impl From<CoreError> for Unavailable {
    fn from(e: CoreError) -> Self {
        Unavailable { precondition: precondition(&e), message: e.to_string() }
    }
}

/// Outcome of a lazily computed intermediate result.
type Computed<T> = Option<Result<T, Unavailable>>;

struct Run<'a> {
    doc: &'a InputDocument,
    n: usize,
    d: usize,
    relations: Computed<Vec<KernelPersistence>>,
    r0: Computed<KernelPersistence>,
    table: Computed<AntipodeTable>,
    closure: Computed<ClosureResult>,
    emitted: Emitted,
}

fn element_text(l: &Coalgebra, e: &TensorElement) -> String {
    e.display_with(|id| l.label(id))
}

fn element_terms(l: &Coalgebra, e: &TensorElement) -> RawTerms {
    e.terms()
        .iter()
        .map(|(w, c)| {
            let name = if w.is_empty() {
                "1".to_string()
            } else {
                w.letters().iter().map(|id| l.label(id)).collect::<Vec<_>>().join("⊗")
            };
            (name, Lit(c.clone()))
        })
        .collect()
}

fn check_lines(report: &CheckReport, tag: &str, lines: &mut Vec<String>) -> bool {
    for c in &report.checks {
        lines.push(format!("{c} {tag}"));
    }
    report.passed()
}

fn precondition(e: &CoreError) -> bool {
    matches!(e, CoreError::Precondition(_) | CoreError::Unsupported(_))
}

impl<'a> Run<'a> {
    fn tag(&self) -> String {
        format!("[N = {}, d = {}]", self.n, self.d)
    }

    fn l(&self) -> &'a Coalgebra {
        self.doc.spec.l_coalg()
    }

    fn relations(&mut self) -> Result<&Vec<KernelPersistence>, Unavailable> {
        if self.relations.is_none() {
            let spec = &self.doc.spec;
            let computed = (1..=self.d)
                .map(|k| relation_persistence(spec, k, false))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Unavailable::from);
            self.relations = Some(computed);
        }
        self.relations.as_ref().expect("just set").as_ref().map_err(Clone::clone)
    }

    fn r0(&mut self) -> Result<&KernelPersistence, Unavailable> {
        if self.r0.is_none() {
            self.r0 = Some(relation_persistence(&self.doc.spec, self.d, true).map_err(Unavailable::from));
        }
        self.r0.as_ref().expect("just set").as_ref().map_err(Clone::clone)
    }

    fn table(&mut self) -> Result<&AntipodeTable, Unavailable> {
        if self.table.is_none() {
            let spec = &self.doc.spec;
            let triangular = match self.doc.params.antipode {
                AntipodeMode::Auto => is_cotriangular(spec.l_coalg()),
                AntipodeMode::Triangular => true,
                AntipodeMode::General => false,
            };
            let computed = if triangular {
                antipode_triangular(spec, self.d).map_err(Unavailable::from)
            } else {
                match antipode_general(spec, self.d) {
                    Ok(Some(t)) => Ok(t),
                    Ok(None) => Err(Unavailable {
                        precondition: false,
                        message: format!(
                            "no antipode found in the operator algebra at bound {} (N = {})",
                            self.d, self.n
                        ),
                    }),
                    Err(e) => Err(e.into()),
                }
            };
            self.table = Some(computed);
        }
        self.table.as_ref().expect("just set").as_ref().map_err(Clone::clone)
    }

    fn closure(&mut self) -> Result<&ClosureResult, Unavailable> {
        if self.closure.is_none() {
            let computed = (|| {
                let r0 = self.r0()?.stable().basis.clone();
                let table = self.table()?.clone();
                closure_iterate(self.l(), &table, &r0, self.doc.params.max_stages, self.d).map_err(Unavailable::from)
            })();
            self.closure = Some(computed);
        }
        self.closure.as_ref().expect("just set").as_ref().map_err(Clone::clone)
    }

    fn verify_coalgebras(&mut self) -> (Status, Vec<String>) {
        let mut lines = Vec::new();
        let mut ok = true;
        let names = [("L", self.doc.l_name(), self.l()), ("F", self.doc.f_name(), self.doc.spec.f_ctx().f())];
        for (role, name, c) in names {
            let report = verify_coalgebra(c);
            ok &= report.passed();
            let verdict = if report.passed() { "pass" } else { "FAIL" };
            lines.push(format!(
                "{role} = `{name}` (dim {}): coassociativity and counit laws: {verdict} ({} basis elements)",
                c.dim(),
                c.basis().len()
            ));
            for b in report.failures() {
                lines.push(format!(
                    "  {}: coassociative {}, left counit {}, right counit {}",
                    c.label(&b.id),
                    b.coassociative,
                    b.left_counit,
                    b.right_counit
                ));
            }
        }
        (if ok { Status::Pass } else { Status::Fail }, lines)
    }

    fn verify_free_bialgebra(&mut self) -> (Status, Vec<String>) {
        let ctx = self.doc.spec.f_ctx();
        let mut report = verify_free_bialgebra(ctx);
        if ctx.f().source_algebra().is_some() {
            match verify_duality(ctx, ctx.max_degree().min(2)) {
                Ok(c) => report.checks.push(c),
                Err(e) => report.checks.push({
                    let mut c = Check::new("duality");
                    c.fail(e.to_string());
                    c
                }),
            }
        }
        let mut lines = vec![format!("F = `{}`, words of degree <= {}", self.doc.f_name(), ctx.max_degree().min(3))];
        let ok = check_lines(&report, &self.tag(), &mut lines);
        (if ok { Status::Pass } else { Status::Fail }, lines)
    }

    fn verify_lift(&mut self) -> (Status, Vec<String>) {
        let spec = &self.doc.spec;
        let tag = self.tag();
        let mut lines = Vec::new();
        let mut ok = true;
        match verify_lift_oracle(spec) {
            Ok(c) => {
                ok &= c.passed();
                lines.push(format!("{c} {tag}"));
            }
            Err(e) => return (Status::FailedPrecondition(e.to_string()), vec![e.to_string()]),
        }
        for id in self.l().basis() {
            match verify_lift(spec, &Vect::basis(*id)) {
                Ok(report) => {
                    lines.push(format!("X({}):", self.l().label(id)));
                    let mut sub = Vec::new();
                    ok &= check_lines(&report, &tag, &mut sub);
                    lines.extend(sub.into_iter().map(|s| format!("  {s}")));
                }
                Err(e) => return (Status::FailedPrecondition(e.to_string()), vec![e.to_string()]),
            }
        }
        (if ok { Status::Pass } else { Status::Fail }, lines)
    }

    fn relations_stage(&mut self) -> (Status, Vec<String>) {
        let l = self.l();
        let (n, d) = (self.n, self.d);
        let mut lines = Vec::new();
        let homogeneous = match self.relations() {
            Ok(r) => r.clone(),
            Err(e) => return e.status(),
        };
        let mut emitted = BTreeMap::new();
        for p in &homogeneous {
            let space = p.stable();
            lines.push(format!(
                "degree {} kernel: dim {} of {} (N = {n}: {}, N = {}: {}; {}) [N = {n}, d = {d}]",
                space.degree,
                space.dim(),
                space.ambient_dim,
                p.at_truncation.dim(),
                n + 1,
                p.at_next.dim(),
                if p.is_stable() { "stable" } else { "truncation-sensitive" }
            ));
            for r in &space.basis {
                lines.push(format!("  {}", element_text(l, r)));
            }
            for r in &p.unstable {
                lines.push(format!("  dropped at N = {}: {}", n + 1, element_text(l, r)));
            }
            emitted
                .insert(format!("degree_{}", space.degree), space.basis.iter().map(|r| element_terms(l, r)).collect());
        }
        let filtered = match self.r0() {
            Ok(r) => r.clone(),
            Err(e) => return e.status(),
        };
        let space = filtered.stable();
        lines.push(format!(
            "relations of degree <= {d} (closure seed): dim {} of {} ({}) [N = {n}, d = {d}]",
            space.dim(),
            space.ambient_dim,
            if filtered.is_stable() { "stable" } else { "truncation-sensitive" }
        ));
        for r in &space.basis {
            lines.push(format!("  {}", element_text(l, r)));
        }
        emitted.insert("filtered".to_string(), space.basis.iter().map(|r| element_terms(l, r)).collect());
        self.emitted.relations = emitted;
        (Status::Pass, lines)
    }

    fn coideal_stage(&mut self) -> (Status, Vec<String>) {
        let mut spaces: Vec<RelationSpace> = match self.relations() {
            Ok(r) => r.iter().map(|p| p.stable().clone()).collect(),
            Err(e) => return e.status(),
        };
        match self.r0() {
            Ok(r) => spaces.push(r.stable().clone()),
            Err(e) => return e.status(),
        }
        let report = verify_coideal(self.l(), &spaces, self.d);
        let mut lines = Vec::new();
        let ok = check_lines(&report, &self.tag(), &mut lines);
        (if ok { Status::Pass } else { Status::Fail }, lines)
    }

    fn antipode_stage(&mut self) -> (Status, Vec<String>) {
        let tag = self.tag();
        let table = match self.table() {
            Ok(t) => t.clone(),
            Err(e) => return e.status(),
        };
        let spec = &self.doc.spec;
        let l = self.l();
        let mut lines =
            vec![format!("method: {}, solution unique in the operator algebra: {} {tag}", table.method, table.unique)];
        let mut emitted = BTreeMap::new();
        for (id, e) in &table.entries {
            let note = if e.in_algebra { "" } else { " (outside the span of standard monomials)" };
            lines.push(format!("Y({}) = {}{note}", l.label(id), element_text(l, &e.expr)));
            emitted.insert(l.label(id), element_terms(l, &e.expr));
        }
        self.emitted.antipode = emitted;
        let mut report = CheckReport::default();
        let checks = (|| -> Result<(), CoreError> {
            let ys = table.entries.iter().map(|(id, e)| (*id, e.op.clone())).collect();
            report.checks.extend(antipode_systems(spec, &ys)?.checks);
            report.checks.extend(verify_y_coproduct(spec, &table, self.d)?.checks);
            report.checks.push(perturbation_uniqueness(spec, &table, PERTURBATION_TRIALS, PERTURBATION_SEED)?);
            Ok(())
        })();
        if let Err(e) = checks {
            lines.push(e.to_string());
            return (Status::Fail, lines);
        }
        let ok = check_lines(&report, &tag, &mut lines);
        (if ok { Status::Pass } else { Status::Fail }, lines)
    }

    fn closure_stage(&mut self) -> (Status, Vec<String>) {
        let tag = self.tag();
        let closure = match self.closure() {
            Ok(c) => c.clone(),
            Err(e) => return e.status(),
        };
        let l = self.l();
        let r0 = self.r0().expect("computed with the closure").stable().basis.clone();
        let table = self.table().expect("computed with the closure").clone();
        let mut lines = Vec::new();
        let mut ok = closure.stabilized;
        for (k, s) in closure.stages.iter().enumerate() {
            lines.push(format!(
                "stage {k}: dim {}, new images {}{}; {} {tag}",
                s.dim(),
                s.new_images,
                if s.truncated { ", images truncated at degree d" } else { "" },
                s.defect
            ));
            ok &= s.defect.passed();
        }
        match closure.stable_at {
            Some(k) => lines.push(format!("stabilized at stage {k} {tag}")),
            None => lines.push(format!("not stabilized within {} stages {tag}", self.doc.params.max_stages)),
        }
        for g in closure.generators() {
            lines.push(format!("  {}", element_text(l, g)));
        }
        for (k, dim) in &closure.quotient_dims {
            lines.push(format!("quotient dimension up to degree {k}: {dim} {tag}"));
        }
        if closure.stabilized {
            match closure_minimality(l, &table, &r0, &closure) {
                Ok(c) => {
                    ok &= c.passed();
                    lines.push(format!("{c} {tag}"));
                }
                Err(e) => {
                    ok = false;
                    lines.push(e.to_string());
                }
            }
        }
        self.emitted.closure = Some(EmittedClosure {
            stabilized: closure.stabilized,
            stable_at: closure.stable_at,
            stage_dims: closure.stages.iter().map(|s| s.dim()).collect(),
            generators: closure.generators().iter().map(|g| element_terms(l, g)).collect(),
            quotient_dims: closure.quotient_dims.iter().map(|(k, v)| (format!("degree_{k}"), *v)).collect(),
        });
        (if ok { Status::Pass } else { Status::Fail }, lines)
    }

    fn hopf_stage(&mut self) -> (Status, Vec<String>) {
        let closure = match self.closure() {
            Ok(c) => c.clone(),
            Err(e) => return e.status(),
        };
        let table = self.table().expect("computed with the closure").clone();
        match verify_hopf_quotient(self.l(), &table, &closure, self.d) {
            Ok(report) => {
                let mut lines = Vec::new();
                let ok = check_lines(&report, &self.tag(), &mut lines);
                (if ok { Status::Pass } else { Status::Fail }, lines)
            }
            Err(e) if precondition(&e) => (Status::FailedPrecondition(e.to_string()), vec![e.to_string()]),
            Err(e) => (Status::Fail, vec![e.to_string()]),
        }
    }
}

/// Runs the selected stages in their fixed order. A stage whose prerequisite
/// ran and did not pass is skipped; prerequisites that were not selected are
/// computed on demand without a section of their own.
pub fn run_pipeline(doc: &InputDocument, stages: &BTreeSet<Stage>) -> Report {
    let mut run = Run {
        doc,
        n: doc.params.truncation,
        d: doc.params.max_degree,
        relations: None,
        r0: None,
        table: None,
        closure: None,
        emitted: Emitted::default(),
    };
    let l: &Coalgebra = doc.spec.l_coalg();
    let mut header = vec![
        "bialg verification report".to_string(),
        format!(
            "L = `{}` (dim {}), F = `{}` (dim {}), truncation N = {}, degree bound d = {}, max stages = {}",
            doc.l_name(),
            l.dim(),
            doc.f_name(),
            doc.spec.f_ctx().f().dim(),
            run.n,
            run.d,
            doc.params.max_stages
        ),
    ];
    let not_run: Vec<&str> = Stage::ALL.iter().filter(|s| !stages.contains(s)).map(|s| s.name()).collect();
    header
        .push(format!("stages not requested: {}", if not_run.is_empty() { "none".into() } else { not_run.join(", ") }));

    let mut outcome: BTreeMap<Stage, bool> = BTreeMap::new();
    let mut sections = Vec::new();
    for stage in Stage::ALL.into_iter().filter(|s| stages.contains(s)) {
        let blocker = stage.depends_on().iter().find(|dep| outcome.get(dep) == Some(&false));
        let (status, lines) = match blocker {
            Some(dep) => (Status::Skipped { after: *dep }, Vec::new()),
            None => match stage {
                Stage::VerifyCoalgebras => run.verify_coalgebras(),
                Stage::VerifyFreeBialgebra => run.verify_free_bialgebra(),
                Stage::VerifyLift => run.verify_lift(),
                Stage::Relations => run.relations_stage(),
                Stage::CoidealCheck => run.coideal_stage(),
                Stage::Antipode => run.antipode_stage(),
                Stage::Closure => run.closure_stage(),
                Stage::HopfCheck => run.hopf_stage(),
            },
        };
        outcome.insert(stage, status.passed());
        run.emitted.stages.insert(stage.name().to_string(), status.to_string());
        sections.push(Section { stage, status, lines });
    }
    let mut raw = doc.raw.clone();
    raw.results = None;
    let mut emitted = render_document(&raw);
    let results = toml::to_string(&EmitWrapper { results: &run.emitted }).expect("results serialize");
    let _ = write!(emitted, "\n{results}");
    Report { header, sections, emitted }
}

#[derive(Serialize)]
struct EmitWrapper<'a> {
    results: &'a Emitted,
}

/// Default stage set of each subcommand.
pub fn subcommand_stages(name: &str) -> BTreeSet<Stage> {
    let list: &[Stage] = match name {
        "verify" => &[Stage::VerifyCoalgebras, Stage::VerifyFreeBialgebra, Stage::VerifyLift],
        "relations" => &[Stage::Relations, Stage::CoidealCheck],
        "antipode" => &[Stage::Antipode],
        "closure" => &[Stage::Closure, Stage::HopfCheck],
        _ => &Stage::ALL,
    };
    list.iter().copied().collect()
}
