//! The realization description file: a TOML document naming algebras,
//! coalgebras built from them, the action of `L` on `F`, and run parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use bialg_core::coalgebra::{
    direct_sum, dual_coalgebra, triangular_coalgebra, AlgebraPresentation, BasisId, Coalgebra, Vect,
};
use bialg_core::exactlin::{parse_scalar, Matrix, Scalar};
use bialg_core::free_tensor::TensorContext;
use bialg_core::invariant::{Form, RIOp};
use bialg_core::lifting::{FAction, RealizationSpec};
use bialg_core::CoreError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_ALGEBRA_DIM: usize = 256;
/// Largest `n` with `n(n+1)/2 <= MAX_ALGEBRA_DIM`.
pub const MAX_TRIANGULAR_SIZE: usize = 22;
pub const MAX_TRUNCATION: usize = 8;
pub const MAX_DEGREE: usize = 8;
pub const MAX_STAGES: usize = 64;
/// Cap on `dim(F)^N` and `dim(L)^d`, the sizes of the largest graded pieces.
pub const MAX_GRADED_DIM: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unresolved name: {0}")]
    Resolution(String),
    #[error("invalid document:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

/// An exact rational literal, written `"p/q"`, `"p"` or as a bare integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lit(pub Scalar);

impl Serialize for Lit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Lit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Lit;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational literal \"p/q\" or an integer")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Lit, E> {
                Ok(Lit(Scalar::from_integer(v.into())))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Lit, E> {
                parse_scalar(v).map(Lit).map_err(|e| E::custom(format!("`{v}`: {e}")))
            }
        }
        d.deserialize_any(V)
    }
}

pub type RawTerms = BTreeMap<String, Lit>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProduct {
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub value: RawTerms,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RawAlgebra {
    UpperTriangular {
        n: usize,
    },
    TruncatedPolynomial {
        order: usize,
    },
    GroundField,
    Table {
        basis: Vec<String>,
        unit: RawTerms,
        #[serde(default)]
        products: Vec<RawProduct>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RawCoalgebra {
    Dual { algebra: String },
    Triangular { n: usize },
    DirectSum { parts: Vec<String> },
}

/// Action of one basis element of `L`: `identity·id + (form ⊗ id)Δ`, or an
/// explicit matrix in the basis order of `F`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAction {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<Lit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<RawTerms>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Lit>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRealization {
    pub l: String,
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag_pairs: Option<Vec<[String; 2]>>,
    pub x: BTreeMap<String, RawAction>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntipodeMode {
    /// Triangular back-substitution when `L` is cotriangular, else the linear solver.
    #[default]
    Auto,
    Triangular,
    General,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_stages: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antipode: Option<AntipodeMode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    #[serde(default)]
    pub algebras: BTreeMap<String, RawAlgebra>,
    #[serde(default)]
    pub coalgebras: BTreeMap<String, RawCoalgebra>,
    pub realization: RawRealization,
    #[serde(default)]
    pub parameters: RawParameters,
    /// Results of an earlier run, as written by `--emit`; not read back.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<toml::Table>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parameters {
    pub truncation: usize,
    pub max_degree: usize,
    pub max_stages: usize,
    pub antipode: AntipodeMode,
}

impl Parameters {
    pub const DEFAULT_TRUNCATION: usize = 3;
    pub const DEFAULT_MAX_DEGREE: usize = 3;
    pub const DEFAULT_MAX_STAGES: usize = 3;
}

/// A parsed document with every name resolved and the realization built.
#[derive(Clone, Debug)]
pub struct InputDocument {
    pub raw: RawDocument,
    pub coalgebras: BTreeMap<String, Coalgebra>,
    pub spec: RealizationSpec,
    pub params: Parameters,
}

impl InputDocument {
    pub fn l_name(&self) -> &str {
        &self.raw.realization.l
    }

    pub fn f_name(&self) -> &str {
        &self.raw.realization.f
    }

    /// Replaces the run parameters, rebuilding the realization for a new truncation.
    pub fn with_overrides(
        mut self,
        truncation: Option<usize>,
        max_degree: Option<usize>,
        max_stages: Option<usize>,
    ) -> Result<Self, InputError> {
        let p = &mut self.raw.parameters;
        p.truncation = truncation.or(p.truncation);
        p.max_degree = max_degree.or(p.max_degree);
        p.max_stages = max_stages.or(p.max_stages);
        let params = check_parameters(&self.raw.parameters, &self.spec)?;
        if params.truncation != self.spec.truncation() {
            self.spec = self.spec.with_truncation(params.truncation).map_err(core_error)?;
        }
        self.params = params;
        Ok(self)
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = text.get(..offset).unwrap_or(text);
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn core_error(e: CoreError) -> InputError {
    match e {
        CoreError::InvalidSpec(list) | CoreError::InvalidAlgebra(list) => InputError::Validation(list),
        CoreError::UnknownBasis(id) => InputError::Resolution(format!("basis element {id}")),
        other => InputError::Validation(vec![other.to_string()]),
    }
}

/// Parses and resolves a document.
pub fn parse_input(text: &str) -> Result<InputDocument, InputError> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| position(text, s.start));
        InputError::Parse { line, column, message: e.message().trim().to_string() }
    })?;
    resolve(raw)
}

/// Serializes the document back to the input format.
pub fn render_document(raw: &RawDocument) -> String {
    toml::to_string(raw).expect("documents serialize")
}

fn build_algebra(name: &str, raw: &RawAlgebra) -> Result<AlgebraPresentation, InputError> {
    let bad = |m: String| InputError::Validation(vec![format!("algebra `{name}`: {m}")]);
    let alg = match raw {
        RawAlgebra::UpperTriangular { n } => {
            if *n == 0 || *n > MAX_TRIANGULAR_SIZE {
                return Err(bad(format!("size {n} outside 1..={MAX_TRIANGULAR_SIZE}")));
            }
            AlgebraPresentation::upper_triangular(*n).map_err(core_error)?
        }
        RawAlgebra::TruncatedPolynomial { order } => {
            if *order == 0 || *order > MAX_ALGEBRA_DIM {
                return Err(bad(format!("order {order} outside 1..={MAX_ALGEBRA_DIM}")));
            }
            AlgebraPresentation::truncated_polynomial(*order).map_err(core_error)?
        }
        RawAlgebra::GroundField => AlgebraPresentation::ground_field(),
        RawAlgebra::Table { basis, unit, products } => {
            if basis.is_empty() || basis.len() > MAX_ALGEBRA_DIM {
                return Err(bad(format!("basis size {} outside 1..={MAX_ALGEBRA_DIM}", basis.len())));
            }
            let index: BTreeMap<&str, usize> = basis.iter().enumerate().map(|(k, b)| (b.as_str(), k)).collect();
            if index.len() != basis.len() {
                return Err(bad("duplicate basis names".into()));
            }
            let lookup = |b: &str| {
                index
                    .get(b)
                    .copied()
                    .ok_or_else(|| InputError::Resolution(format!("`{b}` is not a basis element of algebra `{name}`")))
            };
            let vect = |terms: &RawTerms| -> Result<Vect, InputError> {
                let mut out = Vec::new();
                for (b, c) in terms {
                    out.push((BasisId::Plain(lookup(b)?), c.0.clone()));
                }
                Ok(Vect::from_terms(out))
            };
            let mut structure = BTreeMap::new();
            for p in products {
                let key = (lookup(&p.left)?, lookup(&p.right)?);
                if structure.insert(key, vect(&p.value)?).is_some() {
                    return Err(bad(format!("product {}·{} given twice", p.left, p.right)));
                }
            }
            let alg = AlgebraPresentation::new(basis.len(), structure, vect(unit)?).with_labels(basis.clone());
            let problems = alg.violations();
            if !problems.is_empty() {
                return Err(InputError::Validation(
                    problems.into_iter().map(|p| format!("algebra `{name}`: {p}")).collect(),
                ));
            }
            alg
        }
    };
    Ok(alg)
}

struct CoalgebraBuilder<'a> {
    raw: &'a RawDocument,
    algebras: BTreeMap<String, AlgebraPresentation>,
    done: BTreeMap<String, Coalgebra>,
    active: BTreeSet<String>,
}

impl CoalgebraBuilder<'_> {
    fn build(&mut self, name: &str) -> Result<Coalgebra, InputError> {
        if let Some(c) = self.done.get(name) {
            return Ok(c.clone());
        }
        let raw = self
            .raw
            .coalgebras
            .get(name)
            .ok_or_else(|| InputError::Resolution(format!("no coalgebra named `{name}`")))?;
        if !self.active.insert(name.to_string()) {
            return Err(InputError::Validation(vec![format!("coalgebra `{name}` is defined in terms of itself")]));
        }
        let c = match raw {
            RawCoalgebra::Dual { algebra } => {
                let a = self
                    .algebras
                    .get(algebra)
                    .ok_or_else(|| InputError::Resolution(format!("no algebra named `{algebra}`")))?;
                dual_coalgebra(a).map_err(core_error)?
            }
            RawCoalgebra::Triangular { n } => {
                if *n == 0 || *n > MAX_TRIANGULAR_SIZE {
                    return Err(InputError::Validation(vec![format!(
                        "coalgebra `{name}`: size {n} outside 1..={MAX_TRIANGULAR_SIZE}"
                    )]));
                }
                triangular_coalgebra(*n).map_err(core_error)?
            }
            RawCoalgebra::DirectSum { parts } => {
                if parts.is_empty() {
                    return Err(InputError::Validation(vec![format!("coalgebra `{name}`: empty direct sum")]));
                }
                let built = parts.iter().map(|p| self.build(p)).collect::<Result<Vec<_>, _>>()?;
                let sum = direct_sum(&built).map_err(core_error)?;
                if sum.dim() > MAX_ALGEBRA_DIM {
                    return Err(InputError::Validation(vec![format!(
                        "coalgebra `{name}` has dimension {} > {MAX_ALGEBRA_DIM}",
                        sum.dim()
                    )]));
                }
                sum
            }
        };
        self.active.remove(name);
        self.done.insert(name.to_string(), c.clone());
        Ok(c)
    }
}

/// Finds a basis element by label (such as `f[2,1]`) or by id syntax.
pub fn resolve_basis(c: &Coalgebra, name: &str) -> Option<BasisId> {
    let name = name.trim();
    if let Some((id, _)) = c.labels().iter().find(|(_, l)| l.as_str() == name) {
        return Some(*id);
    }
    BasisId::from_str(name).ok().filter(|id| c.contains(id))
}

fn lookup_in(c: &Coalgebra, which: &str, name: &str) -> Result<BasisId, InputError> {
    resolve_basis(c, name).ok_or_else(|| InputError::Resolution(format!("`{name}` is not a basis element of {which}")))
}

fn check_parameters(raw: &RawParameters, spec: &RealizationSpec) -> Result<Parameters, InputError> {
    let params = Parameters {
        truncation: raw.truncation.unwrap_or(Parameters::DEFAULT_TRUNCATION),
        max_degree: raw.max_degree.unwrap_or(Parameters::DEFAULT_MAX_DEGREE),
        max_stages: raw.max_stages.unwrap_or(Parameters::DEFAULT_MAX_STAGES),
        antipode: raw.antipode.unwrap_or_default(),
    };
    let mut problems = Vec::new();
    let mut in_range = |what: &str, v: usize, hi: usize| {
        if v == 0 || v > hi {
            problems.push(format!("{what} = {v} outside 1..={hi}"));
        }
    };
    in_range("truncation", params.truncation, MAX_TRUNCATION);
    in_range("max_degree", params.max_degree, MAX_DEGREE);
    in_range("max_stages", params.max_stages, MAX_STAGES);
    let graded = |dim: usize, n: usize| (dim as u128).checked_pow(n as u32).is_none_or(|v| v > MAX_GRADED_DIM as u128);
    let (fd, ld) = (spec.f_ctx().f().dim(), spec.l_coalg().dim());
    if params.truncation <= MAX_TRUNCATION && graded(fd, params.truncation) {
        problems.push(format!("dim(F)^truncation = {fd}^{} exceeds {MAX_GRADED_DIM}", params.truncation));
    }
    if params.max_degree <= MAX_DEGREE && graded(ld, params.max_degree) {
        problems.push(format!("dim(L)^max_degree = {ld}^{} exceeds {MAX_GRADED_DIM}", params.max_degree));
    }
    if problems.is_empty() {
        Ok(params)
    } else {
        Err(InputError::Validation(problems))
    }
}

fn resolve(raw: RawDocument) -> Result<InputDocument, InputError> {
    let mut algebras = BTreeMap::new();
    for (name, a) in &raw.algebras {
        algebras.insert(name.clone(), build_algebra(name, a)?);
    }
    let mut builder = CoalgebraBuilder { raw: &raw, algebras, done: BTreeMap::new(), active: BTreeSet::new() };
    for name in raw.coalgebras.keys() {
        builder.build(name)?;
    }
    let real = &raw.realization;
    let l = builder.build(&real.l)?;
    let f = builder.build(&real.f)?;
    let coalgebras = builder.done;

    let mut x_map = BTreeMap::new();
    let mut problems = Vec::new();
    for (name, action) in &real.x {
        let id = lookup_in(&l, "L", name)?;
        let explicit = action.matrix.is_some();
        if explicit && (action.identity.is_some() || action.form.is_some()) {
            problems.push(format!("x for {name}: `matrix` cannot be combined with `identity` or `form`"));
            continue;
        }
        let fa = if let Some(rows) = &action.matrix {
            if rows.iter().any(|r| r.len() != rows.len()) {
                problems.push(format!("x for {name}: matrix is not square"));
                continue;
            }
            FAction::Raw(Matrix::from_rows(
                &rows.iter().map(|r| r.iter().map(|c| c.0.clone()).collect()).collect::<Vec<_>>(),
            ))
        } else {
            if action.identity.is_none() && action.form.is_none() {
                problems.push(format!("x for {name}: give `identity`, `form` or `matrix`"));
                continue;
            }
            let mut terms = Vec::new();
            for (b, c) in action.form.iter().flatten() {
                terms.push((lookup_in(&f, "F", b)?, c.0.clone()));
            }
            let id_part = action.identity.as_ref().map_or_else(|| Scalar::from_integer(0.into()), |c| c.0.clone());
            FAction::Regular(RIOp { id_part, form_part: Form::from_terms(terms) })
        };
        if x_map.insert(id, fa).is_some() {
            problems.push(format!("x for {} is given twice", l.label(&id)));
        }
    }
    let diag_pairs = match &real.diag_pairs {
        None => None,
        Some(pairs) => Some(
            pairs
                .iter()
                .map(|[a, b]| Ok((lookup_in(&l, "L", a)?, lookup_in(&l, "L", b)?)))
                .collect::<Result<Vec<_>, InputError>>()?,
        ),
    };
    if !problems.is_empty() {
        return Err(InputError::Validation(problems));
    }
    let truncation = raw.parameters.truncation.unwrap_or(Parameters::DEFAULT_TRUNCATION);
    if truncation == 0 || truncation > MAX_TRUNCATION {
        return Err(InputError::Validation(vec![format!("truncation = {truncation} outside 1..={MAX_TRUNCATION}")]));
    }
    let ctx = TensorContext::new(f, truncation).map_err(core_error)?;
    let spec = RealizationSpec::new(l, ctx, x_map, diag_pairs).map_err(core_error)?;
    let params = check_parameters(&raw.parameters, &spec)?;
    Ok(InputDocument { raw, coalgebras, spec, params })
}
