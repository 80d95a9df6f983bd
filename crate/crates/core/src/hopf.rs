//! Antipodes: the operators `Y(l)` inverting `X` for convolution, the
//! anti-homomorphism `S^r` on `T(L)`, the closure of the relations under
//! `S^r`, and the Hopf axioms on the quotient, all cut at a degree bound.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checks::{Check, CheckReport};
use crate::coalgebra::{is_cotriangular, BasisId, Coalgebra};
use crate::error::{CoreError, Result};
use crate::exactlin::{rank, solve, Matrix, Scalar, SparseVec};
use crate::free_tensor::{
    element_coproduct, element_counit, word_coproduct, words_up_to, TensorElement, Truncated, Word,
};
use crate::invariant::LinOp;
use crate::lifting::{record_splitting, RealizationSpec};
use crate::realization::{verify_coideal, IdealSpan, OperatorAlgebra, RelationSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AntipodeMethod {
    Triangular,
    General,
}

impl fmt::Display for AntipodeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AntipodeMethod::Triangular => "triangular",
            AntipodeMethod::General => "general",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntipodeEntry {
    /// `S_1^r(l)`: the operator written over the standard monomials of degree
    /// at most the bound, or `raw_expr` when it is not in that span.
    pub expr: TensorElement,
    /// The expression produced directly by the solver.
    pub raw_expr: TensorElement,
    pub op: LinOp,
    pub in_algebra: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntipodeTable {
    pub method: AntipodeMethod,
    pub truncation: usize,
    pub bound: usize,
    pub entries: BTreeMap<BasisId, AntipodeEntry>,
    /// Whether the solution was shown to be the only one in the operator algebra.
    pub unique: bool,
}

impl AntipodeTable {
    pub fn op(&self, id: &BasisId) -> Option<&LinOp> {
        self.entries.get(id).map(|e| &e.op)
    }

    pub fn expr(&self, id: &BasisId) -> Option<&TensorElement> {
        self.entries.get(id).map(|e| &e.expr)
    }

    fn ops(&self) -> BTreeMap<BasisId, LinOp> {
        self.entries.iter().map(|(id, e)| (*id, e.op.clone())).collect()
    }
}

/// Evaluates `Σ X(l')∘Y(l'')` and `Σ Y(l')∘X(l'')` over `Δ(l)` against
/// `ε(l)·id` for every basis element `l`.
pub fn antipode_systems(spec: &RealizationSpec, ys: &BTreeMap<BasisId, LinOp>) -> Result<CheckReport> {
    let ctx = spec.f_ctx();
    let l = spec.l_coalg();
    let n = spec.truncation();
    let mut left = Check::new(format!("left system (N = {n})"));
    let mut right = Check::new(format!("right system (N = {n})"));
    for id in l.basis() {
        let mut lhs = LinOp::zero(ctx);
        let mut rhs = LinOp::zero(ctx);
        for (p, q, c) in l.delta(id) {
            let (Some(yp), Some(yq)) = (ys.get(p), ys.get(q)) else {
                left.fail(format!("no Y for {}", l.label(id)));
                continue;
            };
            lhs = lhs.axpy(c, &spec.lift_basis(p)?.compose(yq));
            rhs = rhs.axpy(c, &yp.compose(spec.lift_basis(q)?));
        }
        let target = LinOp::scalar(ctx, &l.epsilon(id));
        left.record(lhs == target, || l.label(id));
        right.record(rhs == target, || l.label(id));
    }
    Ok(CheckReport::from(vec![left, right]))
}

fn blocks_of(l: &Coalgebra) -> BTreeMap<usize, usize> {
    let mut sizes = BTreeMap::new();
    for id in l.basis() {
        if let BasisId::Triangular { block, i, .. } = *id {
            let e = sizes.entry(block).or_insert(0);
            *e = (*e).max(i);
        }
    }
    sizes
}

fn finish_entries(
    alg: &OperatorAlgebra,
    raw: BTreeMap<BasisId, (TensorElement, LinOp)>,
) -> BTreeMap<BasisId, AntipodeEntry> {
    raw.into_iter()
        .map(|(id, (raw_expr, op))| {
            let (expr, in_algebra) = match alg.express(&op) {
                Some(e) => (e, true),
                None => (raw_expr.clone(), false),
            };
            (id, AntipodeEntry { expr, raw_expr, op, in_algebra })
        })
        .collect()
}

/// Solves the triangular systems by back-substitution: `Y_i^i = X(l')` for the
/// supplied diagonal inverse `l'`, then for `j < i` in decreasing order
/// `Y_i^j = -Y_j^j ∘ Σ_{j<k<=i} X(l_k^j) ∘ Y_i^k`.
pub fn antipode_triangular(spec: &RealizationSpec, bound: usize) -> Result<AntipodeTable> {
    let l = spec.l_coalg();
    if !is_cotriangular(l) {
        return Err(CoreError::Unsupported("L is not a direct sum of triangular coalgebras".into()));
    }
    let pairs =
        spec.diag_pairs().ok_or_else(|| CoreError::Precondition("no diagonal inverse pairs were given".into()))?;
    let inverse_of: BTreeMap<BasisId, BasisId> = pairs.iter().copied().collect();
    let mut raw: BTreeMap<BasisId, (TensorElement, LinOp)> = BTreeMap::new();
    for (block, n) in blocks_of(l) {
        let t = |i, j| BasisId::Triangular { block, i, j };
        for i in 1..=n {
            let inv = *inverse_of
                .get(&t(i, i))
                .ok_or_else(|| CoreError::Precondition(format!("no diagonal inverse given for {}", t(i, i))))?;
            raw.insert(t(i, i), (TensorElement::from_word(Word::letter(inv)), spec.lift_basis(&inv)?.clone()));
            for j in (1..i).rev() {
                let mut sum_op = LinOp::zero(spec.f_ctx());
                let mut sum_expr = TensorElement::zero();
                for k in (j + 1)..=i {
                    let (e_ik, y_ik) = &raw[&t(i, k)];
                    sum_op = sum_op.add(&spec.lift_basis(&t(k, j))?.compose(y_ik));
                    sum_expr = sum_expr.add(&TensorElement::from_word(Word::letter(t(k, j))).mul(e_ik));
                }
                let (e_jj, y_jj) = &raw[&t(j, j)];
                let op = y_jj.compose(&sum_op).scale(&-Scalar::one());
                let expr = e_jj.mul(&sum_expr).scale(&-Scalar::one());
                raw.insert(t(i, j), (expr, op));
            }
        }
    }
    let ops = raw.iter().map(|(id, (_, op))| (*id, op.clone())).collect();
    let systems = antipode_systems(spec, &ops)?;
    if let Some(bad) = systems.failures().next() {
        return Err(CoreError::InternalInconsistency(format!("back-substitution does not solve the systems: {bad}")));
    }
    let alg = OperatorAlgebra::build(spec, bound)?;
    Ok(AntipodeTable {
        method: AntipodeMethod::Triangular,
        truncation: spec.truncation(),
        bound,
        entries: finish_entries(&alg, raw),
        unique: true,
    })
}

/// Looks for `Y(l)` in the algebra spanned by `π` of monomials of degree at
/// most `bound` solving both convolution systems. `None` means no solution
/// exists inside that algebra.
pub fn antipode_general(spec: &RealizationSpec, bound: usize) -> Result<Option<AntipodeTable>> {
    let l = spec.l_coalg();
    let ctx = spec.f_ctx();
    let alg = OperatorAlgebra::build(spec, bound)?;
    let r = alg.dim();
    let basis = l.basis();
    let unknowns = basis.len() * r;
    // Row keys: (equation basis index, side, degree, column, row).
    let mut row_index: BTreeMap<(usize, u8, usize, usize, usize), usize> = BTreeMap::new();
    let mut columns: Vec<SparseVec<usize>> = vec![SparseVec::new(); unknowns];
    let mut rhs_entries: Vec<(usize, Scalar)> = Vec::new();
    let mut key = |k: (usize, u8, usize, usize, usize)| {
        let next = row_index.len();
        *row_index.entry(k).or_insert(next)
    };
    for (e, id) in basis.iter().enumerate() {
        for side in 0..2u8 {
            for ((deg, col, row), v) in LinOp::scalar(ctx, &l.epsilon(id)).flat_entries() {
                rhs_entries.push((key((e, side, deg, col, row)), v));
            }
        }
        for (p, q, c) in l.delta(id) {
            let (pi, qi) = (l.index_of(p).expect("in L"), l.index_of(q).expect("in L"));
            for (s, m) in alg.basis_ops().iter().enumerate() {
                // left: X(p) ∘ Y(q), Y(q) = Σ_s c_{q,s} π(m_s)
                for ((deg, col, row), v) in spec.lift_basis(p)?.compose(m).flat_entries() {
                    let k = key((e, 0, deg, col, row));
                    crate::exactlin::add_entry(&mut columns[qi * r + s], k, c * v);
                }
                // right: Y(p) ∘ X(q)
                for ((deg, col, row), v) in m.compose(spec.lift_basis(q)?).flat_entries() {
                    let k = key((e, 1, deg, col, row));
                    crate::exactlin::add_entry(&mut columns[pi * r + s], k, c * v);
                }
            }
        }
    }
    let rows = row_index.len();
    let m = Matrix::from_columns(rows, columns);
    let mut rhs = vec![Scalar::zero(); rows];
    for (k, v) in rhs_entries {
        rhs[k] += v;
    }
    let Some(sol) = solve(&m, &rhs) else { return Ok(None) };
    let unique = rank(&m) == unknowns;
    let mut raw = BTreeMap::new();
    let std_words = alg.standard_monomials();
    for (e, id) in basis.iter().enumerate() {
        let mut op = LinOp::zero(ctx);
        let mut expr = TensorElement::zero();
        for s in 0..r {
            let c = &sol[e * r + s];
            if !c.is_zero() {
                op = op.axpy(c, &alg.basis_ops()[s]);
                expr.add_term(std_words[s].clone(), c.clone());
            }
        }
        raw.insert(*id, (expr, op));
    }
    let ops = raw.iter().map(|(id, (_, op))| (*id, op.clone())).collect();
    let systems = antipode_systems(spec, &ops)?;
    if let Some(bad) = systems.failures().next() {
        return Err(CoreError::InternalInconsistency(format!("linear solution does not solve the systems: {bad}")));
    }
    Ok(Some(AntipodeTable {
        method: AntipodeMethod::General,
        truncation: spec.truncation(),
        bound,
        entries: finish_entries(&alg, raw),
        unique,
    }))
}

/// Checks the coproduct law of the antipode in operator form:
/// `Y(l)(w1·w2) = Σ Y(l'')(w1)·Y(l')(w2)` over `Δ(l) = Σ l' ⊗ l''`, and the
/// same for the composites `Y(a·b) = Y(b) ∘ Y(a)` over pairs of letters.
pub fn verify_y_coproduct(spec: &RealizationSpec, table: &AntipodeTable, bound: usize) -> Result<CheckReport> {
    let l = spec.l_coalg();
    let ctx = spec.f_ctx();
    let ys = table.ops();
    let y_of_word = |w: &Word| -> Option<LinOp> {
        let mut op = LinOp::identity(ctx);
        for letter in w.letters() {
            op = ys.get(letter)?.compose(&op);
        }
        Some(op)
    };
    let mut single = Check::new(format!("Y coproduct (bound {bound}, N = {})", spec.truncation()));
    let mut composite = Check::new(format!("composite Y coproduct (bound {bound}, N = {})", spec.truncation()));
    let words: Vec<Word> = words_up_to(l.basis(), 2).into_iter().filter(|w| !w.is_empty()).collect();
    for w in &words {
        let check = if w.len() == 1 { &mut single } else { &mut composite };
        let Some(whole) = y_of_word(w) else {
            check.fail(format!("no Y for a letter of {w}"));
            continue;
        };
        let mut ops = Vec::new();
        for ((a, b), c) in word_coproduct(l, w) {
            match (y_of_word(&b), y_of_word(&a)) {
                (Some(yb), Some(ya)) => ops.push((c, yb, ya)),
                _ => check.fail(format!("no Y for a letter of {w}")),
            }
        }
        let parts: Vec<(Scalar, &LinOp, &LinOp)> = ops.iter().map(|(c, a, b)| (c.clone(), a, b)).collect();
        let before = check.witness.is_some();
        record_splitting(ctx, &whole, &parts, bound, check);
        if !before {
            if let Some(wit) = &mut check.witness {
                *wit = format!("Y({w}) on {wit}");
            }
        }
    }
    Ok(CheckReport::from(vec![single, composite]))
}

/// Perturbs a random entry of the table by a random nonzero element of the
/// operator algebra, `trials` times, and checks that some system breaks.
pub fn perturbation_uniqueness(
    spec: &RealizationSpec,
    table: &AntipodeTable,
    trials: usize,
    seed: u64,
) -> Result<Check> {
    let alg = OperatorAlgebra::build(spec, table.bound)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<BasisId> = table.entries.keys().copied().collect();
    let mut check = Check::new(format!("uniqueness under {trials} perturbations"));
    if ids.is_empty() || alg.dim() == 0 {
        check.fail("nothing to perturb");
        return Ok(check);
    }
    for _ in 0..trials {
        let perturbation = loop {
            let mut p = LinOp::zero(spec.f_ctx());
            for op in alg.basis_ops() {
                let c: i64 = rng.gen_range(-3..=3);
                if c != 0 {
                    p = p.axpy(&Scalar::from_integer(c.into()), op);
                }
            }
            if !p.is_zero() {
                break p;
            }
        };
        let target = ids[rng.gen_range(0..ids.len())];
        let mut ys = table.ops();
        let y = ys.get_mut(&target).expect("listed id");
        *y = y.add(&perturbation);
        let broken = !antipode_systems(spec, &ys)?.passed();
        check.record(broken, || format!("perturbing Y({target}) kept both systems"));
    }
    Ok(check)
}

/// `S^r(l_1 ⊗ .. ⊗ l_n) = S_1^r(l_n) · .. · S_1^r(l_1)`, with `S^r(1) = 1`;
/// words longer than `cap` are dropped and flagged.
pub fn extend_antihom(table: &AntipodeTable, w: &TensorElement, cap: usize) -> Result<Truncated<TensorElement>> {
    let mut out = TensorElement::zero();
    for (word, c) in w.terms() {
        let mut acc = TensorElement::one();
        for letter in word.reversed().letters() {
            let s = table.expr(letter).ok_or_else(|| CoreError::UnknownBasis(letter.to_string()))?;
            acc = acc.mul(s);
        }
        out = out.add(&acc.scale(c));
    }
    Ok(out.truncate(cap))
}

/// One generation of the closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureStage {
    /// Echelon basis of `R_n`.
    pub generators: Vec<TensorElement>,
    /// Images under `S^r` that were not yet in the ideal of `R_n`.
    pub new_images: usize,
    /// Whether `Δ S^r(R_n)` lies in `I(R_{n+1}) ⊗ T + T ⊗ I(R_{n+1})`.
    pub defect: Check,
    /// Whether degree truncation removed terms from some image.
    pub truncated: bool,
}

impl ClosureStage {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    pub bound: usize,
    pub truncation: usize,
    pub stages: Vec<ClosureStage>,
    pub stabilized: bool,
    pub stable_at: Option<usize>,
    /// Degree `k` to the dimension of `T(L)_{<=k}` modulo the closed ideal.
    pub quotient_dims: BTreeMap<usize, usize>,
}

impl ClosureResult {
    /// Generators of the final stage.
    pub fn generators(&self) -> &[TensorElement] {
        self.stages.last().map(|s| s.generators.as_slice()).unwrap_or(&[])
    }

    pub fn relation_space(&self) -> RelationSpace {
        RelationSpace::from_elements(self.bound, self.truncation, self.generators().to_vec())
    }
}

fn span_basis(elements: &[TensorElement]) -> Vec<TensorElement> {
    let mut echelon = crate::exactlin::EchelonBasis::new();
    for e in elements {
        echelon.insert(e.terms().clone());
    }
    echelon.rows().map(|r| TensorElement::from_terms(r.clone())).collect()
}

/// Iterates `R_{n+1} = R_n + S^r(R_n)` inside `T(L)_{<=d}` until `S^r(R_n)`
/// lies in the ideal generated by `R_n`, for at most `max_stages` stages.
pub fn closure_iterate(
    l: &Coalgebra,
    table: &AntipodeTable,
    r0: &[TensorElement],
    max_stages: usize,
    d: usize,
) -> Result<ClosureResult> {
    let mut current = span_basis(r0);
    let mut stages = Vec::new();
    let mut stable_at = None;
    for n in 0..max_stages {
        let ideal = IdealSpan::generate(l, &current, d);
        let mut truncated = false;
        let mut images = Vec::new();
        for r in &current {
            let s = extend_antihom(table, r, d)?;
            truncated |= s.truncated;
            images.push(s.value);
        }
        let new_images = images.iter().filter(|s| !ideal.contains(s)).count();
        let next = if new_images == 0 {
            current.clone()
        } else {
            let mut all = current.clone();
            all.extend(images.iter().cloned());
            span_basis(&all)
        };
        let next_ideal = if new_images == 0 { ideal } else { IdealSpan::generate(l, &next, d) };
        let mut defect = Check::new(format!("coideal defect inclusion (d = {d})"));
        for s in &images {
            defect.record(next_ideal.contains_in_either_leg(&element_coproduct(l, s)), || s.to_string());
        }
        stages.push(ClosureStage { generators: current.clone(), new_images, defect, truncated });
        if new_images == 0 {
            stable_at = Some(n);
            break;
        }
        current = next;
    }
    let quotient_dims = match stable_at {
        Some(_) => {
            let ideal = IdealSpan::generate(l, &current, d);
            (0..=d)
                .map(|k| {
                    let ambient: usize = (0..=k).map(|m| l.dim().pow(m as u32)).sum();
                    (k, ambient - ideal.rank_up_to(k))
                })
                .collect()
        }
        None => BTreeMap::new(),
    };
    Ok(ClosureResult {
        bound: d,
        truncation: table.truncation,
        stages,
        stabilized: stable_at.is_some(),
        stable_at,
        quotient_dims,
    })
}

/// For each generator of the final stage, drops it and checks that the
/// remaining ones either generate the same ideal, or generate an ideal that
/// misses some of `r0` or is not stable under `S^r`.
pub fn closure_minimality(
    l: &Coalgebra,
    table: &AntipodeTable,
    r0: &[TensorElement],
    closure: &ClosureResult,
) -> Result<Check> {
    let d = closure.bound;
    let gens = closure.generators();
    let mut check = Check::new(format!("closure minimality (d = {d})"));
    for (k, g) in gens.iter().enumerate() {
        let rest: Vec<TensorElement> =
            gens.iter().enumerate().filter(|(m, _)| *m != k).map(|(_, e)| e.clone()).collect();
        let ideal = IdealSpan::generate(l, &rest, d);
        if ideal.contains(g) {
            check.record(true, String::new);
            continue;
        }
        let misses_r0 = r0.iter().any(|r| !ideal.contains(r));
        let mut unstable = false;
        for r in &rest {
            if !ideal.contains(&extend_antihom(table, r, d)?.value) {
                unstable = true;
                break;
            }
        }
        check.record(misses_r0 || unstable, || format!("dropping {g} leaves a smaller stable ideal"));
    }
    Ok(check)
}

/// Checks `Σ S^r(w')·w'' ≡ ε(w)·1` and `Σ w'·S^r(w'') ≡ ε(w)·1` modulo the
/// closed ideal for every monomial of degree at most `d`, and that the closed
/// ideal is a coideal at degree `d`.
pub fn verify_hopf_quotient(
    l: &Coalgebra,
    table: &AntipodeTable,
    closure: &ClosureResult,
    d: usize,
) -> Result<CheckReport> {
    if !closure.stabilized {
        return Err(CoreError::Precondition("the closure did not stabilize".into()));
    }
    let mut defects = Vec::new();
    for w in words_up_to(l.basis(), d) {
        let unit = TensorElement::one().scale(&element_counit(l, &TensorElement::from_word(w.clone())));
        let mut left = TensorElement::zero();
        let mut right = TensorElement::zero();
        for ((a, b), c) in word_coproduct(l, &w) {
            let sa = extend_antihom(table, &TensorElement::from_word(a.clone()), usize::MAX)?.value;
            let sb = extend_antihom(table, &TensorElement::from_word(b.clone()), usize::MAX)?.value;
            left = left.add(&sa.mul(&TensorElement::from_word(b)).scale(&c));
            right = right.add(&TensorElement::from_word(a).mul(&sb).scale(&c));
        }
        defects.push((w, left.sub(&unit), right.sub(&unit)));
    }
    let top = defects.iter().flat_map(|(_, a, b)| [a.degree(), b.degree()]).flatten().max().unwrap_or(0).max(d);
    let ideal = IdealSpan::generate(l, closure.generators(), top);
    let mut left =
        Check::new(format!("Σ S(w')w'' ≡ ε(w)1 (d = {d}, ideal to degree {top}, N = {})", closure.truncation));
    let mut right =
        Check::new(format!("Σ w'S(w'') ≡ ε(w)1 (d = {d}, ideal to degree {top}, N = {})", closure.truncation));
    for (w, a, b) in &defects {
        left.record(ideal.contains(a), || w.to_string());
        right.record(ideal.contains(b), || w.to_string());
    }
    let mut report = CheckReport::from(vec![left, right]);
    report.checks.extend(verify_coideal(l, &[closure.relation_space()], d).checks);
    Ok(report)
}
