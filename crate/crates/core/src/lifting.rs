//! Lifting `x: L → operators on F` to grade-preserving right-invariant
//! operators `X(l)` on truncated `T(F)`.
//!
//! On a word `f_1 ⊗ .. ⊗ f_n`, `X(l)` acts by `Σ x(l_1)(f_1) ⊗ .. ⊗ x(l_n)(f_n)`
//! summed over the iterated coproduct of `l`; on the unit word it is `ε(l)`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::checks::{Check, CheckReport};
use crate::coalgebra::{grouplikes, BasisId, Coalgebra, Vect};
use crate::error::{CoreError, Result};
use crate::exactlin::{add_entry, Matrix, Scalar, SparseVec};
use crate::free_tensor::TensorContext;
use crate::invariant::{op_from_form, verify_right_invariance_tensor, LinOp, RIOp};

/// How a basis element of `L` acts on `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FAction {
    Regular(RIOp),
    /// An arbitrary matrix in the basis order of `F`; not necessarily
    /// right-invariant.
    Raw(Matrix),
}

impl FAction {
    pub fn matrix(&self, f: &Coalgebra) -> Matrix {
        match self {
            FAction::Regular(op) => op_from_form(f, op),
            FAction::Raw(m) => m.clone(),
        }
    }
}

/// The realization datum: `L`, truncated `T(F)`, the action `x` of each basis
/// element of `L` on `F`, and optionally the diagonal inverse pairs `(l, l')`.
#[derive(Clone, Debug)]
pub struct RealizationSpec {
    l_coalg: Coalgebra,
    f_ctx: TensorContext,
    x_map: BTreeMap<BasisId, FAction>,
    diag_pairs: Option<Vec<(BasisId, BasisId)>>,
    x_mats: Vec<Matrix>,
    lifts: Vec<OnceLock<LinOp>>,
}

impl RealizationSpec {
    pub fn new(
        l_coalg: Coalgebra,
        f_ctx: TensorContext,
        x_map: BTreeMap<BasisId, FAction>,
        diag_pairs: Option<Vec<(BasisId, BasisId)>>,
    ) -> Result<Self> {
        let f = f_ctx.f();
        let mut problems = Vec::new();
        for id in l_coalg.basis() {
            if !x_map.contains_key(id) {
                problems.push(format!("x is not defined on {}", l_coalg.label(id)));
            }
        }
        for (id, action) in &x_map {
            if !l_coalg.contains(id) {
                problems.push(format!("x is given on {id}, which is not a basis element of L"));
            }
            if let FAction::Raw(m) = action {
                if m.rows() != f.dim() || m.cols() != f.dim() {
                    problems.push(format!(
                        "matrix for {id} is {}x{}, expected {d}x{d}",
                        m.rows(),
                        m.cols(),
                        d = f.dim()
                    ));
                }
            }
            if let FAction::Regular(op) = action {
                if let Some(bad) = op.form_part.coeffs().keys().find(|b| !f.contains(b)) {
                    problems.push(format!("form for {id} refers to {bad}, which is not a basis element of F"));
                }
            }
        }
        if !problems.is_empty() {
            return Err(CoreError::InvalidSpec(problems));
        }
        let x_mats: Vec<Matrix> = l_coalg.basis().iter().map(|id| x_map[id].matrix(f)).collect();
        if let Some(pairs) = &diag_pairs {
            let glike = grouplikes(&l_coalg);
            for (a, b) in pairs {
                for id in [a, b] {
                    if !l_coalg.contains(id) {
                        problems.push(format!("diagonal pair member {id} is not a basis element of L"));
                    } else if !glike.contains(id) {
                        problems.push(format!("diagonal pair member {} is not grouplike", l_coalg.label(id)));
                    }
                }
                if let (Some(ia), Some(ib)) = (l_coalg.index_of(a), l_coalg.index_of(b)) {
                    if x_mats[ia].mul(&x_mats[ib]) != Matrix::identity(f.dim()) {
                        problems.push(format!(
                            "x({}) ∘ x({}) is not the identity on F",
                            l_coalg.label(a),
                            l_coalg.label(b)
                        ));
                    }
                }
            }
        }
        if !problems.is_empty() {
            return Err(CoreError::InvalidSpec(problems));
        }
        let lifts = l_coalg.basis().iter().map(|_| OnceLock::new()).collect();
        Ok(RealizationSpec { l_coalg, f_ctx, x_map, diag_pairs, x_mats, lifts })
    }

    /// Same datum over a different truncation degree.
    pub fn with_truncation(&self, n: usize) -> Result<Self> {
        let ctx = TensorContext::new(self.f_ctx.f().clone(), n)?;
        Self::new(self.l_coalg.clone(), ctx, self.x_map.clone(), self.diag_pairs.clone())
    }

    pub fn l_coalg(&self) -> &Coalgebra {
        &self.l_coalg
    }

    pub fn f_ctx(&self) -> &TensorContext {
        &self.f_ctx
    }

    pub fn truncation(&self) -> usize {
        self.f_ctx.max_degree()
    }

    pub fn x_map(&self) -> &BTreeMap<BasisId, FAction> {
        &self.x_map
    }

    pub fn diag_pairs(&self) -> Option<&[(BasisId, BasisId)]> {
        self.diag_pairs.as_deref()
    }

    /// Matrix of `x(l)` on `F`.
    pub fn x_matrix(&self, l: &BasisId) -> Option<&Matrix> {
        self.l_coalg.index_of(l).map(|k| &self.x_mats[k])
    }

    /// `X(l)` for a basis element, memoized.
    pub fn lift_basis(&self, l: &BasisId) -> Result<&LinOp> {
        let k = self.l_coalg.index_of(l).ok_or_else(|| CoreError::UnknownBasis(l.to_string()))?;
        if let Some(op) = self.lifts[k].get() {
            return Ok(op);
        }
        let op = self.build_lift(l)?;
        Ok(self.lifts[k].get_or_init(|| op))
    }

    fn build_lift(&self, l: &BasisId) -> Result<LinOp> {
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::identity(1).scale(&self.l_coalg.epsilon(l)));
        let d = self.f_ctx.dim();
        for n in 1..=self.truncation() {
            let size = self.f_ctx.degree_dim(n);
            let mut block = Matrix::zeros(size, size);
            for (letters, c) in iterated_coproduct(&self.l_coalg, &Vect::basis(*l), n - 1)? {
                let mut term = Matrix::identity(1);
                for letter in &letters {
                    term = term.kron(self.x_matrix(letter).expect("coproduct stays in L"));
                }
                block = block.axpy(&c, &term);
            }
            debug_assert_eq!(block.rows(), d.pow(n as u32));
            blocks.insert(n, block);
        }
        Ok(LinOp::from_blocks(blocks))
    }
}

/// `Δ^{(n)}(v)` in `L^{⊗(n+1)}`, keyed by letter sequences. Computed by
/// repeatedly splitting the last factor and checked against splitting the
/// first one.
pub fn iterated_coproduct(l: &Coalgebra, v: &Vect, n: usize) -> Result<SparseVec<Vec<BasisId>>> {
    let start: SparseVec<Vec<BasisId>> = v.terms().iter().map(|(id, c)| (vec![*id], c.clone())).collect();
    let split = |from_end: bool| {
        let mut acc = start.clone();
        for _ in 0..n {
            let mut next = SparseVec::new();
            for (letters, c) in &acc {
                let pos = if from_end { letters.len() - 1 } else { 0 };
                for (p, q, d) in l.delta(&letters[pos]) {
                    let mut out = Vec::with_capacity(letters.len() + 1);
                    out.extend_from_slice(&letters[..pos]);
                    out.push(*p);
                    out.push(*q);
                    out.extend_from_slice(&letters[pos + 1..]);
                    add_entry(&mut next, out, c * d);
                }
            }
            acc = next;
        }
        acc
    };
    let last = split(true);
    if n >= 2 && last != split(false) {
        return Err(CoreError::NotCoassociative(v.to_string()));
    }
    Ok(last)
}

/// `X(l)` for a linear combination of basis elements of `L`.
pub fn lift_operator(spec: &RealizationSpec, l: &Vect) -> Result<LinOp> {
    let mut out = LinOp::zero(spec.f_ctx());
    for (id, c) in l.terms() {
        out = out.axpy(c, spec.lift_basis(id)?);
    }
    Ok(out)
}

/// Independent construction of the lifts: degree 0 is `ε(l)`, degree 1 is
/// `x(l)`, and a word `f · rest` goes to `Σ x(l')(f) ⊗ X(l'')(rest)` using a
/// single coproduct per step. Returns one block map per basis element of `L`.
pub fn lift_by_splitting(spec: &RealizationSpec) -> BTreeMap<BasisId, LinOp> {
    let l = spec.l_coalg();
    let ctx = spec.f_ctx();
    let d = ctx.dim();
    let mut levels: Vec<BTreeMap<BasisId, Matrix>> = Vec::new();
    levels.push(l.basis().iter().map(|id| (*id, Matrix::identity(1).scale(&l.epsilon(id)))).collect());
    for n in 1..=spec.truncation() {
        let rest = d.pow(n as u32 - 1);
        let size = d * rest;
        let prev = &levels[n - 1];
        let level = l
            .basis()
            .iter()
            .map(|id| {
                let mut columns = vec![SparseVec::new(); size];
                for (k, column) in columns.iter_mut().enumerate() {
                    let (first, tail) = (k / rest, k % rest);
                    for (p, q, c) in l.delta(id) {
                        let head_img = spec.x_matrix(p).expect("in L").column(first);
                        let tail_img = prev[q].column(tail);
                        for (i, a) in head_img {
                            for (j, b) in tail_img {
                                add_entry(column, i * rest + j, c * a * b);
                            }
                        }
                    }
                }
                (*id, Matrix::from_columns(size, columns))
            })
            .collect();
        levels.push(level);
    }
    l.basis()
        .iter()
        .map(|id| (*id, LinOp::from_blocks(levels.iter().enumerate().map(|(n, lv)| (n, lv[id].clone())).collect())))
        .collect()
}

/// Compares [`RealizationSpec::lift_basis`] with [`lift_by_splitting`] on
/// every basis element of `L`.
pub fn verify_lift_oracle(spec: &RealizationSpec) -> Result<Check> {
    let mut check = Check::new("agreement with recursive splitting");
    for (id, op) in lift_by_splitting(spec) {
        check.record(spec.lift_basis(&id)? == &op, || spec.l_coalg().label(&id));
    }
    Ok(check)
}

/// Checks, up to the truncation degree: the unit property, agreement with
/// `x` on `F`, the product splitting rule on all word pairs, grade
/// preservation and right-invariance on `T(F)`.
pub fn verify_lift(spec: &RealizationSpec, l: &Vect) -> Result<CheckReport> {
    let ctx = spec.f_ctx();
    let lc = spec.l_coalg();
    let op = lift_operator(spec, l)?;
    let n_max = spec.truncation();

    let mut unit = Check::new("unit");
    unit.record(op.block(0) == Some(&Matrix::identity(1).scale(&lc.epsilon_of(l))), || l.to_string());

    let mut on_f = Check::new("agrees with x on F");
    let mut x_l = Matrix::zeros(ctx.dim(), ctx.dim());
    for (id, c) in l.terms() {
        x_l = x_l.axpy(c, spec.x_matrix(id).ok_or_else(|| CoreError::UnknownBasis(id.to_string()))?);
    }
    on_f.record(op.block(1) == Some(&x_l), || l.to_string());

    let mut grading = Check::new("grade preservation");
    for n in 0..=n_max {
        let size = ctx.degree_dim(n);
        grading.record(op.block(n).is_some_and(|m| m.rows() == size && m.cols() == size), || format!("degree {n}"));
    }
    grading.record(op.degrees().all(|n| n <= n_max), || "block beyond the truncation".to_string());

    let mut splitting = Check::new("product splitting");
    let mut parts = Vec::new();
    for ((p, q), c) in lc.delta_of(l) {
        parts.push((c, spec.lift_basis(&p)?, spec.lift_basis(&q)?));
    }
    record_splitting(ctx, &op, &parts, n_max, &mut splitting);

    let invariance = verify_right_invariance_tensor(ctx, &op);
    Ok(CheckReport::from(vec![unit, on_f, splitting, grading, invariance]))
}

/// Records, for every pair of words `(w1, w2)` with total degree at most
/// `bound`, whether `whole(w1·w2) = Σ c · left(w1)·right(w2)`.
pub(crate) fn record_splitting(
    ctx: &TensorContext,
    whole: &LinOp,
    parts: &[(Scalar, &LinOp, &LinOp)],
    bound: usize,
    check: &mut Check,
) {
    let bound = bound.min(ctx.max_degree());
    for n1 in 0..=bound {
        for n2 in 0..=(bound - n1) {
            let (s1, s2) = (ctx.degree_dim(n1), ctx.degree_dim(n2));
            let Some(big) = whole.block(n1 + n2) else {
                check.fail(format!("missing degree {} block", n1 + n2));
                continue;
            };
            for i1 in 0..s1 {
                for i2 in 0..s2 {
                    let mut rhs = SparseVec::new();
                    for (c, left, right) in parts {
                        let (Some(a), Some(b)) = (left.block(n1), right.block(n2)) else { continue };
                        for (r1, v1) in a.column(i1) {
                            for (r2, v2) in b.column(i2) {
                                add_entry(&mut rhs, r1 * s2 + r2, c * v1 * v2);
                            }
                        }
                    }
                    check.record(big.column(i1 * s2 + i2) == &rhs, || {
                        format!("({})·({})", ctx.word_at(n1, i1), ctx.word_at(n2, i2))
                    });
                }
            }
        }
    }
}

/// Whether `x(l)` is the identity and `l` grouplike, in which case `X(l)` is
/// the identity in every degree.
pub fn acts_trivially(spec: &RealizationSpec, l: &BasisId) -> bool {
    let f_dim = spec.f_ctx().dim();
    spec.x_matrix(l).is_some_and(|m| *m == Matrix::identity(f_dim)) && grouplikes(spec.l_coalg()).contains(l)
}

/// Scalar multiple of the identity matrix, the degree-one action of `c·ε`.
pub fn scalar_action(c: Scalar) -> FAction {
    FAction::Regular(RIOp { id_part: c, form_part: Default::default() })
}
