//! The representation `π` of `T(L)` on truncated `T(F)`, its relations, and
//! degree-bounded ideal arithmetic in `T(L)`.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use num_traits::Zero;

use crate::checks::{Check, CheckReport};
use crate::coalgebra::Coalgebra;
use crate::error::{CoreError, Result};
use crate::exactlin::{add_entry, kernel_of_columns, EchelonBasis, Scalar, SparseVec, TrackedEchelon};
use crate::free_tensor::{element_counit, word_coproduct, words_up_to, TensorElement, TensorPair, Word};
use crate::invariant::LinOp;
use crate::lifting::{record_splitting, RealizationSpec};

/// `π(w) = X(l_1) ∘ .. ∘ X(l_n)` on monomials, extended linearly.
pub fn represent(spec: &RealizationSpec, w: &TensorElement) -> Result<LinOp> {
    let mut out = LinOp::zero(spec.f_ctx());
    for (word, c) in w.terms() {
        out = out.axpy(c, &represent_word(spec, word)?);
    }
    Ok(out)
}

pub fn represent_word(spec: &RealizationSpec, w: &Word) -> Result<LinOp> {
    let mut op = LinOp::identity(spec.f_ctx());
    for letter in w.letters() {
        op = op.compose(spec.lift_basis(letter)?);
    }
    Ok(op)
}

/// `π` of every monomial of degree at most `d`, level by level, each built
/// from its prefix: `π(w·l) = π(w) ∘ X(l)`.
pub fn monomial_levels(spec: &RealizationSpec, d: usize) -> Result<Vec<Vec<(Word, LinOp)>>> {
    let basis = spec.l_coalg().basis().to_vec();
    let mut levels = vec![vec![(Word::unit(), LinOp::identity(spec.f_ctx()))]];
    for _ in 0..d {
        let prev = levels.last().expect("nonempty");
        let mut next = Vec::with_capacity(prev.len() * basis.len());
        for (w, op) in prev {
            for b in &basis {
                let mut letters = w.0.clone();
                letters.push(*b);
                next.push((Word(letters), op.compose(spec.lift_basis(b)?)));
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Checks `π(w)(w1·w2) = Σ π(w')(w1)·π(w'')(w2)` over `Δ(w)`, for all word
/// pairs of total degree at most `bound`.
pub fn verify_splitting(spec: &RealizationSpec, w: &Word, bound: usize) -> Result<Check> {
    let whole = represent_word(spec, w)?;
    let mut ops = Vec::new();
    for ((a, b), c) in word_coproduct(spec.l_coalg(), w) {
        ops.push((c, represent_word(spec, &a)?, represent_word(spec, &b)?));
    }
    let parts: Vec<(Scalar, &LinOp, &LinOp)> = ops.iter().map(|(c, a, b)| (c.clone(), a, b)).collect();
    let mut check = Check::new(format!("splitting of π({w})"));
    record_splitting(spec.f_ctx(), &whole, &parts, bound, &mut check);
    Ok(check)
}

/// A basis of relations of `π`, certified at a truncation degree.
///
/// Homogeneous spaces live in `L^{⊗degree}`; filtered ones in the span of all
/// monomials of degree at most `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSpace {
    pub degree: usize,
    pub filtered: bool,
    pub truncation: usize,
    pub ambient_dim: usize,
    pub basis: Vec<TensorElement>,
}

impl RelationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn from_elements(degree: usize, truncation: usize, basis: Vec<TensorElement>) -> Self {
        RelationSpace { degree, filtered: true, truncation, ambient_dim: 0, basis }
    }
}

fn kernel_space(monomials: &[Word], ops: &[&LinOp], degree: usize, filtered: bool, truncation: usize) -> RelationSpace {
    let relations = kernel_of_columns(ops.iter().map(|op| op.flat_entries()));
    let basis = relations
        .into_iter()
        .map(|r| TensorElement::from_terms(r.into_iter().map(|(k, c)| (monomials[k].clone(), c))))
        .collect();
    RelationSpace { degree, filtered, truncation, ambient_dim: monomials.len(), basis }
}

/// Kernel of `π` on `L^{⊗d}`, with monomials in lexicographic order and the
/// canonical kernel basis.
pub fn relation_kernel(spec: &RealizationSpec, d: usize) -> Result<RelationSpace> {
    if d == 0 {
        return Err(CoreError::InvalidArgument("relation degree must be at least 1".into()));
    }
    let levels = monomial_levels(spec, d)?;
    let level = &levels[d];
    let words: Vec<Word> = level.iter().map(|(w, _)| w.clone()).collect();
    let ops: Vec<&LinOp> = level.iter().map(|(_, op)| op).collect();
    Ok(kernel_space(&words, &ops, d, false, spec.truncation()))
}

/// Kernel of `π` on all monomials of degree at most `d` (graded order).
/// Unlike [`relation_kernel`] this sees inhomogeneous relations such as
/// `l - 1` for an `l` acting as the identity.
pub fn filtered_relation_kernel(spec: &RealizationSpec, d: usize) -> Result<RelationSpace> {
    Ok(OperatorAlgebra::build(spec, d)?.relations)
}

/// A relation space at truncation `N` compared with the one at `N + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelPersistence {
    pub at_truncation: RelationSpace,
    pub at_next: RelationSpace,
    /// Basis elements at `N` that stop being relations at `N + 1`.
    pub unstable: Vec<TensorElement>,
}

impl KernelPersistence {
    pub fn is_stable(&self) -> bool {
        self.unstable.is_empty()
    }

    /// The relations that survive the larger truncation.
    pub fn stable(&self) -> &RelationSpace {
        &self.at_next
    }
}

/// Computes the relation space at `N` and `N + 1`; the second is contained in
/// the first, and elements lost on the way are reported.
pub fn relation_persistence(spec: &RealizationSpec, d: usize, filtered: bool) -> Result<KernelPersistence> {
    let compute = |s: &RealizationSpec| if filtered { filtered_relation_kernel(s, d) } else { relation_kernel(s, d) };
    let at_truncation = compute(spec)?;
    let at_next = compute(&spec.with_truncation(spec.truncation() + 1)?)?;
    let mut lower = EchelonBasis::new();
    for r in &at_truncation.basis {
        lower.insert(r.terms().clone());
    }
    if let Some(bad) = at_next.basis.iter().find(|r| !lower.contains(r.terms())) {
        return Err(CoreError::InternalInconsistency(format!(
            "relation {bad} at truncation {} is not a relation at {}",
            spec.truncation() + 1,
            spec.truncation()
        )));
    }
    let mut upper = EchelonBasis::new();
    for r in &at_next.basis {
        upper.insert(r.terms().clone());
    }
    let unstable = at_truncation.basis.iter().filter(|r| !upper.contains(r.terms())).cloned().collect();
    Ok(KernelPersistence { at_truncation, at_next, unstable })
}

/// `π(w)` on the unit word.
pub fn counit_check(spec: &RealizationSpec, w: &TensorElement) -> Result<Scalar> {
    Ok(represent(spec, w)?.block(0).map(|m| m.get(0, 0)).unwrap_or_else(Scalar::zero))
}

/// Graded key putting longer words first, so echelon pivots are the
/// highest-degree monomials and normal forms prefer low degree.
type GradedKey = (Reverse<usize>, Word);

fn graded(e: &TensorElement) -> SparseVec<GradedKey> {
    e.terms().iter().map(|(w, c)| ((Reverse(w.len()), w.clone()), c.clone())).collect()
}

fn ungraded(v: SparseVec<GradedKey>) -> TensorElement {
    TensorElement::from_terms(v.into_iter().map(|((_, w), c)| (w, c)))
}

/// Part of the two-sided ideal generated by some elements of `T(L)` that is
/// reachable without passing degree `max_degree`.
#[derive(Clone, Debug)]
pub struct IdealSpan {
    max_degree: usize,
    span: EchelonBasis<GradedKey>,
}

impl IdealSpan {
    /// Closes the generators under left and right multiplication by letters
    /// while staying within `max_degree`. This contains every `a·r·b` of
    /// degree at most `max_degree` and lies inside the two-sided ideal.
    pub fn generate(l: &Coalgebra, generators: &[TensorElement], max_degree: usize) -> Self {
        let letters: Vec<TensorElement> =
            l.basis().iter().map(|b| TensorElement::from_word(Word::letter(*b))).collect();
        let mut span = EchelonBasis::new();
        let mut queue: Vec<TensorElement> =
            generators.iter().filter(|r| r.degree().is_some_and(|k| k <= max_degree)).cloned().collect();
        queue.reverse();
        while let Some(candidate) = queue.pop() {
            let reduced = span.reduce(&graded(&candidate));
            if reduced.is_empty() {
                continue;
            }
            let row = ungraded(reduced.clone());
            span.insert(reduced);
            if row.degree().is_some_and(|k| k < max_degree) {
                for letter in &letters {
                    queue.push(letter.mul(&row));
                    queue.push(row.mul(letter));
                }
            }
        }
        IdealSpan { max_degree, span }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    /// Dimension of the part of the span lying in degree at most `k`.
    pub fn rank_up_to(&self, k: usize) -> usize {
        self.span.pivots().filter(|(Reverse(n), _)| *n <= k).count()
    }

    pub fn contains(&self, e: &TensorElement) -> bool {
        self.span.contains(&graded(e))
    }

    pub fn normal_form(&self, e: &TensorElement) -> TensorElement {
        ungraded(self.span.reduce(&graded(e)))
    }

    /// Whether `x` lies in `I ⊗ T + T ⊗ I`: true iff applying the normal-form
    /// projection to both legs gives zero.
    pub fn contains_in_either_leg(&self, x: &TensorPair) -> bool {
        let mut cache: BTreeMap<Word, TensorElement> = BTreeMap::new();
        let mut nf = |w: &Word| {
            cache.entry(w.clone()).or_insert_with(|| self.normal_form(&TensorElement::from_word(w.clone()))).clone()
        };
        let mut out: TensorPair = SparseVec::new();
        for ((a, b), c) in x {
            let (na, nb) = (nf(a), nf(b));
            for (wa, ca) in na.terms() {
                for (wb, cb) in nb.terms() {
                    add_entry(&mut out, (wa.clone(), wb.clone()), c * ca * cb);
                }
            }
        }
        out.is_empty()
    }
}

/// Checks that every listed relation `r` has `Δ(r) ∈ I⊗T + T⊗I` and
/// `ε(r) = 0`, with `I` the ideal generated by all listed relations, cut at
/// degree `d`.
pub fn verify_coideal(l: &Coalgebra, spaces: &[RelationSpace], d: usize) -> CheckReport {
    let gens: Vec<TensorElement> = spaces.iter().flat_map(|s| s.basis.iter().cloned()).collect();
    let ideal = IdealSpan::generate(l, &gens, d);
    let mut coproduct = Check::new(format!("coideal coproduct (d = {d})"));
    let mut counit = Check::new(format!("coideal counit (d = {d})"));
    for r in gens.iter().filter(|r| r.degree().is_some_and(|k| k <= d)) {
        let delta = crate::free_tensor::element_coproduct(l, r);
        coproduct.record(ideal.contains_in_either_leg(&delta), || r.to_string());
        counit.record(element_counit(l, r).is_zero(), || r.to_string());
    }
    CheckReport::from(vec![coproduct, counit])
}

/// The algebra spanned by `π` of all monomials of degree at most `bound`,
/// with the standard monomials (those independent of earlier ones in graded
/// order) as its basis.
#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    bound: usize,
    monomials: Vec<Word>,
    standard: Vec<usize>,
    ops: Vec<LinOp>,
    echelon: TrackedEchelon<(usize, usize, usize)>,
    relations: RelationSpace,
}

impl OperatorAlgebra {
    pub fn build(spec: &RealizationSpec, bound: usize) -> Result<Self> {
        let levels = monomial_levels(spec, bound)?;
        let mut monomials = Vec::new();
        let mut ops = Vec::new();
        for (w, op) in levels.into_iter().flatten() {
            monomials.push(w);
            ops.push(op);
        }
        let mut echelon = TrackedEchelon::new();
        let mut standard = Vec::new();
        let mut relation_vecs = Vec::new();
        for (k, op) in ops.iter().enumerate() {
            match echelon.insert(k, &op.flat_entries()) {
                None => standard.push(k),
                Some(r) => relation_vecs.push(r),
            }
        }
        let basis = relation_vecs
            .into_iter()
            .map(|r| TensorElement::from_terms(r.into_iter().map(|(k, c)| (monomials[k].clone(), c))))
            .collect();
        let relations = RelationSpace {
            degree: bound,
            filtered: true,
            truncation: spec.truncation(),
            ambient_dim: monomials.len(),
            basis,
        };
        debug_assert_eq!(words_up_to(spec.l_coalg().basis(), bound), monomials);
        let ops = ops.into_iter().enumerate().filter(|(k, _)| standard.contains(k)).map(|(_, op)| op).collect();
        Ok(OperatorAlgebra { bound, monomials, standard, ops, echelon, relations })
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.standard.len()
    }

    pub fn standard_monomials(&self) -> Vec<&Word> {
        self.standard.iter().map(|k| &self.monomials[*k]).collect()
    }

    /// `π` of the standard monomials, in order.
    pub fn basis_ops(&self) -> &[LinOp] {
        &self.ops
    }

    pub fn relations(&self) -> &RelationSpace {
        &self.relations
    }

    /// Writes `op` as a combination of standard monomials, if it lies in the algebra.
    pub fn express(&self, op: &LinOp) -> Option<TensorElement> {
        let combo = self.echelon.express(&op.flat_entries())?;
        Some(TensorElement::from_terms(combo.into_iter().map(|(k, c)| (self.monomials[k].clone(), c))))
    }
}
