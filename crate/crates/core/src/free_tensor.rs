//! The truncated free tensor bialgebra over a coalgebra.
//!
//! Words are sequences of basis ids; the coproduct is extended letterwise so
//! a word of length `n` splits into pairs of words that both have length `n`.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::checks::{Check, CheckReport};
use crate::coalgebra::{format_terms, BasisId, Coalgebra, Vect};
use crate::error::{CoreError, Result};
use crate::exactlin::{add_entry, axpy, Scalar, SparseVec};

/// A monomial; the empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<BasisId>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn letter(id: BasisId) -> Self {
        Word(vec![id])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[BasisId] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        f.write_str(&parts.join("⊗"))
    }
}

/// Sparse combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorElement {
    terms: SparseVec<Word>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::unit())
    }

    pub fn from_word(w: Word) -> Self {
        Self::monomial(Scalar::one(), w)
    }

    pub fn monomial(c: Scalar, w: Word) -> Self {
        let mut terms = SparseVec::new();
        add_entry(&mut terms, w, c);
        TensorElement { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Scalar)>>(terms: I) -> Self {
        let mut out = SparseVec::new();
        for (w, c) in terms {
            add_entry(&mut out, w, c);
        }
        TensorElement { terms: out }
    }

    /// Degree-one element `Σ c_b · b`.
    pub fn from_vect(v: &Vect) -> Self {
        Self::from_terms(v.terms().iter().map(|(id, c)| (Word::letter(*id), c.clone())))
    }

    pub fn terms(&self) -> &SparseVec<Word> {
        &self.terms
    }

    pub fn into_terms(self) -> SparseVec<Word> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Largest word length present; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn homogeneous_component(&self, n: usize) -> TensorElement {
        TensorElement {
            terms: self.terms.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut terms = self.terms.clone();
        axpy(&mut terms, &Scalar::one(), &other.terms);
        TensorElement { terms }
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut terms = self.terms.clone();
        axpy(&mut terms, &-Scalar::one(), &other.terms);
        TensorElement { terms }
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        TensorElement { terms: crate::exactlin::scale(&self.terms, c) }
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        add_entry(&mut self.terms, w, c);
    }

    /// Concatenation product with no degree bound.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let mut out = SparseVec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                add_entry(&mut out, a.concat(b), ca * cb);
            }
        }
        TensorElement { terms: out }
    }

    /// Drops words longer than `max`; the flag reports whether anything was dropped.
    pub fn truncate(&self, max: usize) -> Truncated<TensorElement> {
        let truncated = self.terms.keys().any(|w| w.len() > max);
        let terms = self.terms.iter().filter(|(w, _)| w.len() <= max).map(|(w, c)| (w.clone(), c.clone())).collect();
        Truncated { value: TensorElement { terms }, truncated }
    }
}

impl TensorElement {
    /// Renders the element by degree, naming each letter with `name`.
    pub fn display_with<N: Fn(&BasisId) -> String>(&self, name: N) -> String {
        let mut terms: Vec<(&Word, &Scalar)> = self.terms.iter().collect();
        terms.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        format_terms(terms.into_iter().map(|(w, c)| {
            let parts: Vec<String> = w.letters().iter().map(&name).collect();
            (parts.join("⊗"), c.clone())
        }))
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(BasisId::to_string))
    }
}

/// A value together with a flag telling whether degree truncation removed terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncated<T> {
    pub value: T,
    pub truncated: bool,
}

/// All words of length `n` over `basis`, in lexicographic order.
pub fn words_of_degree(basis: &[BasisId], n: usize) -> Vec<Word> {
    let mut out = vec![Word::unit()];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|w| {
                basis.iter().map(move |b| {
                    let mut v = w.0.clone();
                    v.push(*b);
                    Word(v)
                })
            })
            .collect();
    }
    out
}

/// All words of length at most `n`, by length then lexicographically.
pub fn words_up_to(basis: &[BasisId], n: usize) -> Vec<Word> {
    (0..=n).flat_map(|k| words_of_degree(basis, k)).collect()
}

/// Element of `T ⊗ T`, keyed by pairs of words.
pub type TensorPair = SparseVec<(Word, Word)>;

/// Letterwise coproduct of a word over any coalgebra.
pub fn word_coproduct(c: &Coalgebra, w: &Word) -> TensorPair {
    let mut acc: TensorPair = [((Word::unit(), Word::unit()), Scalar::one())].into_iter().collect();
    for letter in w.letters() {
        let mut next = TensorPair::new();
        for ((a, b), coef) in &acc {
            for (p, q, d) in c.delta(letter) {
                let mut a2 = a.clone();
                a2.0.push(*p);
                let mut b2 = b.clone();
                b2.0.push(*q);
                add_entry(&mut next, (a2, b2), coef * d);
            }
        }
        acc = next;
    }
    acc
}

pub fn element_coproduct(c: &Coalgebra, e: &TensorElement) -> TensorPair {
    let mut out = TensorPair::new();
    for (w, coef) in e.terms() {
        axpy(&mut out, coef, &word_coproduct(c, w));
    }
    out
}

pub fn word_counit(c: &Coalgebra, w: &Word) -> Scalar {
    w.letters().iter().map(|l| c.epsilon(l)).product()
}

pub fn element_counit(c: &Coalgebra, e: &TensorElement) -> Scalar {
    e.terms().iter().map(|(w, coef)| coef * word_counit(c, w)).sum()
}

/// `T(F)` truncated at degree `N`, with a mixed-radix numbering of the words
/// of each degree (first letter most significant, letters in basis order).
#[derive(Clone, Debug)]
pub struct TensorContext {
    f: Coalgebra,
    max_degree: usize,
    coproducts: Vec<OnceLock<Vec<IndexedCoproduct>>>,
}

/// Coproduct of one word as `(left index, right index, coefficient)` triples.
pub type IndexedCoproduct = Vec<(usize, usize, Scalar)>;

impl TensorContext {
    pub fn new(f: Coalgebra, max_degree: usize) -> Result<Self> {
        if max_degree == 0 {
            return Err(CoreError::InvalidArgument("truncation degree must be at least 1".into()));
        }
        if f.dim() == 0 {
            return Err(CoreError::InvalidArgument("coalgebra has an empty basis".into()));
        }
        let coproducts = (0..=max_degree).map(|_| OnceLock::new()).collect();
        Ok(TensorContext { f, max_degree, coproducts })
    }

    /// Coproducts of all words of degree `n <= N`, indexed by word position.
    pub fn degree_coproducts(&self, n: usize) -> &[IndexedCoproduct] {
        self.coproducts[n].get_or_init(|| {
            self.words(n)
                .map(|w| {
                    word_coproduct(&self.f, &w)
                        .into_iter()
                        .map(|((a, b), c)| {
                            let ia = self.index_of_word(&a).expect("coproduct legs stay in the basis");
                            let ib = self.index_of_word(&b).expect("coproduct legs stay in the basis");
                            (ia, ib, c)
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Counit of every word of degree `n`, indexed by word position.
    pub fn degree_counits(&self, n: usize) -> Vec<Scalar> {
        self.words(n).map(|w| word_counit(&self.f, &w)).collect()
    }

    pub fn f(&self) -> &Coalgebra {
        &self.f
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Number of words of length `n`.
    pub fn degree_dim(&self, n: usize) -> usize {
        self.dim().pow(n as u32)
    }

    pub fn word_at(&self, n: usize, mut idx: usize) -> Word {
        let d = self.dim();
        let mut letters = vec![self.f.basis()[0]; n];
        for slot in letters.iter_mut().rev() {
            *slot = self.f.basis()[idx % d];
            idx /= d;
        }
        Word(letters)
    }

    pub fn index_of_word(&self, w: &Word) -> Option<usize> {
        let d = self.dim();
        w.letters().iter().try_fold(0usize, |acc, l| self.f.index_of(l).map(|k| acc * d + k))
    }

    pub fn words(&self, n: usize) -> impl Iterator<Item = Word> + '_ {
        (0..self.degree_dim(n)).map(move |k| self.word_at(n, k))
    }

    /// All words of length at most `n`, by degree then index.
    pub fn words_up_to(&self, n: usize) -> impl Iterator<Item = Word> + '_ {
        (0..=n).flat_map(move |k| self.words(k))
    }

    /// Coefficient vector (indexed by word position) of the degree-`n` part of `e`.
    pub fn to_coords(&self, e: &TensorElement, n: usize) -> SparseVec<usize> {
        e.terms()
            .iter()
            .filter(|(w, _)| w.len() == n)
            .filter_map(|(w, c)| self.index_of_word(w).map(|k| (k, c.clone())))
            .collect()
    }

    pub fn from_coords(&self, n: usize, v: &SparseVec<usize>) -> TensorElement {
        TensorElement::from_terms(v.iter().map(|(k, c)| (self.word_at(n, *k), c.clone())))
    }
}

pub fn word_product(ctx: &TensorContext, a: &TensorElement, b: &TensorElement) -> Truncated<TensorElement> {
    a.mul(b).truncate(ctx.max_degree())
}

pub fn coproduct(ctx: &TensorContext, w: &TensorElement) -> TensorPair {
    element_coproduct(ctx.f(), w)
}

pub fn counit(ctx: &TensorContext, w: &TensorElement) -> Scalar {
    element_counit(ctx.f(), w)
}

fn pair_product(a: &TensorPair, b: &TensorPair) -> TensorPair {
    let mut out = TensorPair::new();
    for ((a1, a2), ca) in a {
        for ((b1, b2), cb) in b {
            add_entry(&mut out, (a1.concat(b1), a2.concat(b2)), ca * cb);
        }
    }
    out
}

/// Exhaustive bialgebra axiom checks on all words of degree `<= min(N, 3)`.
pub fn verify_free_bialgebra(ctx: &TensorContext) -> CheckReport {
    let m = ctx.max_degree().min(3);
    let f = ctx.f();
    let words: Vec<Word> = ctx.words_up_to(m).collect();
    let coproducts: Vec<TensorPair> = words.iter().map(|w| word_coproduct(f, w)).collect();

    let mut grading = Check::new("grading");
    let mut counit_laws = Check::new("counit");
    let mut coassoc = Check::new("coassociativity");
    for (w, dw) in words.iter().zip(&coproducts) {
        grading.record(dw.keys().all(|(a, b)| a.len() == w.len() && b.len() == w.len()), || w.to_string());

        let mut left = SparseVec::new();
        let mut right = SparseVec::new();
        let mut lhs: SparseVec<(Word, Word, Word)> = SparseVec::new();
        let mut rhs: SparseVec<(Word, Word, Word)> = SparseVec::new();
        for ((a, b), c) in dw {
            add_entry(&mut left, b.clone(), c * word_counit(f, a));
            add_entry(&mut right, a.clone(), c * word_counit(f, b));
            for ((aa, ab), d) in word_coproduct(f, a) {
                add_entry(&mut lhs, (aa, ab, b.clone()), c * d);
            }
            for ((ba, bb), d) in word_coproduct(f, b) {
                add_entry(&mut rhs, (a.clone(), ba, bb), c * d);
            }
        }
        let target = TensorElement::from_word(w.clone());
        counit_laws.record(&left == target.terms() && &right == target.terms(), || w.to_string());
        coassoc.record(lhs == rhs, || w.to_string());
    }

    let mut mult = Check::new("multiplicativity");
    for (a, da) in words.iter().zip(&coproducts) {
        for (b, db) in words.iter().zip(&coproducts) {
            if a.len() + b.len() > m {
                continue;
            }
            let ab = a.concat(b);
            mult.record(word_coproduct(f, &ab) == pair_product(da, db), || format!("({a})·({b})"));
        }
    }
    CheckReport::from(vec![grading, counit_laws, coassoc, mult])
}

/// Pairing of a word of `T(F)`, `F` the dual of an algebra `E`, with a pure
/// tensor `t_1 ⊗ .. ⊗ t_n` of elements of `E`.
pub fn duality_pairing(ctx: &TensorContext, w: &Word, t: &[Vect]) -> Result<Scalar> {
    if ctx.f().source_algebra().is_none() {
        return Err(CoreError::Unsupported("the coalgebra was not built as the dual of an algebra".into()));
    }
    if w.len() != t.len() {
        return Err(CoreError::InvalidArgument(format!(
            "word of length {} paired with a tensor of rank {}",
            w.len(),
            t.len()
        )));
    }
    Ok(w.letters().iter().zip(t).map(|(l, v)| v.coeff(l)).product())
}

/// Checks `<Δw, t1 ⊗ t2> = <w, t1·t2>` for every basis word of degree
/// `<= max_n` and every pair of basis tensors, the product being taken
/// componentwise in `E^{⊗n}`.
pub fn verify_duality(ctx: &TensorContext, max_n: usize) -> Result<Check> {
    let e = ctx
        .f()
        .source_algebra()
        .ok_or_else(|| CoreError::Unsupported("the coalgebra was not built as the dual of an algebra".into()))?;
    let mut check = Check::new("duality");
    for n in 0..=max_n {
        let tensors: Vec<Vec<Vect>> =
            ctx.words(n).map(|w| w.letters().iter().map(|l| Vect::basis(*l)).collect()).collect();
        for w in ctx.words(n) {
            let dw = word_coproduct(ctx.f(), &w);
            for t1 in &tensors {
                for t2 in &tensors {
                    let mut lhs = Scalar::zero();
                    for ((a, b), c) in &dw {
                        lhs += c * duality_pairing(ctx, a, t1)? * duality_pairing(ctx, b, t2)?;
                    }
                    let prod: Vec<Vect> = t1.iter().zip(t2).map(|(x, y)| e.multiply(x, y)).collect();
                    let rhs = duality_pairing(ctx, &w, &prod)?;
                    check.record(lhs == rhs, || format!("w = {w}"));
                }
            }
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::{dual_coalgebra, triangular_coalgebra, AlgebraPresentation, CoproductTerm};
    use crate::exactlin::int;
    use std::collections::BTreeMap;

    fn l(i: usize, j: usize) -> BasisId {
        BasisId::tri(i, j)
    }

    fn w(ids: &[BasisId]) -> Word {
        Word(ids.to_vec())
    }

    fn ctx_l2(n: usize) -> TensorContext {
        TensorContext::new(triangular_coalgebra(2).unwrap(), n).unwrap()
    }

    #[test]
    fn products_and_truncation() {
        let ctx = ctx_l2(2);
        let a = TensorElement::from_word(w(&[l(1, 1)]));
        let b = TensorElement::from_word(w(&[l(2, 1)]));
        let one = TensorElement::one();
        assert_eq!(word_product(&ctx, &one, &a).value, a);
        let ab = word_product(&ctx, &a, &b);
        assert_eq!(ab.value, TensorElement::from_word(w(&[l(1, 1), l(2, 1)])));
        assert!(!ab.truncated);
        let over = word_product(&ctx, &ab.value, &a);
        assert!(over.value.is_zero());
        assert!(over.truncated);
    }

    #[test]
    fn coproduct_examples() {
        let ctx = ctx_l2(3);
        assert_eq!(
            coproduct(&ctx, &TensorElement::one()),
            [((Word::unit(), Word::unit()), int(1))].into_iter().collect()
        );
        let d1 = coproduct(&ctx, &TensorElement::from_word(w(&[l(2, 1)])));
        let expected1: TensorPair =
            [((w(&[l(1, 1)]), w(&[l(2, 1)])), int(1)), ((w(&[l(2, 1)]), w(&[l(2, 2)])), int(1))].into_iter().collect();
        assert_eq!(d1, expected1);
        let d2 = coproduct(&ctx, &TensorElement::from_word(w(&[l(2, 1), l(2, 1)])));
        let expected2: TensorPair = [
            ((w(&[l(1, 1), l(1, 1)]), w(&[l(2, 1), l(2, 1)])), int(1)),
            ((w(&[l(1, 1), l(2, 1)]), w(&[l(2, 1), l(2, 2)])), int(1)),
            ((w(&[l(2, 1), l(1, 1)]), w(&[l(2, 2), l(2, 1)])), int(1)),
            ((w(&[l(2, 1), l(2, 1)]), w(&[l(2, 2), l(2, 2)])), int(1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(d2, expected2);
    }

    #[test]
    fn counit_examples() {
        let ctx = ctx_l2(3);
        assert_eq!(counit(&ctx, &TensorElement::one()), int(1));
        assert_eq!(counit(&ctx, &TensorElement::from_word(w(&[l(2, 1)]))), int(0));
        assert_eq!(counit(&ctx, &TensorElement::from_word(w(&[l(1, 1), l(2, 2)]))), int(1));
    }

    #[test]
    fn word_numbering_is_lexicographic() {
        let ctx = ctx_l2(3);
        let words: Vec<Word> = ctx.words(2).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        for (k, word) in words.iter().enumerate() {
            assert_eq!(ctx.index_of_word(word), Some(k));
        }
    }

    #[test]
    fn bialgebra_checks_pass() {
        assert!(verify_free_bialgebra(&ctx_l2(3)).passed());
        let dual_numbers = dual_coalgebra(&AlgebraPresentation::truncated_polynomial(2).unwrap()).unwrap();
        assert!(verify_free_bialgebra(&TensorContext::new(dual_numbers, 3).unwrap()).passed());
    }

    #[test]
    fn non_coassociative_letter_is_witnessed() {
        let base = triangular_coalgebra(2).unwrap();
        let mut delta: BTreeMap<BasisId, Vec<CoproductTerm>> =
            base.basis().iter().map(|id| (*id, base.delta(id).to_vec())).collect();
        // Δ l[2,1] = l[1,1]⊗l[2,1] + l[2,1]⊗l[2,2] + l[2,1]⊗l[2,1]
        delta.get_mut(&l(2, 1)).unwrap().push((l(2, 1), l(2, 1), int(1)));
        let eps = base.basis().iter().map(|id| (*id, base.epsilon(id))).collect();
        let bad = Coalgebra::new(base.basis().to_vec(), delta, eps).unwrap();
        let report = verify_free_bialgebra(&TensorContext::new(bad, 3).unwrap());
        let coassoc = report.get("coassociativity").unwrap();
        assert_eq!(coassoc.witness.as_deref(), Some("l[2,1]"));
    }

    #[test]
    fn pairing_basics() {
        let e = AlgebraPresentation::upper_triangular(2).unwrap();
        let ctx = TensorContext::new(dual_coalgebra(&e).unwrap(), 2).unwrap();
        assert_eq!(duality_pairing(&ctx, &Word::unit(), &[]).unwrap(), int(1));
        for i in 0..3 {
            for j in 0..3 {
                let p = duality_pairing(&ctx, &Word::letter(BasisId::Plain(i)), &[Vect::basis(BasisId::Plain(j))]);
                assert_eq!(p.unwrap(), int((i == j) as i64));
            }
        }
        assert!(matches!(
            duality_pairing(&ctx, &Word::unit(), &[Vect::basis(BasisId::Plain(0))]),
            Err(CoreError::InvalidArgument(_))
        ));
        let bare = TensorContext::new(triangular_coalgebra(2).unwrap(), 2).unwrap();
        assert!(matches!(duality_pairing(&bare, &Word::unit(), &[]), Err(CoreError::Unsupported(_))));
        let check = verify_duality(&ctx, 2).unwrap();
        assert!(check.passed());
        assert_eq!(check.cases, 1 + 3 * 9 + 9 * 81);
    }
}
