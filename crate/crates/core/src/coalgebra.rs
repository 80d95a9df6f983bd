//! Finite-dimensional coalgebras given by structure constants.
//!
//! All coalgebras here are finite-dimensional, so the finiteness and
//! regularity conditions one needs for infinite-dimensional inputs (finite
//! type, cofinite, regular, strongly regular) hold automatically and are not
//! modelled separately.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::exactlin::{add_entry, axpy, Scalar, SparseVec};

/// Basis element of a coalgebra (or of an algebra presentation).
///
/// `Triangular` ids index the coalgebras dual to upper-triangular matrix
/// algebras, with `1 <= j <= i`; `block` tells summands of a direct sum
/// apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisId {
    Plain(usize),
    Triangular { block: usize, i: usize, j: usize },
}

impl BasisId {
    pub fn tri(i: usize, j: usize) -> Self {
        BasisId::Triangular { block: 0, i, j }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, BasisId::Triangular { i, j, .. } if i == j)
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisId::Plain(k) => write!(f, "f{k}"),
            BasisId::Triangular { block: 0, i, j } => write!(f, "l[{i},{j}]"),
            BasisId::Triangular { block, i, j } => write!(f, "l[{i},{j}]@{block}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid basis id `{0}` (expected `f<k>`, `l[i,j]` or `l[i,j]@<block>` with 1 <= j <= i)")]
pub struct BasisIdParseError(pub String);

fn parse_index(s: &str) -> Option<usize> {
    if s.is_empty() || s.len() > 9 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for BasisId {
    type Err = BasisIdParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = || BasisIdParseError(s.to_string());
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('f') {
            return parse_index(rest).map(BasisId::Plain).ok_or_else(err);
        }
        let rest = t.strip_prefix("l[").ok_or_else(err)?;
        let (inner, tail) = rest.split_once(']').ok_or_else(err)?;
        let (i, j) = inner.split_once(',').ok_or_else(err)?;
        let i = parse_index(i.trim()).ok_or_else(err)?;
        let j = parse_index(j.trim()).ok_or_else(err)?;
        let block = match tail {
            "" => 0,
            _ => parse_index(tail.strip_prefix('@').ok_or_else(err)?).ok_or_else(err)?,
        };
        if j == 0 || j > i {
            return Err(err());
        }
        Ok(BasisId::Triangular { block, i, j })
    }
}

/// Formats `sum c * name` with unit coefficients elided.
pub(crate) fn format_terms<I>(terms: I) -> String
where
    I: IntoIterator<Item = (String, Scalar)>,
{
    let mut out = String::new();
    for (name, c) in terms {
        let negative = c < Scalar::zero();
        let mag = if negative { -c } else { c };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if name.is_empty() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&name);
        } else {
            out.push_str(&format!("{mag}·{name}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Element of a coalgebra or algebra: sparse combination of basis ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vect {
    terms: SparseVec<BasisId>,
}

impl Vect {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(id: BasisId) -> Self {
        Vect { terms: [(id, Scalar::one())].into_iter().collect() }
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisId, Scalar)>>(terms: I) -> Self {
        let mut v = Vect::zero();
        for (id, c) in terms {
            add_entry(&mut v.terms, id, c);
        }
        v
    }

    pub fn terms(&self) -> &SparseVec<BasisId> {
        &self.terms
    }

    pub fn coeff(&self, id: &BasisId) -> Scalar {
        self.terms.get(id).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Vect) -> Vect {
        let mut terms = self.terms.clone();
        axpy(&mut terms, &Scalar::one(), &other.terms);
        Vect { terms }
    }

    pub fn scale(&self, c: &Scalar) -> Vect {
        Vect { terms: crate::exactlin::scale(&self.terms, c) }
    }
}

impl fmt::Display for Vect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(self.terms.iter().map(|(id, c)| (id.to_string(), c.clone()))))
    }
}

/// Finite-dimensional associative unital algebra with basis `e^0 .. e^{dim-1}`
/// (ids `Plain(k)`), given by the products of basis pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    dim: usize,
    structure: BTreeMap<(usize, usize), Vect>,
    unit: Vect,
    labels: Vec<String>,
}

impl AlgebraPresentation {
    /// Products not listed in `structure` are zero.
    pub fn new(dim: usize, structure: BTreeMap<(usize, usize), Vect>, unit: Vect) -> Self {
        let labels = (0..dim).map(|k| format!("e{k}")).collect();
        AlgebraPresentation { dim, structure, unit, labels }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim, "one label per basis element");
        self.labels = labels;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &Vect {
        &self.unit
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure(&self) -> &BTreeMap<(usize, usize), Vect> {
        &self.structure
    }

    pub fn product_of_basis(&self, l: usize, m: usize) -> Vect {
        self.structure.get(&(l, m)).cloned().unwrap_or_default()
    }

    fn plain_index(id: &BasisId) -> Option<usize> {
        match id {
            BasisId::Plain(k) => Some(*k),
            BasisId::Triangular { .. } => None,
        }
    }

    pub fn multiply(&self, a: &Vect, b: &Vect) -> Vect {
        let mut out = SparseVec::new();
        for (ia, ca) in a.terms() {
            for (ib, cb) in b.terms() {
                let (Some(l), Some(m)) = (Self::plain_index(ia), Self::plain_index(ib)) else {
                    continue;
                };
                let c = ca * cb;
                axpy(&mut out, &c, self.product_of_basis(l, m).terms());
            }
        }
        Vect { terms: out }
    }

    /// Lists every violated axiom; empty means the presentation is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let in_range = |v: &Vect| v.terms().keys().all(|id| matches!(id, BasisId::Plain(k) if *k < self.dim));
        for (&(l, m), v) in &self.structure {
            if l >= self.dim || m >= self.dim || !in_range(v) {
                out.push(format!("product e{l}·e{m} refers to a basis element outside 0..{}", self.dim));
            }
        }
        if !in_range(&self.unit) {
            out.push("unit refers to a basis element out of range".to_string());
        }
        if !out.is_empty() {
            return out;
        }
        let e = |k: usize| Vect::basis(BasisId::Plain(k));
        for a in 0..self.dim {
            if self.multiply(&self.unit, &e(a)) != e(a) || self.multiply(&e(a), &self.unit) != e(a) {
                out.push(format!("unit law fails on {}", self.labels[a]));
            }
            for b in 0..self.dim {
                let ab = self.product_of_basis(a, b);
                for c in 0..self.dim {
                    let bc = self.product_of_basis(b, c);
                    if self.multiply(&ab, &e(c)) != self.multiply(&e(a), &bc) {
                        out.push(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[a], self.labels[b], self.labels[c]
                        ));
                    }
                }
            }
        }
        out
    }

    /// The ground field: one basis element with `1·1 = 1`.
    pub fn ground_field() -> Self {
        let one = Vect::basis(BasisId::Plain(0));
        AlgebraPresentation::new(1, [((0, 0), one.clone())].into_iter().collect(), one)
            .with_labels(vec!["1".to_string()])
    }

    /// `C[t]/(t^order)` on the basis `1, t, .., t^{order-1}`.
    pub fn truncated_polynomial(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(CoreError::InvalidArgument("truncation order must be at least 1".into()));
        }
        let mut structure = BTreeMap::new();
        for a in 0..order {
            for b in 0..order {
                if a + b < order {
                    structure.insert((a, b), Vect::basis(BasisId::Plain(a + b)));
                }
            }
        }
        let labels = (0..order)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            })
            .collect();
        Ok(AlgebraPresentation::new(order, structure, Vect::basis(BasisId::Plain(0))).with_labels(labels))
    }

    /// Upper-triangular `n x n` matrices. Basis element `e[i,j]` (`j <= i`)
    /// is the matrix unit in row `j`, column `i`, at position
    /// [`triangular_position`]`(i, j)`; `e[a,b]·e[c,d] = δ(a,d) e[c,b]`.
    pub fn upper_triangular(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::InvalidArgument("matrix size must be at least 1".into()));
        }
        let pairs = triangular_pairs(n);
        let mut structure = BTreeMap::new();
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                if a == d {
                    structure.insert(
                        (triangular_position(a, b), triangular_position(c, d)),
                        Vect::basis(BasisId::Plain(triangular_position(c, b))),
                    );
                }
            }
        }
        let unit = Vect::from_terms((1..=n).map(|i| (BasisId::Plain(triangular_position(i, i)), Scalar::one())));
        let labels = pairs.iter().map(|(i, j)| format!("e[{i},{j}]")).collect();
        Ok(AlgebraPresentation::new(pairs.len(), structure, unit).with_labels(labels))
    }
}

/// Index pairs `(i, j)` with `1 <= j <= i <= n`, ordered by `i` then `j`.
pub fn triangular_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (1..=i).map(move |j| (i, j))).collect()
}

/// Position of `(i, j)` in [`triangular_pairs`].
pub fn triangular_position(i: usize, j: usize) -> usize {
    i * (i - 1) / 2 + (j - 1)
}

/// Identifies the dual basis of [`AlgebraPresentation::upper_triangular`]`(n)`
/// with the basis of [`triangular_coalgebra`]`(n)`.
pub fn triangular_relabeling(n: usize) -> BTreeMap<BasisId, BasisId> {
    triangular_pairs(n)
        .into_iter()
        .map(|(i, j)| (BasisId::Plain(triangular_position(i, j)), BasisId::tri(i, j)))
        .collect()
}

/// One term `c · left ⊗ right` of a coproduct.
pub type CoproductTerm = (BasisId, BasisId, Scalar);

#[derive(Clone, Debug)]
pub struct Coalgebra {
    basis: Vec<BasisId>,
    index: BTreeMap<BasisId, usize>,
    delta: BTreeMap<BasisId, Vec<CoproductTerm>>,
    epsilon: BTreeMap<BasisId, Scalar>,
    labels: BTreeMap<BasisId, String>,
    source: Option<Box<AlgebraPresentation>>,
}

impl PartialEq for Coalgebra {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.delta == other.delta && self.epsilon == other.epsilon
    }
}

impl Eq for Coalgebra {}

fn canonical_terms(terms: &[CoproductTerm]) -> Vec<CoproductTerm> {
    let mut acc: SparseVec<(BasisId, BasisId)> = SparseVec::new();
    for (p, q, c) in terms {
        add_entry(&mut acc, (*p, *q), c.clone());
    }
    acc.into_iter().map(|((p, q), c)| (p, q, c)).collect()
}

impl Coalgebra {
    /// Builds a coalgebra from structure constants. Basis ids must be distinct
    /// and every id mentioned by `delta`/`epsilon` must be in the basis. The
    /// axioms are not checked here; see [`verify_coalgebra`].
    pub fn new(
        basis: Vec<BasisId>,
        delta: BTreeMap<BasisId, Vec<CoproductTerm>>,
        epsilon: BTreeMap<BasisId, Scalar>,
    ) -> Result<Self> {
        let mut sorted = basis;
        sorted.sort();
        let len = sorted.len();
        sorted.dedup();
        if sorted.len() != len {
            return Err(CoreError::InvalidArgument("duplicate basis ids".into()));
        }
        let index: BTreeMap<BasisId, usize> = sorted.iter().enumerate().map(|(k, id)| (*id, k)).collect();
        let known = |id: &BasisId| -> Result<()> {
            if index.contains_key(id) {
                Ok(())
            } else {
                Err(CoreError::UnknownBasis(id.to_string()))
            }
        };
        let mut canon = BTreeMap::new();
        for (id, terms) in &delta {
            known(id)?;
            for (p, q, _) in terms {
                known(p)?;
                known(q)?;
            }
            canon.insert(*id, canonical_terms(terms));
        }
        let mut eps = BTreeMap::new();
        for (id, c) in epsilon {
            known(&id)?;
            if !c.is_zero() {
                eps.insert(id, c);
            }
        }
        for id in &sorted {
            canon.entry(*id).or_insert_with(Vec::new);
        }
        Ok(Coalgebra { basis: sorted, index, delta: canon, epsilon: eps, labels: BTreeMap::new(), source: None })
    }

    pub fn basis(&self) -> &[BasisId] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, id: &BasisId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &BasisId) -> bool {
        self.index.contains_key(id)
    }

    /// Coproduct of a basis element; empty for ids outside the basis.
    pub fn delta(&self, id: &BasisId) -> &[CoproductTerm] {
        self.delta.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn epsilon(&self, id: &BasisId) -> Scalar {
        self.epsilon.get(id).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn epsilon_of(&self, v: &Vect) -> Scalar {
        v.terms().iter().map(|(id, c)| c * self.epsilon(id)).sum()
    }

    pub fn delta_of(&self, v: &Vect) -> SparseVec<(BasisId, BasisId)> {
        let mut out = SparseVec::new();
        for (id, c) in v.terms() {
            for (p, q, d) in self.delta(id) {
                add_entry(&mut out, (*p, *q), c * d);
            }
        }
        out
    }

    /// Display name: the label inherited from an algebra presentation, if
    /// any, otherwise the id itself.
    pub fn label(&self, id: &BasisId) -> String {
        self.labels.get(id).cloned().unwrap_or_else(|| id.to_string())
    }

    pub fn labels(&self) -> &BTreeMap<BasisId, String> {
        &self.labels
    }

    /// The algebra this coalgebra was dualised from, if any.
    pub fn source_algebra(&self) -> Option<&AlgebraPresentation> {
        self.source.as_deref()
    }

    /// Renames basis ids; ids absent from `map` are kept.
    pub fn relabel(&self, map: &BTreeMap<BasisId, BasisId>) -> Result<Coalgebra> {
        let r = |id: &BasisId| map.get(id).copied().unwrap_or(*id);
        let basis = self.basis.iter().map(r).collect();
        let delta = self
            .delta
            .iter()
            .map(|(id, terms)| (r(id), terms.iter().map(|(p, q, c)| (r(p), r(q), c.clone())).collect()))
            .collect();
        let epsilon = self.epsilon.iter().map(|(id, c)| (r(id), c.clone())).collect();
        let mut out = Coalgebra::new(basis, delta, epsilon)?;
        out.labels = self.labels.iter().map(|(id, l)| (r(id), l.clone())).collect();
        Ok(out)
    }
}

fn dual_label(label: &str) -> String {
    match label.strip_prefix('e') {
        Some(rest) if !rest.is_empty() => format!("f{rest}"),
        _ => format!("f({label})"),
    }
}

/// The coalgebra dual to a finite-dimensional algebra, on the dual basis:
/// `Δ f_i = Σ e_i^{l,m} f_l ⊗ f_m` where `e^l e^m = Σ_i e_i^{l,m} e^i`, and
/// `ε(f_i)` is the `i`-th coordinate of the unit.
pub fn dual_coalgebra(e: &AlgebraPresentation) -> Result<Coalgebra> {
    let violations = e.violations();
    if !violations.is_empty() {
        return Err(CoreError::InvalidAlgebra(violations));
    }
    let basis: Vec<BasisId> = (0..e.dim()).map(BasisId::Plain).collect();
    let mut delta: BTreeMap<BasisId, Vec<CoproductTerm>> = BTreeMap::new();
    for (&(l, m), product) in e.structure() {
        for (i, c) in product.terms() {
            delta.entry(*i).or_default().push((BasisId::Plain(l), BasisId::Plain(m), c.clone()));
        }
    }
    let epsilon = e.unit().terms().clone().into_iter().collect();
    let mut c = Coalgebra::new(basis, delta, epsilon)?;
    c.labels = e.labels().iter().enumerate().map(|(k, l)| (BasisId::Plain(k), dual_label(l))).collect();
    c.source = Some(Box::new(e.clone()));
    Ok(c)
}

/// Dual of the upper-triangular `n x n` matrices on the basis `l[i,j]`,
/// `1 <= j <= i <= n`: `Δ l[i,j] = Σ_{j<=k<=i} l[k,j] ⊗ l[i,k]`,
/// `ε(l[i,j]) = δ(i,j)`.
pub fn triangular_coalgebra(n: usize) -> Result<Coalgebra> {
    if n == 0 {
        return Err(CoreError::InvalidArgument("triangular coalgebra needs n >= 1".into()));
    }
    let pairs = triangular_pairs(n);
    let basis = pairs.iter().map(|&(i, j)| BasisId::tri(i, j)).collect();
    let delta = pairs
        .iter()
        .map(|&(i, j)| {
            let terms = (j..=i).map(|k| (BasisId::tri(k, j), BasisId::tri(i, k), Scalar::one())).collect();
            (BasisId::tri(i, j), terms)
        })
        .collect();
    let epsilon = (1..=n).map(|i| (BasisId::tri(i, i), Scalar::one())).collect();
    Coalgebra::new(basis, delta, epsilon)
}

/// Direct sum; summands are kept apart by shifting triangular block numbers
/// and plain indices past those of earlier summands.
pub fn direct_sum(parts: &[Coalgebra]) -> Result<Coalgebra> {
    if parts.is_empty() {
        return Err(CoreError::InvalidArgument("direct sum of an empty family".into()));
    }
    if parts.len() == 1 {
        return Ok(parts[0].clone());
    }
    let mut basis = Vec::new();
    let mut delta = BTreeMap::new();
    let mut epsilon = BTreeMap::new();
    let mut labels = BTreeMap::new();
    let (mut block_offset, mut plain_offset) = (0usize, 0usize);
    for (part_no, part) in parts.iter().enumerate() {
        let shift = |id: &BasisId| match *id {
            BasisId::Plain(k) => BasisId::Plain(k + plain_offset),
            BasisId::Triangular { block, i, j } => BasisId::Triangular { block: block + block_offset, i, j },
        };
        for id in part.basis() {
            let new = shift(id);
            basis.push(new);
            delta.insert(new, part.delta(id).iter().map(|(p, q, c)| (shift(p), shift(q), c.clone())).collect());
            epsilon.insert(new, part.epsilon(id));
            if let Some(l) = part.labels.get(id) {
                labels.insert(new, if part_no == 0 { l.clone() } else { format!("{l}@{part_no}") });
            }
        }
        let max_block = part
            .basis()
            .iter()
            .filter_map(|id| match id {
                BasisId::Triangular { block, .. } => Some(block + 1),
                BasisId::Plain(_) => None,
            })
            .max()
            .unwrap_or(0);
        let max_plain = part
            .basis()
            .iter()
            .filter_map(|id| match id {
                BasisId::Plain(k) => Some(k + 1),
                BasisId::Triangular { .. } => None,
            })
            .max()
            .unwrap_or(0);
        block_offset += max_block;
        plain_offset += max_plain;
    }
    let mut out = Coalgebra::new(basis, delta, epsilon)?;
    out.labels = labels;
    Ok(out)
}

/// Outcome of the axiom checks on one basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCheck {
    pub id: BasisId,
    pub coassociative: bool,
    pub left_counit: bool,
    pub right_counit: bool,
}

impl BasisCheck {
    pub fn passed(&self) -> bool {
        self.coassociative && self.left_counit && self.right_counit
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraReport {
    pub checks: Vec<BasisCheck>,
}

impl CoalgebraReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(BasisCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BasisCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Checks coassociativity and both counit laws on every basis element.
pub fn verify_coalgebra(c: &Coalgebra) -> CoalgebraReport {
    let checks = c
        .basis()
        .iter()
        .map(|b| {
            let mut left_assoc: SparseVec<(BasisId, BasisId, BasisId)> = SparseVec::new();
            let mut right_assoc: SparseVec<(BasisId, BasisId, BasisId)> = SparseVec::new();
            let mut eps_left = SparseVec::new();
            let mut eps_right = SparseVec::new();
            for (p, q, coef) in c.delta(b) {
                // (Δ ⊗ id) Δ
                for (pp, pq, d) in c.delta(p) {
                    add_entry(&mut left_assoc, (*pp, *pq, *q), coef * d);
                }
                // (id ⊗ Δ) Δ
                for (qp, qq, d) in c.delta(q) {
                    add_entry(&mut right_assoc, (*p, *qp, *qq), coef * d);
                }
                add_entry(&mut eps_left, *q, coef * c.epsilon(p));
                add_entry(&mut eps_right, *p, coef * c.epsilon(q));
            }
            let target = Vect::basis(*b);
            BasisCheck {
                id: *b,
                coassociative: left_assoc == right_assoc,
                left_counit: &eps_left == target.terms(),
                right_counit: &eps_right == target.terms(),
            }
        })
        .collect();
    CoalgebraReport { checks }
}

/// Basis elements `g` with `Δ g = g ⊗ g` and `ε(g) = 1`.
pub fn grouplikes(c: &Coalgebra) -> Vec<BasisId> {
    c.basis().iter().filter(|g| c.delta(g) == [(**g, **g, Scalar::one())] && c.epsilon(g).is_one()).copied().collect()
}

/// Whether `c` is a direct sum of triangular coalgebras, i.e. every basis id
/// is triangular and the structure constants are those of
/// [`triangular_coalgebra`] within each block.
pub fn is_cotriangular(c: &Coalgebra) -> bool {
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for id in c.basis() {
        match *id {
            BasisId::Triangular { block, i, .. } => {
                let e = sizes.entry(block).or_insert(0);
                *e = (*e).max(i);
            }
            BasisId::Plain(_) => return false,
        }
    }
    let expected: usize = sizes.values().map(|n| n * (n + 1) / 2).sum();
    if expected != c.dim() {
        return false;
    }
    c.basis().iter().all(|id| {
        let BasisId::Triangular { block, i, j } = *id else { return false };
        let t = |i, j| BasisId::Triangular { block, i, j };
        let want: Vec<CoproductTerm> = (j..=i).map(|k| (t(k, j), t(i, k), Scalar::one())).collect();
        c.delta(id) == want.as_slice() && c.epsilon(id) == if i == j { Scalar::one() } else { Scalar::zero() }
    })
}
