//! Finite-support forms, their convolution algebra, and the right-invariant
//! operators they induce.
//!
//! The form `ω` induces `X_ω = (ω ⊗ id) ∘ Δ`, and `X ↦ ε ∘ X` recovers it.
//! Composition reverses convolution: `X_a ∘ X_b = X_{b * a}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::checks::Check;
use crate::coalgebra::{AlgebraPresentation, BasisId, Coalgebra, Vect};
use crate::error::{CoreError, Result};
use crate::exactlin::{add_entry, solve, Matrix, Scalar, SparseVec};
use crate::free_tensor::TensorContext;

/// A linear form on a coalgebra with finite support, stored by its values on
/// basis elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Form {
    coeffs: SparseVec<BasisId>,
}

impl Form {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisId, Scalar)>>(terms: I) -> Self {
        let mut coeffs = SparseVec::new();
        for (id, c) in terms {
            add_entry(&mut coeffs, id, c);
        }
        Form { coeffs }
    }

    /// The form that is 1 on `id` and 0 on the other basis elements.
    pub fn basis_eval(id: BasisId) -> Self {
        Self::from_terms([(id, Scalar::one())])
    }

    /// On a dual coalgebra, evaluation at an algebra element `e` takes the
    /// value `e_i` on `f_i`.
    pub fn evaluation_at(e: &Vect) -> Self {
        Self::from_terms(e.terms().iter().map(|(id, c)| (*id, c.clone())))
    }

    pub fn counit(f: &Coalgebra) -> Self {
        Self::from_terms(f.basis().iter().map(|b| (*b, f.epsilon(b))))
    }

    pub fn coeffs(&self) -> &SparseVec<BasisId> {
        &self.coeffs
    }

    pub fn value(&self, id: &BasisId) -> Scalar {
        self.coeffs.get(id).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn eval(&self, v: &Vect) -> Scalar {
        v.terms().iter().map(|(id, c)| c * self.value(id)).sum()
    }

    pub fn add(&self, other: &Form) -> Form {
        Self::from_terms(self.coeffs.iter().chain(&other.coeffs).map(|(id, c)| (*id, c.clone())))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        Form { coeffs: crate::exactlin::scale(&self.coeffs, c) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = Vect::from_terms(self.coeffs.iter().map(|(id, c)| (*id, c.clone())));
        write!(f, "{v}")
    }
}

/// A regular right-invariant operator `c·id + (ω ⊗ id) ∘ Δ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RIOp {
    pub id_part: Scalar,
    pub form_part: Form,
}

impl RIOp {
    pub fn identity() -> Self {
        RIOp { id_part: Scalar::one(), form_part: Form::zero() }
    }

    pub fn from_form(form: Form) -> Self {
        RIOp { id_part: Scalar::zero(), form_part: form }
    }

    /// The single form `c·ε + ω` inducing the same operator.
    pub fn total_form(&self, f: &Coalgebra) -> Form {
        Form::counit(f).scale(&self.id_part).add(&self.form_part)
    }
}

/// Grade-preserving operator on truncated `T(F)`, one matrix per degree, each
/// acting on the word basis of that degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinOp {
    blocks: BTreeMap<usize, Matrix>,
}

impl LinOp {
    pub fn from_blocks(blocks: BTreeMap<usize, Matrix>) -> Self {
        LinOp { blocks }
    }

    pub fn identity(ctx: &TensorContext) -> Self {
        Self::scalar(ctx, &Scalar::one())
    }

    pub fn scalar(ctx: &TensorContext, c: &Scalar) -> Self {
        LinOp { blocks: (0..=ctx.max_degree()).map(|n| (n, Matrix::identity(ctx.degree_dim(n)).scale(c))).collect() }
    }

    pub fn zero(ctx: &TensorContext) -> Self {
        Self::scalar(ctx, &Scalar::zero())
    }

    pub fn block(&self, n: usize) -> Option<&Matrix> {
        self.blocks.get(&n)
    }

    pub fn blocks(&self) -> &BTreeMap<usize, Matrix> {
        &self.blocks
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    fn zip_with(&self, other: &LinOp, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> LinOp {
        assert!(self.blocks.keys().eq(other.blocks.keys()), "operators must be defined on the same degrees");
        LinOp { blocks: self.blocks.iter().map(|(n, a)| (*n, f(a, &other.blocks[n]))).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinOp) -> LinOp {
        self.zip_with(other, |a, b| a.mul(b))
    }

    pub fn add(&self, other: &LinOp) -> LinOp {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &LinOp) -> LinOp {
        self.zip_with(other, |a, b| a.sub(b))
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: &Scalar, other: &LinOp) -> LinOp {
        self.zip_with(other, |a, b| a.axpy(c, b))
    }

    pub fn scale(&self, c: &Scalar) -> LinOp {
        LinOp { blocks: self.blocks.iter().map(|(n, a)| (*n, a.scale(c))).collect() }
    }

    /// All entries keyed by `(degree, column, row)`, for flattening operators
    /// into vectors.
    pub fn flat_entries(&self) -> SparseVec<(usize, usize, usize)> {
        let mut out = SparseVec::new();
        for (n, m) in &self.blocks {
            for (col, column) in m.columns().iter().enumerate() {
                for (row, v) in column {
                    out.insert((*n, col, *row), v.clone());
                }
            }
        }
        out
    }
}

/// Matrix on `F` (columns and rows in basis order) of `c·id + (ω ⊗ id) ∘ Δ`.
pub fn op_from_form(f: &Coalgebra, x: &RIOp) -> Matrix {
    let d = f.dim();
    let mut m = Matrix::zeros(d, d);
    for (k, b) in f.basis().iter().enumerate() {
        if !x.id_part.is_zero() {
            m.add_to(k, k, x.id_part.clone());
        }
        for (p, q, c) in f.delta(b) {
            let w = x.form_part.value(p);
            if !w.is_zero() {
                m.add_to(f.index_of(q).expect("coproduct stays in the basis"), k, c * w);
            }
        }
    }
    m
}

/// Checks `Δ ∘ X = (X ⊗ id) ∘ Δ` on every basis element of `F`.
pub fn verify_right_invariance(f: &Coalgebra, x: &Matrix) -> Check {
    let mut check = Check::new("right-invariance on F");
    let basis = f.basis();
    for (k, b) in basis.iter().enumerate() {
        let mut lhs: SparseVec<(BasisId, BasisId)> = SparseVec::new();
        for (row, c) in x.column(k) {
            for (p, q, d) in f.delta(&basis[*row]) {
                add_entry(&mut lhs, (*p, *q), c * d);
            }
        }
        let mut rhs: SparseVec<(BasisId, BasisId)> = SparseVec::new();
        for (p, q, d) in f.delta(b) {
            let pi = f.index_of(p).expect("coproduct stays in the basis");
            for (row, c) in x.column(pi) {
                add_entry(&mut rhs, (basis[*row], *q), c * d);
            }
        }
        check.record(lhs == rhs, || f.label(b));
    }
    check
}

/// Checks `Δ ∘ X = (X ⊗ id) ∘ Δ` on every word of every degree block of `x`.
pub fn verify_right_invariance_tensor(ctx: &TensorContext, x: &LinOp) -> Check {
    let mut check = Check::new("right-invariance on T(F)");
    for (n, m) in x.blocks() {
        if *n > ctx.max_degree() {
            continue;
        }
        let cop = ctx.degree_coproducts(*n);
        for (k, dk) in cop.iter().enumerate() {
            let mut lhs: SparseVec<(usize, usize)> = SparseVec::new();
            for (row, c) in m.column(k) {
                for (a, b, d) in &cop[*row] {
                    add_entry(&mut lhs, (*a, *b), c * d);
                }
            }
            let mut rhs: SparseVec<(usize, usize)> = SparseVec::new();
            for (a, b, d) in dk {
                for (row, c) in m.column(*a) {
                    add_entry(&mut rhs, (*row, *b), c * d);
                }
            }
            check.record(lhs == rhs, || ctx.word_at(*n, k).to_string());
        }
    }
    check
}

/// `ε ∘ X` for a right-invariant `X` on `F`.
pub fn form_of_op(f: &Coalgebra, x: &Matrix) -> Result<Form> {
    if x.rows() != f.dim() || x.cols() != f.dim() {
        return Err(CoreError::InvalidArgument(format!(
            "operator is {}x{} but the coalgebra has dimension {}",
            x.rows(),
            x.cols(),
            f.dim()
        )));
    }
    let check = verify_right_invariance(f, x);
    if let Some(witness) = check.witness {
        return Err(CoreError::InvarianceViolation { witness });
    }
    Ok(Form::from_terms(f.basis().iter().enumerate().map(|(k, b)| {
        let value: Scalar = x.column(k).iter().map(|(row, c)| c * f.epsilon(&f.basis()[*row])).sum();
        (*b, value)
    })))
}

/// `(a * b)(v) = Σ a(v') b(v'')`.
pub fn convolution(f: &Coalgebra, a: &Form, b: &Form) -> Form {
    Form::from_terms(f.basis().iter().map(|v| {
        let value: Scalar = f.delta(v).iter().map(|(p, q, c)| c * a.value(p) * b.value(q)).sum();
        (*v, value)
    }))
}

/// The two-sided convolution inverse, found by an exact linear solve.
pub fn convolution_inverse(f: &Coalgebra, a: &Form) -> Option<Form> {
    let d = f.dim();
    let basis = f.basis();
    // Unknowns b(β) in basis order; rows 0..d encode a*b = ε, rows d..2d encode b*a = ε.
    let mut m = Matrix::zeros(2 * d, d);
    let mut rhs = vec![Scalar::zero(); 2 * d];
    for (r, v) in basis.iter().enumerate() {
        rhs[r] = f.epsilon(v);
        rhs[d + r] = f.epsilon(v);
        for (p, q, c) in f.delta(v) {
            let (pi, qi) = (f.index_of(p)?, f.index_of(q)?);
            let ap = a.value(p);
            if !ap.is_zero() {
                m.add_to(r, qi, c * ap);
            }
            let aq = a.value(q);
            if !aq.is_zero() {
                m.add_to(d + r, pi, c * aq);
            }
        }
    }
    let sol = solve(&m, &rhs)?;
    let b = Form::from_terms(basis.iter().copied().zip(sol));
    let eps = Form::counit(f);
    (convolution(f, a, &b) == eps && convolution(f, &b, a) == eps).then_some(b)
}

/// Transpose of left multiplication by `elem`, acting on the dual basis of
/// `e`; cross-checked against the operator induced by evaluation at `elem`.
pub fn transpose_left_mult(e: &AlgebraPresentation, elem: &Vect) -> Result<Matrix> {
    let f = crate::coalgebra::dual_coalgebra(e)?;
    let d = e.dim();
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        let prod = e.multiply(elem, &Vect::basis(BasisId::Plain(i)));
        for (k, c) in prod.terms() {
            let BasisId::Plain(k) = k else { continue };
            // (e.ᵗ f_k)(e^i) = f_k(elem · e^i)
            m.add_to(i, *k, c.clone());
        }
    }
    let via_form = op_from_form(&f, &RIOp::from_form(Form::evaluation_at(elem)));
    if via_form != m {
        return Err(CoreError::InternalInconsistency(
            "transposed multiplication disagrees with the induced operator".into(),
        ));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::{dual_coalgebra, triangular_coalgebra, triangular_position};
    use crate::exactlin::int;

    fn dual_numbers() -> Coalgebra {
        dual_coalgebra(&AlgebraPresentation::truncated_polynomial(2).unwrap()).unwrap()
    }

    fn p(k: usize) -> BasisId {
        BasisId::Plain(k)
    }

    #[test]
    fn counit_form_gives_identity() {
        for f in [dual_numbers(), triangular_coalgebra(3).unwrap()] {
            let m = op_from_form(&f, &RIOp::from_form(Form::counit(&f)));
            assert_eq!(m, Matrix::identity(f.dim()));
            assert_eq!(op_from_form(&f, &RIOp::identity()), m);
        }
    }

    #[test]
    fn operator_examples() {
        // t-evaluation on the dual numbers: f_t ↦ f_1, f_1 ↦ 0
        let f = dual_numbers();
        let m = op_from_form(&f, &RIOp::from_form(Form::basis_eval(p(1))));
        assert_eq!(m, Matrix::from_i64(&[&[0, 1], &[0, 0]]));
        // evaluation at l[2,1] on the triangular coalgebra: l[2,1] ↦ l[2,2]
        let l2 = triangular_coalgebra(2).unwrap();
        let m = op_from_form(&l2, &RIOp::from_form(Form::basis_eval(BasisId::tri(2, 1))));
        let i21 = l2.index_of(&BasisId::tri(2, 1)).unwrap();
        let i22 = l2.index_of(&BasisId::tri(2, 2)).unwrap();
        let mut expected = Matrix::zeros(3, 3);
        expected.set(i22, i21, int(1));
        assert_eq!(m, expected);
    }

    #[test]
    fn form_round_trips_and_errors() {
        let f = dual_numbers();
        assert_eq!(form_of_op(&f, &Matrix::identity(2)).unwrap(), Form::counit(&f));
        let m = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(form_of_op(&f, &m).unwrap(), Form::basis_eval(p(1)));
        let l2 = triangular_coalgebra(2).unwrap();
        // sends l[1,1] to l[2,1]: not right-invariant
        let mut bad = Matrix::zeros(3, 3);
        bad.set(l2.index_of(&BasisId::tri(2, 1)).unwrap(), l2.index_of(&BasisId::tri(1, 1)).unwrap(), int(1));
        assert!(matches!(form_of_op(&l2, &bad), Err(CoreError::InvarianceViolation { .. })));
        assert!(!verify_right_invariance(&l2, &bad).passed());
    }

    #[test]
    fn convolution_examples() {
        let f = dual_numbers();
        let t = Form::basis_eval(p(1));
        let eps = Form::counit(&f);
        assert_eq!(convolution(&f, &eps, &t), t);
        assert_eq!(convolution(&f, &t, &eps), t);
        assert!(convolution(&f, &t, &t).is_zero());
        let l2 = triangular_coalgebra(2).unwrap();
        let e21 = Form::basis_eval(BasisId::tri(2, 1));
        let e11 = Form::basis_eval(BasisId::tri(1, 1));
        assert!(convolution(&l2, &e21, &e21).is_zero());
        // (e11 * e21)(l[2,1]) picks the term l[1,1]⊗l[2,1]
        assert_eq!(convolution(&l2, &e11, &e21), e21);
        assert!(convolution(&l2, &e21, &e11).is_zero());
    }

    #[test]
    fn inverse_examples() {
        let f = dual_numbers();
        let eps = Form::counit(&f);
        let t = Form::basis_eval(p(1));
        assert_eq!(convolution_inverse(&f, &eps), Some(eps.clone()));
        assert_eq!(convolution_inverse(&f, &eps.add(&t)), Some(eps.add(&t.scale(&int(-1)))));
        assert_eq!(convolution_inverse(&f, &t), None);
    }

    #[test]
    fn transposed_multiplication() {
        let e = AlgebraPresentation::truncated_polynomial(2).unwrap();
        assert_eq!(transpose_left_mult(&e, e.unit()).unwrap(), Matrix::identity(2));
        assert_eq!(transpose_left_mult(&e, &Vect::basis(p(1))).unwrap(), Matrix::from_i64(&[&[0, 1], &[0, 0]]));
        let m2 = AlgebraPresentation::upper_triangular(2).unwrap();
        let e21 = Vect::basis(p(triangular_position(2, 1)));
        let f = dual_coalgebra(&m2).unwrap();
        let expected = op_from_form(&f, &RIOp::from_form(Form::basis_eval(p(triangular_position(2, 1)))));
        assert_eq!(transpose_left_mult(&m2, &e21).unwrap(), expected);
        // f[2,1] ↦ f[2,2]
        assert_eq!(expected.get(triangular_position(2, 2), triangular_position(2, 1)), int(1));
        assert_eq!(expected.nnz(), 1);
    }
}
