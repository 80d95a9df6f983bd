//! Exact linear algebra over the rationals.
//!
//! Everything downstream (relation kernels, coideal membership, antipode
//! systems) reduces to questions about spans of sparse rational vectors, so
//! this module offers two layers:
//!
//! * [`Matrix`] with [`rref`], [`kernel_basis`], [`membership`] and [`solve`]
//!   for dense-ish coordinate problems;
//! * [`EchelonBasis`] and [`TrackedEchelon`], incremental echelon forms over
//!   sparse vectors keyed by any ordered type. The key order decides which
//!   coordinates become pivots, which is how normal forms modulo a subspace
//!   are made canonical.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound::{Excluded, Unbounded};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational scalar, always stored in lowest terms with a positive
/// denominator.
pub type Scalar = BigRational;

/// Sparse vector: coordinates absent from the map are zero. Zero values are
/// never stored by the helpers in this module.
pub type SparseVec<K> = BTreeMap<K, Scalar>;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// `n/d`; panics on `d == 0`.
pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
}

/// Parses `"p"` or `"p/q"` with arbitrary-precision integers.
pub fn parse_scalar(text: &str) -> Result<Scalar, ScalarParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ScalarParseError::Empty);
    }
    let parse_int = |s: &str| -> Result<BigInt, ScalarParseError> {
        let s = s.trim();
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ScalarParseError::BadInteger(s.to_string()));
        }
        BigInt::from_str(s).map_err(|_| ScalarParseError::BadInteger(s.to_string()))
    };
    match text.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(text)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(ScalarParseError::ZeroDenominator);
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// `target += coef * src`, dropping coordinates that cancel.
pub fn axpy<K: Ord + Clone>(target: &mut SparseVec<K>, coef: &Scalar, src: &SparseVec<K>) {
    if coef.is_zero() {
        return;
    }
    for (k, v) in src {
        let delta = coef * v;
        match target.get_mut(k) {
            Some(existing) => {
                *existing += delta;
                if existing.is_zero() {
                    target.remove(k);
                }
            }
            None => {
                target.insert(k.clone(), delta);
            }
        }
    }
}

/// Adds `value` at `key`, removing the entry if the sum vanishes.
pub fn add_entry<K: Ord>(target: &mut SparseVec<K>, key: K, value: Scalar) {
    if value.is_zero() {
        return;
    }
    match target.get_mut(&key) {
        Some(existing) => {
            *existing += value;
            if existing.is_zero() {
                target.remove(&key);
            }
        }
        None => {
            target.insert(key, value);
        }
    }
}

pub fn scale<K: Ord + Clone>(v: &SparseVec<K>, coef: &Scalar) -> SparseVec<K> {
    if coef.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(k, x)| (k.clone(), x * coef)).collect()
}

/// Sparse matrix stored column by column.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec<usize>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.columns[i].insert(i, Scalar::one());
        }
        m
    }

    /// Builds a matrix from dense rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        Matrix::from_rows(&rows)
    }

    /// Builds a matrix whose columns are the given sparse vectors.
    pub fn from_columns(rows: usize, columns: Vec<SparseVec<usize>>) -> Self {
        for col in &columns {
            if let Some((&r, _)) = col.iter().next_back() {
                assert!(r < rows, "row index out of bounds");
            }
            debug_assert!(col.values().all(|v| !v.is_zero()));
        }
        Matrix { rows, cols: columns.len(), columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.columns[col].get(&row).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        if value.is_zero() {
            self.columns[col].remove(&row);
        } else {
            self.columns[col].insert(row, value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        add_entry(&mut self.columns[col], row, value);
    }

    pub fn column(&self, col: usize) -> &SparseVec<usize> {
        &self.columns[col]
    }

    pub fn columns(&self) -> &[SparseVec<usize>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    /// Nonzero entries as `(row, col, value)`, column-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(&r, v)| (r, c, v)))
    }

    /// Row-major sparse view.
    pub fn to_row_vecs(&self) -> Vec<SparseVec<usize>> {
        let mut rows = vec![SparseVec::new(); self.rows];
        for (r, c, v) in self.entries() {
            rows[r].insert(c, v.clone());
        }
        rows
    }

    pub fn from_row_vecs(cols: usize, rows: &[SparseVec<usize>]) -> Self {
        let mut m = Matrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (&c, v) in row {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix { rows: self.cols, cols: self.rows, columns: self.to_row_vecs() }
    }

    pub fn apply(&self, v: &SparseVec<usize>) -> SparseVec<usize> {
        let mut out = SparseVec::new();
        for (&c, coef) in v {
            axpy(&mut out, coef, &self.columns[c]);
        }
        out
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let columns = other.columns.iter().map(|col| self.apply(col)).collect();
        Matrix { rows: self.rows, cols: other.cols, columns }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.axpy(&Scalar::one(), other)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.axpy(&-Scalar::one(), other)
    }

    /// `self + coef * other`.
    pub fn axpy(&self, coef: &Scalar, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch in sum");
        let mut out = self.clone();
        for (col, src) in out.columns.iter_mut().zip(&other.columns) {
            axpy(col, coef, src);
        }
        out
    }

    pub fn scale(&self, coef: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, columns: self.columns.iter().map(|c| scale(c, coef)).collect() }
    }

    /// Kronecker product; index `(i, j)` of the result is `i * other.dim + j`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let mut columns = Vec::with_capacity(self.cols * other.cols);
        for a_col in &self.columns {
            for b_col in &other.columns {
                let mut col = SparseVec::new();
                for (&ra, va) in a_col {
                    for (&rb, vb) in b_col {
                        col.insert(ra * other.rows + rb, va * vb);
                    }
                }
                columns.push(col);
            }
        }
        Matrix { rows, cols: self.cols * other.cols, columns }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row-echelon form and the pivot columns, in increasing order.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut rows = m.to_row_vecs();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..m.cols() {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r].contains_key(&col)) else {
            continue;
        };
        rows.swap(next, found);
        let inv = rows[next][&col].recip();
        let pivot_row = scale(&rows[next], &inv);
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next {
                continue;
            }
            if let Some(factor) = row.get(&col).cloned() {
                axpy(row, &-factor, &pivot_row);
            }
        }
        rows[next] = pivot_row;
        pivots.push(col);
        next += 1;
    }
    (Matrix::from_row_vecs(m.cols(), &rows), pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Null-space basis in canonical form: one vector per free column `c`,
/// with a 1 at `c`, zeros at the other free columns, ordered by `c`.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let (reduced, pivots) = rref(m);
    let rows = reduced.to_row_vecs();
    let mut is_pivot = vec![false; m.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols())
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Scalar::zero(); m.cols()];
            v[free] = Scalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                if let Some(x) = rows[row].get(&free) {
                    v[p] = -x;
                }
            }
            v
        })
        .collect()
}

fn dense_to_sparse(v: &[Scalar]) -> SparseVec<usize> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// Whether `v` lies in the linear span of `span`. All vectors must have the
/// same length.
pub fn membership(v: &[Scalar], span: &[Vec<Scalar>]) -> bool {
    let mut basis = EchelonBasis::new();
    for s in span {
        assert_eq!(s.len(), v.len(), "vector length mismatch");
        basis.insert(dense_to_sparse(s));
    }
    basis.contains(&dense_to_sparse(v))
}

/// One solution of `m x = b` (free variables set to zero), or `None` if the
/// system is inconsistent.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(m.rows(), b.len(), "right-hand side length mismatch");
    let mut columns = m.columns().to_vec();
    columns.push(dense_to_sparse(b));
    let augmented = Matrix::from_columns(m.rows(), columns);
    let (reduced, pivots) = rref(&augmented);
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let rows = reduced.to_row_vecs();
    let mut x = vec![Scalar::zero(); m.cols()];
    for (row, &p) in pivots.iter().enumerate() {
        if let Some(v) = rows[row].get(&m.cols()) {
            x[p] = v.clone();
        }
    }
    Some(x)
}

/// Incremental echelon form over sparse vectors keyed by `K`.
///
/// Each stored row has coefficient 1 at its pivot, which is its smallest key;
/// pivots are distinct. Full reduction against such a basis yields the unique
/// representative of `v + span` supported away from the pivots.
#[derive(Clone, Debug)]
pub struct EchelonBasis<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Default for EchelonBasis<K> {
    fn default() -> Self {
        EchelonBasis { rows: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> EchelonBasis<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.rows.values()
    }

    pub fn reduce_in_place(&self, v: &mut SparseVec<K>) {
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.rows.contains_key(*k)).cloned(),
                Some(c) => v
                    .range((Excluded(c.clone()), Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.rows.contains_key(*k))
                    .cloned(),
            };
            let Some(k) = next else { break };
            let coef = v[&k].clone();
            axpy(v, &-coef, &self.rows[&k]);
            cursor = Some(k);
        }
    }

    /// Normal form of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut out = v.clone();
        self.reduce_in_place(&mut out);
        out
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: SparseVec<K>) -> bool {
        self.reduce_in_place(&mut v);
        let Some((pivot, lead)) = v.iter().next().map(|(k, x)| (k.clone(), x.clone())) else {
            return false;
        };
        let v = scale(&v, &lead.recip());
        self.rows.insert(pivot, v);
        true
    }
}

/// Echelon form that remembers how each row was assembled from the inserted
/// vectors, identified by caller-chosen ids.
#[derive(Clone, Debug)]
pub struct TrackedEchelon<K: Ord + Clone> {
    rows: BTreeMap<K, (SparseVec<K>, SparseVec<usize>)>,
}

impl<K: Ord + Clone> Default for TrackedEchelon<K> {
    fn default() -> Self {
        TrackedEchelon { rows: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> TrackedEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v`, returning the remainder and the combination `c` of
    /// inserted vectors with `v = remainder + sum c[id] * vector(id)`.
    fn reduce_tracked(&self, v: &SparseVec<K>) -> (SparseVec<K>, SparseVec<usize>) {
        let mut v = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.rows.contains_key(*k)).cloned(),
                Some(c) => v
                    .range((Excluded(c.clone()), Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.rows.contains_key(*k))
                    .cloned(),
            };
            let Some(k) = next else { break };
            let coef = v[&k].clone();
            let (row, row_combo) = &self.rows[&k];
            axpy(&mut v, &-coef.clone(), row);
            axpy(&mut combo, &coef, row_combo);
            cursor = Some(k);
        }
        (v, combo)
    }

    /// Inserts vector `id`. If it is dependent on earlier vectors, returns the
    /// relation `r` with `r[id] = 1` and `sum r[j] * vector(j) = 0`, supported
    /// on `id` and independent earlier ids only.
    pub fn insert(&mut self, id: usize, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let (rem, combo) = self.reduce_tracked(v);
        let mut relation = scale(&combo, &-Scalar::one());
        add_entry(&mut relation, id, Scalar::one());
        match rem.iter().next().map(|(k, x)| (k.clone(), x.clone())) {
            None => Some(relation),
            Some((pivot, lead)) => {
                let inv = lead.recip();
                self.rows.insert(pivot, (scale(&rem, &inv), scale(&relation, &inv)));
                None
            }
        }
    }

    /// Coordinates of `v` over the inserted vectors, if `v` is in their span.
    pub fn express(&self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let (rem, combo) = self.reduce_tracked(v);
        rem.is_empty().then_some(combo)
    }
}

/// Canonical kernel basis of the matrix whose `i`-th column is `columns[i]`.
///
/// Agrees with [`kernel_basis`] on the same matrix: each relation has a 1 at a
/// column that depends on earlier ones and is otherwise supported on the
/// independent (pivot) columns.
pub fn kernel_of_columns<K, I>(columns: I) -> Vec<SparseVec<usize>>
where
    K: Ord + Clone,
    I: IntoIterator<Item = SparseVec<K>>,
{
    let mut echelon = TrackedEchelon::new();
    columns.into_iter().enumerate().filter_map(|(id, col)| echelon.insert(id, &col)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(rows)
    }

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rref_rank_one() {
        let (r, p) = rref(&dense(&[&[2, 4], &[1, 2]]));
        assert_eq!(r, dense(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_identity_and_invertible() {
        let (r, p) = rref(&Matrix::identity(3));
        assert_eq!(r, Matrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        let (r, p) = rref(&dense(&[&[1, 2], &[3, 4]]));
        assert_eq!(r, Matrix::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&dense(&[&[1, 1]])), vec![v(&[-1, 1])]);
        assert!(kernel_basis(&Matrix::identity(2)).is_empty());
        assert_eq!(kernel_basis(&dense(&[&[1, 2], &[2, 4]])), vec![v(&[-2, 1])]);
    }

    #[test]
    fn membership_examples() {
        assert!(membership(&v(&[0, 0, 0]), &[v(&[1, 2, 3])]));
        assert!(membership(&v(&[0, 0]), &[]));
        assert!(membership(&v(&[1, 1]), &[v(&[1, 0]), v(&[0, 1])]));
        assert!(membership(&v(&[1, 2, 3]), &[v(&[1, 0, 1]), v(&[0, 1, 1])]));
        assert!(!membership(&v(&[1, 2, 4]), &[v(&[1, 0, 1]), v(&[0, 1, 1])]));
    }

    #[test]
    fn scalar_literals() {
        assert_eq!(parse_scalar("2/4").unwrap(), frac(1, 2));
        assert_eq!(parse_scalar(" -3 ").unwrap(), int(-3));
        assert_eq!(parse_scalar("6/-4").unwrap(), frac(-3, 2));
        assert_eq!(parse_scalar("1/0"), Err(ScalarParseError::ZeroDenominator));
        assert!(matches!(parse_scalar("1.5"), Err(ScalarParseError::BadInteger(_))));
        assert!(matches!(parse_scalar("/3"), Err(ScalarParseError::BadInteger(_))));
        assert_eq!(parse_scalar(""), Err(ScalarParseError::Empty));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = dense(&[&[1, 1], &[1, -1]]);
        assert_eq!(solve(&m, &v(&[2, 0])), Some(v(&[1, 1])));
        let singular = dense(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&singular, &v(&[1, 3])), None);
        assert_eq!(solve(&singular, &v(&[1, 2])), Some(v(&[1, 0])));
    }

    #[test]
    fn kron_indexing() {
        let a = dense(&[&[0, 1], &[0, 0]]);
        let id = Matrix::identity(2);
        let k = a.kron(&id);
        // (e1 ⊗ e_j) ↦ e0 ⊗ e_j
        assert_eq!(k.get(0, 2), int(1));
        assert_eq!(k.get(1, 3), int(1));
        assert_eq!(k.nnz(), 2);
    }

    #[test]
    fn tracked_echelon_expresses_combinations() {
        let mut e = TrackedEchelon::new();
        let a: SparseVec<usize> = [(0, int(1)), (1, int(1))].into_iter().collect();
        let b: SparseVec<usize> = [(1, int(1)), (2, int(2))].into_iter().collect();
        assert!(e.insert(0, &a).is_none());
        assert!(e.insert(1, &b).is_none());
        let target: SparseVec<usize> = [(0, int(2)), (1, int(5)), (2, int(6))].into_iter().collect();
        let coords = e.express(&target).unwrap();
        assert_eq!(coords, [(0, int(2)), (1, int(3))].into_iter().collect());
        let dep = e.insert(2, &target).unwrap();
        assert_eq!(dep, [(0, int(-2)), (1, int(-3)), (2, int(1))].into_iter().collect());
    }
}
