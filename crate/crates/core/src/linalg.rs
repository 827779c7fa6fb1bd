//! Exact dense linear algebra over ℚ and ℤ.
//!
//! Everything here works on arbitrary-precision numbers. Shapes with zero
//! rows or zero columns are legal and behave as rank 0.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("basis columns are linearly dependent")]
    DependentBasis,
    #[error("target column {0} is outside the span of the basis")]
    OutsideSpan(usize),
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMatrix = Matrix<Rational>;
pub type ZMatrix = Matrix<BigInt>;

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for c in columns {
                data.push(c[i].clone());
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack needs equal row counts");
        let mut columns = self.columns();
        columns.extend(other.columns());
        Matrix::from_columns(self.rows, &columns)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Mul for &Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * &rhs[(k, j)];
                    let slot = &mut out[(i, j)];
                    *slot = std::mem::replace(slot, T::zero()) + prod;
                }
            }
        }
        out
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn to_rational(m: &ZMatrix) -> QMatrix {
    m.map(|x| Rational::from_integer(x.clone()))
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray. The zero vector maps to itself.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return scaled;
    }
    scaled.into_iter().map(|x| x / &g).collect()
}

pub fn integer_vector_to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect()
}

/// Reduced row echelon form. Returns the reduced matrix and the pivot columns.
pub fn rref(m: &QMatrix) -> (QMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a[(r, c)].recip();
        for j in c..a.cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..a.cols {
                let delta = &factor * &a[(r, j)];
                a[(i, j)] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &QMatrix) -> usize {
    rref(m).1.len()
}

/// Columns form a basis of the right null space.
pub fn kernel_basis(m: &QMatrix) -> QMatrix {
    let (reduced, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let columns: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(row, f)].clone();
            }
            v
        })
        .collect();
    QMatrix::from_columns(m.cols, &columns)
}

/// Sign of the determinant by exact Gaussian elimination.
pub fn det_sign(m: &QMatrix) -> Result<i8, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let mut a = m.clone();
    let n = a.rows;
    let mut sign = 1i8;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Ok(0);
        };
        if p != c {
            a.swap_rows(p, c);
            sign = -sign;
        }
        if a[(c, c)].is_negative() {
            sign = -sign;
        }
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let factor = &a[(i, c)] / &a[(c, c)];
            for j in c..n {
                let delta = &factor * &a[(c, j)];
                a[(i, j)] -= delta;
            }
        }
    }
    Ok(sign)
}

/// Solves `basis · X = target` for X, where `basis` has independent columns.
pub fn coords_in_basis(basis: &QMatrix, target: &QMatrix) -> Result<QMatrix, LinalgError> {
    if basis.rows != target.rows {
        return Err(LinalgError::Shape(format!(
            "basis has {} rows, target has {}",
            basis.rows, target.rows
        )));
    }
    let k = basis.cols;
    let augmented = basis.hstack(target);
    let (reduced, pivots) = rref(&augmented);
    if pivots.iter().take_while(|&&p| p < k).count() != k {
        return Err(LinalgError::DependentBasis);
    }
    if let Some(&p) = pivots.iter().find(|&&p| p >= k) {
        return Err(LinalgError::OutsideSpan(p - k));
    }
    let mut x = QMatrix::zeros(k, target.cols);
    for i in 0..k {
        for j in 0..target.cols {
            x[(i, j)] = reduced[(i, k + j)].clone();
        }
    }
    Ok(x)
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen
/// greedily in the given order.
pub fn greedy_independent(vectors: &[Vec<Rational>], dim: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current: Vec<Vec<Rational>> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        current.push(v.clone());
        if rank(&QMatrix::from_columns(dim, &current)) == current.len() {
            chosen.push(i);
        } else {
            current.pop();
        }
        if current.len() == dim {
            break;
        }
    }
    chosen
}

/// `U · M · V = D` with unimodular U and V and D in Smith normal form.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub u: ZMatrix,
    pub d: ZMatrix,
    pub v: ZMatrix,
    /// Diagonal of D, length min(rows, cols); nonnegative, each divides the next.
    pub diagonal: Vec<BigInt>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|x| !x.is_zero()).count()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal
            .iter()
            .filter(|x| !x.is_zero() && !x.is_one())
            .cloned()
            .collect()
    }
}

struct SnfState {
    m: ZMatrix,
    u: ZMatrix,
    v: ZMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.u.swap_rows(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    // row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for mat in [&mut self.m, &mut self.u] {
            for j in 0..mat.cols {
                let delta = k * &mat[(src, j)];
                mat[(dst, j)] += delta;
            }
        }
    }

    // col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for mat in [&mut self.m, &mut self.v] {
            for i in 0..mat.rows {
                let delta = k * &mat[(i, src)];
                mat[(i, dst)] += delta;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for mat in [&mut self.m, &mut self.u] {
            for j in 0..mat.cols {
                let x = -std::mem::take(&mut mat[(r, j)]);
                mat[(r, j)] = x;
            }
        }
    }

    fn min_nonzero(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), BigInt)> = None;
        for i in t..self.m.rows {
            for j in t..self.m.cols {
                let a = self.m[(i, j)].abs();
                if a.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, b)| a < *b) {
                    best = Some(((i, j), a));
                }
            }
        }
        best.map(|(pos, _)| pos)
    }
}

/// Smith normal form by elementary operations, pivoting on the entry of
/// minimal nonzero absolute value.
pub fn smith_normal_form(m: &ZMatrix) -> SnfResult {
    let (rows, cols) = m.shape();
    let mut s = SnfState {
        m: m.clone(),
        u: ZMatrix::identity(rows),
        v: ZMatrix::identity(cols),
    };
    let steps = rows.min(cols);
    for t in 0..steps {
        while let Some((pi, pj)) = s.min_nonzero(t) {
            s.swap_rows(t, pi);
            s.swap_cols(t, pj);
            let mut dirty = false;
            for i in t + 1..rows {
                let q = s.m[(i, t)].div_floor(&s.m[(t, t)]);
                if !q.is_zero() {
                    s.add_row(i, t, &-q);
                }
                dirty |= !s.m[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                let q = s.m[(t, j)].div_floor(&s.m[(t, t)]);
                if !q.is_zero() {
                    s.add_col(j, t, &-q);
                }
                dirty |= !s.m[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Pivot must divide the remaining block.
            let pivot = s.m[(t, t)].clone();
            let bad_row =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s.m[(i, j)].is_multiple_of(&pivot)));
            match bad_row {
                Some(i) => s.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if t < rows && t < cols && s.m[(t, t)].is_negative() {
            s.negate_row(t);
        }
    }
    let diagonal = (0..steps).map(|i| s.m[(i, i)].clone()).collect();
    SnfResult {
        u: s.u,
        d: s.m,
        v: s.v,
        diagonal,
    }
}

/// Determinant of an integer matrix via the rational route.
pub fn int_det_sign(m: &ZMatrix) -> Result<i8, LinalgError> {
    det_sign(&to_rational(m))
}

pub fn int_rank(m: &ZMatrix) -> usize {
    rank(&to_rational(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    fn z(rows: &[&[i64]]) -> ZMatrix {
        ZMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&QMatrix::identity(3)), 3);
        assert_eq!(rank(&q(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&QMatrix::zeros(0, 4)), 0);
        assert_eq!(rank(&QMatrix::zeros(3, 0)), 0);
        // triangle D_1: rows vertices, columns edges {0,1},{0,2},{1,2}
        assert_eq!(rank(&q(&[&[-1, -1, 0], &[1, 0, -1], &[0, 1, 1]])), 2);
    }

    #[test]
    fn det_sign_examples() {
        assert_eq!(det_sign(&QMatrix::identity(3)), Ok(1));
        assert_eq!(det_sign(&q(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])), Ok(-1));
        assert_eq!(det_sign(&q(&[&[1, 2], &[2, 4]])), Ok(0));
        assert_eq!(det_sign(&QMatrix::zeros(0, 0)), Ok(1));
        assert_eq!(det_sign(&q(&[&[-3]])), Ok(-1));
        assert_eq!(
            det_sign(&QMatrix::zeros(2, 3)),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn coords_examples() {
        let t = q(&[&[3, -1], &[7, 2]]);
        assert_eq!(coords_in_basis(&QMatrix::identity(2), &t).unwrap(), t);

        let x = coords_in_basis(&q(&[&[2, 0], &[0, 2]]), &q(&[&[1], &[1]])).unwrap();
        assert_eq!(
            x,
            QMatrix::from_rows(&[vec![ratio(1, 2)], vec![ratio(1, 2)]])
        );

        // segment [0,1]: e = (0,1), A_E = (1,0) for vertex 0; A_F = lifted vertices (1,0),(1,1).
        let b = q(&[&[0, 1], &[1, 0]]);
        let a_f = q(&[&[1, 1], &[0, 1]]);
        let x = coords_in_basis(&b, &a_f).unwrap();
        assert_eq!(x, q(&[&[0, 1], &[1, 1]]));
        assert_eq!(det_sign(&x), Ok(-1));
    }

    #[test]
    fn coords_errors() {
        let dep = q(&[&[1, 2], &[1, 2]]);
        assert_eq!(
            coords_in_basis(&dep, &q(&[&[1], &[1]])),
            Err(LinalgError::DependentBasis)
        );
        let b = q(&[&[1], &[0]]);
        assert_eq!(
            coords_in_basis(&b, &q(&[&[1, 0], &[0, 1]])),
            Err(LinalgError::OutsideSpan(1))
        );
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&QMatrix::identity(3)).cols(), 0);
        assert_eq!(kernel_basis(&QMatrix::zeros(2, 3)).cols(), 3);
        let m = q(&[&[1, 1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.shape(), (3, 2));
        assert!((&m * &k).is_zero());
        assert_eq!(rank(&k), 2);
    }

    #[test]
    fn primitive_integer_scaling() {
        let v = vec![ratio(1, 2), ratio(-3, 4), int(0)];
        assert_eq!(
            primitive_integer(&v),
            vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]
        );
        assert_eq!(
            primitive_integer(&[int(4), int(6)]),
            vec![BigInt::from(2), BigInt::from(3)]
        );
    }

    fn check_snf(m: &ZMatrix) -> SnfResult {
        let r = smith_normal_form(m);
        assert_eq!(&(&r.u * m) * &r.v, r.d, "U M V = D for {m:?}");
        assert_eq!(int_det_sign(&r.u).unwrap().abs(), 1);
        assert_eq!(int_det_sign(&r.v).unwrap().abs(), 1);
        let det_u = int_det_sign(&r.u).unwrap();
        assert!(det_u != 0);
        for i in 0..r.d.rows() {
            for j in 0..r.d.cols() {
                if i != j {
                    assert!(r.d[(i, j)].is_zero());
                }
            }
        }
        for w in r.diagonal.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero(), "zeros trail");
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        assert_eq!(r.rank(), int_rank(m));
        r
    }

    #[test]
    fn snf_examples() {
        let r = check_snf(&ZMatrix::identity(3));
        assert_eq!(r.diagonal, vec![BigInt::one(); 3]);

        let r = check_snf(&z(&[&[2, 4], &[6, 8]]));
        assert_eq!(r.diagonal, vec![BigInt::from(2), BigInt::from(4)]);

        let r = check_snf(&ZMatrix::zeros(2, 3));
        assert!(r.diagonal.iter().all(Zero::is_zero));

        let r = check_snf(&z(&[&[2, 0], &[0, 3]]));
        assert_eq!(r.diagonal, vec![BigInt::from(1), BigInt::from(6)]);

        check_snf(&ZMatrix::zeros(0, 3));
        check_snf(&ZMatrix::zeros(3, 0));
    }

    fn small_int_matrix(max: usize) -> impl Strategy<Value = ZMatrix> {
        (0..=max, 0..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-6i64..=6, r * c).prop_map(move |d| {
                ZMatrix::from_vec(r, c, d.into_iter().map(BigInt::from).collect())
            })
        })
    }

    fn small_rat_matrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec((-5i64..=5, 1i64..=4), rows * cols).prop_map(move |d| {
            QMatrix::from_vec(
                rows,
                cols,
                d.into_iter().map(|(p, q)| ratio(p, q)).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn snf_invariants(m in small_int_matrix(5)) {
            check_snf(&m);
        }

        #[test]
        fn coords_round_trip(b in small_rat_matrix(4, 3), x in small_rat_matrix(3, 2)) {
            prop_assume!(rank(&b) == 3);
            let t = &b * &x;
            let solved = coords_in_basis(&b, &t).unwrap();
            prop_assert_eq!(&(&b * &solved), &t);
            prop_assert_eq!(solved, x);
        }

        #[test]
        fn det_sign_multiplicative(a in small_rat_matrix(3, 3), b in small_rat_matrix(3, 3)) {
            let ab = &a * &b;
            prop_assert_eq!(det_sign(&ab).unwrap(), det_sign(&a).unwrap() * det_sign(&b).unwrap());
        }

        #[test]
        fn kernel_dimension(m in small_rat_matrix(3, 5)) {
            let k = kernel_basis(&m);
            prop_assert_eq!(k.cols(), 5 - rank(&m));
            prop_assert!((&m * &k).is_zero());
        }
    }
}
