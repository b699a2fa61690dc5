//! Dense linear algebra generic over [`Scalar`].
//!
//! Sizes in this crate are tiny (species, complexes and reactions number in
//! the tens), so everything is a row-major `Vec` with Gauss–Jordan elimination.

use std::ops::{Index, IndexMut};

use crate::scalar::{Real, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Reduced row echelon form and the pivot column of each nonzero row.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must share a length;
    /// `cols` is used when `rows` is empty.
    pub fn from_rows(rows: &[Vec<T>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::<T>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    /// Largest entry magnitude (at least one), used to scale float tolerances.
    fn scale(&self) -> T {
        let mut s = T::one();
        for x in &self.data {
            let m = x.magnitude();
            if m > s {
                s = m;
            }
        }
        s
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Gauss–Jordan elimination with largest-magnitude pivoting.
    pub fn rref(&self) -> Echelon<T> {
        let mut m = self.clone();
        let scale = self.scale();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best = r;
            let mut best_mag = m[(r, c)].magnitude();
            for i in r + 1..m.rows {
                let mag = m[(i, c)].magnitude();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag.negligible(&scale) {
                for i in r..m.rows {
                    m[(i, c)] = T::zero();
                }
                continue;
            }
            m.swap_rows(r, best);
            let p = m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() / p.clone();
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
                m[(i, c)] = T::zero();
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let Echelon { matrix, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -matrix[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant by elimination with partial pivoting. Panics on non-square input.
    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = T::one();
        for c in 0..n {
            let mut best = c;
            let mut best_mag = m[(c, c)].magnitude();
            for i in c + 1..n {
                let mag = m[(i, c)].magnitude();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag.is_zero() {
                return T::zero();
            }
            if best != c {
                m.swap_rows(best, c);
                det = -det;
            }
            let p = m[(c, c)].clone();
            det = det * p.clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() / p.clone();
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen
/// greedily in input order.
pub fn independent_subset<T: Scalar>(vectors: &[Vec<T>], dim: usize) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    Matrix::from_columns(vectors, dim).rref().pivots
}

/// Rank of the span of `vectors` in `dim`-space.
pub fn span_rank<T: Scalar>(vectors: &[Vec<T>], dim: usize) -> usize {
    independent_subset(vectors, dim).len()
}

/// `true` if `v` lies in the span of `basis`.
pub fn in_span<T: Scalar>(basis: &[Vec<T>], v: &[T]) -> bool {
    let dim = v.len();
    let mut all = basis.to_vec();
    let before = span_rank(&all, dim);
    all.push(v.to_vec());
    span_rank(&all, dim) == before
}

fn norm<F: Real>(v: &[F]) -> F {
    v.iter().fold(F::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Orthonormal basis of `span(vectors)` by twice-iterated modified Gram–Schmidt.
pub fn orthonormal_basis<F: Real>(vectors: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut q: Vec<Vec<F>> = Vec::new();
    for v in vectors {
        let original = norm(v);
        if original == F::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for qk in &q {
                let r = dot(qk, &w);
                for (wi, &qi) in w.iter_mut().zip(qk) {
                    *wi = *wi - r * qi;
                }
            }
        }
        let n = norm(&w);
        if n <= F::from_f64(1e-10).unwrap() * original {
            continue;
        }
        q.push(w.into_iter().map(|x| x / n).collect());
    }
    q
}

/// Solves a square system `A x = b`; `None` if `A` is (numerically) singular.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "solve_linear needs a square matrix");
    assert_eq!(n, b.len());
    let mut aug = Matrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let e = aug.rref();
    if e.pivots.len() < n || e.pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some((0..n).map(|i| e.matrix[(i, n)].clone()).collect())
}

/// Least-squares solution of `A x ≈ b` and the residual `b − A x`.
#[derive(Clone, Debug)]
pub struct LeastSquares<F> {
    pub solution: Vec<F>,
    pub residual: Vec<F>,
}

/// Minimises `‖A x − b‖₂` via QR from modified Gram–Schmidt. Columns that are
/// numerically dependent on earlier ones get a zero coefficient.
pub fn least_squares<F: Real>(a: &Matrix<F>, b: &[F]) -> LeastSquares<F> {
    assert_eq!(a.rows(), b.len());
    let (rows, cols) = (a.rows(), a.cols());
    let mut q: Vec<Vec<F>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut r = Matrix::<F>::zeros(cols, cols);
    for j in 0..cols {
        let col = a.column(j);
        let original = norm(&col);
        if original == F::zero() {
            continue;
        }
        let mut w = col;
        for _ in 0..2 {
            for (k, qk) in q.iter().enumerate() {
                let c = dot(qk, &w);
                r[(k, j)] = r[(k, j)] + c;
                for (wi, &qi) in w.iter_mut().zip(qk) {
                    *wi = *wi - c * qi;
                }
            }
        }
        let n = norm(&w);
        if n <= F::from_f64(1e-10).unwrap() * original {
            continue;
        }
        r[(q.len(), j)] = n;
        q.push(w.into_iter().map(|x| x / n).collect());
        kept.push(j);
    }
    // Back substitution on the kept columns: R[k][kept[l]] for k <= l.
    let qtb: Vec<F> = q.iter().map(|qk| dot(qk, b)).collect();
    let mut coeffs = vec![F::zero(); kept.len()];
    for l in (0..kept.len()).rev() {
        let mut s = qtb[l];
        for t in l + 1..kept.len() {
            s = s - r[(l, kept[t])] * coeffs[t];
        }
        coeffs[l] = s / r[(l, kept[l])];
    }
    let mut solution = vec![F::zero(); cols];
    for (l, &j) in kept.iter().enumerate() {
        solution[j] = coeffs[l];
    }
    let fitted = a.mul_vec(&solution);
    let residual = (0..rows).map(|i| b[i] - fitted[i]).collect();
    LeastSquares { solution, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::FromPrimitive;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n).unwrap()
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        let cols = rows[0].len();
        let v: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Matrix::from_rows(&v, cols)
    }

    #[test]
    fn rank_and_nullspace_exact() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        let image = m.mul_vec(&ns[0]);
        assert!(image.iter().all(|x| *x == q(0)));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = qm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(m.determinant(), q(4));
        let singular = qm(&[&[1, 2], &[2, 4]]);
        assert_eq!(singular.determinant(), q(0));
    }

    #[test]
    fn float_rank_uses_tolerance() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]], 2);
        assert_eq!(m.rank(), 1);
        let m32 = Matrix::from_rows(&[vec![1.0f32, 2.0], vec![3.0, 4.0]], 2);
        assert_eq!(m32.rank(), 2);
    }

    #[test]
    fn independent_subset_keeps_input_order() {
        let vs = vec![vec![q(-1), q(1)], vec![q(2), q(-2)], vec![q(1), q(0)]];
        assert_eq!(independent_subset(&vs, 2), vec![0, 2]);
        assert!(in_span(&[vs[0].clone()], &vs[1]));
        assert!(!in_span(&[vs[0].clone()], &vs[2]));
    }

    #[test]
    fn least_squares_exact_fit_and_residual() {
        let a = Matrix::from_rows(&[vec![1.0f64, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], 2);
        let fit = least_squares(&a, &[1.0, 2.0, 3.0]);
        assert!((fit.solution[0] - 1.0).abs() < 1e-12);
        assert!((fit.solution[1] - 2.0).abs() < 1e-12);
        assert!(fit.residual.iter().all(|r| r.abs() < 1e-12));

        let off = least_squares(&a, &[1.0, 1.0, 0.0]);
        // normal equations: [[2,1],[1,2]] x = [1,1] -> x = (1/3, 1/3)
        assert!((off.solution[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((off.residual[2] + 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_handles_dependent_columns() {
        let a = Matrix::from_rows(&[vec![1.0f64, 2.0], vec![1.0, 2.0]], 2);
        let fit = least_squares(&a, &[3.0, 3.0]);
        assert!(fit.residual.iter().all(|r| r.abs() < 1e-12));
        assert_eq!(fit.solution[1], 0.0);
    }

    proptest! {
        #[test]
        fn nullspace_vectors_are_annihilated(entries in proptest::collection::vec(-4i64..5, 12)) {
            let rows: Vec<Vec<Rational>> = entries.chunks(4).map(|c| c.iter().map(|&x| q(x)).collect()).collect();
            let m = Matrix::from_rows(&rows, 4);
            let ns = m.nullspace();
            prop_assert_eq!(ns.len() + m.rank(), 4);
            for v in ns {
                prop_assert!(m.mul_vec(&v).iter().all(|x| *x == q(0)));
            }
        }

        #[test]
        fn orthonormal_basis_is_orthonormal(entries in proptest::collection::vec(-3.0f64..3.0, 9)) {
            let vs: Vec<Vec<f64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let q = orthonormal_basis(&vs);
            for (i, a) in q.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    let d = dot(a, b);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((d - expected).abs() < 1e-9);
                }
            }
        }
    }
}
