//! Two-phase tableau simplex, generic over [`Scalar`].
//!
//! With [`Rational`](crate::Rational) every pivot is exact, so feasibility
//! questions such as "does a strictly positive solution exist" get crisp
//! answers. Bland's rule fixes the pivot sequence, which makes the returned
//! vertex deterministic.

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `maximize c·x  subject to  A x = b,  x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    a: Matrix<T>,
    b: Vec<T>,
    c: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    t: Matrix<T>,
    basis: Vec<usize>,
    /// Reduced-cost row; last entry holds the current objective value.
    obj: Vec<T>,
    rhs: usize,
}

fn positive<T: Scalar>(x: &T) -> bool {
    *x > T::tolerance()
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.t.cols();
        let p = self.t[(row, col)].clone();
        for j in 0..width {
            self.t[(row, j)] = self.t[(row, j)].clone() / p.clone();
        }
        for i in 0..self.t.rows() {
            if i == row || self.t[(i, col)].is_zero() {
                continue;
            }
            let f = self.t[(i, col)].clone();
            for j in 0..width {
                let v = self.t[(i, j)].clone() - f.clone() * self.t[(row, j)].clone();
                self.t[(i, j)] = v;
            }
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for j in 0..width {
                self.obj[j] = self.obj[j].clone() - f.clone() * self.t[(row, j)].clone();
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule over the columns `allowed`. Returns `false` on unboundedness.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.rhs).find(|&j| allowed[j] && positive(&self.obj[j]));
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.t.rows() {
                let a = &self.t[(i, col)];
                if !positive(a) {
                    continue;
                }
                let ratio = self.t[(i, self.rhs)].clone() / a.clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return false,
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>, c: Vec<T>) -> Self {
        assert_eq!(a.rows(), b.len(), "constraint/rhs length mismatch");
        assert_eq!(a.cols(), c.len(), "objective length mismatch");
        Self { a, b, c }
    }

    pub fn solve(&self) -> LpOutcome<T> {
        let (m, n) = (self.a.rows(), self.a.cols());
        let width = n + m + 1;
        let rhs = n + m;
        let mut t = Matrix::zeros(m, width);
        for i in 0..m {
            let flip = self.b[i] < T::zero();
            for j in 0..n {
                let v = self.a[(i, j)].clone();
                t[(i, j)] = if flip { -v } else { v };
            }
            t[(i, n + i)] = T::one();
            t[(i, rhs)] = if flip { -self.b[i].clone() } else { self.b[i].clone() };
        }
        // Phase 1: maximize −Σ artificials.
        let mut obj = vec![T::zero(); width];
        for j in (0..n).chain(std::iter::once(rhs)) {
            let mut s = T::zero();
            for i in 0..m {
                s = s + t[(i, j)].clone();
            }
            obj[j] = s;
        }
        let mut tab = Tableau {
            t,
            basis: (n..n + m).collect(),
            obj,
            rhs,
        };
        let all = vec![true; rhs];
        tab.optimize(&all);
        // obj[rhs] holds Σ artificials remaining.
        if positive(&tab.obj[rhs]) {
            return LpOutcome::Infeasible;
        }

        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut keep_rows = Vec::new();
        for i in 0..m {
            if tab.basis[i] < n {
                keep_rows.push(i);
                continue;
            }
            let scale = T::one();
            if let Some(j) = (0..n).find(|&j| !tab.t[(i, j)].negligible(&scale)) {
                tab.pivot(i, j);
                keep_rows.push(i);
            }
        }
        let rows: Vec<Vec<T>> = keep_rows.iter().map(|&i| tab.t.row(i).to_vec()).collect();
        let basis: Vec<usize> = keep_rows.iter().map(|&i| tab.basis[i]).collect();
        let t = Matrix::from_rows(&rows, width);

        // Phase 2 reduced costs: c_j − c_B · column_j.
        let mut obj = vec![T::zero(); width];
        obj[..n].clone_from_slice(&self.c[..n]);
        for (i, &bj) in basis.iter().enumerate() {
            let cb = self.c[bj].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                obj[j] = obj[j].clone() - cb.clone() * t[(i, j)].clone();
            }
        }
        let mut tab = Tableau { t, basis, obj, rhs };
        let mut allowed = vec![false; rhs];
        allowed[..n].iter_mut().for_each(|a| *a = true);
        if !tab.optimize(&allowed) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![T::zero(); n];
        for (i, &bj) in tab.basis.iter().enumerate() {
            x[bj] = tab.t[(i, rhs)].clone();
        }
        let value = x
            .iter()
            .zip(&self.c)
            .fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
        LpOutcome::Optimal { x, value }
    }
}

/// Finds `v` with `E v = 0` and every `v_i > 0`, or `None` if no such `v`
/// exists. Maximizes `δ` subject to `δ ≤ v_i ≤ 1`, so the returned point has
/// the largest attainable smallest entry under that box.
pub fn strictly_positive_solution<T: Scalar>(e: &Matrix<T>) -> Option<Vec<T>> {
    let n = e.cols();
    if n == 0 {
        return Some(Vec::new());
    }
    // Variables: δ, s_1..s_n, t_1..t_n with v_i = δ + s_i.
    let width = 1 + 2 * n;
    let rows = e.rows() + n;
    let mut a = Matrix::zeros(rows, width);
    let mut b = vec![T::zero(); rows];
    for i in 0..e.rows() {
        let mut row_sum = T::zero();
        for j in 0..n {
            row_sum = row_sum + e[(i, j)].clone();
            a[(i, 1 + j)] = e[(i, j)].clone();
        }
        a[(i, 0)] = row_sum;
    }
    for j in 0..n {
        let r = e.rows() + j;
        a[(r, 0)] = T::one();
        a[(r, 1 + j)] = T::one();
        a[(r, 1 + n + j)] = T::one();
        b[r] = T::one();
    }
    let mut c = vec![T::zero(); width];
    c[0] = T::one();
    match LinearProgram::new(a, b, c).solve() {
        LpOutcome::Optimal { x, value } if positive(&value) => {
            let delta = x[0].clone();
            Some((0..n).map(|j| delta.clone() + x[1 + j].clone()).collect())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::FromPrimitive;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n).unwrap()
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        let cols = rows.first().map_or(0, |r| r.len());
        let v: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Matrix::from_rows(&v, cols)
    }

    #[test]
    fn textbook_lp() {
        // max 3x + 2y s.t. x + y + s1 = 4, x + 3y + s2 = 6
        let a = qm(&[&[1, 1, 1, 0], &[1, 3, 0, 1]]);
        let lp = LinearProgram::new(a, vec![q(4), q(6)], vec![q(3), q(2), q(0), q(0)]);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(12));
                assert_eq!(x[0], q(4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        // x + y = -1 with x, y >= 0
        let lp = LinearProgram::new(qm(&[&[1, 1]]), vec![q(-1)], vec![q(1), q(0)]);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        // max x s.t. x - y = 0
        let lp = LinearProgram::new(qm(&[&[1, -1]]), vec![q(0)], vec![q(1), q(0)]);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = qm(&[&[1, 1], &[2, 2]]);
        let lp = LinearProgram::new(a, vec![q(1), q(2)], vec![q(1), q(0)]);
        assert!(matches!(lp.solve(), LpOutcome::Optimal { value, .. } if value == q(1)));
    }

    #[test]
    fn strictly_positive_solution_exists() {
        // v1 - v2 = 0, v2 - 2 v3 = 0
        let e = qm(&[&[1, -1, 0], &[0, 1, -2]]);
        let v = strictly_positive_solution(&e).unwrap();
        assert_eq!(v, vec![q(1), q(1), Rational::new(1.into(), 2.into())]);
    }

    #[test]
    fn strictly_positive_solution_absent() {
        // v1 + v2 = 0 forces zero.
        assert!(strictly_positive_solution(&qm(&[&[1, 1]])).is_none());
        // v1 = 0 exactly
        assert!(strictly_positive_solution(&qm(&[&[1, 0]])).is_none());
    }

    #[test]
    fn float_instantiation_agrees() {
        let e = Matrix::from_rows(&[vec![1.0f64, -1.0, 0.0], vec![0.0, 1.0, -2.0]], 3);
        let v = strictly_positive_solution(&e).unwrap();
        assert!((v[2] - 0.5).abs() < 1e-12);
    }
}
