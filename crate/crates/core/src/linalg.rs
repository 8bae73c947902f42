//! Dense exact linear algebra over rationals.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Config("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Config("matrix shape mismatch".into()));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * &other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols != v.len() {
            return Err(Error::Config("matrix-vector shape mismatch".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .sum()
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let (_, pivots) = m.row_reduce(self.cols);
        pivots.len()
    }

    /// Reduced row echelon form over the first `ncols` columns; returns (rref, pivot columns).
    fn row_reduce(&mut self, ncols: usize) -> (&Matrix, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip().expect("nonzero pivot");
            for j in 0..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in 0..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &f * &self[(r, j)];
                    self[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (self, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Unique solution of `A x = b`; errors if rank-deficient or inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let sol = self.solve_multi(&[b.to_vec()])?;
        Ok(sol.into_iter().next().expect("one right-hand side"))
    }

    /// Solve for several right-hand sides at once.
    pub fn solve_multi(&self, bs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        if bs.iter().any(|b| b.len() != self.rows) {
            return Err(Error::Config("right-hand side length mismatch".into()));
        }
        let k = bs.len();
        let mut aug = Matrix::zeros(self.rows, self.cols + k);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for (t, b) in bs.iter().enumerate() {
                aug[(i, self.cols + t)] = b[i].clone();
            }
        }
        let (_, pivots) = aug.row_reduce(self.cols);
        let rank = pivots.len();
        if rank < self.cols {
            return Err(Error::Singular(format!(
                "rank {rank} < {} unknowns",
                self.cols
            )));
        }
        for i in rank..self.rows {
            for t in 0..k {
                if !aug[(i, self.cols + t)].is_zero() {
                    return Err(Error::Singular("inconsistent overdetermined system".into()));
                }
            }
        }
        Ok((0..k)
            .map(|t| {
                (0..self.cols)
                    .map(|c| aug[(c, self.cols + t)].clone())
                    .collect()
            })
            .collect())
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Config("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        if i == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let sol = self.solve_multi(&cols)?;
        let mut inv = Matrix::zeros(n, n);
        for (j, col) in sol.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Ok(inv)
    }

    /// Characteristic polynomial `det(tI - A)`, coefficients from degree 0 up (Faddeev-LeVerrier).
    pub fn char_poly(&self) -> Vec<Rational> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = Matrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m).expect("square");
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self.mul(&m).expect("square");
            let c = -am.trace() / Rational::from_integer(k as i64);
            coeffs[n - k] = c;
        }
        coeffs
    }
}

/// Expand `prod (t - e)` with coefficients from degree 0 up.
pub fn poly_from_roots(roots: &[Rational]) -> Vec<Rational> {
    let mut p = vec![Rational::one()];
    for e in roots {
        let mut q = vec![Rational::zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            q[i + 1] += c;
            q[i] -= c * e;
        }
        p = q;
    }
    p
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn mat(v: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            v.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn solve_small() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let x = a.solve(&[q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
    }

    #[test]
    fn singular_detected() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert!(a.solve(&[q(1, 1), q(2, 1)]).is_err());
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn overdetermined_consistency() {
        let a = mat(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(
            a.solve(&[q(1, 1), q(2, 1), q(3, 1)]).unwrap(),
            vec![q(1, 1), q(2, 1)]
        );
        assert!(a.solve(&[q(1, 1), q(2, 1), q(4, 1)]).is_err());
    }

    #[test]
    fn char_poly_matches_roots() {
        let a = Matrix::from_rows(vec![
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(2, 5), q(2, 5), q(1, 5)],
            vec![q(2, 5), q(1, 5), q(2, 5)],
        ])
        .unwrap();
        assert_eq!(a.char_poly(), poly_from_roots(&[q(1, 1), q(3, 5), q(1, 5)]));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = mat(&[&[4, 7, 1], &[2, 6, 0], &[1, 1, 5]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(3));
    }
}
