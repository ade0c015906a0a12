//! Square dense complex matrices.
//!
//! Everything in the workbench lives in small matrix algebras (dimension well
//! below 64), so storage is a flat row-major `Vec` and all kernels are the
//! textbook O(n³) loops.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    /// Builds a matrix from row-major entries. Panics if `rows` is not square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Mat::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Mat::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Mat::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// `(a + a*) / 2`, exactly Hermitian in floating point.
    pub fn hermitian_part(&self) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: C64) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `self + s·I`.
    pub fn shift(&self, s: C64) -> Mat {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] += s;
        }
        m
    }

    /// `self += s·other`.
    pub fn axpy(&mut self, s: f64, other: &Mat) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - self*`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entrywise product with a real matrix given row-major.
    pub fn hadamard_real(&self, m: &[f64]) -> Mat {
        assert_eq!(m.len(), self.data.len(), "dimension mismatch");
        Mat { n: self.n, data: self.data.iter().zip(m).map(|(z, &s)| z * s).collect() }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Mat) -> Result<Mat> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = a.max_abs();
        if scale == 0.0 {
            return if n == 0 { Ok(b) } else { Err(Error::Singular) };
        }
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if pmax <= scale * 1e-300 || pmax == 0.0 {
                return Err(Error::Singular);
            }
            if piv != k {
                for j in 0..n {
                    a.data.swap(k * n + j, piv * n + j);
                    b.data.swap(k * n + j, piv * n + j);
                }
            }
            let d = a[(k, k)];
            for i in (k + 1)..n {
                let f = a[(i, k)] / d;
                if f == ZERO {
                    continue;
                }
                a[(i, k)] = ZERO;
                for j in (k + 1)..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= f * akj;
                }
                for j in 0..n {
                    let bkj = b[(k, j)];
                    b[(i, j)] -= f * bkj;
                }
            }
        }
        for k in (0..n).rev() {
            let d = a[(k, k)];
            for j in 0..n {
                let mut s = b[(k, j)];
                for l in (k + 1)..n {
                    s -= a[(k, l)] * b[(l, j)];
                }
                b[(k, j)] = s / d;
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<Mat> {
        self.solve(&Mat::identity(self.n))
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }

    /// Assembles the `2n × 2n` matrix `[[a11, a12], [a21, a22]]`.
    pub fn block2(a11: &Mat, a12: &Mat, a21: &Mat, a22: &Mat) -> Mat {
        let n = a11.n;
        assert!(a12.n == n && a21.n == n && a22.n == n, "dimension mismatch");
        Mat::from_fn(2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a11[(i, j)],
            (true, false) => a12[(i, j - n)],
            (false, true) => a21[(i - n, j)],
            (false, false) => a22[(i - n, j - n)],
        })
    }

    /// Extracts the `n × n` sub-block starting at `(r, c)`.
    pub fn sub_block(&self, r: usize, c: usize, n: usize) -> Mat {
        Mat::from_fn(n, |i, j| self[(r + i, c + j)])
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Mat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Mat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl AddAssign<&Mat> for Mat {
    fn add_assign(&mut self, rhs: &Mat) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|z| -z).collect() }
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_inverse() {
        let a = Mat::from_rows(&[
            vec![C64::new(2.0, 1.0), C64::new(0.5, 0.0)],
            vec![C64::new(-1.0, 0.0), C64::new(3.0, -2.0)],
        ]);
        let inv = a.inverse().unwrap();
        let prod = &a * &inv;
        assert!((&prod - &Mat::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = Mat::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(a.inverse(), Err(Error::Singular));
        assert_eq!(Mat::zeros(3).inverse(), Err(Error::Singular));
    }

    #[test]
    fn hermitian_part_is_exact() {
        let a = Mat::from_fn(3, |i, j| C64::new(i as f64 + 0.3, j as f64 - 1.7 * i as f64));
        assert_eq!(a.hermitian_part().hermitian_defect(), 0.0);
    }

    #[test]
    fn block_roundtrip() {
        let a = Mat::from_real_diag(&[1.0, 2.0]);
        let z = Mat::zeros(2);
        let big = Mat::block2(&z, &a, &a.adjoint(), &z);
        assert_eq!(big.sub_block(0, 2, 2), a);
        assert_eq!(big.sub_block(0, 0, 2), z);
    }
}
