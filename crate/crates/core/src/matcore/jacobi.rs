//! Cyclic Jacobi kernels for Hermitian eigenproblems and singular values.
//!
//! Both solvers share one plane rotation: given the Hermitian 2×2 pencil
//! `[[a_pp, a_pq], [conj(a_pq), a_qq]]`, `rotation` returns the unitary `G`
//! with `G* A G` diagonal. The two-sided solver applies it to `A` directly,
//! the one-sided (Hestenes) solver applies it to the columns of `X` using the
//! Gram entries of `X*X`, which never forms `X*X` and so keeps small singular
//! values to full relative accuracy.

use super::mat::{Mat, C64, ZERO};
use crate::error::{Error, Result};

/// Sweep budget shared by both solvers.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy)]
struct Rotation {
    gpp: C64,
    gpq: C64,
    gqp: C64,
    gqq: C64,
}

fn rotation(app: f64, aqq: f64, apq: C64) -> Rotation {
    let r = apq.norm();
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    Rotation {
        gpp: C64::new(c, 0.0),
        gpq: C64::new(s, 0.0),
        gqp: conj_phase * (-s),
        gqq: conj_phase * c,
    }
}

/// `m ← m G` on columns `p`, `q`.
fn rotate_columns(m: &mut Mat, p: usize, q: usize, g: &Rotation) {
    for k in 0..m.dim() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * g.gpp + mq * g.gqp;
        m[(k, q)] = mp * g.gpq + mq * g.gqq;
    }
}

/// `m ← G* m` on rows `p`, `q`.
fn rotate_rows(m: &mut Mat, p: usize, q: usize, g: &Rotation) {
    for k in 0..m.dim() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = g.gpp.conj() * mp + g.gqp.conj() * mq;
        m[(q, k)] = g.gpq.conj() * mp + g.gqq.conj() * mq;
    }
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending and the
/// unitary whose columns are the matching eigenvectors.
///
/// The caller is responsible for Hermiticity; only the Hermitian part is used.
pub fn hermitian_eigen(a: &Mat) -> Result<(Vec<f64>, Mat)> {
    let n = a.dim();
    let mut a = a.hermitian_part();
    let mut v = Mat::identity(n);
    let fro = a.frobenius();
    let negligible = 1e-18 * fro;

    let mut converged = n <= 1 || fro == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= negligible {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let g = rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, &g);
                rotate_rows(&mut a, p, q, &g);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, &g);
                rotated = true;
            }
        }
        converged = !rotated;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = Mat::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok((values, vectors))
}

/// Singular triplets by one-sided Jacobi: returns `(w, v)` where the columns
/// of `w = x v` are mutually orthogonal, so `σ_j = ‖w_j‖`.
pub fn one_sided(x: &Mat) -> Result<(Mat, Mat)> {
    let n = x.dim();
    let mut w = x.clone();
    let mut v = Mat::identity(n);
    let tol = f64::EPSILON * (n.max(1) as f64);

    let col_dot = |w: &Mat, p: usize, q: usize| -> C64 {
        (0..n).map(|k| w[(k, p)].conj() * w[(k, q)]).sum()
    };
    let col_norm2 = |w: &Mat, p: usize| -> f64 { (0..n).map(|k| w[(k, p)].norm_sqr()).sum() };

    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = col_norm2(&w, p);
                let beta = col_norm2(&w, q);
                let gamma = col_dot(&w, p, q);
                if gamma.norm() <= tol * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                let g = rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &g);
                rotate_columns(&mut v, p, q, &g);
                rotated = true;
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
}
