//! Spectral, singular-value and polar decompositions of block elements.

use super::element::{AlgebraShape, Element};
use super::jacobi;
use super::mat::{Mat, C64, ZERO};
use crate::error::{Error, Result};

/// Singular values at or below this fraction of the largest one are treated
/// as outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-13;

/// Eigenvalues of nominally positive elements in `[−CLAMP_TOL·‖x‖∞, 0)` are
/// rounded to zero; anything more negative is an error.
pub const CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    shape: AlgebraShape,
    /// Ascending, per block.
    pub values: Vec<Vec<f64>>,
    /// Unitary per block; column `i` belongs to `values[k][i]`.
    pub vectors: Vec<Mat>,
}

impl SpectralDecomposition {
    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    /// `V f(Λ) V*`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> Element {
        let blocks = self
            .values
            .iter()
            .zip(&self.vectors)
            .map(|(vals, v)| {
                let n = vals.len();
                let fv: Vec<f64> = vals.iter().map(|&l| f(l)).collect();
                let mut out = Mat::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        let mut s = ZERO;
                        for k in 0..n {
                            if fv[k] != 0.0 {
                                s += v[(i, k)] * v[(j, k)].conj() * fv[k];
                            }
                        }
                        out[(i, j)] = s;
                    }
                }
                out.hermitian_part()
            })
            .collect();
        Element::from_blocks_unchecked(self.shape.clone(), blocks)
    }

    pub fn reconstruct(&self) -> Element {
        self.apply(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Operator norm of the decomposed element.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().flatten().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Spectral projection onto the eigenvalues selected by `keep`.
    pub fn projection(&self, mut keep: impl FnMut(f64) -> bool) -> Element {
        self.apply(|l| if keep(l) { 1.0 } else { 0.0 })
    }

    /// Checks positivity, clamping roundoff negatives to zero in place.
    pub fn clamp_positive(&mut self) -> Result<()> {
        let floor = -CLAMP_TOL * self.spectral_radius();
        let min = self.min_eigenvalue();
        if min < floor {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        for l in self.values.iter_mut().flatten() {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        Ok(())
    }
}

/// Eigen-decomposition of a self-adjoint element.
pub fn hermitian_eig(x: &Element) -> Result<SpectralDecomposition> {
    x.require_hermitian()?;
    let mut values = Vec::with_capacity(x.blocks().len());
    let mut vectors = Vec::with_capacity(x.blocks().len());
    for b in x.blocks() {
        let (vals, v) = jacobi::hermitian_eigen(b)?;
        values.push(vals);
        vectors.push(v);
    }
    Ok(SpectralDecomposition { shape: x.shape().clone(), values, vectors })
}

/// Eigen-decomposition of a positive element with roundoff clamping.
pub fn positive_eig(x: &Element) -> Result<SpectralDecomposition> {
    let mut d = hermitian_eig(x)?;
    d.clamp_positive()?;
    Ok(d)
}

/// `x = U Σ V*` per block. Singular values descending; columns of `u` past
/// `rank[k]` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    shape: AlgebraShape,
    pub u: Vec<Mat>,
    pub sigma: Vec<Vec<f64>>,
    pub v: Vec<Mat>,
    pub rank: Vec<usize>,
}

impl Svd {
    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    /// `Σ_i f(σ_i) u_i v_i*` over the support.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> Element {
        let blocks = (0..self.u.len())
            .map(|k| {
                let (u, v, s) = (&self.u[k], &self.v[k], &self.sigma[k]);
                let n = s.len();
                let fs: Vec<f64> = s[..self.rank[k]].iter().map(|&x| f(x)).collect();
                Mat::from_fn(n, |i, j| {
                    fs.iter().enumerate().map(|(l, &w)| u[(i, l)] * v[(j, l)].conj() * w).sum()
                })
            })
            .collect();
        Element::from_blocks_unchecked(self.shape.clone(), blocks)
    }

    pub fn max_singular_value(&self) -> f64 {
        self.sigma.iter().filter_map(|s| s.first().copied()).fold(0.0, f64::max)
    }

    /// `(σ, w)` pairs with `w` the block's trace weight.
    pub fn weighted_singular_values(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.sigma
            .iter()
            .zip(self.shape.blocks())
            .flat_map(|(s, b)| s.iter().map(move |&x| (x, b.weight)))
    }
}

pub fn svd(x: &Element) -> Result<Svd> {
    let nb = x.blocks().len();
    let mut u_all = Vec::with_capacity(nb);
    let mut s_all = Vec::with_capacity(nb);
    let mut v_all = Vec::with_capacity(nb);
    let mut r_all = Vec::with_capacity(nb);
    for b in x.blocks() {
        let n = b.dim();
        let (w, v) = jacobi::one_sided(b)?;
        let norms: Vec<f64> =
            (0..n).map(|j| (0..n).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
        let smax = norms[order[0]];
        let mut u = Mat::zeros(n);
        let mut vs = Mat::zeros(n);
        let mut sig = Vec::with_capacity(n);
        let mut rank = 0;
        for (dst, &src) in order.iter().enumerate() {
            let s = norms[src];
            sig.push(s);
            vs.set_column(dst, &v.column(src));
            if s > SUPPORT_CUTOFF * smax && s > 0.0 {
                let col: Vec<C64> = w.column(src).iter().map(|z| z / s).collect();
                u.set_column(dst, &col);
                rank += 1;
            }
        }
        u_all.push(u);
        s_all.push(sig);
        v_all.push(vs);
        r_all.push(rank);
    }
    Ok(Svd { shape: x.shape().clone(), u: u_all, sigma: s_all, v: v_all, rank: r_all })
}

/// Operator norm `‖x‖∞` (largest singular value over all blocks).
pub fn op_norm(x: &Element) -> Result<f64> {
    Ok(svd(x)?.max_singular_value())
}

/// `x = u|x|` with `u` a partial isometry whose initial projection is the
/// support of `|x|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarDecomposition {
    pub isometry: Element,
    pub modulus: Element,
}

pub fn polar(x: &Element) -> Result<PolarDecomposition> {
    polar_from_svd(&svd(x)?)
}

pub fn polar_from_svd(s: &Svd) -> Result<PolarDecomposition> {
    let isometry = s.apply(|_| 1.0);
    let modulus_blocks = (0..s.v.len())
        .map(|k| {
            let (v, sig) = (&s.v[k], &s.sigma[k]);
            let n = sig.len();
            Mat::from_fn(n, |i, j| (0..n).map(|l| v[(i, l)] * v[(j, l)].conj() * sig[l]).sum())
                .hermitian_part()
        })
        .collect();
    let modulus = Element::from_blocks_unchecked(s.shape().clone(), modulus_blocks);
    Ok(PolarDecomposition { isometry, modulus })
}

/// Jordan decomposition `x = x₊ − x₋` of a self-adjoint element together with
/// the spectral projections `e₊ = 1_{[0,∞)}(x)` and `e₋ = 1_{(−∞,0)}(x)`.
/// Eigenvalues within the support cutoff count as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SignParts {
    pub plus: Element,
    pub minus: Element,
    pub e_plus: Element,
    pub e_minus: Element,
}

pub fn pos_neg_parts(x: &Element) -> Result<SignParts> {
    let d = hermitian_eig(x)?;
    let cut = SUPPORT_CUTOFF * d.spectral_radius();
    Ok(SignParts {
        plus: d.apply(|l| if l > cut { l } else { 0.0 }),
        minus: d.apply(|l| if l < -cut { -l } else { 0.0 }),
        e_plus: d.projection(|l| l >= -cut),
        e_minus: d.projection(|l| l < -cut),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::mat::ONE;

    fn close(a: &Element, b: &Element, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn eig_examples() {
        let d = hermitian_eig(&Element::from_mat(Mat::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]))).unwrap();
        assert!((d.values[0][0] - 1.0).abs() < 1e-15 && (d.values[0][1] - 3.0).abs() < 1e-15);
        let d = hermitian_eig(&Element::from_real_diag(&[5.0])).unwrap();
        assert_eq!(d.values[0], vec![5.0]);
        assert_eq!(d.vectors[0], Mat::identity(1));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let x = Element::from_mat(Mat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert!(matches!(hermitian_eig(&x), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn polar_nilpotent() {
        let x = Element::from_mat(Mat::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]));
        let p = polar(&x).unwrap();
        assert!(close(&p.isometry, &Element::from_mat(Mat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])), 1e-15));
        assert!(close(&p.modulus, &Element::from_real_diag(&[0.0, 2.0]), 1e-15));
    }

    #[test]
    fn polar_identity() {
        let x = Element::identity(&AlgebraShape::matrix(3));
        let p = polar(&x).unwrap();
        assert!(close(&p.isometry, &x, 1e-15));
        assert!(close(&p.modulus, &x, 1e-15));
    }

    #[test]
    fn zero_element_polar() {
        let x = Element::zeros(&AlgebraShape::matrix(2));
        let p = polar(&x).unwrap();
        assert_eq!(p.isometry.max_abs(), 0.0);
        assert_eq!(p.modulus.max_abs(), 0.0);
    }

    #[test]
    fn sign_parts_examples() {
        let s = pos_neg_parts(&Element::from_real_diag(&[1.0, -2.0])).unwrap();
        assert!(close(&s.plus, &Element::from_real_diag(&[1.0, 0.0]), 1e-15));
        assert!(close(&s.minus, &Element::from_real_diag(&[0.0, 2.0]), 1e-15));
        let s = pos_neg_parts(&Element::from_real_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(s.minus.max_abs(), 0.0);
        assert!(close(&s.e_plus, &Element::identity(&AlgebraShape::matrix(2)), 1e-15));
    }

    #[test]
    fn clamp_policy() {
        let mut d = hermitian_eig(&Element::from_real_diag(&[1.0, -1e-12])).unwrap();
        d.clamp_positive().unwrap();
        assert_eq!(d.values[0][0], 0.0);
        let mut d = hermitian_eig(&Element::from_real_diag(&[1.0, -1e-6])).unwrap();
        assert!(matches!(d.clamp_positive(), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn op_norm_ignores_weights() {
        let shape = AlgebraShape::new(vec![
            super::super::element::Block { dim: 1, weight: 10.0 },
            super::super::element::Block { dim: 1, weight: 0.1 },
        ])
        .unwrap();
        let x = Element::new(shape, vec![Mat::from_fn(1, |_, _| ONE), Mat::from_fn(1, |_, _| ONE * 3.0)]).unwrap();
        assert!((op_norm(&x).unwrap() - 3.0).abs() < 1e-15);
    }
}
