//! Seeded randomness and random instance generators.
//!
//! The generator is ChaCha8 (counter based) seeded from a 64-bit integer.
//! Parallel trials never share a stream: each derives its own seed from the
//! base seed and its indices with [`derive_seed`], a SplitMix64 finalizer
//! applied to `base ⊕ index` iteratively.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::decomp::op_norm;
use super::element::{AlgebraShape, Element};
use super::mat::{Mat, C64, ZERO};
use crate::error::{Error, Result};

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `path` under `base`: `mix64(… mix64(mix64(base) ⊕ i₀) ⊕ i₁ …)`.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(base), |acc, &i| mix64(acc ^ i))
}

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn derived(base: u64, path: &[u64]) -> Self {
        Rng::new(derive_seed(base, path))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.inner.get_word_pos()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Standard complex Gaussian (`E|z|² = 1`).
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.normal() * s, self.normal() * s)
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        (lo.ln() + (hi.ln() - lo.ln()) * self.uniform()).exp()
    }
}

pub fn gaussian_mat(n: usize, rng: &mut Rng) -> Mat {
    Mat::from_fn(n, |_, _| rng.complex_normal())
}

pub fn gaussian_element(shape: &AlgebraShape, rng: &mut Rng) -> Element {
    let blocks = shape.blocks().iter().map(|b| gaussian_mat(b.dim, rng)).collect();
    Element::from_blocks_unchecked(shape.clone(), blocks)
}

/// Haar-distributed unitary: Gram–Schmidt QR of a complex Gaussian matrix,
/// which yields `R` with positive diagonal and hence the Haar measure.
pub fn haar_unitary(n: usize, rng: &mut Rng) -> Mat {
    loop {
        let g = gaussian_mat(n, rng);
        let mut q = Mat::zeros(n);
        let mut ok = true;
        for j in 0..n {
            let mut col = g.column(j);
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for k in 0..j {
                    let qk = q.column(k);
                    let dot: C64 = qk.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                    for (c, a) in col.iter_mut().zip(&qk) {
                        *c -= a * dot;
                    }
                }
            }
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            let col: Vec<C64> = col.iter().map(|z| z / norm).collect();
            q.set_column(j, &col);
        }
        if ok {
            return q;
        }
    }
}

/// Random positive element: Haar eigenbasis per block, eigenvalues drawn
/// log-uniformly from `[lo, hi]`.
pub fn random_positive(shape: &AlgebraShape, rng: &mut Rng, lo: f64, hi: f64) -> Result<Element> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::Domain(format!("spectrum range [{lo}, {hi}] must satisfy 0 < lo <= hi")));
    }
    let blocks = shape
        .blocks()
        .iter()
        .map(|b| {
            let spectrum: Vec<f64> = (0..b.dim).map(|_| rng.log_uniform(lo, hi)).collect();
            conjugate_diag(&haar_unitary(b.dim, rng), &spectrum)
        })
        .collect();
    Ok(Element::from_blocks_unchecked(shape.clone(), blocks))
}

/// `U diag(d) U*`, exactly Hermitian.
pub fn conjugate_diag(u: &Mat, d: &[f64]) -> Mat {
    let n = d.len();
    let mut out = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = ZERO;
            for k in 0..n {
                s += u[(i, k)] * u[(j, k)].conj() * d[k];
            }
            out[(i, j)] = s;
        }
    }
    out.hermitian_part()
}

/// Random contraction: Gaussian, normalised to operator norm one, then
/// scaled by a uniform factor in `(0, 1]`. With `self_adjoint` the Gaussian
/// is symmetrised first.
pub fn random_contraction(shape: &AlgebraShape, rng: &mut Rng, self_adjoint: bool) -> Result<Element> {
    let mut g = gaussian_element(shape, rng);
    if self_adjoint {
        g = g.hermitian_part();
    }
    let norm = op_norm(&g)?;
    let radius = 1.0 - rng.uniform();
    if norm == 0.0 {
        return Ok(g);
    }
    Ok(g.scale(radius / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::decomp::hermitian_eig;

    #[test]
    fn degenerate_range_gives_scalar() {
        let mut rng = Rng::new(1);
        let x = random_positive(&AlgebraShape::matrix(1), &mut rng, 2.0, 2.0).unwrap();
        assert!((x.block(0)[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn positive_spectrum_respects_floor() {
        let mut rng = Rng::new(2);
        for _ in 0..20 {
            let x = random_positive(&AlgebraShape::matrix(5), &mut rng, 0.1, 10.0).unwrap();
            let d = hermitian_eig(&x).unwrap();
            assert!(d.min_eigenvalue() >= 0.1 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn bad_range_rejected() {
        let mut rng = Rng::new(3);
        assert!(random_positive(&AlgebraShape::matrix(2), &mut rng, 0.0, 1.0).is_err());
        assert!(random_positive(&AlgebraShape::matrix(2), &mut rng, 2.0, 1.0).is_err());
    }

    #[test]
    fn determinism() {
        let shape = AlgebraShape::matrix(4);
        let a = random_positive(&shape, &mut Rng::new(9), 0.5, 2.0).unwrap();
        let b = random_positive(&shape, &mut Rng::new(9), 0.5, 2.0).unwrap();
        assert_eq!(a, b);
        let c = random_contraction(&shape, &mut Rng::derived(9, &[3]), false).unwrap();
        let d = random_contraction(&shape, &mut Rng::derived(9, &[3]), false).unwrap();
        assert_eq!(c, d);
        assert_ne!(derive_seed(9, &[3]), derive_seed(9, &[4]));
    }

    #[test]
    fn contraction_norm_and_symmetry() {
        let mut rng = Rng::new(4);
        for _ in 0..50 {
            let b = random_contraction(&AlgebraShape::matrix(4), &mut rng, false).unwrap();
            assert!(op_norm(&b).unwrap() <= 1.0 + 1e-12);
            let s = random_contraction(&AlgebraShape::matrix(4), &mut rng, true).unwrap();
            assert!(s.hermitian_defect() <= 1e-14);
        }
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = Rng::new(5);
        let u = haar_unitary(6, &mut rng);
        assert!((&(&u.adjoint() * &u) - &Mat::identity(6)).max_abs() < 1e-14);
    }
}
