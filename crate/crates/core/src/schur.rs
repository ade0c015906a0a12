//! Schur multipliers in the eigenbasis of a positive element.
//!
//! A multiplier acts on `a` by conjugating into a fixed orthonormal basis,
//! multiplying entrywise by a real symmetric matrix `m`, and conjugating
//! back. It is completely positive iff `m` is positive semidefinite, and a
//! unital completely positive Schur multiplier is trace preserving and
//! contractive on every Schatten class.

use crate::error::{Error, Result};
use crate::funccalc::ConjugationFamily;
use crate::matcore::jacobi::hermitian_eigen;
use crate::matcore::{positive_eig, Element, Mat, C64};

/// Real symmetric coefficient matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SchurMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        SchurMatrix { n, entries }
    }

    pub fn ones(n: usize) -> Self {
        SchurMatrix::from_fn(n, |_, _| 1.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Smallest eigenvalue (complete positivity iff this is `≥ 0`).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        if self.n == 0 {
            return Ok(0.0);
        }
        let m = Mat::from_fn(self.n, |i, j| C64::new(self.get(i, j), 0.0));
        let (vals, _) = hermitian_eigen(&m)?;
        Ok(vals[0])
    }

    pub fn is_unital(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 1.0)
    }
}

fn check_positive_spectrum(v: &[f64]) -> Result<()> {
    match v.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
        Some(l) => Err(Error::Domain(format!("spectrum entry {l} must be positive"))),
        None => Ok(()),
    }
}

/// `m_ij = (λ_i^α λ_j^{1−α} + λ_i^{1−α} λ_j^α) / (λ_i + λ_j)`.
pub fn multiplier_mean_power(lambda: &[f64], alpha: f64) -> Result<SchurMatrix> {
    check_positive_spectrum(lambda)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("α = {alpha} must lie in [0, 1]")));
    }
    Ok(SchurMatrix::from_fn(lambda.len(), |i, j| {
        if i == j {
            return 1.0;
        }
        let (a, b) = (lambda[i], lambda[j]);
        (a.powf(alpha) * b.powf(1.0 - alpha) + a.powf(1.0 - alpha) * b.powf(alpha)) / (a + b)
    }))
}

/// `m_ij = √(μ_i μ_j) / (μ_i + μ_j)`.
pub fn multiplier_geometric(mu: &[f64]) -> Result<SchurMatrix> {
    check_positive_spectrum(mu)?;
    Ok(SchurMatrix::from_fn(mu.len(), |i, j| {
        if i == j {
            return 0.5;
        }
        (mu[i] * mu[j]).sqrt() / (mu[i] + mu[j])
    }))
}

/// A Schur multiplier attached to a basis, one per block.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    pub basis: Vec<Mat>,
    pub matrix: Vec<SchurMatrix>,
}

impl Multiplier {
    pub fn new(basis: Vec<Mat>, matrix: Vec<SchurMatrix>) -> Result<Self> {
        if basis.len() != matrix.len() {
            return Err(Error::ShapeMismatch("one coefficient matrix per basis block is required".into()));
        }
        for (u, m) in basis.iter().zip(&matrix) {
            if u.dim() != m.dim() {
                return Err(Error::ShapeMismatch(format!("basis of size {} vs matrix of size {}", u.dim(), m.dim())));
            }
            if !m.is_symmetric() || !m.entries().iter().all(|v| v.is_finite()) {
                return Err(Error::Domain("coefficient matrix must be finite and symmetric".into()));
            }
        }
        Ok(Multiplier { basis, matrix })
    }

    /// Builds `m` blockwise from the spectrum of a positive invertible `x`,
    /// in `x`'s eigenbasis.
    pub fn from_spectrum(x: &Element, build: impl Fn(&[f64]) -> Result<SchurMatrix>) -> Result<Self> {
        let d = positive_eig(x)?;
        let matrix = d.values.iter().map(|v| build(v)).collect::<Result<Vec<_>>>()?;
        Multiplier::new(d.vectors.clone(), matrix)
    }

    pub fn mean_power(x: &Element, alpha: f64) -> Result<Self> {
        Multiplier::from_spectrum(x, |l| multiplier_mean_power(l, alpha))
    }

    pub fn geometric(x: &Element) -> Result<Self> {
        Multiplier::from_spectrum(x, multiplier_geometric)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.matrix.iter().map(SchurMatrix::min_eigenvalue).try_fold(f64::INFINITY, |acc, v| Ok(acc.min(v?)))
    }
}

/// `U (m ∘ (U* a U)) U*` per block.
pub fn schur_apply(m: &Multiplier, a: &Element) -> Result<Element> {
    if m.basis.len() != a.blocks().len() {
        return Err(Error::ShapeMismatch(format!("{} basis blocks vs {} element blocks", m.basis.len(), a.blocks().len())));
    }
    let mut blocks = Vec::with_capacity(m.basis.len());
    for ((u, coeffs), ab) in m.basis.iter().zip(&m.matrix).zip(a.blocks()) {
        if u.dim() != ab.dim() {
            return Err(Error::ShapeMismatch(format!("basis of size {} vs block of size {}", u.dim(), ab.dim())));
        }
        let inner = &(&u.adjoint() * ab) * u;
        let scaled = inner.hadamard_real(coeffs.entries());
        blocks.push(&(u * &scaled) * &u.adjoint());
    }
    Element::new(a.shape().clone(), blocks)
}

/// Normalisation tolerance for [`averaged_conjugation`].
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// `a ↦ Σ_j w_j v_j a v_j`, the discretised averaging map. Requires
/// `Σ_j w_j v_j² = 1` within `1e-6`.
pub fn averaged_conjugation(family: &ConjugationFamily, a: &Element) -> Result<Element> {
    if family.weights.len() != family.maps.len() || family.maps.is_empty() {
        return Err(Error::Domain("conjugation family needs matching, nonempty weights and maps".into()));
    }
    let shape = family.maps[0].shape();
    let mut unit = Element::zeros(shape);
    for (w, v) in family.weights.iter().zip(&family.maps) {
        v.check_same_shape(a)?;
        unit = &unit + &(v * v).scale(*w);
    }
    let defect = (&unit - &Element::identity(shape)).max_abs();
    if defect > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { defect });
    }
    let mut out = Element::zeros(shape);
    for (w, v) in family.weights.iter().zip(&family.maps) {
        out = &out + &(&(v * a) * v).scale(*w);
    }
    Ok(out)
}
