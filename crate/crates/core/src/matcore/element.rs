use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::mat::{Mat, C64};
use crate::error::{Error, Result};

/// Relative tolerance for the self-adjointness precondition.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

/// A finite direct sum of matrix algebras `⊕ M_{d_k}` with trace
/// `τ(x) = Σ_k w_k Tr(x_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraShape {
    blocks: Vec<Block>,
}

impl AlgebraShape {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidShape("at least one block is required".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.dim == 0 {
                return Err(Error::InvalidShape(format!("block {k} has dimension 0")));
            }
            if !(b.weight.is_finite() && b.weight > 0.0) {
                return Err(Error::InvalidShape(format!("block {k} has weight {}", b.weight)));
            }
        }
        Ok(AlgebraShape { blocks })
    }

    /// `M_n` with the standard trace.
    pub fn matrix(dim: usize) -> Self {
        AlgebraShape::new(vec![Block { dim, weight: 1.0 }]).expect("dimension must be positive")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// `τ(1)`.
    pub fn total_weight(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.dim as f64).sum()
    }

    /// `M_2(A)` with the tensor trace, realised block by block.
    pub fn doubled(&self) -> Self {
        AlgebraShape {
            blocks: self.blocks.iter().map(|b| Block { dim: 2 * b.dim, weight: b.weight }).collect(),
        }
    }
}

/// An element of a finite-dimensional algebra, stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    shape: AlgebraShape,
    blocks: Vec<Mat>,
}

impl Element {
    pub fn new(shape: AlgebraShape, blocks: Vec<Mat>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks supplied for a shape with {}",
                blocks.len(),
                shape.num_blocks()
            )));
        }
        for (k, (m, b)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if m.dim() != b.dim {
                return Err(Error::ShapeMismatch(format!(
                    "block {k} is {}x{}, expected {}",
                    m.dim(),
                    m.dim(),
                    b.dim
                )));
            }
            if !m.is_finite() {
                return Err(Error::Domain(format!("block {k} has non-finite entries")));
            }
        }
        Ok(Element { shape, blocks })
    }

    /// Single matrix block with unit weight.
    pub fn from_mat(m: Mat) -> Self {
        let shape = AlgebraShape::matrix(m.dim());
        Element { shape, blocks: vec![m] }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Element::from_mat(Mat::from_real_diag(diag))
    }

    pub fn scalar(shape_weight: f64, value: C64) -> Self {
        let shape = AlgebraShape::new(vec![Block { dim: 1, weight: shape_weight }])
            .expect("weight must be positive and finite");
        Element { shape, blocks: vec![Mat::from_fn(1, |_, _| value)] }
    }

    pub fn zeros(shape: &AlgebraShape) -> Self {
        Element { shape: shape.clone(), blocks: shape.blocks().iter().map(|b| Mat::zeros(b.dim)).collect() }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Element {
            shape: shape.clone(),
            blocks: shape.blocks().iter().map(|b| Mat::identity(b.dim)).collect(),
        }
    }

    pub(crate) fn from_blocks_unchecked(shape: AlgebraShape, blocks: Vec<Mat>) -> Self {
        debug_assert_eq!(blocks.len(), shape.num_blocks());
        Element { shape, blocks }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &Mat {
        &self.blocks[k]
    }

    pub fn same_shape(&self, other: &Element) -> bool {
        self.shape == other.shape
    }

    pub fn check_same_shape(&self, other: &Element) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.shape, other.shape)))
        }
    }

    pub fn map_blocks(&self, f: impl FnMut(&Mat) -> Mat) -> Element {
        Element { shape: self.shape.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn try_map_blocks(&self, f: impl FnMut(&Mat) -> Result<Mat>) -> Result<Element> {
        Ok(Element {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn zip_blocks(&self, other: &Element, mut f: impl FnMut(&Mat, &Mat) -> Mat) -> Element {
        assert!(self.same_shape(other), "shape mismatch");
        Element {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(Mat::adjoint)
    }

    pub fn hermitian_part(&self) -> Element {
        self.map_blocks(Mat::hermitian_part)
    }

    pub fn scale(&self, s: f64) -> Element {
        self.map_blocks(|m| m.scale(s))
    }

    pub fn scale_c(&self, s: C64) -> Element {
        self.map_blocks(|m| m.scale_c(s))
    }

    pub fn shift(&self, s: C64) -> Element {
        self.map_blocks(|m| m.shift(s))
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Element) -> Element {
        self.zip_blocks(other, Mat::commutator)
    }

    /// Weighted trace `Σ_k w_k Tr(x_k)`.
    pub fn trace(&self) -> C64 {
        self.blocks.iter().zip(self.shape.blocks()).map(|(m, b)| m.trace() * b.weight).sum()
    }

    /// Unweighted Frobenius norm over all blocks.
    pub fn frobenius(&self) -> f64 {
        self.blocks.iter().map(|m| m.frobenius().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(Mat::max_abs).fold(0.0, f64::max)
    }

    /// Unweighted Frobenius norm of `self − self*`.
    pub fn hermitian_defect(&self) -> f64 {
        self.blocks.iter().map(|m| m.hermitian_defect().powi(2)).sum::<f64>().sqrt()
    }

    /// Self-adjointness precondition: `‖x − x*‖ ≤ 1e-10·max(1, ‖x‖)`.
    ///
    /// Both sides use the Frobenius norm, which dominates the operator norm
    /// on the left and is cheap.
    pub fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect <= HERMITIAN_TOL * self.frobenius().max(1.0) {
            Ok(())
        } else {
            Err(Error::NotHermitian { defect })
        }
    }

    pub fn inverse(&self) -> Result<Element> {
        self.try_map_blocks(Mat::inverse)
    }

    /// Solves `self · X = rhs` block by block.
    pub fn solve(&self, rhs: &Element) -> Result<Element> {
        self.check_same_shape(rhs)?;
        Ok(Element {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a.solve(b)).collect::<Result<_>>()?,
        })
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|m| -m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_validation() {
        assert!(AlgebraShape::new(vec![]).is_err());
        assert!(AlgebraShape::new(vec![Block { dim: 0, weight: 1.0 }]).is_err());
        assert!(AlgebraShape::new(vec![Block { dim: 2, weight: 0.0 }]).is_err());
        assert!(AlgebraShape::new(vec![Block { dim: 2, weight: f64::INFINITY }]).is_err());
        let s = AlgebraShape::new(vec![Block { dim: 2, weight: 0.5 }, Block { dim: 1, weight: 3.0 }]).unwrap();
        assert_eq!(s.total_dim(), 3);
        assert_eq!(s.total_weight(), 4.0);
        assert_eq!(s.doubled().blocks()[0].dim, 4);
    }

    #[test]
    fn element_rejects_bad_blocks() {
        let s = AlgebraShape::matrix(2);
        assert!(matches!(Element::new(s.clone(), vec![Mat::zeros(3)]), Err(Error::ShapeMismatch(_))));
        let mut m = Mat::zeros(2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(Element::new(s, vec![m]), Err(Error::Domain(_))));
    }

    #[test]
    fn weighted_trace() {
        let x = Element::scalar(2.0, C64::new(1.0, 0.0));
        assert_eq!(x.trace(), C64::new(2.0, 0.0));
        assert_eq!(Element::from_real_diag(&[1.0, 1.0]).trace(), C64::new(2.0, 0.0));
    }

    #[test]
    fn hermitian_precondition() {
        let x = Element::from_mat(Mat::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]));
        assert!(matches!(x.require_hermitian(), Err(Error::NotHermitian { .. })));
        assert!(x.hermitian_part().require_hermitian().is_ok());
    }
}
