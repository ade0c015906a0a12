//! Dense block-diagonal complex matrices and the decompositions every other
//! module is built on.

pub mod decomp;
pub mod element;
pub mod jacobi;
pub mod mat;
pub mod rng;

pub use decomp::{
    hermitian_eig, op_norm, polar, pos_neg_parts, positive_eig, svd, PolarDecomposition, SignParts,
    SpectralDecomposition, Svd,
};
pub use element::{AlgebraShape, Block, Element};
pub use mat::{Mat, C64};
pub use rng::{derive_seed, random_contraction, random_positive, Rng};
