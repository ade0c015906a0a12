//! Numerical workbench for noncommutative Mazur maps on finite-dimensional
//! semifinite algebras.

// `!(x >= a)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod funccalc;
pub mod lemmas;
pub mod matcore;
pub mod mazur;
pub mod par;
pub mod record;
pub mod schatten;
pub mod schur;
pub mod search;
pub mod selftest;

pub use error::{Error, Result};
