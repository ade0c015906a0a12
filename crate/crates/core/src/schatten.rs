//! Weighted traces and Schatten norms.
//!
//! `‖x‖_p = (Σ_k w_k Σ_i σ_{k,i}^p)^{1/p}` computed from singular values, and
//! `‖x‖_∞ = max σ` with the weights ignored. Exponents in `(0, 1)` give the
//! usual quasi-norms; they appear as `‖·‖_{θp}` when `θp < 1`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{svd, Element, Svd, C64};
use crate::record::{CheckParams, CheckRecord, Constant, LemmaId, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    /// A genuine norm exponent, `p ≥ 1`.
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(PNorm::Infinity);
        }
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("Schatten exponent {p} must be >= 1")));
        }
        Ok(PNorm::Finite(p))
    }

    /// Any exponent in `(0, ∞]`, including quasi-norm exponents below one.
    pub fn quasi(r: f64) -> Result<Self> {
        if r.is_infinite() && r > 0.0 {
            return Ok(PNorm::Infinity);
        }
        if !(r > 0.0) {
            return Err(Error::Domain(format!("Schatten exponent {r} must be positive")));
        }
        Ok(PNorm::Finite(r))
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            PNorm::Finite(p) => 1.0 / p,
            PNorm::Infinity => 0.0,
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "{p}"),
            PNorm::Infinity => f.write_str("inf"),
        }
    }
}

pub fn trace(x: &Element) -> C64 {
    x.trace()
}

pub fn schatten_norm(x: &Element, p: PNorm) -> Result<f64> {
    Ok(norm_from_svd(&svd(x)?, p))
}

/// Shorthand for finite exponents (quasi-norms allowed).
pub fn norm(x: &Element, p: f64) -> Result<f64> {
    schatten_norm(x, PNorm::quasi(p)?)
}

pub fn norm_from_svd(s: &Svd, p: PNorm) -> f64 {
    let smax = s.max_singular_value();
    match p {
        PNorm::Infinity => smax,
        _ if smax == 0.0 => 0.0,
        PNorm::Finite(p) => {
            // scale by σ_max to stay clear of overflow for large p
            let sum: f64 = s.weighted_singular_values().map(|(sig, w)| w * (sig / smax).powf(p)).sum();
            smax * sum.powf(1.0 / p)
        }
    }
}

/// Evaluates the three-factor Hölder inequality `‖xyz‖_p ≤ ‖x‖_a ‖y‖_b ‖z‖_c`
/// for `1/a + 1/b + 1/c = 1/p`; passes with relative slack `1e-9`.
pub fn holder_bound(
    x: &Element,
    y: &Element,
    z: &Element,
    a: PNorm,
    b: PNorm,
    c: PNorm,
    p: PNorm,
) -> Result<CheckRecord> {
    x.check_same_shape(y)?;
    x.check_same_shape(z)?;
    let mismatch = a.reciprocal() + b.reciprocal() + c.reciprocal() - p.reciprocal();
    if mismatch.abs() > 1e-12 {
        let val = |n: PNorm| match n {
            PNorm::Finite(v) => v,
            PNorm::Infinity => f64::INFINITY,
        };
        return Err(Error::ExponentMismatch { a: val(a), b: val(b), c: val(c), p: val(p) });
    }
    let lhs = schatten_norm(&(&(x * y) * z), p)?;
    let rhs = schatten_norm(x, a)? * schatten_norm(y, b)? * schatten_norm(z, c)?;
    let params = CheckParams { p: Some(1.0 / p.reciprocal()), ..Default::default() };
    let mut rec = CheckRecord::explicit(LemmaId::HolderSelfTest, params, lhs, rhs, 1.0);
    rec.constant = Constant::Explicit(1.0);
    rec.verdict = if lhs <= rhs * (1.0 + 1e-9) { Verdict::Pass } else { Verdict::Fail };
    Ok(rec)
}
