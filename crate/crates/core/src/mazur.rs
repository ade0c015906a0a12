//! Mazur maps `M_{p,q}(x) = u|x|^{p/q}` and the reduction gadgets used
//! around them: the two 2×2 dilations and the Cayley transform.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::mat::{I, ONE};
use crate::matcore::{hermitian_eig, op_norm, svd, Element, Mat};
use crate::schatten::norm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MazurParams {
    pub p: f64,
    pub q: f64,
}

impl MazurParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} = {v} must be finite and >= 1")));
            }
        }
        Ok(MazurParams { p, q })
    }

    /// `p/q`.
    pub fn exponent(&self) -> f64 {
        self.p / self.q
    }

    /// Hölder exponent `min(p/q, 1)`.
    pub fn theta(&self) -> f64 {
        self.exponent().min(1.0)
    }

    pub fn is_identity(&self) -> bool {
        self.p == self.q
    }
}

/// `M_{p,q}(x) = U Σ^{p/q} V*` over the support of `x`.
pub fn mazur_map(x: &Element, params: MazurParams) -> Result<Element> {
    if params.is_identity() {
        return Ok(x.clone());
    }
    let r = params.exponent();
    Ok(svd(x)?.apply(|s| s.powf(r)))
}

/// Accepts `x` with `‖x‖_p ≤ 1`, renormalising inputs that overshoot by at
/// most `1e-12`.
pub fn into_unit_ball(x: &Element, p: f64) -> Result<Element> {
    let n = norm(x, p)?;
    if n <= 1.0 {
        Ok(x.clone())
    } else if n <= 1.0 + 1e-12 {
        Ok(x.scale(1.0 / n))
    } else {
        Err(Error::Domain(format!("‖x‖_{p} = {n} exceeds the unit ball")))
    }
}

/// `x ↦ [[0, x], [x*, 0]]` applied to both arguments, over the doubled shape.
pub fn dilate_selfadjoint(x: &Element, y: &Element) -> Result<(Element, Element)> {
    x.check_same_shape(y)?;
    let shape = x.shape().doubled();
    let dilate = |e: &Element| {
        let blocks =
            e.blocks().iter().map(|b| Mat::block2(&Mat::zeros(b.dim()), b, &b.adjoint(), &Mat::zeros(b.dim()))).collect();
        Element::new(shape.clone(), blocks)
    };
    Ok((dilate(x)?, dilate(y)?))
}

/// `(diag(x, y), [[0, 1], [0, 0]])` over the doubled shape, so that
/// `[x̃, b̃] = [[0, x − y], [0, 0]]`.
pub fn dilate_commutator(x: &Element, y: &Element) -> Result<(Element, Element)> {
    x.check_same_shape(y)?;
    let shape = x.shape().doubled();
    let xt = x.blocks().iter().zip(y.blocks()).map(|(a, b)| Mat::block2(a, &Mat::zeros(a.dim()), &Mat::zeros(a.dim()), b));
    let bt = x.blocks().iter().map(|a| {
        let n = a.dim();
        Mat::block2(&Mat::zeros(n), &Mat::identity(n), &Mat::zeros(n), &Mat::zeros(n))
    });
    Ok((Element::new(shape.clone(), xt.collect())?, Element::new(shape, bt.collect())?))
}

/// Upper-right block of every block of a doubled element.
pub fn off_diagonal_block(x: &Element, original: &crate::matcore::AlgebraShape) -> Result<Element> {
    let blocks = x.blocks().iter().zip(original.blocks()).map(|(m, b)| m.sub_block(0, b.dim, b.dim)).collect();
    Element::new(original.clone(), blocks)
}

/// Cayley transform `u = (b − i)(b + i)⁻¹` of a self-adjoint `b`.
pub fn cayley(b: &Element) -> Result<Element> {
    b.require_hermitian()?;
    let b = b.hermitian_part();
    b.shift(I).solve(&b.shift(-I))
}

/// `‖(1 − u)⁻¹‖∞`, at most `1/√2` when `u` is the Cayley transform of a
/// self-adjoint contraction.
pub fn cayley_gap_norm(u: &Element) -> Result<f64> {
    let one_minus_u = &Element::identity(u.shape()) - u;
    op_norm(&one_minus_u.inverse()?)
}

/// Inverse Cayley transform `b = 2i(1 − u)⁻¹ − i`.
pub fn inverse_cayley(u: &Element) -> Result<Element> {
    let one_minus_u = &Element::identity(u.shape()) - u;
    Ok(one_minus_u.inverse()?.scale_c(I * 2.0).shift(-I * ONE))
}

/// Unitarity defect `‖u*u − 1‖` (max-abs entry).
pub fn unitarity_defect(u: &Element) -> f64 {
    (&(&u.adjoint() * u) - &Element::identity(u.shape())).max_abs()
}

/// Whether `x` is self-adjoint in the sense of the solver precondition.
pub fn is_self_adjoint(x: &Element) -> bool {
    hermitian_eig(x).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funccalc::signed_power;
    use crate::matcore::rng::gaussian_element;
    use crate::matcore::{random_contraction, AlgebraShape, Rng, C64};

    fn close(a: &Element, b: &Element, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn params_validation() {
        assert!(MazurParams::new(0.5, 2.0).is_err());
        assert!(MazurParams::new(1.0, f64::INFINITY).is_err());
        let m = MazurParams::new(1.0, 2.0).unwrap();
        assert_eq!(m.theta(), 0.5);
        assert_eq!(MazurParams::new(4.0, 2.0).unwrap().theta(), 1.0);
    }

    #[test]
    fn mazur_examples() {
        let m = MazurParams::new(1.0, 2.0).unwrap();
        let r = mazur_map(&Element::from_real_diag(&[4.0]), m).unwrap();
        assert!(close(&r, &Element::from_real_diag(&[2.0]), 1e-15));

        let x = Element::from_mat(Mat::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]));
        let r = mazur_map(&x, m).unwrap();
        let expect = Element::from_mat(Mat::from_real_rows(&[&[0.0, 2f64.sqrt()], &[0.0, 0.0]]));
        assert!(close(&r, &expect, 1e-15));

        let mut rng = Rng::new(1);
        let g = gaussian_element(&AlgebraShape::matrix(3), &mut rng);
        assert_eq!(mazur_map(&g, MazurParams::new(2.5, 2.5).unwrap()).unwrap(), g);
    }

    #[test]
    fn mazur_matches_signed_power_on_self_adjoint() {
        let mut rng = Rng::new(2);
        let x = gaussian_element(&AlgebraShape::matrix(4), &mut rng).hermitian_part();
        let m = MazurParams::new(1.5, 4.0).unwrap();
        let a = mazur_map(&x, m).unwrap();
        let b = signed_power(&x, m.exponent()).unwrap();
        assert!(close(&a, &b, 1e-10));
    }

    #[test]
    fn unit_ball_policy() {
        let x = Element::from_real_diag(&[1.0 + 5e-13]);
        assert!(into_unit_ball(&x, 1.0).unwrap().block(0)[(0, 0)].re <= 1.0);
        assert!(into_unit_ball(&Element::from_real_diag(&[1.1]), 1.0).is_err());
    }

    #[test]
    fn dilation_of_zero() {
        let z = Element::zeros(&AlgebraShape::matrix(2));
        let (xt, _) = dilate_selfadjoint(&z, &z).unwrap();
        assert_eq!(xt.max_abs(), 0.0);
        assert_eq!(xt.shape().total_dim(), 4);
    }

    #[test]
    fn dilation_shape_mismatch() {
        let a = Element::zeros(&AlgebraShape::matrix(2));
        let b = Element::zeros(&AlgebraShape::matrix(3));
        assert!(matches!(dilate_selfadjoint(&a, &b), Err(Error::ShapeMismatch(_))));
        assert!(matches!(dilate_commutator(&a, &b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn commutator_dilation_scalars() {
        let (xt, bt) = dilate_commutator(&Element::from_real_diag(&[1.0]), &Element::from_real_diag(&[0.0])).unwrap();
        assert!((norm(&xt.commutator(&bt), 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cayley_examples() {
        let shape = AlgebraShape::matrix(2);
        let u = cayley(&Element::zeros(&shape)).unwrap();
        assert!(close(&u, &Element::identity(&shape).scale(-1.0), 1e-15));
        assert!((cayley_gap_norm(&u).unwrap() - 0.5).abs() < 1e-15);

        let u = cayley(&Element::identity(&shape)).unwrap();
        assert!(close(&u, &Element::identity(&shape).scale_c(C64::new(0.0, -1.0)), 1e-15));
        assert!((cayley_gap_norm(&u).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        assert!(cayley(&Element::from_mat(Mat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]))).is_err());
    }

    #[test]
    fn cayley_roundtrip() {
        let mut rng = Rng::new(3);
        let b = random_contraction(&AlgebraShape::matrix(4), &mut rng, true).unwrap();
        let u = cayley(&b).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
        assert!(close(&inverse_cayley(&u).unwrap(), &b, 1e-12));
    }
}
