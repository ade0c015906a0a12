//! Operator function calculus.
//!
//! Two independent routes to the same functions:
//!
//! * spectral: `f(x) = V f(Λ) V*` from the Jacobi eigen-decomposition;
//! * resolvent: the Stieltjes-type representations
//!   `s^θ = c_θ ∫₀^∞ t^θ s(s+t)⁻¹ dt/t` and `s^{1+θ} = c_θ ∫₀^∞ t^θ s²(s+t)⁻¹ dt/t`,
//!   discretised with `t = e^v` and the trapezoid rule on `[−L, L]`, using
//!   only linear solves.
//!
//! In `v` the integrands are analytic in the strip `|Im v| < π` and decay like
//! `e^{θv}` and `e^{(θ−1)v}`, so the trapezoid error is `O(e^{−2π²/h})` and
//! the truncation error is `O(e^{−min(θ,1−θ)L})`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::decomp::SUPPORT_CUTOFF;
use crate::matcore::{hermitian_eig, positive_eig, Element, C64};
use crate::par::{map_range, Exec};

/// Floor on `λ_min / ‖x‖∞` for the resolvent routes.
pub const INVERTIBILITY_FLOOR: f64 = 1e-8;

/// Composite trapezoid rule in `v = ln t` over `[−half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureScheme {
    pub half_width: f64,
    pub nodes: usize,
}

impl Default for QuadratureScheme {
    /// `L = 600`, `h = 0.25`: truncation below `1e-11` for `θ ∈ [0.05, 0.95]`.
    fn default() -> Self {
        QuadratureScheme { half_width: 600.0, nodes: 4801 }
    }
}

impl QuadratureScheme {
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || nodes < 2 {
            return Err(Error::Domain(format!(
                "quadrature needs L > 0 and at least 2 nodes (got L = {half_width}, N = {nodes})"
            )));
        }
        Ok(QuadratureScheme { half_width, nodes })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    /// `(v_j, h_j)`: abscissae in `v` and trapezoid weights.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = self.step();
        let last = self.nodes - 1;
        (0..self.nodes).map(move |j| {
            let v = -self.half_width + h * j as f64;
            let w = if j == 0 || j == last { 0.5 * h } else { h };
            (v, w)
        })
    }
}

fn check_theta_open(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("θ = {theta} must lie in (0, 1)")))
    }
}

/// `c_θ = (∫₀^∞ u^{θ−1}/(1+u) du)⁻¹ = sin(πθ)/π`.
///
/// The closed form is cross-checked against [`c_theta_quadrature`] in the
/// tests and by the self-test battery.
pub fn c_theta(theta: f64) -> Result<f64> {
    check_theta_open(theta)?;
    Ok((PI * theta).sin() / PI)
}

/// `c_θ` as the reciprocal of a direct quadrature of its defining integral.
pub fn c_theta_quadrature(theta: f64, scheme: &QuadratureScheme) -> Result<f64> {
    check_theta_open(theta)?;
    let integral: f64 = scheme
        .points()
        .map(|(v, w)| {
            // e^{θv}/(1+e^v), arranged to avoid overflow on either side
            let f = if v <= 0.0 { (theta * v).exp() / (1.0 + v.exp()) } else { ((theta - 1.0) * v).exp() / (1.0 + (-v).exp()) };
            w * f
        })
        .sum();
    Ok(1.0 / integral)
}

/// `x^α` for positive `x` by spectral calculus, with `0^α = 0`.
pub fn power_pos(x: &Element, alpha: f64) -> Result<Element> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("exponent {alpha} must be positive")));
    }
    if alpha == 1.0 {
        positive_eig(x)?;
        return Ok(x.clone());
    }
    let d = positive_eig(x)?;
    let cut = SUPPORT_CUTOFF * d.spectral_radius();
    Ok(d.apply(|l| if l > cut { l.powf(alpha) } else { 0.0 }))
}

/// `sign(x)|x|^α` for self-adjoint `x`.
pub fn signed_power(x: &Element, alpha: f64) -> Result<Element> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("exponent {alpha} must be positive")));
    }
    let d = hermitian_eig(x)?;
    if alpha == 1.0 {
        return Ok(x.clone());
    }
    let cut = SUPPORT_CUTOFF * d.spectral_radius();
    Ok(d.apply(|l| if l.abs() > cut { l.signum() * l.abs().powf(alpha) } else { 0.0 }))
}

/// `x^α` for positive invertible `x` and any real `α` (used for `γ⁻¹`).
pub fn power_invertible(x: &Element, alpha: f64) -> Result<Element> {
    let d = positive_eig(x)?;
    let min = d.min_eigenvalue();
    if min <= 0.0 {
        return Err(Error::Singular);
    }
    Ok(d.apply(|l| l.powf(alpha)))
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("t = {t} must be positive and finite")))
    }
}

/// Verifies `x ≥ 0` with `λ_min ≥ 1e-8·‖x‖∞`.
pub fn require_invertible_positive(x: &Element) -> Result<()> {
    let d = positive_eig(x)?;
    let floor = INVERTIBILITY_FLOOR * d.spectral_radius();
    let min = d.min_eigenvalue();
    if min < floor || min <= 0.0 {
        return Err(Error::IllConditioned { min_eigenvalue: min, floor });
    }
    Ok(())
}

fn resolvent_unchecked(x: &Element, t: f64) -> Result<Element> {
    // x and x + t commute, so x(x+t)⁻¹ = (x+t)⁻¹x
    let r = x.shift(C64::new(t, 0.0)).solve(x)?;
    Ok(r.hermitian_part())
}

/// `g_t(x) = x(x+t)⁻¹`, a positive contraction.
pub fn resolvent_map(x: &Element, t: f64) -> Result<Element> {
    check_t(t)?;
    positive_eig(x)?;
    resolvent_unchecked(x, t)
}

/// `f_t(s) = s²/(s+t) = s(s+t)⁻¹s`.
pub fn f_t(s: &Element, t: f64) -> Result<Element> {
    check_t(t)?;
    Ok((&resolvent_unchecked(s, t)? * s).hermitian_part())
}

fn frechet_unchecked(s: &Element, t: f64, delta: &Element) -> Result<Element> {
    let g = resolvent_unchecked(s, t)?;
    let dg = delta * &g;
    let gd = &g * delta;
    let gdg = &gd * &g;
    Ok(&(&dg + &gd) - &gdg)
}

/// Fréchet derivative of `f_t` at `s` in direction `δ`:
/// `δ(s+t)⁻¹s + s(s+t)⁻¹δ − s(s+t)⁻¹δ(s+t)⁻¹s`.
pub fn frechet_f_t(s: &Element, t: f64, delta: &Element) -> Result<Element> {
    check_t(t)?;
    s.check_same_shape(delta)?;
    positive_eig(s)?;
    frechet_unchecked(s, t, delta)
}

const CHUNK: usize = 256;

/// `Σ_j h_j e^{θ v_j} F(e^{v_j})` over the scheme, summed in node order
/// within fixed-size chunks and then across chunks in order.
fn quadrature_sum<F>(scheme: &QuadratureScheme, theta: f64, zero: &Element, exec: Exec, f: F) -> Result<Element>
where
    F: Fn(f64) -> Result<Element> + Sync + Send,
{
    let pts: Vec<(f64, f64)> = scheme.points().collect();
    let chunks = pts.len().div_ceil(CHUNK);
    let partial = map_range(exec, chunks, |c| -> Result<Element> {
        let mut acc = zero.clone();
        for &(v, h) in &pts[c * CHUNK..((c + 1) * CHUNK).min(pts.len())] {
            let weight = h * (theta * v).exp();
            if weight == 0.0 {
                continue;
            }
            let term = f(v.exp())?;
            acc = acc.zip_blocks(&term, |a, b| {
                let mut a = a.clone();
                a.axpy(weight, b);
                a
            });
        }
        Ok(acc)
    });
    let mut total = zero.clone();
    for p in partial {
        total = &total + &p?;
    }
    Ok(total)
}

/// `x^θ = c_θ ∫ t^θ x(x+t)⁻¹ dt/t` evaluated with resolvents only.
pub fn power_via_integral(x: &Element, theta: f64, scheme: &QuadratureScheme) -> Result<Element> {
    power_via_integral_with(x, theta, scheme, Exec::default())
}

pub fn power_via_integral_with(x: &Element, theta: f64, scheme: &QuadratureScheme, exec: Exec) -> Result<Element> {
    let c = c_theta(theta)?;
    require_invertible_positive(x)?;
    let zero = Element::zeros(x.shape());
    let sum = quadrature_sum(scheme, theta, &zero, exec, |t| resolvent_unchecked(x, t))?;
    Ok(sum.scale(c).hermitian_part())
}

/// `x^{1+θ} − y^{1+θ} = c_θ ∫₀¹ ∫ t^θ D_{y+uδ}f_t(δ) dt/t du` with `δ = x − y`,
/// trapezoid in `u` with `u_nodes` points.
pub fn power_diff_integral(
    x: &Element,
    y: &Element,
    theta: f64,
    scheme: &QuadratureScheme,
    u_nodes: usize,
) -> Result<Element> {
    power_diff_integral_with(x, y, theta, scheme, u_nodes, Exec::default())
}

pub fn power_diff_integral_with(
    x: &Element,
    y: &Element,
    theta: f64,
    scheme: &QuadratureScheme,
    u_nodes: usize,
    exec: Exec,
) -> Result<Element> {
    let c = c_theta(theta)?;
    x.check_same_shape(y)?;
    if u_nodes < 2 {
        return Err(Error::Domain(format!("u_nodes = {u_nodes} must be at least 2")));
    }
    require_invertible_positive(x)?;
    require_invertible_positive(y)?;
    let delta = x - y;
    let zero = Element::zeros(x.shape());
    let hu = 1.0 / (u_nodes - 1) as f64;
    let slices = map_range(exec, u_nodes, |k| -> Result<Element> {
        let z = y + &delta.scale(k as f64 * hu);
        quadrature_sum(scheme, theta, &zero, Exec::Sequential, |t| frechet_unchecked(&z, t, &delta))
    });
    let mut total = zero.clone();
    for (k, s) in slices.into_iter().enumerate() {
        let w = if k == 0 || k == u_nodes - 1 { 0.5 * hu } else { hu };
        let s = s?;
        total = total.zip_blocks(&s, |a, b| {
            let mut a = a.clone();
            a.axpy(w, b);
            a
        });
    }
    Ok(total.scale(c).hermitian_part())
}

/// `γ² = c_θ ∫ t^θ g_t(z)² dt/t`, which satisfies `γ² ≤ z^θ`.
pub fn gamma_square(z: &Element, theta: f64, scheme: &QuadratureScheme) -> Result<Element> {
    let c = c_theta(theta)?;
    require_invertible_positive(z)?;
    let zero = Element::zeros(z.shape());
    let sum = quadrature_sum(scheme, theta, &zero, Exec::default(), |t| {
        let g = resolvent_unchecked(z, t)?;
        Ok(&g * &g)
    })?;
    Ok(sum.scale(c).hermitian_part())
}

/// Discretised family `{(w_j, v_j)}` with `v_j = g_{t_j}(z)γ⁻¹` and
/// `w_j = c_θ h_j t_j^θ`, so that `Σ_j w_j v_j² = 1`.
#[derive(Debug, Clone)]
pub struct ConjugationFamily {
    pub weights: Vec<f64>,
    pub maps: Vec<Element>,
}

pub fn conjugation_family(z: &Element, theta: f64, scheme: &QuadratureScheme) -> Result<ConjugationFamily> {
    let c = c_theta(theta)?;
    let gamma2 = gamma_square(z, theta, scheme)?;
    let gamma_inv = power_invertible(&gamma2, -0.5)?;
    let mut weights = Vec::new();
    let mut maps = Vec::new();
    for (v, h) in scheme.points() {
        let w = c * h * (theta * v).exp();
        let g = resolvent_unchecked(z, v.exp())?;
        let vt = (&g * &gamma_inv).hermitian_part();
        // nodes whose contribution underflows carry nothing
        if w * vt.max_abs().powi(2) < 1e-300 {
            continue;
        }
        weights.push(w);
        maps.push(vt);
    }
    Ok(ConjugationFamily { weights, maps })
}
