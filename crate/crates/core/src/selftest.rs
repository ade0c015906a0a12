//! Fixed battery of cross-route oracles: quadrature against closed forms and
//! spectral calculus, finite differences against the Fréchet derivative,
//! 2×2 identities, the Cayley bound and positivity of Schur multipliers.

use serde::Serialize;

use crate::error::Result;
use crate::funccalc::{
    c_theta, c_theta_quadrature, frechet_f_t, f_t, gamma_square, power_diff_integral, power_pos, power_via_integral,
    QuadratureScheme,
};
use crate::matcore::rng::{gaussian_element, haar_unitary, conjugate_diag};
use crate::matcore::{random_contraction, random_positive, svd, AlgebraShape, Element, Rng};
use crate::mazur::{
    cayley, cayley_gap_norm, dilate_commutator, dilate_selfadjoint, mazur_map, unitarity_defect, MazurParams,
};
use crate::schatten::{holder_bound, norm, schatten_norm, PNorm};
use crate::schur::{schur_apply, Multiplier};

/// One oracle comparison: `value` must lie in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub passed: bool,
}

impl OracleCheck {
    pub fn at_most(name: impl Into<String>, value: f64, hi: f64) -> Self {
        OracleCheck::within(name, value, f64::NEG_INFINITY, hi)
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        OracleCheck { name: name.into(), value, lo, hi, passed: value >= lo && value <= hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryConfig {
    pub seed: u64,
    pub scheme: QuadratureScheme,
    /// Random instances per structural check.
    pub instances: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { seed: 20240601, scheme: QuadratureScheme::default(), instances: 100 }
    }
}

fn rel(a: &Element, b: &Element) -> f64 {
    (a - b).frobenius() / b.frobenius().max(f64::MIN_POSITIVE)
}

/// A positive element with spectrum in `[lo, hi]`; for `n ≥ 2` both
/// endpoints are attained.
pub fn conditioned_positive(n: usize, rng: &mut Rng, lo: f64, hi: f64) -> Element {
    let mut d: Vec<f64> = (0..n).map(|_| rng.log_uniform(lo, hi)).collect();
    if n > 1 {
        d[0] = lo;
        d[n - 1] = hi;
    }
    Element::from_mat(conjugate_diag(&haar_unitary(n, rng), &d))
}

/// `|c_θ − 1/∫ u^{θ−1}/(1+u) du|` for `θ = 0.1, …, 0.9`.
pub fn c_theta_checks(scheme: &QuadratureScheme) -> Result<Vec<OracleCheck>> {
    (1..=9)
        .map(|k| {
            let theta = k as f64 / 10.0;
            let delta = (c_theta(theta)? - c_theta_quadrature(theta, scheme)?).abs();
            Ok(OracleCheck::at_most(format!("c_theta quadrature delta theta={theta}"), delta, 1e-8))
        })
        .collect()
}

/// Resolvent-integral power against the spectral power, condition `1e4`.
pub fn power_integral_checks(scheme: &QuadratureScheme, rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    for theta in [0.3, 0.5, 0.9] {
        let mut worst = 0.0f64;
        for k in 0..instances {
            let x = conditioned_positive(1 + k % 5, rng, 1e-2, 1e2).scale(rng.log_uniform(0.1, 10.0));
            worst = worst.max(rel(&power_via_integral(&x, theta, scheme)?, &power_pos(&x, theta)?));
        }
        out.push(OracleCheck::at_most(format!("power_via_integral rel error theta={theta}"), worst, 1e-6));
    }
    Ok(out)
}

/// Nodes of the outer trapezoid rule in the difference oracle.
pub const DIFF_U_NODES: usize = 128;

/// Double-integral difference `x^{1+θ} − y^{1+θ}` against the spectral route.
pub fn power_diff_checks(scheme: &QuadratureScheme, rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    for theta in [0.3, 0.5, 0.9] {
        let mut worst = 0.0f64;
        for k in 0..instances {
            let n = 1 + k % 4;
            let x = conditioned_positive(n, rng, 0.1, 10.0);
            let y = conditioned_positive(n, rng, 0.1, 10.0);
            let exact = &power_pos(&x, 1.0 + theta)? - &power_pos(&y, 1.0 + theta)?;
            worst = worst.max(rel(&power_diff_integral(&x, &y, theta, scheme, DIFF_U_NODES)?, &exact));
        }
        out.push(OracleCheck::at_most(format!("power_diff_integral rel error theta={theta}"), worst, 1e-4));
    }
    Ok(out)
}

/// Slope `log₂(e(h)/e(h/2))` of the central-difference error against the
/// Fréchet derivative of `f_t`.
pub fn richardson_slope(s: &Element, t: f64, delta: &Element, h: f64) -> Result<f64> {
    let exact = frechet_f_t(s, t, delta)?;
    let err = |h: f64| -> Result<f64> {
        let fd = (&f_t(&(s + &delta.scale(h)), t)? - &f_t(&(s - &delta.scale(h)), t)?).scale(0.5 / h);
        Ok((&fd - &exact).frobenius())
    };
    Ok((err(h)? / err(h / 2.0)?).log2())
}

pub fn frechet_checks(rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..instances {
        let n = 2 + k % 4;
        let s = conditioned_positive(n, rng, 0.5, 2.0);
        let delta = gaussian_element(s.shape(), rng).hermitian_part();
        let slope = richardson_slope(&s, rng.log_uniform(0.1, 10.0), &delta, 0.05)?;
        lo = lo.min(slope);
        hi = hi.max(slope);
    }
    Ok(vec![
        OracleCheck::within("frechet richardson slope (min)", lo, 1.8, 2.2),
        OracleCheck::within("frechet richardson slope (max)", hi, 1.8, 2.2),
    ])
}

/// Norm relations of the two 2×2 reductions.
pub fn dilation_checks(rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut sa = 0.0f64;
    let mut comm = 0.0f64;
    for k in 0..instances {
        let shape = AlgebraShape::matrix(1 + k % 4);
        let x = gaussian_element(&shape, rng);
        let y = gaussian_element(&shape, rng);
        let p = [1.0, 1.5, 2.0, 3.0][k % 4];
        let q = [2.0, 1.2, 4.0, 1.0][k % 4];
        let params = MazurParams::new(p, q)?;
        let rel_gap = |a: f64, b: f64| (a - b).abs() / b.max(1.0);

        let (xt, yt) = dilate_selfadjoint(&x, &y)?;
        sa = sa.max(rel_gap(norm(&(&xt - &yt), p)?, 2f64.powf(1.0 / p) * norm(&(&x - &y), p)?));
        let (mx, _) = dilate_selfadjoint(&mazur_map(&x, params)?, &y)?;
        sa = sa.max((&mazur_map(&xt, params)? - &mx).max_abs() / mx.max_abs().max(1.0));

        let (xt, bt) = dilate_commutator(&x, &y)?;
        comm = comm.max(rel_gap(norm(&xt.commutator(&bt), p)?, norm(&(&x - &y), p)?));
        let lhs = norm(&mazur_map(&xt, params)?.commutator(&bt), q)?;
        comm = comm.max(rel_gap(lhs, norm(&(&mazur_map(&x, params)? - &mazur_map(&y, params)?), q)?));
    }
    Ok(vec![
        OracleCheck::at_most("selfadjoint dilation identities", sa, 1e-10),
        OracleCheck::at_most("commutator dilation identities", comm, 1e-10),
    ])
}

pub fn cayley_checks(rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut gap = 0.0f64;
    let mut unitary = 0.0f64;
    for k in 0..instances {
        let b = random_contraction(&AlgebraShape::matrix(1 + k % 6), rng, true)?;
        let u = cayley(&b)?;
        gap = gap.max(cayley_gap_norm(&u)?);
        unitary = unitary.max(unitarity_defect(&u));
    }
    Ok(vec![
        OracleCheck::at_most("cayley gap norm", gap, std::f64::consts::FRAC_1_SQRT_2 + 1e-10),
        OracleCheck::at_most("cayley unitarity defect", unitary, 1e-12),
    ])
}

/// Mean-power multipliers: unital, PSD, contractive on `S_p`.
pub fn multiplier_checks(rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut unital = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut excess = 0.0f64;
    for k in 0..instances {
        let shape = AlgebraShape::matrix(1 + k % 6);
        let x = random_positive(&shape, rng, 1e-3, 1e3)?;
        let m = Multiplier::mean_power(&x, rng.uniform())?;
        for c in &m.matrix {
            for i in 0..c.dim() {
                unital = unital.max((c.get(i, i) - 1.0).abs());
            }
        }
        min_eig = min_eig.min(m.min_eigenvalue()?);
        let a = gaussian_element(&shape, rng);
        let out = schur_apply(&m, &a)?;
        for p in [PNorm::Finite(1.0), PNorm::Finite(1.5), PNorm::Finite(2.0), PNorm::Finite(4.0), PNorm::Infinity] {
            let n_in = schatten_norm(&a, p)?;
            excess = excess.max(schatten_norm(&out, p)? / n_in - 1.0);
        }
    }
    Ok(vec![
        OracleCheck::at_most("mean-power multiplier unital defect", unital, 1e-12),
        OracleCheck::within("mean-power multiplier min eigenvalue", min_eig, -1e-12, f64::INFINITY),
        OracleCheck::at_most("mean-power multiplier S_p excess", excess, 1e-10),
    ])
}

/// `γ² ≤ z^θ` in the operator order.
pub fn gamma_checks(scheme: &QuadratureScheme, rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut worst = f64::INFINITY;
    for k in 0..instances {
        let z = conditioned_positive(1 + k % 4, rng, 0.05, 20.0);
        let theta = rng.uniform_in(0.1, 0.9);
        let gap = &power_pos(&z, theta)? - &gamma_square(&z, theta, scheme)?;
        let d = crate::matcore::hermitian_eig(&gap)?;
        worst = worst.min(d.min_eigenvalue());
    }
    Ok(vec![OracleCheck::within("gamma^2 <= z^theta min eigenvalue", worst, -1e-10, f64::INFINITY)])
}

pub fn holder_checks(rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut worst = 0.0f64;
    for k in 0..instances {
        let shape = AlgebraShape::matrix(1 + k % 5);
        let (x, y, z) = (gaussian_element(&shape, rng), gaussian_element(&shape, rng), gaussian_element(&shape, rng));
        let p3 = PNorm::Finite(3.0);
        let r = holder_bound(&x, &y, &z, p3, p3, p3, PNorm::Finite(1.0))?;
        worst = worst.max(r.lhs / r.rhs_structural);
    }
    Ok(vec![OracleCheck::at_most("holder ratio", worst, 1.0 + 1e-9)])
}

pub fn svd_checks(rng: &mut Rng, instances: usize) -> Result<Vec<OracleCheck>> {
    let mut worst = 0.0f64;
    for k in 0..instances {
        let x = gaussian_element(&AlgebraShape::matrix(1 + k % 6), rng);
        worst = worst.max(rel(&svd(&x)?.apply(|s| s), &x));
    }
    Ok(vec![OracleCheck::at_most("svd reconstruction rel error", worst, 1e-12)])
}

/// Runs the full battery with a fixed seed.
pub fn run_battery(config: &BatteryConfig) -> Result<Vec<OracleCheck>> {
    let mut rng = Rng::new(config.seed);
    let n = config.instances;
    let s = &config.scheme;
    let mut out = c_theta_checks(s)?;
    out.extend(power_integral_checks(s, &mut rng, n.div_ceil(10))?);
    out.extend(power_diff_checks(s, &mut rng, n.div_ceil(50))?);
    out.extend(frechet_checks(&mut rng, n)?);
    out.extend(dilation_checks(&mut rng, n)?);
    out.extend(cayley_checks(&mut rng, n)?);
    out.extend(multiplier_checks(&mut rng, n)?);
    out.extend(gamma_checks(s, &mut rng, n.div_ceil(10))?);
    out.extend(holder_checks(&mut rng, n)?);
    out.extend(svd_checks(&mut rng, n)?);
    Ok(out)
}
