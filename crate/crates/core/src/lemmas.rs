//! The operator inequalities behind the Hölder estimate for Mazur maps, as
//! executable checks over randomized instances.
//!
//! Every `check_*` evaluates one inequality on one instance and returns a
//! [`CheckRecord`]; [`run_suite`] sweeps them over grids of exponents and
//! dimensions with per-trial derived seeds.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funccalc::power_pos;
use crate::matcore::rng::{conjugate_diag, gaussian_element, haar_unitary};
use crate::matcore::{
    derive_seed, op_norm, pos_neg_parts, random_contraction, AlgebraShape, Block, Element, Rng,
};
use crate::mazur::{into_unit_ball, mazur_map, MazurParams};
use crate::par::{map_range, Exec};
use crate::record::{CheckParams, CheckRecord, Constant, InputDigest, LemmaId, Verdict};
use crate::schatten::norm;

/// Default ceiling on ratios of the empirical-constant checks.
pub const DEFAULT_EMPIRICAL_CAP: f64 = 64.0;

/// Tolerance on the sign-decomposition identity.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Pairs closer than this in `‖·‖_p` carry no information about the Hölder
/// constant and are skipped.
pub const THEOREM_MIN_DISTANCE: f64 = 1e-6;

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("θ = {theta} must lie in (0, 1]")))
    }
}

fn check_p(name: &str, p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {p} must be finite and >= 1")))
    }
}

fn theta_params(p: f64, theta: f64) -> CheckParams {
    CheckParams { p: Some(p), theta: Some(theta), ..Default::default() }
}

/// `‖x^θ − y^θ‖_p ≤ ‖x − y‖_{θp}^θ`.
pub fn check_power_contraction(x: &Element, y: &Element, theta: f64, p: f64) -> Result<CheckRecord> {
    check_theta(theta)?;
    check_p("p", p)?;
    x.check_same_shape(y)?;
    let lhs = norm(&(&power_pos(x, theta)? - &power_pos(y, theta)?), p)?;
    let rhs = norm(&(x - y), theta * p)?.powf(theta);
    Ok(CheckRecord::explicit(LemmaId::PowerContraction, theta_params(p, theta), lhs, rhs, 1.0))
}

/// `‖x^β − y^β‖_p ≤ C‖x − y‖_{βp} max(‖x‖_{βp}, ‖y‖_{βp})^{β−1}` for `β > 1`.
fn power_lipschitz(x: &Element, y: &Element, beta: f64, p: f64) -> Result<(f64, f64)> {
    x.check_same_shape(y)?;
    let r = beta * p;
    let lhs = norm(&(&power_pos(x, beta)? - &power_pos(y, beta)?), p)?;
    let size = norm(x, r)?.max(norm(y, r)?);
    Ok((lhs, norm(&(x - y), r)? * size.powf(beta - 1.0)))
}

/// `‖x^{1+θ} − y^{1+θ}‖_p ≤ 3‖x − y‖_{(1+θ)p} max(‖x‖, ‖y‖)_{(1+θ)p}^θ`.
pub fn check_power_expansion(x: &Element, y: &Element, theta: f64, p: f64) -> Result<CheckRecord> {
    check_theta(theta)?;
    check_p("p", p)?;
    let (lhs, rhs) = power_lipschitz(x, y, 1.0 + theta, p)?;
    Ok(CheckRecord::explicit(LemmaId::PowerExpansion, theta_params(p, theta), lhs, rhs, 3.0))
}

/// `‖x^α − y^α‖_p ≤ 3α‖x − y‖_{αp} max(‖x‖, ‖y‖)_{αp}^{α−1}` for `α > 1`.
pub fn check_alpha_lipschitz(x: &Element, y: &Element, alpha: f64, p: f64) -> Result<CheckRecord> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("α = {alpha} must be finite and > 1")));
    }
    check_p("p", p)?;
    let (lhs, rhs) = power_lipschitz(x, y, alpha, p)?;
    let params = CheckParams { p: Some(p), alpha: Some(alpha), ..Default::default() };
    Ok(CheckRecord::explicit(LemmaId::AlphaLipschitz, params, lhs, rhs, 3.0 * alpha))
}

/// `‖[x^θ, b]‖_{p/θ} ≤ 2^θ ‖b‖∞^{1−θ} ‖[x, b]‖_p^θ`.
pub fn check_commutator_up(x: &Element, b: &Element, theta: f64, p: f64) -> Result<CheckRecord> {
    check_theta(theta)?;
    check_p("p", p)?;
    x.check_same_shape(b)?;
    let lhs = norm(&power_pos(x, theta)?.commutator(b), p / theta)?;
    let rhs = op_norm(b)?.powf(1.0 - theta) * norm(&x.commutator(b), p)?.powf(theta);
    Ok(CheckRecord::explicit(LemmaId::CommutatorUp, theta_params(p, theta), lhs, rhs, 2f64.powf(theta)))
}

/// `‖[x, b]‖_p ≤ (12/θ) ‖x‖_p^{1−θ} ‖[x^θ, b]‖_{p/θ}`.
pub fn check_commutator_down(x: &Element, b: &Element, theta: f64, p: f64) -> Result<CheckRecord> {
    check_theta(theta)?;
    check_p("p", p)?;
    x.check_same_shape(b)?;
    let lhs = norm(&x.commutator(b), p)?;
    let rhs = norm(x, p)?.powf(1.0 - theta) * norm(&power_pos(x, theta)?.commutator(b), p / theta)?;
    Ok(CheckRecord::explicit(LemmaId::CommutatorDown, theta_params(p, theta), lhs, rhs, 12.0 / theta))
}

fn anticommutator(x: &Element, b: &Element, y: &Element) -> Element {
    &(x * b) + &(b * y)
}

/// `‖x^θ b + b y^θ‖_{p/θ}` against `‖b‖∞^{1−θ} ‖xb + by‖_p^θ`.
pub fn check_anticommutator_up(
    x: &Element,
    y: &Element,
    b: &Element,
    theta: f64,
    p: f64,
    cap: f64,
) -> Result<CheckRecord> {
    check_theta(theta)?;
    check_p("p", p)?;
    x.check_same_shape(y)?;
    x.check_same_shape(b)?;
    let lhs = norm(&anticommutator(&power_pos(x, theta)?, b, &power_pos(y, theta)?), p / theta)?;
    let rhs = op_norm(b)?.powf(1.0 - theta) * norm(&anticommutator(x, b, y), p)?.powf(theta);
    Ok(CheckRecord::empirical(LemmaId::AnticommutatorUp, theta_params(p, theta), lhs, rhs, cap))
}

/// `‖xb + by‖_p` against `max(‖x‖_p, ‖y‖_p)^{1−θ} ‖x^θ b + b y^θ‖_{p/θ}`.
pub fn check_anticommutator_down(
    x: &Element,
    y: &Element,
    b: &Element,
    theta: f64,
    p: f64,
    cap: f64,
) -> Result<CheckRecord> {
    check_theta(theta)?;
    check_p("p", p)?;
    x.check_same_shape(y)?;
    x.check_same_shape(b)?;
    let lhs = norm(&anticommutator(x, b, y), p)?;
    let size = norm(x, p)?.max(norm(y, p)?);
    let rhs = size.powf(1.0 - theta) * norm(&anticommutator(&power_pos(x, theta)?, b, &power_pos(y, theta)?), p / theta)?;
    Ok(CheckRecord::empirical(LemmaId::AnticommutatorDown, theta_params(p, theta), lhs, rhs, cap))
}

/// `‖x^θ b + b x^θ‖_{1/θ} ≤ 2 ‖xb + bx‖_1^θ` for `θ ≤ 1/2`, `‖b‖∞ ≤ 1`.
pub fn check_jensen_chain(x: &Element, b: &Element, theta: f64) -> Result<CheckRecord> {
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::Domain(format!("θ = {theta} must lie in (0, 1/2]")));
    }
    x.check_same_shape(b)?;
    let bn = op_norm(b)?;
    if bn > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("‖b‖∞ = {bn} exceeds 1")));
    }
    let xt = power_pos(x, theta)?;
    let lhs = norm(&anticommutator(&xt, b, &xt), 1.0 / theta)?;
    let rhs = norm(&anticommutator(x, b, x), 1.0)?.powf(theta);
    Ok(CheckRecord::explicit(LemmaId::JensenChain, theta_params(1.0, theta), lhs, rhs, 2.0))
}

/// `[M(x), b]` rebuilt from the sign decomposition
/// `[x₊^r, b₊₊] − [x₋^r, b₋₋] + (x₊^r b₊₋ + b₊₋ x₋^r) − (x₋^r b₋₊ + b₋₊ x₊^r)`.
pub fn sign_decomposition(x: &Element, b: &Element, r: f64) -> Result<Element> {
    let parts = pos_neg_parts(x)?;
    let xp = power_pos(&parts.plus, r)?;
    let xm = power_pos(&parts.minus, r)?;
    let (ep, em) = (&parts.e_plus, &parts.e_minus);
    let corner = |e: &Element, f: &Element| &(e * b) * f;
    let (bpp, bpm, bmp, bmm) = (corner(ep, ep), corner(ep, em), corner(em, ep), corner(em, em));
    let mut out = &xp.commutator(&bpp) - &xm.commutator(&bmm);
    out = &out + &anticommutator(&xp, &bpm, &xm);
    out = &out - &anticommutator(&xm, &bmp, &xp);
    Ok(out)
}

/// `‖[M_{p,q}(x), b]‖_q` for self-adjoint `x`, against
/// `‖b‖∞^{1−p/q} ‖[x, b]‖_p^{p/q}` when `q > p` and
/// `(p/q) ‖x‖_p^{p/q−1} ‖[x, b]‖_p` when `p > q`.
///
/// Also records the residual of [`sign_decomposition`] relative to
/// `max(1, ‖[M(x), b]‖)`; a residual above `1e-10` fails the record.
pub fn check_selfadjoint_commutator(x: &Element, b: &Element, p: f64, q: f64, cap: f64) -> Result<CheckRecord> {
    let params = MazurParams::new(p, q)?;
    x.require_hermitian()?;
    x.check_same_shape(b)?;
    let r = params.exponent();
    let comm = mazur_map(x, params)?.commutator(b);
    let lhs = norm(&comm, q)?;
    let base = norm(&x.commutator(b), p)?;
    let rhs = if q > p {
        op_norm(b)?.powf(1.0 - r) * base.powf(r)
    } else if p > q {
        r * norm(x, p)?.powf(r - 1.0) * base
    } else {
        base
    };
    let check_params = CheckParams { p: Some(p), q: Some(q), theta: Some(params.theta()), ..Default::default() };
    let mut rec = CheckRecord::empirical(LemmaId::SelfadjointCommutator, check_params, lhs, rhs, cap);
    let residual = (&sign_decomposition(x, b, r)? - &comm).max_abs() / comm.max_abs().max(1.0);
    rec.identity_residual = Some(residual);
    if !(residual <= IDENTITY_TOL) {
        rec.verdict = Verdict::Fail;
    }
    Ok(rec)
}

/// `‖M_{p,q}(x) − M_{p,q}(y)‖_q` against `‖x − y‖_p^θ` on the unit ball of
/// `L_p`, `θ = min(p/q, 1)`. Pairs with `‖x − y‖_p < 1e-6` are skipped.
pub fn check_main_theorem(x: &Element, y: &Element, p: f64, q: f64, cap: f64) -> Result<CheckRecord> {
    let params = MazurParams::new(p, q)?;
    x.check_same_shape(y)?;
    let x = into_unit_ball(x, p)?;
    let y = into_unit_ball(y, p)?;
    let theta = params.theta();
    let lhs = norm(&(&mazur_map(&x, params)? - &mazur_map(&y, params)?), q)?;
    let dist = norm(&(&x - &y), p)?;
    let rhs = dist.powf(theta);
    let check_params = CheckParams { p: Some(p), q: Some(q), theta: Some(theta), ..Default::default() };
    if dist < THEOREM_MIN_DISTANCE {
        return Ok(CheckRecord::skipped(LemmaId::MainTheorem, check_params, lhs, rhs, Constant::Empirical));
    }
    Ok(CheckRecord::empirical(LemmaId::MainTheorem, check_params, lhs, rhs, cap))
}

/// Randomized suite over grids of exponents and dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub lemmas: Vec<LemmaId>,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub thetas: Vec<f64>,
    pub ps: Vec<f64>,
    pub qs: Vec<f64>,
    pub alphas: Vec<f64>,
    pub empirical_cap: f64,
    /// Keep every record in the report, not only the per-cell summaries.
    pub keep_records: bool,
    pub exec: Exec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            lemmas: LemmaId::SUITE.to_vec(),
            dims: (1..=6).collect(),
            trials: 2000,
            seed: 0,
            thetas: (1..=10).map(|k| k as f64 / 10.0).collect(),
            ps: vec![1.0, 1.5, 2.0, 4.0],
            qs: vec![1.0, 1.1, 1.5, 2.0, 4.0],
            alphas: vec![1.5, 2.7, 4.0],
            empirical_cap: DEFAULT_EMPIRICAL_CAP,
            keep_records: true,
            exec: Exec::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.lemmas.is_empty() {
            return bad("no lemmas selected".into());
        }
        if let Some(l) = self.lemmas.iter().find(|l| !LemmaId::SUITE.contains(l)) {
            return bad(format!("{l} is not part of the randomized suite"));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad("dims must be a nonempty list of positive integers".into());
        }
        if !(self.empirical_cap > 0.0) {
            return bad(format!("empirical cap {} must be positive", self.empirical_cap));
        }
        let needs = |ls: &[LemmaId]| self.lemmas.iter().any(|l| ls.contains(l));
        use LemmaId::*;
        let theta_users = [
            PowerContraction, PowerExpansion, CommutatorUp, CommutatorDown, AnticommutatorUp, AnticommutatorDown,
            JensenChain,
        ];
        if needs(&theta_users) {
            if self.thetas.is_empty() {
                return bad("θ grid is empty".into());
            }
            if let Some(t) = self.thetas.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
                return bad(format!("θ = {t} must lie in (0, 1]"));
            }
        }
        let p_users = [
            PowerContraction, PowerExpansion, AlphaLipschitz, CommutatorUp, CommutatorDown, AnticommutatorUp,
            AnticommutatorDown, SelfadjointCommutator, MainTheorem,
        ];
        if needs(&p_users) {
            if self.ps.is_empty() {
                return bad("p grid is empty".into());
            }
            if let Some(p) = self.ps.iter().find(|&&p| !(p >= 1.0 && p.is_finite())) {
                return bad(format!("p = {p} must be finite and >= 1"));
            }
        }
        if needs(&[SelfadjointCommutator, MainTheorem]) {
            if self.qs.is_empty() {
                return bad("q grid is empty".into());
            }
            if let Some(q) = self.qs.iter().find(|&&q| !(q >= 1.0 && q.is_finite())) {
                return bad(format!("q = {q} must be finite and >= 1"));
            }
        }
        if needs(&[AlphaLipschitz]) {
            if self.alphas.is_empty() {
                return bad("α grid is empty".into());
            }
            if let Some(a) = self.alphas.iter().find(|&&a| !(a > 1.0 && a.is_finite())) {
                return bad(format!("α = {a} must be finite and > 1"));
            }
        }
        Ok(())
    }
}

/// One (lemma, dimension, exponents) combination of the suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub index: usize,
    pub lemma: LemmaId,
    pub dim: usize,
    pub params: CheckParams,
}

/// Cells in report order: lemma, then dimension, then exponents.
pub fn cells(config: &SuiteConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for &lemma in &config.lemmas {
        for &dim in &config.dims {
            let mut push = |params: CheckParams| {
                out.push(Cell { index: out.len(), lemma, dim, params });
            };
            match lemma {
                LemmaId::AlphaLipschitz => {
                    for &p in &config.ps {
                        for &a in &config.alphas {
                            push(CheckParams { p: Some(p), alpha: Some(a), ..Default::default() });
                        }
                    }
                }
                LemmaId::JensenChain => {
                    for &t in config.thetas.iter().filter(|&&t| t <= 0.5) {
                        push(theta_params(1.0, t));
                    }
                }
                LemmaId::SelfadjointCommutator | LemmaId::MainTheorem => {
                    for &p in &config.ps {
                        for &q in &config.qs {
                            let theta = (p / q).min(1.0);
                            push(CheckParams { p: Some(p), q: Some(q), theta: Some(theta), ..Default::default() });
                        }
                    }
                }
                _ => {
                    for &p in &config.ps {
                        for &t in &config.thetas {
                            push(theta_params(p, t));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Inputs of one trial; unused slots are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub x: Element,
    pub y: Option<Element>,
    pub b: Option<Element>,
}

fn random_shape(dim: usize, rng: &mut Rng) -> AlgebraShape {
    if dim >= 2 && rng.uniform() < 0.25 {
        let split = 1 + rng.index(dim - 1);
        let blocks = vec![
            Block { dim: split, weight: rng.log_uniform(0.25, 4.0) },
            Block { dim: dim - split, weight: rng.log_uniform(0.25, 4.0) },
        ];
        AlgebraShape::new(blocks).expect("positive dims and weights")
    } else {
        AlgebraShape::matrix(dim)
    }
}

/// Spectrum with a random overall scale, log-uniform spread over three
/// decades, and each entry zeroed with probability 0.15.
fn random_spectrum(n: usize, rng: &mut Rng, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let l = scale * rng.log_uniform(1e-3, 1.0);
            if rng.uniform() < 0.15 {
                0.0
            } else {
                l
            }
        })
        .collect()
}

fn from_spectra(shape: &AlgebraShape, bases: &[crate::matcore::Mat], spectra: &[Vec<f64>]) -> Result<Element> {
    let blocks = bases.iter().zip(spectra).map(|(u, d)| conjugate_diag(u, d)).collect();
    Element::new(shape.clone(), blocks)
}

/// A positive pair: independent, a small positive perturbation, or commuting.
fn positive_pair(shape: &AlgebraShape, rng: &mut Rng) -> Result<(Element, Element)> {
    let scale = rng.log_uniform(0.1, 10.0);
    let bases: Vec<_> = shape.blocks().iter().map(|b| haar_unitary(b.dim, rng)).collect();
    let spectra: Vec<_> = shape.blocks().iter().map(|b| random_spectrum(b.dim, rng, scale)).collect();
    let x = from_spectra(shape, &bases, &spectra)?;
    let y = match rng.index(3) {
        0 => {
            let other: Vec<_> = shape.blocks().iter().map(|b| haar_unitary(b.dim, rng)).collect();
            let spectra: Vec<_> = shape.blocks().iter().map(|b| random_spectrum(b.dim, rng, scale)).collect();
            from_spectra(shape, &other, &spectra)?
        }
        1 => {
            let eps = scale * rng.log_uniform(1e-6, 1e-1);
            let other: Vec<_> = shape.blocks().iter().map(|b| haar_unitary(b.dim, rng)).collect();
            let spectra: Vec<_> = shape.blocks().iter().map(|b| random_spectrum(b.dim, rng, eps)).collect();
            &x + &from_spectra(shape, &other, &spectra)?
        }
        _ => {
            let spectra: Vec<_> = shape.blocks().iter().map(|b| random_spectrum(b.dim, rng, scale)).collect();
            from_spectra(shape, &bases, &spectra)?
        }
    };
    Ok((x, y))
}

fn self_adjoint(shape: &AlgebraShape, rng: &mut Rng) -> Result<Element> {
    let scale = rng.log_uniform(0.1, 10.0);
    let bases: Vec<_> = shape.blocks().iter().map(|b| haar_unitary(b.dim, rng)).collect();
    let spectra: Vec<_> = shape
        .blocks()
        .iter()
        .map(|b| {
            let mut d = random_spectrum(b.dim, rng, scale);
            for l in &mut d {
                if rng.uniform() < 0.5 {
                    *l = -*l;
                }
            }
            d
        })
        .collect();
    from_spectra(shape, &bases, &spectra)
}

fn contraction(shape: &AlgebraShape, rng: &mut Rng) -> Result<Element> {
    let sa = rng.uniform() < 0.5;
    random_contraction(shape, rng, sa)
}

/// A point of the closed unit `p`-ball.
fn unit_ball_point(shape: &AlgebraShape, rng: &mut Rng, p: f64, self_adjoint: bool) -> Result<Element> {
    let mut g = gaussian_element(shape, rng);
    if self_adjoint {
        g = g.hermitian_part();
    }
    let n = norm(&g, p)?;
    Ok(g.scale(rng.uniform() / n.max(f64::MIN_POSITIVE)))
}

/// A pair in the unit `p`-ball: independent, nearby, or antipodal.
fn unit_ball_pair(shape: &AlgebraShape, rng: &mut Rng, p: f64) -> Result<(Element, Element)> {
    let sa = rng.uniform() < 0.3;
    let x = unit_ball_point(shape, rng, p, sa)?;
    let y = match rng.index(3) {
        0 => unit_ball_point(shape, rng, p, sa)?,
        1 => {
            let step = unit_ball_point(shape, rng, p, sa)?.scale(rng.log_uniform(1e-5, 1e-1));
            let y = &x + &step;
            let n = norm(&y, p)?;
            y.scale(1.0 / n.max(1.0))
        }
        _ => x.scale(-rng.uniform()),
    };
    Ok((x, y))
}

/// Regenerates the inputs of a trial from its seed.
pub fn generate_instance(cell: &Cell, trial_seed: u64) -> Result<Instance> {
    let mut rng = Rng::new(trial_seed);
    let shape = random_shape(cell.dim, &mut rng);
    use LemmaId::*;
    Ok(match cell.lemma {
        PowerContraction | PowerExpansion | AlphaLipschitz => {
            let (x, y) = positive_pair(&shape, &mut rng)?;
            Instance { x, y: Some(y), b: None }
        }
        CommutatorUp | CommutatorDown | JensenChain => {
            let (x, _) = positive_pair(&shape, &mut rng)?;
            Instance { x, y: None, b: Some(contraction(&shape, &mut rng)?) }
        }
        AnticommutatorUp | AnticommutatorDown => {
            let (x, y) = positive_pair(&shape, &mut rng)?;
            Instance { x, y: Some(y), b: Some(contraction(&shape, &mut rng)?) }
        }
        SelfadjointCommutator => {
            let x = self_adjoint(&shape, &mut rng)?;
            Instance { x, y: None, b: Some(contraction(&shape, &mut rng)?) }
        }
        MainTheorem => {
            let (x, y) = unit_ball_pair(&shape, &mut rng, cell.params.p.unwrap_or(1.0))?;
            Instance { x, y: Some(y), b: None }
        }
        HolderSelfTest => return Err(Error::InvalidConfig("holder_self_test is not a suite lemma".into())),
    })
}

fn missing(what: &str) -> Error {
    Error::InvalidConfig(format!("instance is missing {what}"))
}

/// Evaluates the cell's inequality on an instance.
pub fn evaluate(cell: &Cell, inst: &Instance, cap: f64) -> Result<CheckRecord> {
    let prm = &cell.params;
    let p = prm.p.unwrap_or(1.0);
    let theta = prm.theta.unwrap_or(1.0);
    let x = &inst.x;
    let y = || inst.y.as_ref().ok_or_else(|| missing("y"));
    let b = || inst.b.as_ref().ok_or_else(|| missing("b"));
    use LemmaId::*;
    match cell.lemma {
        PowerContraction => check_power_contraction(x, y()?, theta, p),
        PowerExpansion => check_power_expansion(x, y()?, theta, p),
        AlphaLipschitz => check_alpha_lipschitz(x, y()?, prm.alpha.ok_or_else(|| missing("α"))?, p),
        CommutatorUp => check_commutator_up(x, b()?, theta, p),
        CommutatorDown => check_commutator_down(x, b()?, theta, p),
        AnticommutatorUp => check_anticommutator_up(x, y()?, b()?, theta, p, cap),
        AnticommutatorDown => check_anticommutator_down(x, y()?, b()?, theta, p, cap),
        JensenChain => check_jensen_chain(x, b()?, theta),
        SelfadjointCommutator => check_selfadjoint_commutator(x, b()?, p, prm.q.ok_or_else(|| missing("q"))?, cap),
        MainTheorem => check_main_theorem(x, y()?, p, prm.q.ok_or_else(|| missing("q"))?, cap),
        HolderSelfTest => Err(Error::InvalidConfig("holder_self_test is not a suite lemma".into())),
    }
}

fn constant_of(cell: &Cell) -> Constant {
    let theta = cell.params.theta.unwrap_or(1.0);
    match cell.lemma {
        LemmaId::PowerContraction => Constant::Explicit(1.0),
        LemmaId::PowerExpansion => Constant::Explicit(3.0),
        LemmaId::AlphaLipschitz => Constant::Explicit(3.0 * cell.params.alpha.unwrap_or(f64::NAN)),
        LemmaId::CommutatorUp => Constant::Explicit(2f64.powf(theta)),
        LemmaId::CommutatorDown => Constant::Explicit(12.0 / theta),
        LemmaId::JensenChain => Constant::Explicit(2.0),
        _ => Constant::Empirical,
    }
}

/// Runs one trial; evaluation errors become [`Verdict::Error`] records.
pub fn run_trial(cell: &Cell, base_seed: u64, trial: usize, cap: f64) -> CheckRecord {
    let trial_seed = derive_seed(base_seed, &[cell.index as u64, trial as u64]);
    let result = generate_instance(cell, trial_seed).and_then(|inst| {
        let dims = inst.x.shape().blocks().iter().map(|b| b.dim).collect();
        evaluate(cell, &inst, cap).map(|r| (r, dims))
    });
    let (rec, dims) = match result {
        Ok(pair) => pair,
        Err(e) => (CheckRecord::errored(cell.lemma, cell.params, constant_of(cell), &e), vec![cell.dim]),
    };
    rec.with_digest(InputDigest { base_seed, cell: cell.index, trial, trial_seed, dims })
}

/// Re-evaluates the trial a digest points to.
pub fn replay(cell: &Cell, digest: &InputDigest, cap: f64) -> Result<CheckRecord> {
    let inst = generate_instance(cell, digest.trial_seed)?;
    Ok(evaluate(cell, &inst, cap)?.with_digest(digest.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell: Cell,
    pub constant: Constant,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub errors: usize,
    pub max_ratio: Option<f64>,
    /// Trial attaining `max_ratio`.
    pub worst: Option<InputDigest>,
    pub worst_lhs: Option<f64>,
    pub worst_rhs: Option<f64>,
    pub max_identity_residual: Option<f64>,
    /// First error message, if any trial errored.
    pub first_error: Option<String>,
}

impl CellSummary {
    fn new(cell: Cell) -> Self {
        let constant = constant_of(&cell);
        CellSummary {
            cell,
            constant,
            trials: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            errors: 0,
            max_ratio: None,
            worst: None,
            worst_lhs: None,
            worst_rhs: None,
            max_identity_residual: None,
            first_error: None,
        }
    }

    fn absorb(&mut self, rec: &CheckRecord) {
        self.trials += 1;
        match rec.verdict {
            Verdict::Pass => self.passed += 1,
            Verdict::Fail => self.failed += 1,
            Verdict::SkippedDegenerate => self.skipped += 1,
            Verdict::Error => {
                self.errors += 1;
                if self.first_error.is_none() {
                    self.first_error = rec.error.clone();
                }
            }
        }
        if let Some(r) = rec.ratio {
            if self.max_ratio.is_none_or(|m| r > m) {
                self.max_ratio = Some(r);
                self.worst = rec.digest.clone();
                self.worst_lhs = Some(rec.lhs);
                self.worst_rhs = Some(rec.rhs_structural);
            }
        }
        if let Some(res) = rec.identity_residual {
            self.max_identity_residual = Some(self.max_identity_residual.map_or(res, |m: f64| m.max(res)));
        }
    }

    /// Whether a failure here violates an explicit constant.
    pub fn hard_failures(&self) -> usize {
        match self.constant {
            Constant::Explicit(_) => self.failed,
            Constant::Empirical => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub cells: Vec<CellSummary>,
    /// Violations of explicit constants (including failed identities).
    pub failures: usize,
    /// Empirical ratios above the configured cap.
    pub empirical_exceedances: usize,
    pub errors: usize,
    /// Largest ratio seen per lemma.
    pub max_ratios: BTreeMap<LemmaId, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub records: Vec<CheckRecord>,
    pub summary: SuiteSummary,
}

/// Runs every cell of the suite. Records are ordered by (cell, trial) and
/// do not depend on scheduling.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for cell in cells(config) {
        let recs = map_range(config.exec, config.trials, |t| run_trial(&cell, config.seed, t, config.empirical_cap));
        let mut s = CellSummary::new(cell);
        for r in &recs {
            s.absorb(r);
        }
        summaries.push(s);
        if config.keep_records {
            records.extend(recs);
        }
    }
    let mut failures = 0;
    let mut empirical_exceedances = 0;
    let mut errors = 0;
    let mut max_ratios = BTreeMap::new();
    for s in &summaries {
        errors += s.errors;
        match s.constant {
            Constant::Explicit(_) => failures += s.failed,
            Constant::Empirical => {
                // identity failures count as hard failures
                let identity_failed = s.max_identity_residual.is_some_and(|r| !(r <= IDENTITY_TOL));
                if identity_failed {
                    failures += s.failed;
                } else {
                    empirical_exceedances += s.failed;
                }
            }
        }
        if let Some(r) = s.max_ratio {
            let e = max_ratios.entry(s.cell.lemma).or_insert(r);
            *e = e.max(r);
        }
    }
    Ok(SuiteReport {
        config: config.clone(),
        records,
        summary: SuiteSummary { cells: summaries, failures, empirical_exceedances, errors, max_ratios },
    })
}
