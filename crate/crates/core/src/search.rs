//! Adversarial lower bounds on the Hölder constant of Mazur maps.
//!
//! [`maximize`] hill-climbs `‖M(x) − M(y)‖_q / ‖x − y‖_p^θ` over pairs in the
//! closed unit ball of `L_p`; every reported ratio is attained by the pair
//! stored next to it, so it is a certified lower bound on `c_{p,q}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::rng::gaussian_element;
use crate::matcore::{derive_seed, hermitian_eig, AlgebraShape, Element, Rng};
use crate::lemmas::THEOREM_MIN_DISTANCE;
use crate::mazur::{into_unit_ball, mazur_map, MazurParams};
use crate::par::{map_range, Exec};
use crate::schatten::norm;

/// `‖M_{p,q}(x) − M_{p,q}(y)‖_q / ‖x − y‖_p^θ` for unit-ball `x`, `y`.
pub fn holder_ratio(x: &Element, y: &Element, params: MazurParams) -> Result<f64> {
    x.check_same_shape(y)?;
    let x = into_unit_ball(x, params.p)?;
    let y = into_unit_ball(y, params.p)?;
    ratio_unchecked(&x, &y, params)
}

fn ratio_unchecked(x: &Element, y: &Element, params: MazurParams) -> Result<f64> {
    let distance = norm(&(x - y), params.p)?;
    if distance < THEOREM_MIN_DISTANCE {
        return Err(Error::DegeneratePair { distance });
    }
    if params.is_identity() {
        return Ok(1.0);
    }
    let num = norm(&(&mazur_map(x, params)? - &mazur_map(y, params)?), params.q)?;
    Ok(num / distance.powf(params.theta()))
}

/// Region the search is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    General,
    SelfAdjoint,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub restarts: usize,
    pub iters_per_restart: usize,
}

impl Budget {
    pub fn new(restarts: usize, iters_per_restart: usize) -> Result<Self> {
        if restarts == 0 || iters_per_restart == 0 {
            return Err(Error::InvalidConfig("search budget must be positive".into()));
        }
        Ok(Budget { restarts, iters_per_restart })
    }
}

/// Proposals rejected in a row before the step is halved.
pub const PATIENCE: usize = 20;

/// Chains stop once the step falls below this.
pub const MIN_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryPoint {
    pub restart: usize,
    pub iteration: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub params: MazurParams,
    pub cone: Cone,
    pub best_ratio: f64,
    #[serde(skip)]
    pub best_pair: (Element, Element),
    /// Proposals evaluated over all restarts.
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Every accepted improvement, in order.
    pub history: Vec<HistoryPoint>,
}

fn project(x: Element, p: f64, cone: Cone) -> Result<Element> {
    let x = match cone {
        Cone::General => x,
        Cone::SelfAdjoint => x.hermitian_part(),
        Cone::Positive => {
            let d = hermitian_eig(&x.hermitian_part())?;
            d.apply(|l| l.max(0.0))
        }
    };
    let n = norm(&x, p)?;
    Ok(if n > 1.0 { x.scale(1.0 / n) } else { x })
}

fn direction(shape: &AlgebraShape, rng: &mut Rng, cone: Cone) -> Element {
    let g = gaussian_element(shape, rng);
    match cone {
        Cone::General => g,
        _ => g.hermitian_part(),
    }
}

fn start_point(shape: &AlgebraShape, rng: &mut Rng, p: f64, cone: Cone) -> Result<Element> {
    let g = direction(shape, rng, cone);
    let g = match cone {
        Cone::Positive => (&g * &g.adjoint()).hermitian_part(),
        _ => g,
    };
    let n = norm(&g, p)?;
    Ok(g.scale(rng.uniform() / n.max(f64::MIN_POSITIVE)))
}

struct Chain {
    best: f64,
    pair: (Element, Element),
    iterations: usize,
    history: Vec<HistoryPoint>,
}

fn climb(params: MazurParams, shape: &AlgebraShape, cone: Cone, iters: usize, restart: usize, seed: u64) -> Result<Chain> {
    let mut rng = Rng::new(seed);
    let p = params.p;
    // a start with a degenerate pair is redrawn
    let (mut x, mut y, mut best) = loop {
        let x = start_point(shape, &mut rng, p, cone)?;
        let y = start_point(shape, &mut rng, p, cone)?;
        match ratio_unchecked(&x, &y, params) {
            Ok(r) => break (x, y, r),
            Err(Error::DegeneratePair { .. }) => continue,
            Err(e) => return Err(e),
        }
    };
    let mut history = vec![HistoryPoint { restart, iteration: 0, ratio: best }];
    let mut step = 0.3 / shape.total_dim() as f64;
    let mut rejections = 0;
    let mut iterations = 0;
    for it in 1..=iters {
        if step < MIN_STEP {
            break;
        }
        iterations = it;
        let xp = project(&x + &direction(shape, &mut rng, cone).scale(step), p, cone)?;
        let yp = project(&y + &direction(shape, &mut rng, cone).scale(step), p, cone)?;
        let accepted = match ratio_unchecked(&xp, &yp, params) {
            Ok(r) if r > best => {
                best = r;
                x = xp;
                y = yp;
                history.push(HistoryPoint { restart, iteration: it, ratio: r });
                true
            }
            Ok(_) | Err(Error::DegeneratePair { .. }) => false,
            Err(e) => return Err(e),
        };
        if accepted {
            rejections = 0;
        } else {
            rejections += 1;
            if rejections == PATIENCE {
                step *= 0.5;
                rejections = 0;
            }
        }
    }
    Ok(Chain { best, pair: (x, y), iterations, history })
}

/// Random-restart hill climbing. Restarts use seeds derived from `seed` and
/// may run in parallel; the result does not depend on scheduling.
pub fn maximize(
    params: MazurParams,
    shape: &AlgebraShape,
    budget: Budget,
    cone: Cone,
    seed: u64,
    exec: Exec,
) -> Result<SearchResult> {
    let chains = map_range(exec, budget.restarts, |r| {
        climb(params, shape, cone, budget.iters_per_restart, r, derive_seed(seed, &[r as u64]))
    });
    let mut best: Option<Chain> = None;
    let mut iterations = 0;
    let mut history = Vec::new();
    for chain in chains {
        let chain = chain?;
        iterations += chain.iterations;
        history.extend_from_slice(&chain.history);
        if best.as_ref().is_none_or(|b| chain.best > b.best) {
            best = Some(chain);
        }
    }
    let best = best.expect("at least one restart");
    Ok(SearchResult {
        params,
        cone,
        best_ratio: best.best,
        best_pair: best.pair,
        iterations,
        restarts: budget.restarts,
        seed,
        history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub q: f64,
    pub best_ratio: f64,
    pub seed: u64,
    pub iters: usize,
}

/// One [`maximize`] per `(p, q)` cell, in grid order. Cell `k` uses the seed
/// `derive_seed(seed, [k])`.
pub fn sweep(
    ps: &[f64],
    qs: &[f64],
    shape: &AlgebraShape,
    budget: Budget,
    cone: Cone,
    seed: u64,
    exec: Exec,
) -> Result<Vec<(SweepRow, SearchResult)>> {
    if ps.is_empty() || qs.is_empty() {
        return Err(Error::InvalidConfig("sweep grids must be nonempty".into()));
    }
    let mut out = Vec::with_capacity(ps.len() * qs.len());
    for &p in ps {
        for &q in qs {
            let params = MazurParams::new(p, q)?;
            let cell_seed = derive_seed(seed, &[out.len() as u64]);
            let res = maximize(params, shape, budget, cone, cell_seed, exec)?;
            let row = SweepRow { p, q, best_ratio: res.best_ratio, seed: cell_seed, iters: res.iterations };
            out.push((row, res));
        }
    }
    Ok(out)
}

/// Brute-force maximum of the scalar ratio `|M(x) − M(y)| / |x − y|^θ` over
/// a uniform grid of real `x, y ∈ [−1, 1]` with `n` points per axis.
pub fn scalar_grid_optimum(params: MazurParams, n: usize) -> f64 {
    let r = params.exponent();
    let theta = params.theta();
    let m = |x: f64| x.signum() * x.abs().powf(r);
    let pts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let mut best = 0.0f64;
    for &x in &pts {
        for &y in &pts {
            let d = (x - y).abs();
            if d >= THEOREM_MIN_DISTANCE {
                best = best.max((m(x) - m(y)).abs() / d.powf(theta));
            }
        }
    }
    best
}
