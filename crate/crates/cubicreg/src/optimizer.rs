//! Iteration loops: cubic-regularized Newton (CR), inexact CR with verified
//! perturbations, and a gradient-descent baseline. Each run emits a full
//! [`Trace`] of per-iterate records.
//!
//! Runs are single-threaded and deterministic: identical configuration and
//! seed produce bitwise-identical traces. The objective is re-calibrated for
//! the sublevel set of the start point, so the Lipschitz bounds recorded with
//! the trace are the ones that were actually in force.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::objectives::{Objective, ObjectiveError};
use crate::rng::{SeedStream, STREAM_INEXACT};
use crate::subproblem::{self, CubicModel, SubproblemError, SubproblemSolution};
use crate::vecmath;

/// A step at or below `1e2·ε·max(1, ‖x_k‖)` counts as a floating-point
/// stall; finite termination is recorded rather than grinding at noise
/// level.
const FINITE_STOP_FACTOR: f64 = 1e2 * f64::EPSILON;
/// Retry cap for the inexact-CR shrink loop.
const INEXACT_MAX_RETRIES: u32 = 20;
/// Consecutive objective increases before a GD run aborts as divergent.
const GD_DIVERGENCE_RUN: usize = 10;

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("start point has dimension {got}, objective has dimension {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("start point must be finite")]
    NonFiniteStart,
    #[error("invalid config: {0}")]
    BadConfig(String),
    #[error("subproblem solve failed at iterate {k}: {source}")]
    SubproblemAt { k: usize, source: SubproblemError },
    #[error("eigendecomposition failed at iterate {k}: {source}")]
    EigAt { k: usize, source: linalg::LinalgError },
    #[error("inexact perturbation retries exhausted at iterate {k}; c1/c2 too aggressive near convergence")]
    RetryExhausted { k: usize },
    #[error("gradient descent diverged: objective increased for {GD_DIVERGENCE_RUN} consecutive steps up to iterate {k}")]
    Diverged { k: usize },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Cr,
    InexactCr,
    Gd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MuTol,
    GradTol,
    MaxIter,
    FiniteStop,
}

/// CR loop configuration. `m = None` resolves to the objective's
/// Hessian-Lipschitz bound when positive, else 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrConfig {
    pub m: Option<f64>,
    pub mu_tol: f64,
    pub max_iter: usize,
    pub record_x: bool,
}

impl Default for CrConfig {
    fn default() -> Self {
        Self { m: None, mu_tol: 1e-9, max_iter: 10_000, record_x: true }
    }
}

impl CrConfig {
    fn validate(&self) -> Result<(), OptimizerError> {
        if let Some(m) = self.m {
            if !(m > 0.0 && m.is_finite()) {
                return Err(OptimizerError::BadConfig(format!("M must be positive, got {m}")));
            }
        }
        if !(self.mu_tol > 0.0) {
            return Err(OptimizerError::BadConfig(format!("mu_tol must be positive, got {}", self.mu_tol)));
        }
        if self.max_iter == 0 {
            return Err(OptimizerError::BadConfig("max_iter must be positive".into()));
        }
        Ok(())
    }

    /// The cubic penalty this config resolves to for a given objective.
    pub fn resolved_m(&self, obj: &Objective) -> f64 {
        self.m.unwrap_or_else(|| {
            let l = obj.hessian_lipschitz();
            if l > 0.0 {
                l
            } else {
                1.0
            }
        })
    }
}

/// Inexact CR: seeded gradient/Hessian perturbations that must satisfy
/// `‖δg‖ ≤ c1‖s‖²` and `‖ΔH·s‖ ≤ c2‖s‖²` against the step actually taken.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InexactConfig {
    pub base: CrConfig,
    pub c1: f64,
    pub c2: f64,
    pub seed: u64,
    /// Factor the perturbation shrinks by when the a-posteriori check fails.
    pub retry_shrink: f64,
}

impl InexactConfig {
    fn validate(&self) -> Result<(), OptimizerError> {
        self.base.validate()?;
        if !(self.c1 >= 0.0 && self.c1.is_finite() && self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(OptimizerError::BadConfig("c1 and c2 must be non-negative".into()));
        }
        if !(self.retry_shrink > 0.0 && self.retry_shrink < 1.0) {
            return Err(OptimizerError::BadConfig(format!(
                "retry_shrink must lie in (0,1), got {}",
                self.retry_shrink
            )));
        }
        Ok(())
    }
}

/// Gradient-descent baseline; `step_size` should not exceed the reciprocal of
/// the objective's gradient-Lipschitz bound on the level set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GdConfig {
    pub step_size: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl GdConfig {
    fn validate(&self) -> Result<(), OptimizerError> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(OptimizerError::BadConfig(format!("step_size must be positive, got {}", self.step_size)));
        }
        if !(self.grad_tol > 0.0) {
            return Err(OptimizerError::BadConfig("grad_tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(OptimizerError::BadConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// One row of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub lambda_min: f64,
    /// `‖x_k - x_{k-1}‖`; 0 at k = 0.
    pub step_norm: f64,
    pub mu: f64,
    /// Decrease of the cubic model solved at this iterate; absent on the
    /// final record and on GD traces.
    pub model_decrease: Option<f64>,
    /// Distance to the solution set when an oracle is available.
    pub dist_omega: Option<f64>,
    pub x: Option<Vec<f64>>,
}

/// Verified inexactness of one accepted inexact-CR step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InexactStepInfo {
    pub retries: u32,
    /// `‖δg‖ / (c1‖s‖²)`; 0 when no gradient perturbation was injected.
    pub grad_ratio: f64,
    /// `‖ΔH·s‖ / (c2‖s‖²)`; 0 when no Hessian perturbation was injected.
    pub hess_ratio: f64,
}

/// Snapshot of the configuration a trace was produced with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub algorithm: Algorithm,
    /// Resolved cubic penalty (also the one `mu` was recorded with for GD).
    pub m: f64,
    /// Hessian-Lipschitz bound of the calibrated objective.
    pub l_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retry_shrink: Option<f64>,
}

/// Ordered per-iterate records of one run plus run metadata.
#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<IterateRecord>,
    pub objective_name: String,
    pub algorithm: Algorithm,
    pub config: ConfigSnapshot,
    pub termination: Termination,
    pub f_star: Option<f64>,
    /// Per accepted step, parallel to steps taken (length = records - 1);
    /// present only for inexact-CR runs.
    pub inexact: Option<Vec<InexactStepInfo>>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_record(&self) -> &IterateRecord {
        self.records.last().expect("trace has at least one record")
    }

    /// `f(x_k) - f*` when the limit value is known.
    pub fn f_gap(&self, k: usize) -> Option<f64> {
        self.f_star.map(|fs| self.records[k].f - fs)
    }

    pub fn step_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.step_norm).collect()
    }
}

/// Second-order stationarity gap
/// `μ = max{ √(2‖∇f‖/(L+M)), -2λ_min/(2L+M) }`; zero exactly at second-order
/// stationary points.
pub fn mu(grad_norm: f64, lambda_min: f64, l: f64, m: f64) -> f64 {
    debug_assert!(l >= 0.0 && m > 0.0 && grad_norm >= 0.0);
    let grad_branch = (2.0 / (l + m) * grad_norm).sqrt();
    let curv_branch = -2.0 / (2.0 * l + m) * lambda_min;
    grad_branch.max(curv_branch)
}

fn check_start(obj: &Objective, x0: &[f64]) -> Result<(), OptimizerError> {
    if x0.len() != obj.dim() {
        return Err(OptimizerError::DimMismatch { expected: obj.dim(), got: x0.len() });
    }
    if !vecmath::all_finite(x0) {
        return Err(OptimizerError::NonFiniteStart);
    }
    Ok(())
}

struct Evaluated {
    f: f64,
    grad: Vec<f64>,
    hess: crate::linalg::SymmetricMatrix,
    grad_norm: f64,
    lambda_min: f64,
    mu: f64,
}

fn evaluate(obj: &Objective, x: &[f64], k: usize, l: f64, m: f64) -> Result<Evaluated, OptimizerError> {
    let f = obj.value(x);
    let grad = obj.gradient(x);
    let hess = obj.hessian(x);
    let lambda_min =
        linalg::min_eigenvalue(&hess).map_err(|source| OptimizerError::EigAt { k, source })?;
    let grad_norm = vecmath::norm(&grad);
    Ok(Evaluated { f, grad_norm, lambda_min, mu: mu(grad_norm, lambda_min, l, m), grad, hess })
}

fn make_record(obj: &Objective, x: &[f64], k: usize, step_norm: f64, ev: &Evaluated, record_x: bool) -> IterateRecord {
    IterateRecord {
        k,
        f: ev.f,
        grad_norm: ev.grad_norm,
        lambda_min: ev.lambda_min,
        step_norm,
        mu: ev.mu,
        model_decrease: None,
        dist_omega: obj.solution_set().map(|o| o.distance_to_set(x)),
        x: record_x.then(|| x.to_vec()),
    }
}

/// Runs exact CR from `x0`: each step globally minimizes the cubic model at
/// the current iterate. Terminates when `μ ≤ mu_tol`, when the step stalls at
/// the floating-point floor, or at `max_iter` steps.
pub fn run_cr(obj: &Objective, x0: &[f64], cfg: &CrConfig) -> Result<Trace, OptimizerError> {
    cfg.validate()?;
    run_cr_impl(obj, x0, cfg, None)
}

/// Runs inexact CR: before each solve a seeded gradient perturbation of norm
/// ≤ `c1·(previous step)²` and a rank-one Hessian perturbation of operator
/// norm ≤ `c2·(previous step)` are injected; after solving, the inexactness
/// criteria are re-checked against the actual step and the perturbation is
/// shrunk and re-solved on violation (cap 20). The first iterate uses zero
/// perturbation. With `c1 = c2 = 0` the trace is bitwise identical to
/// [`run_cr`].
pub fn run_inexact_cr(obj: &Objective, x0: &[f64], cfg: &InexactConfig) -> Result<Trace, OptimizerError> {
    cfg.validate()?;
    run_cr_impl(obj, x0, &cfg.base, Some(cfg))
}

fn run_cr_impl(
    obj: &Objective,
    x0: &[f64],
    cfg: &CrConfig,
    inexact: Option<&InexactConfig>,
) -> Result<Trace, OptimizerError> {
    check_start(obj, x0)?;
    let obj = obj.clone().calibrated_for(x0)?;
    let l = obj.hessian_lipschitz();
    let m = cfg.resolved_m(&obj);

    let mut rng = inexact.map(|c| SeedStream::new(c.seed, STREAM_INEXACT));
    let mut x = x0.to_vec();
    let mut prev_step = 0.0f64;
    let mut stalled = false;
    let mut records: Vec<IterateRecord> = Vec::new();
    let mut infos: Vec<InexactStepInfo> = Vec::new();

    let termination = loop {
        let k = records.len();
        let ev = evaluate(&obj, &x, k, l, m)?;
        records.push(make_record(&obj, &x, k, prev_step, &ev, cfg.record_x));

        if ev.mu <= cfg.mu_tol {
            break Termination::MuTol;
        }
        if stalled {
            break Termination::FiniteStop;
        }
        if k == cfg.max_iter {
            break Termination::MaxIter;
        }

        let x_norm = vecmath::norm(&x);
        let (sol, info) = match (inexact, &mut rng) {
            (Some(icfg), Some(rng)) => solve_perturbed(&ev, m, prev_step, icfg, rng, k)?,
            _ => {
                let model = CubicModel::new(ev.grad.clone(), ev.hess.clone(), m)
                    .map_err(|source| OptimizerError::SubproblemAt { k, source })?;
                let sol = subproblem::solve_exact(&model, subproblem::DEFAULT_TOL)
                    .map_err(|source| OptimizerError::SubproblemAt { k, source })?;
                (sol, None)
            }
        };
        records.last_mut().unwrap().model_decrease = Some(sol.model_decrease);
        if let Some(info) = info {
            infos.push(info);
        }
        for (xi, si) in x.iter_mut().zip(&sol.step) {
            *xi += si;
        }
        prev_step = sol.radius;
        stalled = prev_step <= FINITE_STOP_FACTOR * x_norm.max(1.0);
    };

    Ok(Trace {
        records,
        objective_name: obj.name().to_string(),
        algorithm: if inexact.is_some() { Algorithm::InexactCr } else { Algorithm::Cr },
        config: ConfigSnapshot {
            algorithm: if inexact.is_some() { Algorithm::InexactCr } else { Algorithm::Cr },
            m,
            l_bound: l,
            step_size: None,
            mu_tol: Some(cfg.mu_tol),
            grad_tol: None,
            max_iter: cfg.max_iter,
            c1: inexact.map(|c| c.c1),
            c2: inexact.map(|c| c.c2),
            seed: inexact.map(|c| c.seed),
            retry_shrink: inexact.map(|c| c.retry_shrink),
        },
        termination,
        f_star: obj.f_star(),
        inexact: inexact.map(|_| infos),
    })
}

fn solve_perturbed(
    ev: &Evaluated,
    m: f64,
    prev_step: f64,
    icfg: &InexactConfig,
    rng: &mut SeedStream,
    k: usize,
) -> Result<(SubproblemSolution, Option<InexactStepInfo>), OptimizerError> {
    let d = ev.grad.len();
    let g_budget = icfg.c1 * prev_step * prev_step;
    let h_budget = icfg.c2 * prev_step;

    // Zero budget (k = 0, or c1 = c2 = 0): take the exact path so traces
    // stay bitwise identical to run_cr.
    if g_budget == 0.0 && h_budget == 0.0 {
        let model = CubicModel::new(ev.grad.clone(), ev.hess.clone(), m)
            .map_err(|source| OptimizerError::SubproblemAt { k, source })?;
        let sol = subproblem::solve_exact(&model, subproblem::DEFAULT_TOL)
            .map_err(|source| OptimizerError::SubproblemAt { k, source })?;
        return Ok((sol, Some(InexactStepInfo { retries: 0, grad_ratio: 0.0, hess_ratio: 0.0 })));
    }

    let g_draw = (g_budget > 0.0).then(|| (rng.unit_vector(d), rng.unit()));
    let h_draw = (h_budget > 0.0).then(|| (rng.unit_vector(d), 2.0 * rng.unit() - 1.0));

    let mut dg_norm = g_draw.as_ref().map_or(0.0, |(_, u)| g_budget * u);
    let mut sigma = h_draw.as_ref().map_or(0.0, |(_, u)| h_budget * u);

    for retry in 0..=INEXACT_MAX_RETRIES {
        let mut g = ev.grad.clone();
        if let Some((dir, _)) = &g_draw {
            for (gi, di) in g.iter_mut().zip(dir) {
                *gi += dg_norm * di;
            }
        }
        let h = match &h_draw {
            Some((v, _)) => ev.hess.add_rank_one(sigma, v),
            None => ev.hess.clone(),
        };
        let model =
            CubicModel::new(g, h, m).map_err(|source| OptimizerError::SubproblemAt { k, source })?;
        let sol = subproblem::solve_exact(&model, subproblem::DEFAULT_TOL)
            .map_err(|source| OptimizerError::SubproblemAt { k, source })?;

        let s2 = sol.radius * sol.radius;
        let hess_dev = match &h_draw {
            Some((v, _)) => sigma.abs() * vecmath::dot(v, &sol.step).abs(),
            None => 0.0,
        };
        let slack = 1.0 + 1e-12;
        let g_ok = dg_norm <= icfg.c1 * s2 * slack;
        let h_ok = hess_dev <= icfg.c2 * s2 * slack;
        if g_ok && h_ok {
            let grad_ratio = if icfg.c1 > 0.0 && s2 > 0.0 { dg_norm / (icfg.c1 * s2) } else { 0.0 };
            let hess_ratio = if icfg.c2 > 0.0 && s2 > 0.0 { hess_dev / (icfg.c2 * s2) } else { 0.0 };
            return Ok((sol, Some(InexactStepInfo { retries: retry, grad_ratio, hess_ratio })));
        }
        dg_norm *= icfg.retry_shrink;
        sigma *= icfg.retry_shrink;
    }
    Err(OptimizerError::RetryExhausted { k })
}

/// Gradient descent `x_{k+1} = x_k - step_size·∇f(x_k)`. The spectral data
/// (`λ_min`, `μ`) is recorded for diagnostics even though GD does not use it;
/// `μ` uses the same default cubic penalty rule as CR. Aborts with an error
/// if the objective increases for 10 consecutive steps.
pub fn run_gd(obj: &Objective, x0: &[f64], cfg: &GdConfig) -> Result<Trace, OptimizerError> {
    cfg.validate()?;
    check_start(obj, x0)?;
    let obj = obj.clone().calibrated_for(x0)?;
    let l = obj.hessian_lipschitz();
    let m_for_mu = if l > 0.0 { l } else { 1.0 };

    let mut x = x0.to_vec();
    let mut prev_step = 0.0f64;
    let mut increases = 0usize;
    let mut prev_f = f64::INFINITY;
    let mut records: Vec<IterateRecord> = Vec::new();

    let termination = loop {
        let k = records.len();
        let ev = evaluate(&obj, &x, k, l, m_for_mu)?;
        if ev.f > prev_f {
            increases += 1;
            if increases >= GD_DIVERGENCE_RUN {
                return Err(OptimizerError::Diverged { k });
            }
        } else {
            increases = 0;
        }
        prev_f = ev.f;
        records.push(make_record(&obj, &x, k, prev_step, &ev, true));

        if ev.grad_norm <= cfg.grad_tol {
            break Termination::GradTol;
        }
        if k == cfg.max_iter {
            break Termination::MaxIter;
        }

        for (xi, gi) in x.iter_mut().zip(&ev.grad) {
            *xi -= cfg.step_size * gi;
        }
        prev_step = cfg.step_size * ev.grad_norm;
    };

    Ok(Trace {
        records,
        objective_name: obj.name().to_string(),
        algorithm: Algorithm::Gd,
        config: ConfigSnapshot {
            algorithm: Algorithm::Gd,
            m: m_for_mu,
            l_bound: l,
            step_size: Some(cfg.step_size),
            mu_tol: None,
            grad_tol: Some(cfg.grad_tol),
            max_iter: cfg.max_iter,
            c1: None,
            c2: None,
            seed: None,
            retry_shrink: None,
        },
        termination,
        f_star: obj.f_star(),
        inexact: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use crate::objectives;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(0.0, 0.7, 1.0, 1.0), 0.0);
        assert!(close(mu(0.5, 1.0, 1.0, 1.0), 0.5f64.sqrt(), 1e-15));
        assert!(close(mu(0.0, -0.3, 1.0, 1.0), 0.2, 1e-15));
    }

    #[test]
    fn mu_zero_iff_second_order_stationary() {
        assert_eq!(mu(0.0, 0.0, 2.0, 3.0), 0.0);
        assert!(mu(1e-30, 0.0, 2.0, 3.0) > 0.0);
        assert!(mu(0.0, -1e-30, 2.0, 3.0) > 0.0);
    }

    #[test]
    fn cr_one_dimensional_quadratic_first_step() {
        // f = x²/2, x0 = 1, M = 1 → x₁ = 2 - √3
        let obj = objectives::quadratic(SymmetricMatrix::identity(1), vec![0.0]).unwrap();
        let cfg = CrConfig { m: Some(1.0), mu_tol: 1e-9, max_iter: 50, record_x: true };
        let trace = run_cr(&obj, &[1.0], &cfg).unwrap();
        let x1 = trace.records[1].x.as_ref().unwrap()[0];
        assert!(close(x1, 2.0 - 3.0_f64.sqrt(), 1e-10), "x1 = {x1}");
        assert_eq!(trace.termination, Termination::MuTol);
    }

    #[test]
    fn cr_terminates_immediately_at_stationary_point() {
        let obj = objectives::quadratic(SymmetricMatrix::identity(2), vec![0.0, 0.0]).unwrap();
        let trace = run_cr(&obj, &[0.0, 0.0], &CrConfig::default()).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.termination, Termination::MuTol);
        assert_eq!(trace.records[0].step_norm, 0.0);
        assert_eq!(trace.records[0].model_decrease, None);
    }

    #[test]
    fn cr_norm_power_three_is_exactly_geometric() {
        let obj = objectives::norm_power(3.0, 1).unwrap();
        let cfg = CrConfig { m: None, mu_tol: 1e-9, max_iter: 200, record_x: true };
        let trace = run_cr(&obj, &[1.0], &cfg).unwrap();
        assert!(trace.len() > 20);
        let c = 2.0 - 2.0_f64.sqrt();
        for pair in trace.records.windows(2) {
            let x0 = pair[0].x.as_ref().unwrap()[0];
            let x1 = pair[1].x.as_ref().unwrap()[0];
            if x0 <= 0.0 {
                break;
            }
            assert!(close(x1 / x0, c, 1e-10), "ratio {} at k={}", x1 / x0, pair[0].k);
        }
    }

    #[test]
    fn cr_trace_is_monotone_and_bounded_by_dynamics() {
        let obj = objectives::norm_power(4.0, 5).unwrap();
        let mut x0 = vec![0.0; 5];
        x0[0] = 0.6;
        x0[3] = -0.8;
        let cfg = CrConfig { m: None, mu_tol: 1e-8, max_iter: 500, record_x: true };
        let trace = run_cr(&obj, &x0, &cfg).unwrap();
        let l = trace.config.l_bound;
        let m = trace.config.m;
        for pair in trace.records.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let s = b.step_norm;
            assert!(b.f - a.f <= -m / 12.0 * s.powi(3) + 1e-10 * a.f.abs().max(1.0));
            assert!(b.grad_norm <= (l + m) / 2.0 * s * s + 1e-10);
            assert!(-b.lambda_min <= (2.0 * l + m) / 2.0 * s + 1e-10);
            assert!(b.mu <= s + 1e-10);
        }
    }

    #[test]
    fn gd_identity_quadratic_halves_each_step() {
        let obj = objectives::quadratic(SymmetricMatrix::identity(2), vec![0.0, 0.0]).unwrap();
        let cfg = GdConfig { step_size: 0.5, grad_tol: 1e-10, max_iter: 100 };
        let trace = run_gd(&obj, &[1.0, 0.0], &cfg).unwrap();
        for (k, rec) in trace.records.iter().enumerate().take(20) {
            let x = rec.x.as_ref().unwrap();
            assert!(close(x[0], 0.5f64.powi(k as i32), 1e-15));
            assert_eq!(x[1], 0.0);
        }
    }

    #[test]
    fn gd_stops_at_minimizer() {
        let obj = objectives::quadratic(SymmetricMatrix::identity(2), vec![0.0, 0.0]).unwrap();
        let cfg = GdConfig { step_size: 0.5, grad_tol: 1e-10, max_iter: 100 };
        let trace = run_gd(&obj, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.termination, Termination::GradTol);
    }

    #[test]
    fn gd_divergence_aborts() {
        // step_size 3 > 2/λ on the identity quadratic diverges
        let obj = objectives::quadratic(SymmetricMatrix::identity(1), vec![0.0]).unwrap();
        let cfg = GdConfig { step_size: 3.0, grad_tol: 1e-10, max_iter: 100 };
        assert!(matches!(run_gd(&obj, &[1.0], &cfg), Err(OptimizerError::Diverged { .. })));
    }

    #[test]
    fn gd_descent_inequality_at_exact_step() {
        let obj = objectives::norm_power(4.0, 1).unwrap();
        let cfg = GdConfig { step_size: 1.0 / 12.0, grad_tol: 1e-14, max_iter: 500 };
        let trace = run_gd(&obj, &[1.0], &cfg).unwrap();
        for pair in trace.records.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let s = b.step_norm;
            let decrease = a.f - b.f;
            assert!(decrease >= s * s / (2.0 * cfg.step_size) - 1e-10 * a.f.abs().max(1.0));
        }
    }

    #[test]
    fn inexact_zero_perturbation_is_bitwise_exact_cr() {
        let obj = objectives::norm_power(4.0, 3).unwrap();
        let x0 = [0.5, -0.3, 0.8];
        let cr_cfg = CrConfig { m: None, mu_tol: 1e-8, max_iter: 100, record_x: true };
        let exact = run_cr(&obj, &x0, &cr_cfg).unwrap();
        let inexact_cfg = InexactConfig {
            base: cr_cfg,
            c1: 0.0,
            c2: 0.0,
            seed: 123,
            retry_shrink: 0.5,
        };
        let perturbed = run_inexact_cr(&obj, &x0, &inexact_cfg).unwrap();
        assert_eq!(exact.records, perturbed.records);
        assert_eq!(exact.termination, perturbed.termination);
    }

    #[test]
    fn inexact_accepted_steps_satisfy_criteria() {
        let obj = objectives::quadratic(SymmetricMatrix::identity(3), vec![0.0; 3]).unwrap();
        let cfg = InexactConfig {
            base: CrConfig { m: Some(1.0), mu_tol: 1e-6, max_iter: 100, record_x: true },
            c1: 0.1,
            c2: 0.1,
            seed: 7,
            retry_shrink: 0.1,
        };
        let trace = run_inexact_cr(&obj, &[2.0, -1.0, 0.5], &cfg).unwrap();
        assert_eq!(trace.termination, Termination::MuTol);
        assert!(trace.final_record().mu <= 1e-6);
        let infos = trace.inexact.as_ref().unwrap();
        assert_eq!(infos.len(), trace.len() - 1);
        for info in infos {
            assert!(info.grad_ratio <= 1.0 + 1e-9);
            assert!(info.hess_ratio <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn inexact_retry_cap_exhausts_when_perturbations_outpace_contraction() {
        // Deep in superlinear convergence the step squares each iterate while
        // the perturbation budget follows the previous step; a mild shrink
        // factor cannot bridge the gap and the run reports it.
        let obj = objectives::quadratic(SymmetricMatrix::identity(3), vec![0.0; 3]).unwrap();
        let cfg = InexactConfig {
            base: CrConfig { m: Some(1.0), mu_tol: 1e-12, max_iter: 100, record_x: true },
            c1: 0.1,
            c2: 0.1,
            seed: 7,
            retry_shrink: 0.5,
        };
        assert!(matches!(
            run_inexact_cr(&obj, &[2.0, -1.0, 0.5], &cfg),
            Err(OptimizerError::RetryExhausted { .. })
        ));
    }

    #[test]
    fn identical_seed_gives_bitwise_identical_traces() {
        let obj = objectives::norm_power(2.0, 4).unwrap();
        let cfg = InexactConfig {
            base: CrConfig { m: Some(1.0), mu_tol: 1e-6, max_iter: 60, record_x: true },
            c1: 1.0,
            c2: 1.0,
            seed: 99,
            retry_shrink: 0.1,
        };
        let x0 = [2.0, 1.0, -1.0, 0.5];
        let a = run_inexact_cr(&obj, &x0, &cfg).unwrap();
        let b = run_inexact_cr(&obj, &x0, &cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.inexact, b.inexact);
    }

    #[test]
    fn rejects_bad_configs_and_starts() {
        let obj = objectives::norm_power(2.0, 2).unwrap();
        let bad_m = CrConfig { m: Some(0.0), ..CrConfig::default() };
        assert!(matches!(run_cr(&obj, &[1.0, 0.0], &bad_m), Err(OptimizerError::BadConfig(_))));
        assert!(matches!(
            run_cr(&obj, &[1.0], &CrConfig::default()),
            Err(OptimizerError::DimMismatch { .. })
        ));
        assert!(matches!(
            run_cr(&obj, &[f64::NAN, 0.0], &CrConfig::default()),
            Err(OptimizerError::NonFiniteStart)
        ));
    }
}
