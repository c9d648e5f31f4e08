//! Post-hoc verification along traces: per-step descent/gradient/curvature
//! inequalities, path-length summability, and certificate-constant fits for
//! the sharpness inequality `f - f* ≤ C‖∇f‖^{1/(1-θ)}` and the error bound
//! `dist_Ω ≤ κ‖∇f‖^{θ/(1-θ)}`.
//!
//! Fits use the max tail ratio, which yields a valid certificate constant
//! for one-sided inequalities; iterates where the quantity has decayed to
//! rounding noise are excluded by a floor.

use serde::Serialize;
use thiserror::Error;

use crate::objectives::SolutionOracle;
use crate::optimizer::{Algorithm, Trace};
use crate::rate_fit::Measure;
use crate::vecmath;

/// Default burn-in fraction: the asymptotic statements hold for sufficiently
/// large k, operationalized as discarding the first 20% of iterates.
pub const DEFAULT_BURN_IN: f64 = 0.2;

/// Values of `f - f*` below `1e2·ε·max(1,|f*|)` and gradient norms below
/// `1e2·ε` are rounding noise and excluded from ratio fits.
const FLOOR_FACTOR: f64 = 1e2 * f64::EPSILON;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("theta must lie in (0,1), got {0}")]
    BadTheta(f64),
    #[error("no usable iterates remain after burn-in and floor filtering")]
    EmptyTail,
    #[error("trace does not store iterates or distances required for this diagnostic")]
    MissingData,
    #[error("trace has no known limit value f*")]
    MissingFStar,
}

/// Outcome of checking one inequality over all consecutive pairs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalityCheck {
    pub violations: usize,
    /// Largest `lhs - rhs` observed (positive means a violation).
    pub worst_slack: f64,
    pub pairs: usize,
}

impl InequalityCheck {
    fn new() -> Self {
        Self { violations: 0, worst_slack: f64::NEG_INFINITY, pairs: 0 }
    }

    fn observe(&mut self, lhs: f64, rhs: f64) {
        let slack = lhs - rhs;
        self.pairs += 1;
        if slack > self.worst_slack {
            self.worst_slack = slack;
        }
        if slack > 0.0 {
            self.violations += 1;
        }
    }
}

/// Per-inequality violation counts for one trace.
#[derive(Debug, Clone, Serialize)]
pub struct DynamicsReport {
    pub descent: InequalityCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient_bound: Option<InequalityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_bound: Option<InequalityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_bound: Option<InequalityCheck>,
    pub pass: bool,
}

/// Checks the per-step dynamics over every consecutive pair of records.
///
/// For CR-family traces with `M ≥ L` the four inequalities are
///
/// * descent: `f_{k+1} - f_k ≤ -(M/12)‖s‖³ + tol·max(1,|f_k|)`
/// * gradient: `‖∇f(x_{k+1})‖ ≤ ((L+M)/2)‖s‖² + tol`
/// * curvature: `-λ_min(∇²f(x_{k+1})) ≤ ((2L+M)/2)‖s‖ + tol`
/// * stationarity gap: `μ(x_{k+1}) ≤ ‖s‖ + tol`
///
/// GD traces check only the descent row, in the form
/// `f_k - f_{k+1} ≥ ‖s‖²/(2·step_size) - tol·max(1,|f_k|)`.
pub fn check_dynamics(trace: &Trace, l: f64, m: f64, tol: f64) -> DynamicsReport {
    let gd = trace.algorithm == Algorithm::Gd;
    let mut descent = InequalityCheck::new();
    let mut gradient = InequalityCheck::new();
    let mut curvature = InequalityCheck::new();
    let mut mu_bound = InequalityCheck::new();

    for pair in trace.records.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let s = b.step_norm;
        if gd {
            let step_size = trace.config.step_size.unwrap_or(f64::NAN);
            descent.observe(s * s / (2.0 * step_size), a.f - b.f + tol * a.f.abs().max(1.0));
        } else {
            descent.observe(b.f - a.f, -m / 12.0 * s.powi(3) + tol * a.f.abs().max(1.0));
            gradient.observe(b.grad_norm, (l + m) / 2.0 * s * s + tol);
            curvature.observe(-b.lambda_min, (2.0 * l + m) / 2.0 * s + tol);
            mu_bound.observe(b.mu, s + tol);
        }
    }

    let checks: [&InequalityCheck; 4] = [&descent, &gradient, &curvature, &mu_bound];
    let pass = checks.iter().all(|c| c.violations == 0);
    DynamicsReport {
        descent,
        gradient_bound: (!gd).then_some(gradient),
        curvature_bound: (!gd).then_some(curvature),
        mu_bound: (!gd).then_some(mu_bound),
        pass,
    }
}

/// Total trajectory length and its tail sums.
#[derive(Debug, Clone)]
pub struct PathLength {
    /// `Δ_0 = Σ_k ‖x_{k+1} - x_k‖`.
    pub total: f64,
    /// `tail_sums[k] = Σ_{i≥k} ‖x_{i+1} - x_i‖`; non-increasing, last entry 0.
    pub tail_sums: Vec<f64>,
}

/// Path length of a trace from its recorded step norms.
pub fn path_length(trace: &Trace) -> PathLength {
    let n = trace.records.len();
    let mut tail_sums = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        tail_sums[k] = tail_sums[k + 1] + trace.records[k + 1].step_norm;
    }
    PathLength { total: tail_sums.first().copied().unwrap_or(0.0), tail_sums }
}

fn burn_start(n: usize, burn_in: f64) -> usize {
    ((n as f64 * burn_in).ceil() as usize).min(n)
}

/// Fits the certificate constant of `f(x_k) - f* ≤ C‖∇f(x_k)‖^{1/(1-θ)}` as
/// the max ratio over the trace tail. By construction the inequality holds on
/// the tail with the returned constant.
pub fn kl_inequality_fit(
    trace: &Trace,
    theta: f64,
    f_star: f64,
    burn_in: f64,
) -> Result<f64, DiagnosticsError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(DiagnosticsError::BadTheta(theta));
    }
    let exponent = 1.0 / (1.0 - theta);
    let f_floor = FLOOR_FACTOR * f_star.abs().max(1.0);
    let start = burn_start(trace.records.len(), burn_in);
    let mut best: Option<f64> = None;
    for rec in &trace.records[start..] {
        let gap = rec.f - f_star;
        if gap <= f_floor || rec.grad_norm <= FLOOR_FACTOR {
            continue;
        }
        let ratio = gap / rec.grad_norm.powf(exponent);
        best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
    }
    best.ok_or(DiagnosticsError::EmptyTail)
}

/// Certificate fit for the error bound `dist_Ω(x) ≤ κ‖∇f(x)‖^{θ/(1-θ)}`.
#[derive(Debug, Clone, Serialize)]
pub struct KlErrorBoundFit {
    pub kappa_hat: f64,
    /// Iteration index attaining the max ratio.
    pub worst_ratio_index: usize,
    pub theta_used: f64,
}

fn record_distance(trace: &Trace, k: usize, oracle: &SolutionOracle) -> Option<f64> {
    let rec = &trace.records[k];
    rec.dist_omega
        .or_else(|| rec.x.as_ref().map(|x| oracle.distance_to_set(x)))
}

/// Fits `κ` as the max tail ratio `dist_Ω(x_k)/‖∇f(x_k)‖^{θ/(1-θ)}`; by
/// construction the bound holds with `kappa_hat` on the tail.
pub fn kl_error_bound_fit(
    trace: &Trace,
    oracle: &SolutionOracle,
    theta: f64,
    burn_in: f64,
) -> Result<KlErrorBoundFit, DiagnosticsError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(DiagnosticsError::BadTheta(theta));
    }
    let exponent = theta / (1.0 - theta);
    let start = burn_start(trace.records.len(), burn_in);
    let mut best: Option<(f64, usize)> = None;
    let mut saw_data = false;
    for k in start..trace.records.len() {
        let Some(dist) = record_distance(trace, k, oracle) else { continue };
        saw_data = true;
        let grad = trace.records[k].grad_norm;
        if grad <= FLOOR_FACTOR || dist <= FLOOR_FACTOR {
            continue;
        }
        let ratio = dist / grad.powf(exponent);
        if best.is_none_or(|(b, _)| ratio > b) {
            best = Some((ratio, k));
        }
    }
    match best {
        Some((kappa_hat, worst_ratio_index)) => {
            Ok(KlErrorBoundFit { kappa_hat, worst_ratio_index, theta_used: theta })
        }
        None if !saw_data => Err(DiagnosticsError::MissingData),
        None => Err(DiagnosticsError::EmptyTail),
    }
}

/// Fits the constant of `‖x_{k+1} - x_k‖ ≤ C·dist_Ω(x_k)` as the max tail
/// ratio; returns 0 for a trace with no usable pairs (e.g. started at
/// stationarity).
pub fn step_vs_dist_check(trace: &Trace, oracle: &SolutionOracle) -> f64 {
    let n = trace.records.len();
    let start = burn_start(n, DEFAULT_BURN_IN);
    let mut best = 0.0f64;
    for k in start..n.saturating_sub(1) {
        let Some(dist) = record_distance(trace, k, oracle) else { continue };
        if dist <= FLOOR_FACTOR {
            continue;
        }
        let step = trace.records[k + 1].step_norm;
        best = best.max(step / dist);
    }
    best
}

/// Extracts the per-iterate sequence of an optimality measure from a trace.
///
/// `FGap` needs a known `f*`, `IterateDist` needs stored iterates (distance
/// to the final iterate), `DistToSet` needs recorded distances.
pub fn measure_sequence(trace: &Trace, measure: Measure) -> Result<Vec<f64>, DiagnosticsError> {
    match measure {
        Measure::FGap => {
            let f_star = trace.f_star.ok_or(DiagnosticsError::MissingFStar)?;
            Ok(trace.records.iter().map(|r| r.f - f_star).collect())
        }
        Measure::Mu => Ok(trace.records.iter().map(|r| r.mu).collect()),
        Measure::DistToSet => trace
            .records
            .iter()
            .map(|r| r.dist_omega.ok_or(DiagnosticsError::MissingData))
            .collect(),
        Measure::IterateDist => {
            let last = trace
                .final_record()
                .x
                .as_ref()
                .ok_or(DiagnosticsError::MissingData)?;
            trace
                .records
                .iter()
                .map(|r| {
                    r.x.as_ref()
                        .map(|x| vecmath::dist(x, last))
                        .ok_or(DiagnosticsError::MissingData)
                })
                .collect()
        }
    }
}
