//! Classifies the asymptotic decay regime of a positive sequence (finite /
//! superlinear / linear / sublinear) and produces the closed-form predicted
//! rates for CR and gradient descent as functions of the sharpness exponent
//! `θ`, for comparison against the fitted values.
//!
//! Superlinear order is fitted as the least-squares slope of
//! `log e_{k+1}` against `log e_k`: a sequence `e_{k+1} = C·e_k^q` produces
//! that line exactly with slope `q` and a geometric sequence produces slope
//! exactly 1, so the statistic separates the two regimes even on short
//! tails. Regime precedence is Finite > Superlinear > Linear > Sublinear: a
//! genuinely superlinear sequence also fits "linear" loosely, so the sharper
//! regime is tested first.

use serde::Serialize;
use thiserror::Error;

/// Fitted superlinear orders below this are not considered superlinear.
const SUPERLINEAR_MIN_ORDER: f64 = 1.05;
/// Minimum r² for the linear and sublinear regressions.
const MIN_R2: f64 = 0.99;
/// Minimum magnitude of a decaying slope.
const MIN_SLOPE: f64 = 1e-3;
/// Minimum usable points for any non-finite classification.
const MIN_POINTS: usize = 8;
/// A trailing run at the floor at least this long counts as finite
/// termination.
const FINITE_RUN: usize = 3;

#[derive(Debug, Error)]
pub enum RateFitError {
    #[error("theta must lie in (0, 1], got {0}")]
    BadTheta(f64),
    #[error("gradient descent predictions cover FGap and IterateDist only, not {0:?}")]
    UnsupportedMeasure(Measure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Finite,
    Superlinear,
    Linear,
    Sublinear,
    Inconclusive,
}

/// Optimality measures whose decay rates the theory predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    FGap,
    IterateDist,
    Mu,
    DistToSet,
}

impl Measure {
    pub const ALL: [Measure; 4] =
        [Measure::FGap, Measure::IterateDist, Measure::Mu, Measure::DistToSet];

    pub fn parse(s: &str) -> Option<Measure> {
        match s {
            "fgap" | "f_gap" => Some(Measure::FGap),
            "iterate_dist" | "iterate" => Some(Measure::IterateDist),
            "mu" => Some(Measure::Mu),
            "dist_omega" | "dist_to_set" => Some(Measure::DistToSet),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::FGap => "fgap",
            Measure::IterateDist => "iterate_dist",
            Measure::Mu => "mu",
            Measure::DistToSet => "dist_omega",
        }
    }
}

/// Classified decay regime of an observed sequence, with the fitted number
/// for the regime that applies.
#[derive(Debug, Clone, Serialize)]
pub struct RateEstimate {
    pub regime: Regime,
    /// Superlinear: fitted q in `e_{k+1} ≈ e_k^q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_q: Option<f64>,
    /// Linear: fitted contraction ratio in (0,1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_c: Option<f64>,
    /// Sublinear: fitted α in `e_k ≈ k^{-α}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_alpha: Option<f64>,
    /// Coefficient of determination of the winning regression.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_r2: Option<f64>,
    pub n_points_used: usize,
}

impl RateEstimate {
    fn inconclusive(n: usize) -> Self {
        Self {
            regime: Regime::Inconclusive,
            order_q: None,
            ratio_c: None,
            exponent_alpha: None,
            fit_r2: None,
            n_points_used: n,
        }
    }

    /// The fitted number for the regime, when one exists.
    pub fn value(&self) -> Option<f64> {
        self.order_q.or(self.ratio_c).or(self.exponent_alpha)
    }
}

/// Closed-form predicted rate.
#[derive(Debug, Clone, Serialize)]
pub struct TheoreticalRate {
    pub regime: Regime,
    /// Superlinear order, when predicted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_q: Option<f64>,
    /// Sublinear exponent, when predicted. Linear rates have no predicted
    /// numeric ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_alpha: Option<f64>,
}

impl TheoreticalRate {
    pub fn value(&self) -> Option<f64> {
        self.order_q.or(self.exponent_alpha)
    }
}

/// Default floor: `1e2·ε` relative to the first sequence value. Values at or
/// below it are treated as converged-to-noise.
pub fn default_floor(seq: &[f64]) -> f64 {
    1e2 * f64::EPSILON * seq.first().copied().unwrap_or(1.0).abs()
}

fn linfit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
        syy += (y - ym) * (y - ym);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Some((slope, r2))
}

/// Classifies the decay regime of a positive sequence.
///
/// The first `burn_in` fraction of entries is discarded, the sequence is
/// truncated at the first value at or below `floor`, and at least 8 usable
/// points are required for any non-finite classification. A trailing run of
/// at least 3 values at the floor classifies as `Finite`.
pub fn classify_rate(seq: &[f64], burn_in: f64, floor: f64) -> RateEstimate {
    if seq.is_empty() {
        return RateEstimate::inconclusive(0);
    }

    // A stall at the floor means finite termination: the trailing values sit
    // at the floor and stop changing. A sequence that merely decays through
    // the floor keeps changing and is classified from its above-floor part.
    let last = *seq.last().unwrap();
    let trailing_at_floor =
        seq.iter().rev().take_while(|&&v| v <= floor && v == last).count();
    if trailing_at_floor >= FINITE_RUN {
        return RateEstimate {
            regime: Regime::Finite,
            order_q: None,
            ratio_c: None,
            exponent_alpha: None,
            fit_r2: None,
            n_points_used: seq.len() - trailing_at_floor,
        };
    }

    // The usable prefix ends at the first value at the floor (or non-finite);
    // burn-in discards the leading fraction of what remains.
    let usable = seq
        .iter()
        .take_while(|&&v| v > floor && v.is_finite())
        .count();
    let start = ((usable as f64 * burn_in).ceil() as usize).min(usable);
    let pts: Vec<(usize, f64)> = (start..usable).map(|i| (i, seq[i])).collect();
    let n = pts.len();
    if n < MIN_POINTS {
        return RateEstimate::inconclusive(n);
    }

    // Superlinear: slope of log e_{k+1} vs log e_k, gauge-fixed by the first
    // tail value.
    let e0 = pts[0].1;
    let logs: Vec<f64> = pts.iter().map(|(_, v)| (v / e0).ln()).collect();
    if let Some((q, r2)) = linfit(&logs[..n - 1], &logs[1..]) {
        if q > SUPERLINEAR_MIN_ORDER {
            return RateEstimate {
                regime: Regime::Superlinear,
                order_q: Some(q),
                ratio_c: None,
                exponent_alpha: None,
                fit_r2: Some(r2),
                n_points_used: n,
            };
        }
    }

    // Linear: log e_k vs k.
    let ks: Vec<f64> = pts.iter().map(|(k, _)| *k as f64).collect();
    let lny: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    if let Some((slope, r2)) = linfit(&ks, &lny) {
        if r2 >= MIN_R2 && slope < -MIN_SLOPE {
            return RateEstimate {
                regime: Regime::Linear,
                order_q: None,
                ratio_c: Some(slope.exp()),
                exponent_alpha: None,
                fit_r2: Some(r2),
                n_points_used: n,
            };
        }
    }

    // Sublinear: log e_k vs log k (k ≥ 1).
    let mut lnk = Vec::with_capacity(n);
    let mut lne = Vec::with_capacity(n);
    for &(k, v) in &pts {
        if k >= 1 {
            lnk.push((k as f64).ln());
            lne.push(v.ln());
        }
    }
    if lnk.len() >= MIN_POINTS {
        if let Some((slope, r2)) = linfit(&lnk, &lne) {
            if r2 >= MIN_R2 && slope < -MIN_SLOPE {
                return RateEstimate {
                    regime: Regime::Sublinear,
                    order_q: None,
                    ratio_c: None,
                    exponent_alpha: Some(-slope),
                    fit_r2: Some(r2),
                    n_points_used: lnk.len(),
                };
            }
        }
    }

    RateEstimate::inconclusive(n)
}

/// Predicted decay regime and rate for one measure under one algorithm, as a
/// function of the sharpness exponent `θ ∈ (0, 1]`.
///
/// CR: finite termination at `θ = 1`; superlinear for `θ ∈ (1/3, 1)` with
/// order `2/(3(1-θ))` for the function gap, `2θ/(3(1-θ)) + 2/3` for iterate
/// distance, and `2θ/(1-θ)` for the stationarity gap and distance-to-set;
/// linear at `θ = 1/3`; sublinear for `θ ∈ (0, 1/3)` with exponent
/// `2/(1-3θ)` for the function gap and `2θ/(1-3θ)` for the rest.
///
/// GD (function gap and iterate distance only): finite at `θ = 1`; linear
/// for `θ ∈ [1/2, 1)`; sublinear for `θ ∈ (0, 1/2)` with exponents
/// `1/(1-2θ)` and `θ/(1-2θ)`.
pub fn theoretical_rate(
    theta: f64,
    measure: Measure,
    algorithm: PredictionAlgorithm,
) -> Result<TheoreticalRate, RateFitError> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(RateFitError::BadTheta(theta));
    }
    let rate = |regime, order_q, exponent_alpha| TheoreticalRate { regime, order_q, exponent_alpha };

    match algorithm {
        PredictionAlgorithm::Cr => {
            if theta == 1.0 {
                Ok(rate(Regime::Finite, None, None))
            } else if theta > 1.0 / 3.0 {
                let order = match measure {
                    Measure::FGap => 2.0 / (3.0 * (1.0 - theta)),
                    Measure::IterateDist => 2.0 * theta / (3.0 * (1.0 - theta)) + 2.0 / 3.0,
                    Measure::Mu | Measure::DistToSet => 2.0 * theta / (1.0 - theta),
                };
                Ok(rate(Regime::Superlinear, Some(order), None))
            } else if theta == 1.0 / 3.0 {
                Ok(rate(Regime::Linear, None, None))
            } else {
                let alpha = match measure {
                    Measure::FGap => 2.0 / (1.0 - 3.0 * theta),
                    _ => 2.0 * theta / (1.0 - 3.0 * theta),
                };
                Ok(rate(Regime::Sublinear, None, Some(alpha)))
            }
        }
        PredictionAlgorithm::Gd => {
            let alpha_form = match measure {
                Measure::FGap => |t: f64| 1.0 / (1.0 - 2.0 * t),
                Measure::IterateDist => |t: f64| t / (1.0 - 2.0 * t),
                other => return Err(RateFitError::UnsupportedMeasure(other)),
            };
            if theta == 1.0 {
                Ok(rate(Regime::Finite, None, None))
            } else if theta >= 0.5 {
                Ok(rate(Regime::Linear, None, None))
            } else {
                Ok(rate(Regime::Sublinear, None, Some(alpha_form(theta))))
            }
        }
    }
}

/// Which algorithm's predictions to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionAlgorithm {
    Cr,
    Gd,
}

/// Comparison of an estimate against a prediction.
#[derive(Debug, Clone, Serialize)]
pub struct RateVerdict {
    pub regime_match: bool,
    /// `|estimated - predicted|` when both carry a number.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_tol: Option<bool>,
}

impl RateVerdict {
    /// Regime matches and any numeric deviation is within tolerance.
    pub fn matched(&self) -> bool {
        self.regime_match && self.within_tol.unwrap_or(true)
    }
}

/// Compares regimes, and numbers when both sides carry one.
pub fn compare(est: &RateEstimate, pred: &TheoreticalRate, tol: f64) -> RateVerdict {
    let regime_match = est.regime == pred.regime;
    let deviation = match (est.value(), pred.value()) {
        (Some(e), Some(p)) if regime_match => Some((e - p).abs()),
        _ => None,
    };
    RateVerdict { regime_match, deviation, within_tol: deviation.map(|d| d <= tol) }
}
