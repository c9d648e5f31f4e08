//! Twice-differentiable test objectives with analytic gradients/Hessians,
//! known sharpness exponents, and solution-set oracles.
//!
//! Each objective carries the constants a run needs: a Hessian-Lipschitz
//! bound and a gradient-Lipschitz bound valid on the sublevel set of the
//! starting point (call [`Objective::calibrated_for`] once the start is
//! known), the exponent `theta` of the local sharpness inequality
//! `f(x) - f* ≤ C‖∇f(x)‖^{1/(1-θ)}`, the limiting value `f*`, and the set of
//! second-order stationary points.

use serde_json::Value;
use thiserror::Error;

use crate::linalg::{self, LinalgError, SymmetricMatrix};
use crate::vecmath;

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("norm power requires p = 2 or p >= 3, got {0} (for p in (2,3) the Hessian is not Lipschitz near the minimizer; p < 2 is not twice differentiable)")]
    BadPower(f64),
    #[error("dimension must be positive")]
    ZeroDim,
    #[error("double well requires dim >= 2, got {0}")]
    BadWellDim(usize),
    #[error("quadratic matrix must be positive definite (min eigenvalue {0})")]
    NotPositiveDefinite(f64),
    #[error("point has dimension {got}, objective has dimension {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("unknown objective '{0}' (known: norm_power, quadratic, double_well)")]
    UnknownName(String),
    #[error("objective parameter error: {0}")]
    BadParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Sharpness metadata: `f(x) - f* ≤ C‖∇f(x)‖^{1/(1-θ)}` near the solution set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlSpec {
    /// Exponent in (0, 1].
    pub theta: f64,
    /// The constant `C` when analytically known.
    pub c_hint: Option<f64>,
}

/// The set of second-order stationary points, represented explicitly.
#[derive(Debug, Clone)]
pub struct SolutionOracle {
    points: Vec<Vec<f64>>,
    /// Common objective value on the set.
    pub f_omega: f64,
}

impl SolutionOracle {
    pub fn new(points: Vec<Vec<f64>>, f_omega: f64) -> Self {
        assert!(!points.is_empty());
        Self { points, f_omega }
    }

    /// Euclidean distance from `x` to the nearest point of the set.
    pub fn distance_to_set(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| vecmath::dist(p, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// `f(x) = ‖x‖^p`.
    NormPower { p: f64 },
    /// `f(x) = ½xᵀAx - bᵀx` with `A ≻ 0`.
    Quadratic { a: SymmetricMatrix, b: Vec<f64> },
    /// `f(x) = ¼(x₁²-1)² + ½Σ_{i≥2} x_i²`.
    DoubleWell,
}

/// An evaluable objective bundle.
#[derive(Debug, Clone)]
pub struct Objective {
    name: String,
    dim: usize,
    kind: Kind,
    hessian_lipschitz: f64,
    gradient_lipschitz: f64,
    kl: Option<KlSpec>,
    f_star: Option<f64>,
    solution_set: Option<SolutionOracle>,
}

impl Objective {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Hessian-Lipschitz bound (Frobenius norm) on the calibrated level set.
    pub fn hessian_lipschitz(&self) -> f64 {
        self.hessian_lipschitz
    }

    /// Gradient-Lipschitz bound on the calibrated level set.
    pub fn gradient_lipschitz(&self) -> f64 {
        self.gradient_lipschitz
    }

    pub fn kl(&self) -> Option<KlSpec> {
        self.kl
    }

    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    pub fn solution_set(&self) -> Option<&SolutionOracle> {
        self.solution_set.as_ref()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::NormPower { p } => powf_int(vecmath::norm(x), *p),
            Kind::Quadratic { a, b } => {
                0.5 * vecmath::dot(x, &a.matvec(x)) - vecmath::dot(b, x)
            }
            Kind::DoubleWell => {
                let w = x[0] * x[0] - 1.0;
                0.25 * w * w + 0.5 * x[1..].iter().map(|v| v * v).sum::<f64>()
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::NormPower { p } => {
                let t = vecmath::norm(x);
                if t == 0.0 {
                    return vec![0.0; x.len()];
                }
                let c = p * powf_int(t, p - 2.0);
                vecmath::scale(x, c)
            }
            Kind::Quadratic { a, b } => vecmath::sub(&a.matvec(x), b),
            Kind::DoubleWell => {
                let mut g = x.to_vec();
                g[0] = (x[0] * x[0] - 1.0) * x[0];
                g
            }
        }
    }

    pub fn hessian(&self, x: &[f64]) -> SymmetricMatrix {
        let d = self.dim;
        match &self.kind {
            Kind::NormPower { p } => {
                if *p == 2.0 {
                    let mut h = SymmetricMatrix::zeros(d);
                    for i in 0..d {
                        h.set_sym(i, i, 2.0);
                    }
                    return h;
                }
                let t = vecmath::norm(x);
                if t == 0.0 {
                    // analytic limit for p > 2
                    return SymmetricMatrix::zeros(d);
                }
                let c = p * powf_int(t, p - 2.0);
                let u: Vec<f64> = x.iter().map(|v| v / t).collect();
                let mut h = SymmetricMatrix::zeros(d);
                for i in 0..d {
                    for j in i..d {
                        let base = if i == j { 1.0 } else { 0.0 };
                        h.set_sym(i, j, c * (base + (p - 2.0) * u[i] * u[j]));
                    }
                }
                h
            }
            Kind::Quadratic { a, .. } => a.clone(),
            Kind::DoubleWell => {
                let mut h = SymmetricMatrix::identity(d);
                h.set_sym(0, 0, 3.0 * x[0] * x[0] - 1.0);
                h
            }
        }
    }

    /// Recomputes the Lipschitz bounds for the sublevel set of `x0` and
    /// returns the calibrated objective. Every run should do this once: the
    /// analytic bounds depend on the level set the iterates stay in.
    pub fn calibrated_for(mut self, x0: &[f64]) -> Result<Self, ObjectiveError> {
        if x0.len() != self.dim {
            return Err(ObjectiveError::DimMismatch { expected: self.dim, got: x0.len() });
        }
        match &self.kind {
            Kind::NormPower { p } => {
                let r = vecmath::norm(x0).max(1e-12);
                let (l, lg) = norm_power_bounds(*p, self.dim, r);
                self.hessian_lipschitz = l;
                self.gradient_lipschitz = lg;
            }
            Kind::Quadratic { .. } => {}
            Kind::DoubleWell => {
                // f ≤ f0 confines x₁ to x₁² ≤ 1 + 2√f0.
                let r1 = (1.0 + 2.0 * self.value(x0).max(0.0).sqrt()).sqrt();
                self.hessian_lipschitz = 6.0 * r1;
                self.gradient_lipschitz = 3.0 * r1 * r1 - 1.0;
            }
        }
        Ok(self)
    }
}

/// `t^p` using integer exponentiation when `p` is integral.
fn powf_int(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p.fract() == 0.0 && p.abs() <= 64.0 {
        t.powi(p as i32)
    } else {
        t.powf(p)
    }
}

/// Lipschitz bounds for `‖x‖^p` on `{‖x‖ ≤ r}`: the Hessian bound is in
/// Frobenius norm (radial direction is extremal), the gradient bound in
/// operator norm.
fn norm_power_bounds(p: f64, dim: usize, r: f64) -> (f64, f64) {
    let l = if p == 2.0 {
        0.0
    } else {
        p * (p - 2.0) * ((dim as f64 - 1.0) + (p - 1.0) * (p - 1.0)).sqrt() * powf_int(r, p - 3.0)
    };
    let lg = p * (p - 1.0) * powf_int(r, p - 2.0);
    (l, lg)
}

/// `f(x) = ‖x‖^p` with `θ = 1/p`, minimized exactly at the origin.
///
/// Lipschitz bounds are initialized for the unit level set; calibrate with
/// the actual start. `p` must be 2 or ≥ 3: in (2, 3) the Hessian is not
/// Lipschitz on any neighborhood of the origin.
pub fn norm_power(p: f64, dim: usize) -> Result<Objective, ObjectiveError> {
    if !(p == 2.0 || p >= 3.0) || !p.is_finite() {
        return Err(ObjectiveError::BadPower(p));
    }
    if dim == 0 {
        return Err(ObjectiveError::ZeroDim);
    }
    let (l, lg) = norm_power_bounds(p, dim, 1.0);
    Ok(Objective {
        name: format!("norm_power(p={p}, dim={dim})"),
        dim,
        kind: Kind::NormPower { p },
        hessian_lipschitz: l,
        gradient_lipschitz: lg,
        kl: Some(KlSpec { theta: 1.0 / p, c_hint: Some(p.powf(-p / (p - 1.0))) }),
        f_star: Some(0.0),
        solution_set: Some(SolutionOracle::new(vec![vec![0.0; dim]], 0.0)),
    })
}

/// `f(x) = ½xᵀAx - bᵀx` with `A ≻ 0`; gradient-dominated with `θ = 1/2` and
/// `C = 1/(2λ_min(A))`.
pub fn quadratic(a: SymmetricMatrix, b: Vec<f64>) -> Result<Objective, ObjectiveError> {
    let dim = a.dim();
    if b.len() != dim {
        return Err(ObjectiveError::DimMismatch { expected: dim, got: b.len() });
    }
    let e = linalg::eigh(&a)?;
    let lam_min = e.min_eigenvalue();
    if lam_min <= 0.0 {
        return Err(ObjectiveError::NotPositiveDefinite(lam_min));
    }
    let minimizer = linalg::solve_shifted(&e, 0.0, &b)?;
    let f_star = 0.5 * vecmath::dot(&minimizer, &a.matvec(&minimizer)) - vecmath::dot(&b, &minimizer);
    let lam_max = *e.eigenvalues.last().unwrap();
    Ok(Objective {
        name: format!("quadratic(dim={dim})"),
        dim,
        kind: Kind::Quadratic { a, b },
        hessian_lipschitz: 0.0,
        gradient_lipschitz: lam_max,
        kl: Some(KlSpec { theta: 0.5, c_hint: Some(1.0 / (2.0 * lam_min)) }),
        f_star: Some(f_star),
        solution_set: Some(SolutionOracle::new(vec![minimizer], f_star)),
    })
}

/// `f(x) = ¼(x₁²-1)² + ½Σ_{i≥2} x_i²`: a strict saddle at the origin
/// (`λ_min(∇²f(0)) = -1`) and minimizers at `x₁ = ±1`, rest zero.
pub fn double_well(dim: usize) -> Result<Objective, ObjectiveError> {
    if dim < 2 {
        return Err(ObjectiveError::BadWellDim(dim));
    }
    let mut plus = vec![0.0; dim];
    plus[0] = 1.0;
    let mut minus = vec![0.0; dim];
    minus[0] = -1.0;
    Ok(Objective {
        name: format!("double_well(dim={dim})"),
        dim,
        kind: Kind::DoubleWell,
        // unit level set defaults; calibrate with the actual start
        hessian_lipschitz: 6.0,
        gradient_lipschitz: 2.0,
        kl: Some(KlSpec { theta: 0.5, c_hint: None }),
        f_star: Some(0.0),
        solution_set: Some(SolutionOracle::new(vec![plus, minus], 0.0)),
    })
}

/// Instantiates an objective from its config name and JSON parameters.
///
/// Accepted forms:
/// * `"norm_power"` with `{"p": .., "dim": ..}`
/// * `"quadratic"` with `{"diag": [..]}` or `{"matrix": [[..], ..]}`, plus
///   optional `{"b": [..]}` (defaults to zero)
/// * `"double_well"` with `{"dim": ..}`
pub fn from_name(name: &str, params: &Value) -> Result<Objective, ObjectiveError> {
    let get = |key: &str| params.get(key);
    let get_f64 = |key: &str| -> Result<f64, ObjectiveError> {
        get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| ObjectiveError::BadParams(format!("missing or non-numeric '{key}'")))
    };
    let get_usize = |key: &str| -> Result<usize, ObjectiveError> {
        get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| ObjectiveError::BadParams(format!("missing or non-integer '{key}'")))
    };
    let get_vec = |v: &Value, what: &str| -> Result<Vec<f64>, ObjectiveError> {
        v.as_array()
            .map(|xs| xs.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect::<Vec<f64>>())
            .filter(|xs| vecmath::all_finite(xs))
            .ok_or_else(|| ObjectiveError::BadParams(format!("'{what}' must be a numeric array")))
    };

    match name {
        "norm_power" => norm_power(get_f64("p")?, get_usize("dim")?),
        "double_well" => double_well(get_usize("dim")?),
        "quadratic" => {
            let a = if let Some(diag) = get("diag") {
                SymmetricMatrix::diagonal(&get_vec(diag, "diag")?)?
            } else if let Some(rows) = get("matrix").and_then(Value::as_array) {
                let rows: Result<Vec<Vec<f64>>, _> =
                    rows.iter().map(|r| get_vec(r, "matrix row")).collect();
                SymmetricMatrix::from_rows(&rows?)?
            } else {
                return Err(ObjectiveError::BadParams(
                    "quadratic needs 'diag' or 'matrix'".into(),
                ));
            };
            let b = match get("b") {
                Some(v) => get_vec(v, "b")?,
                None => vec![0.0; a.dim()],
            };
            quadratic(a, b)
        }
        other => Err(ObjectiveError::UnknownName(other.to_string())),
    }
}

/// Max absolute coordinate error of the analytic gradient against a central
/// difference of the value with stencil `h`.
pub fn check_gradient(obj: &Objective, x: &[f64], h: f64) -> f64 {
    let g = obj.gradient(x);
    let mut worst = 0.0f64;
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = obj.value(&xp);
        xp[i] = x[i] - h;
        let fm = obj.value(&xp);
        xp[i] = x[i];
        worst = worst.max(((fp - fm) / (2.0 * h) - g[i]).abs());
    }
    worst
}

/// Max absolute entry error of the analytic Hessian against a central
/// difference of the analytic gradient with stencil `h`.
pub fn check_hessian(obj: &Objective, x: &[f64], h: f64) -> f64 {
    let hess = obj.hessian(x);
    let mut worst = 0.0f64;
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        xp[j] = x[j] + h;
        let gp = obj.gradient(&xp);
        xp[j] = x[j] - h;
        let gm = obj.gradient(&xp);
        xp[j] = x[j];
        for i in 0..x.len() {
            worst = worst.max(((gp[i] - gm[i]) / (2.0 * h) - hess.get(i, j)).abs());
        }
    }
    worst
}
