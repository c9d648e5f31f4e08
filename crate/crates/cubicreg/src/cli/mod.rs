//! Experiment orchestration: run a config to trace CSV + summary JSON,
//! validate a persisted trace against the per-step inequalities, report
//! fitted-vs-predicted rates, and compare two runs side by side.
//!
//! Exit-code contract: 0 success (and validation pass), 1 validation
//! failure, 2 input error, 3 runtime error.

pub mod config;
pub mod trace_io;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::{self, DynamicsReport, DEFAULT_BURN_IN};
use crate::objectives;
use crate::optimizer::{self, Algorithm, ConfigSnapshot, Termination, Trace};
use crate::rate_fit::{self, Measure, PredictionAlgorithm, RateEstimate, RateVerdict, Regime, TheoreticalRate};

pub use config::{AlgorithmSpec, ExperimentConfig, ObjectiveSpec, ResolvedAlgorithm, X0Spec};

/// Default numeric tolerance when comparing fitted orders/exponents against
/// predictions in run summaries (informational; acceptance tests pin their
/// own windows).
pub const SUMMARY_RATE_TOL: f64 = 0.5;
/// Relative tolerance for the per-step dynamics checks.
pub const DYNAMICS_TOL: f64 = 1e-10;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: config, flags, or file contents. Exit code 2.
    Input(String),
    /// Validation ran and failed. Exit code 1.
    ValidationFailed,
    /// The computation itself failed. Exit code 3.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed => 1,
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::ValidationFailed => write!(f, "validation failed"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Fitted-vs-predicted rates for one measure.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub measure: Measure,
    pub estimate: RateEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<TheoreticalRate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<RateVerdict>,
}

/// Everything `run` knows at the end of a run; persisted as summary JSON and
/// recomputable from the persisted trace.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub objective: ObjectiveSpec,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub termination: Termination,
    /// Steps taken (records - 1).
    pub iterations: usize,
    pub final_f: f64,
    pub final_grad_norm: f64,
    pub final_lambda_min: f64,
    pub final_mu: f64,
    pub total_path_length: f64,
    pub dynamics_pass: bool,
    pub rates: Vec<MeasureReport>,
    pub config: ConfigSnapshot,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inexact_max_grad_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inexact_max_hess_ratio: Option<f64>,
}

fn prediction_algorithm(alg: Algorithm) -> PredictionAlgorithm {
    match alg {
        Algorithm::Gd => PredictionAlgorithm::Gd,
        // inexact CR satisfies the same dynamics, hence the same predictions
        Algorithm::Cr | Algorithm::InexactCr => PredictionAlgorithm::Cr,
    }
}

fn applicable_measures(alg: Algorithm) -> &'static [Measure] {
    match alg {
        Algorithm::Gd => &[Measure::FGap, Measure::IterateDist],
        _ => &Measure::ALL,
    }
}

/// Classifies every applicable measure of a trace and compares against the
/// predictions for `theta` when known.
pub fn rate_reports(trace: &Trace, theta: Option<f64>, measures: &[Measure]) -> Vec<MeasureReport> {
    let alg = prediction_algorithm(trace.algorithm);
    measures
        .iter()
        .filter_map(|&measure| {
            let seq = diagnostics::measure_sequence(trace, measure).ok()?;
            let floor = rate_fit::default_floor(&seq);
            let estimate = rate_fit::classify_rate(&seq, DEFAULT_BURN_IN, floor);
            let predicted = theta.and_then(|t| rate_fit::theoretical_rate(t, measure, alg).ok());
            let verdict = predicted.as_ref().map(|p| rate_fit::compare(&estimate, p, SUMMARY_RATE_TOL));
            Some(MeasureReport { measure, estimate, predicted, verdict })
        })
        .collect()
}

/// Builds the summary for a finished run.
pub fn summarize(trace: &Trace, spec: &ObjectiveSpec, seed: u64, theta: Option<f64>) -> RunSummary {
    let final_rec = trace.final_record();
    let dynamics = diagnostics::check_dynamics(trace, trace.config.l_bound, trace.config.m, DYNAMICS_TOL);
    let rates = rate_reports(trace, theta, applicable_measures(trace.algorithm));
    let (g_ratio, h_ratio) = trace
        .inexact
        .as_ref()
        .map(|infos| {
            let g = infos.iter().map(|i| i.grad_ratio).fold(0.0, f64::max);
            let h = infos.iter().map(|i| i.hess_ratio).fold(0.0, f64::max);
            (Some(g), Some(h))
        })
        .unwrap_or((None, None));
    RunSummary {
        objective: spec.clone(),
        algorithm: trace.algorithm,
        seed,
        termination: trace.termination,
        iterations: trace.len() - 1,
        final_f: final_rec.f,
        final_grad_norm: final_rec.grad_norm,
        final_lambda_min: final_rec.lambda_min,
        final_mu: final_rec.mu,
        total_path_length: diagnostics::path_length(trace).total,
        dynamics_pass: dynamics.pass,
        rates,
        config: trace.config.clone(),
        inexact_max_grad_ratio: g_ratio,
        inexact_max_hess_ratio: h_ratio,
    }
}

/// Executes a resolved experiment.
pub fn execute(resolved: &config::ResolvedExperiment) -> Result<Trace, CliError> {
    match &resolved.algorithm {
        ResolvedAlgorithm::Cr(cfg) => {
            optimizer::run_cr(&resolved.objective, &resolved.x0, cfg).map_err(runtime)
        }
        ResolvedAlgorithm::InexactCr(cfg) => {
            optimizer::run_inexact_cr(&resolved.objective, &resolved.x0, cfg).map_err(runtime)
        }
        ResolvedAlgorithm::Gd(cfg) => {
            optimizer::run_gd(&resolved.objective, &resolved.x0, cfg).map_err(runtime)
        }
    }
}

/// `run --config <path> [--out <dir>]`: runs the experiment and writes
/// `trace.csv`, `summary.json`, and (when iterates are recorded)
/// `iterates.csv` atomically into the output directory.
pub fn cmd_run(config_path: &Path, out_override: Option<&Path>) -> Result<RunSummary, CliError> {
    let text = trace_io::read_to_string(config_path).map_err(input)?;
    let cfg = ExperimentConfig::from_json(&text).map_err(input)?;
    let resolved = cfg.resolve().map_err(CliError::Input)?;

    let out_dir: PathBuf = out_override
        .map(Path::to_path_buf)
        .or(resolved.output_dir.clone())
        .ok_or_else(|| CliError::Input("no output directory: set output_dir in the config or pass --out".into()))?;

    let trace = execute(&resolved)?;
    let theta = resolved.objective.kl().map(|k| k.theta);
    let summary = summarize(&trace, &cfg.objective, resolved.seed, theta);

    // Render everything before touching the filesystem.
    let trace_csv = trace_io::trace_to_csv(&trace);
    let iterates_csv = trace_io::iterates_to_csv(&trace);
    let summary_json =
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::Runtime(e.to_string()))?;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", out_dir.display())))?;
    trace_io::write_atomic(&out_dir.join("trace.csv"), &trace_csv).map_err(runtime)?;
    if let Some(text) = iterates_csv {
        trace_io::write_atomic(&out_dir.join("iterates.csv"), &text).map_err(runtime)?;
    }
    trace_io::write_atomic(&out_dir.join("summary.json"), &summary_json).map_err(runtime)?;
    Ok(summary)
}

/// Internal-consistency findings for a persisted trace.
#[derive(Debug, Clone, Serialize)]
pub struct TraceConsistency {
    pub k_contiguous: bool,
    pub cum_path_consistent: bool,
    pub f_gap_consistent: bool,
}

impl TraceConsistency {
    pub fn pass(&self) -> bool {
        self.k_contiguous && self.cum_path_consistent && self.f_gap_consistent
    }
}

fn check_consistency(rows: &[trace_io::TraceRow], f_star: Option<f64>) -> TraceConsistency {
    let k_contiguous = rows.iter().enumerate().all(|(i, r)| r.k == i);
    let mut cum = 0.0;
    let mut cum_ok = true;
    for r in rows {
        cum += r.step_norm;
        if (r.cum_path_length - cum).abs() > 1e-12 * cum.abs().max(1.0) {
            cum_ok = false;
        }
    }
    let f_gap_ok = match f_star {
        Some(fs) => rows.iter().all(|r| match r.f_gap {
            Some(gap) => (gap - (r.f - fs)).abs() <= 1e-10 * r.f.abs().max(1.0),
            None => true,
        }),
        None => true,
    };
    TraceConsistency { k_contiguous, cum_path_consistent: cum_ok, f_gap_consistent: f_gap_ok }
}

/// `validate`: re-checks the per-step dynamics and internal consistency of a
/// persisted trace. Returns the printable report; `Err(ValidationFailed)`
/// when any check fails.
pub fn cmd_validate(
    trace_path: &Path,
    objective_name: &str,
    params: &serde_json::Value,
    l: f64,
    m: f64,
) -> Result<(DynamicsReport, TraceConsistency), CliError> {
    let text = trace_io::read_to_string(trace_path).map_err(input)?;
    let rows = trace_io::parse_trace_csv(&text).map_err(input)?;
    let objective = objectives::from_name(objective_name, params).map_err(input)?;
    let trace = trace_io::rows_to_trace(&rows, Algorithm::Cr, None);
    let f_star = objective.f_star();
    let dynamics = diagnostics::check_dynamics(&trace, l, m, DYNAMICS_TOL);
    let consistency = check_consistency(&rows, f_star);
    if dynamics.pass && consistency.pass() {
        Ok((dynamics, consistency))
    } else {
        println!("{}", render_validation(&dynamics, &consistency));
        Err(CliError::ValidationFailed)
    }
}

pub fn render_validation(dynamics: &DynamicsReport, consistency: &TraceConsistency) -> String {
    let mut out = String::new();
    let row = |name: &str, c: &crate::diagnostics::InequalityCheck| {
        format!(
            "  {name:<16} pairs {:>6}  violations {:>4}  worst slack {: >13.3e}\n",
            c.pairs, c.violations, c.worst_slack
        )
    };
    out.push_str("dynamics:\n");
    out.push_str(&row("descent", &dynamics.descent));
    if let Some(c) = &dynamics.gradient_bound {
        out.push_str(&row("gradient bound", c));
    }
    if let Some(c) = &dynamics.curvature_bound {
        out.push_str(&row("curvature bound", c));
    }
    if let Some(c) = &dynamics.mu_bound {
        out.push_str(&row("mu bound", c));
    }
    let _ = writeln!(
        out,
        "consistency: k contiguous {}, cumulative path {}, f_gap {}",
        consistency.k_contiguous, consistency.cum_path_consistent, consistency.f_gap_consistent
    );
    let _ = writeln!(out, "result: {}", if dynamics.pass && consistency.pass() { "PASS" } else { "FAIL" });
    out
}

/// Output rows for `report`.
#[derive(Debug, Clone, Serialize)]
pub struct RateTable {
    pub theta: f64,
    pub rows: Vec<MeasureReport>,
}

/// `report`: classifies the requested measures of a persisted trace and
/// compares against the predictions for `theta`. When the trace directory
/// contains an `iterates.csv` sidecar it is used for the iterate-distance
/// measure.
pub fn cmd_report(
    trace_path: &Path,
    theta: f64,
    measures: &[Measure],
    algorithm: Algorithm,
) -> Result<RateTable, CliError> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(CliError::Input(format!("theta must lie in (0,1], got {theta}")));
    }
    let text = trace_io::read_to_string(trace_path).map_err(input)?;
    let rows = trace_io::parse_trace_csv(&text).map_err(input)?;
    let iterates = trace_path
        .parent()
        .map(|dir| dir.join("iterates.csv"))
        .filter(|p| p.exists())
        .and_then(|p| trace_io::read_to_string(&p).ok())
        .and_then(|t| trace_io::parse_iterates_csv(&t).ok())
        .filter(|xs| xs.len() == rows.len());
    let trace = trace_io::rows_to_trace(&rows, algorithm, iterates);
    Ok(RateTable { theta, rows: rate_reports(&trace, Some(theta), measures) })
}

fn fmt_estimate(e: &RateEstimate) -> String {
    match e.regime {
        Regime::Finite => "finite".to_string(),
        Regime::Superlinear => format!("superlinear q={:.4}", e.order_q.unwrap_or(f64::NAN)),
        Regime::Linear => format!(
            "linear c={:.6} (r2={:.4})",
            e.ratio_c.unwrap_or(f64::NAN),
            e.fit_r2.unwrap_or(f64::NAN)
        ),
        Regime::Sublinear => format!(
            "sublinear alpha={:.4} (r2={:.4})",
            e.exponent_alpha.unwrap_or(f64::NAN),
            e.fit_r2.unwrap_or(f64::NAN)
        ),
        Regime::Inconclusive => format!("inconclusive (n={})", e.n_points_used),
    }
}

fn fmt_predicted(p: &TheoreticalRate) -> String {
    match p.regime {
        Regime::Finite => "finite".to_string(),
        Regime::Superlinear => format!("superlinear q={:.4}", p.order_q.unwrap_or(f64::NAN)),
        Regime::Linear => "linear".to_string(),
        Regime::Sublinear => format!("sublinear alpha={:.4}", p.exponent_alpha.unwrap_or(f64::NAN)),
        Regime::Inconclusive => "-".to_string(),
    }
}

pub fn render_rate_table(table: &RateTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<14} {:<34} {:<28} verdict", "measure", "estimated", "predicted");
    for row in &table.rows {
        let verdict = match &row.verdict {
            Some(v) if v.matched() => "match".to_string(),
            Some(v) if v.regime_match => {
                format!("regime match, deviation {:.3}", v.deviation.unwrap_or(f64::NAN))
            }
            Some(_) => "mismatch".to_string(),
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<14} {:<34} {:<28} {}",
            row.measure.name(),
            fmt_estimate(&row.estimate),
            row.predicted.as_ref().map(fmt_predicted).unwrap_or_else(|| "-".into()),
            verdict
        );
    }
    out
}

/// One side of a comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CompareSide {
    pub algorithm: Algorithm,
    pub termination: Termination,
    pub iterations: usize,
    pub rates: Vec<MeasureReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareTable {
    pub objective: ObjectiveSpec,
    pub a: CompareSide,
    pub b: CompareSide,
}

/// `compare`: runs two configs that must share objective and start point,
/// and tabulates fitted rates side by side. Reporting only: asserts nothing.
pub fn cmd_compare(config_a: &Path, config_b: &Path) -> Result<CompareTable, CliError> {
    let parse = |p: &Path| -> Result<(ExperimentConfig, config::ResolvedExperiment), CliError> {
        let text = trace_io::read_to_string(p).map_err(input)?;
        let cfg = ExperimentConfig::from_json(&text).map_err(input)?;
        let resolved = cfg.resolve().map_err(CliError::Input)?;
        Ok((cfg, resolved))
    };
    let (cfg_a, res_a) = parse(config_a)?;
    let (cfg_b, res_b) = parse(config_b)?;
    if cfg_a.objective != cfg_b.objective {
        return Err(CliError::Input("configs target different objectives".into()));
    }
    if res_a.x0 != res_b.x0 {
        return Err(CliError::Input("configs resolve to different start points".into()));
    }
    let theta = res_a.objective.kl().map(|k| k.theta);
    let side = |resolved: &config::ResolvedExperiment| -> Result<CompareSide, CliError> {
        let trace = execute(resolved)?;
        let rates = rate_reports(&trace, theta, applicable_measures(trace.algorithm));
        Ok(CompareSide {
            algorithm: trace.algorithm,
            termination: trace.termination,
            iterations: trace.len() - 1,
            rates,
        })
    };
    Ok(CompareTable { objective: cfg_a.objective.clone(), a: side(&res_a)?, b: side(&res_b)? })
}

pub fn render_compare(table: &CompareTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "objective: {}", table.objective.name);
    let _ = writeln!(
        out,
        "{:<14} {:<11} {:<34}   {:<11} {:<34}",
        "measure", "algorithm", "estimated", "algorithm", "estimated"
    );
    let find = |side: &CompareSide, m: Measure| -> Option<String> {
        side.rates.iter().find(|r| r.measure == m).map(|r| fmt_estimate(&r.estimate))
    };
    for m in Measure::ALL {
        let a = find(&table.a, m);
        let b = find(&table.b, m);
        if a.is_none() && b.is_none() {
            continue;
        }
        let _ = writeln!(
            out,
            "{:<14} {:<11} {:<34}   {:<11} {:<34}",
            m.name(),
            format!("{:?}", table.a.algorithm),
            a.unwrap_or_else(|| "-".into()),
            format!("{:?}", table.b.algorithm),
            b.unwrap_or_else(|| "-".into()),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_cfg(dir: &Path, name: &str, contents: &str) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    const CR_CONFIG: &str = r#"{
        "objective": {"name": "norm_power", "params": {"p": 4, "dim": 5}},
        "algorithm": {"kind": "cr", "m": "auto", "mu_tol": 1e-8, "max_iter": 2000},
        "x0": {"random_sphere": {"radius": 1.0, "seed": 7}},
        "seed": 42
    }"#;

    #[test]
    fn run_writes_all_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "cfg.json", CR_CONFIG);
        let out = dir.path().join("out");
        let summary = cmd_run(&cfg, Some(&out)).unwrap();
        assert!(out.join("trace.csv").exists());
        assert!(out.join("summary.json").exists());
        assert!(out.join("iterates.csv").exists());
        assert!(matches!(summary.termination, Termination::MuTol | Termination::FiniteStop));
        assert!(summary.dynamics_pass);

        // summary parses back as JSON and echoes the objective
        let text = fs::read_to_string(out.join("summary.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["objective"]["name"], "norm_power");
    }

    #[test]
    fn run_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "cfg.json", CR_CONFIG);
        let out1 = dir.path().join("a");
        let out2 = dir.path().join("b");
        cmd_run(&cfg, Some(&out1)).unwrap();
        cmd_run(&cfg, Some(&out2)).unwrap();
        let t1 = fs::read(out1.join("trace.csv")).unwrap();
        let t2 = fs::read(out2.join("trace.csv")).unwrap();
        assert_eq!(t1, t2);
        let s1 = fs::read(out1.join("summary.json")).unwrap();
        let s2 = fs::read(out2.join("summary.json")).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn run_rejects_unknown_objective_as_input_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(
            dir.path(),
            "bad.json",
            r#"{"objective": {"name": "nope", "params": {}},
                "algorithm": {"kind": "cr"}, "x0": [1.0], "seed": 0}"#,
        );
        let err = cmd_run(&cfg, Some(dir.path())).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn validate_passes_on_produced_trace() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "cfg.json", CR_CONFIG);
        let out = dir.path().join("out");
        let summary = cmd_run(&cfg, Some(&out)).unwrap();
        let params = serde_json::json!({"p": 4, "dim": 5});
        let (dynamics, consistency) = cmd_validate(
            &out.join("trace.csv"),
            "norm_power",
            &params,
            summary.config.l_bound,
            summary.config.m,
        )
        .unwrap();
        assert!(dynamics.pass);
        assert!(consistency.pass());
    }

    #[test]
    fn validate_fails_on_tampered_trace() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "cfg.json", CR_CONFIG);
        let out = dir.path().join("out");
        let summary = cmd_run(&cfg, Some(&out)).unwrap();
        // tamper: increase f at some row
        let path = out.join("trace.csv");
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let fields: Vec<&str> = lines[3].split(',').collect();
        let mut tampered: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
        tampered[1] = "1e3".into();
        lines[3] = tampered.join(",");
        fs::write(&path, lines.join("\n") + "\n").unwrap();
        let params = serde_json::json!({"p": 4, "dim": 5});
        let err = cmd_validate(&path, "norm_power", &params, summary.config.l_bound, summary.config.m)
            .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn validate_rejects_malformed_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.csv");
        fs::write(&path, "not,a,trace\n").unwrap();
        let err =
            cmd_validate(&path, "norm_power", &serde_json::json!({"p": 4, "dim": 5}), 1.0, 1.0)
                .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn report_produces_rows_per_measure() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "cfg.json", CR_CONFIG);
        let out = dir.path().join("out");
        cmd_run(&cfg, Some(&out)).unwrap();
        let table = cmd_report(
            &out.join("trace.csv"),
            0.25,
            &[Measure::FGap, Measure::Mu, Measure::DistToSet, Measure::IterateDist],
            Algorithm::Cr,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 4);
        let rendered = render_rate_table(&table);
        assert!(rendered.contains("fgap"));
    }

    #[test]
    fn compare_rejects_mismatched_objectives() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_cfg(dir.path(), "a.json", CR_CONFIG);
        let b = write_cfg(
            dir.path(),
            "b.json",
            &CR_CONFIG.replace("\"p\": 4", "\"p\": 2"),
        );
        let err = cmd_compare(&a, &b).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn compare_cr_superlinear_vs_gd_linear_on_gradient_dominated_objective() {
        // θ = 1/2: CR converges superlinearly where GD is linear. The start
        // radius is large enough that the doubly-exponential CR tail still
        // has eight classifiable points in double precision.
        let dir = tempfile::tempdir().unwrap();
        let cr = write_cfg(
            dir.path(),
            "cr.json",
            r#"{
                "objective": {"name": "norm_power", "params": {"p": 2, "dim": 5}},
                "algorithm": {"kind": "cr", "mu_tol": 1e-300, "max_iter": 60},
                "x0": {"random_sphere": {"radius": 20.0, "seed": 4}},
                "seed": 4
            }"#,
        );
        let gd = write_cfg(
            dir.path(),
            "gd.json",
            r#"{
                "objective": {"name": "norm_power", "params": {"p": 2, "dim": 5}},
                "algorithm": {"kind": "gd", "step_size": 0.25, "grad_tol": 1e-10, "max_iter": 200},
                "x0": {"random_sphere": {"radius": 20.0, "seed": 4}},
                "seed": 4
            }"#,
        );
        let table = cmd_compare(&cr, &gd).unwrap();
        let fgap = |side: &CompareSide| {
            side.rates.iter().find(|r| r.measure == Measure::FGap).unwrap().estimate.clone()
        };
        let cr_est = fgap(&table.a);
        assert_eq!(cr_est.regime, Regime::Superlinear, "{cr_est:?}");
        let gd_est = fgap(&table.b);
        assert_eq!(gd_est.regime, Regime::Linear, "{gd_est:?}");
        assert!((gd_est.ratio_c.unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn compare_identical_configs_gives_identical_columns() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_cfg(dir.path(), "a.json", CR_CONFIG);
        let b = write_cfg(dir.path(), "b.json", CR_CONFIG);
        let table = cmd_compare(&a, &b).unwrap();
        assert_eq!(table.a.iterations, table.b.iterations);
        let ra = serde_json::to_string(&table.a.rates).unwrap();
        let rb = serde_json::to_string(&table.b.rates).unwrap();
        assert_eq!(ra, rb);
    }
}
