//! Run orchestration for every mode.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use qdyn_core::analytic::{closed_form_state, infer_couplings, infer_couplings_report, spectral_state, AnalyticAmplitudeSpec, InferenceConfig};
use qdyn_core::dynamics::{propagate, AmplitudeVector, PopulationTrace, StepperConfig, TimeGrid, NORM_FAILURE_THRESHOLD};
use qdyn_core::orthosys::{build_model, orthogonality_matrix, recurrence_residual, LegendreSystem, SystemModel, Variant};

use crate::config::{AnalyticSource, ModelChoice, Mode, RunConfig};
use crate::error::{exit, Result};
use crate::output::{couplings_csv, deviation_csv, plot_script, write_file, write_trace_csv};
use crate::report::{Check, VerificationReport};

/// Norm-drift bound for propagated traces outside `propagate` mode.
pub const DRIFT_TOL: f64 = 1e-9;
/// Bound on |Σ p − 1| for analytic traces outside `analytic` mode.
pub const ANALYTIC_UNITARITY_TOL: f64 = 1e-8;
/// Chebyshev sample count for the recurrence audit.
pub const RECURRENCE_POINTS: usize = 21;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.passed() {
            exit::OK
        } else {
            exit::CHECK_FAILED
        }
    }
}

fn stepper(cfg: &RunConfig) -> StepperConfig {
    StepperConfig {
        method: cfg.time.stepper,
        rel_tol: cfg.time.rel_tol,
        max_steps: cfg.time.max_steps,
    }
}

fn grid(cfg: &RunConfig) -> Result<TimeGrid> {
    Ok(TimeGrid::new(cfg.time.t_max, cfg.time.dt, cfg.time.output_stride)?)
}

/// Physical start levels the configured analytic source can represent.
fn analytic_start_levels(cfg: &RunConfig) -> Vec<usize> {
    match (cfg.analytic, cfg.model.variant()) {
        (AnalyticSource::Printed, Some(v)) => (0..cfg.levels)
            .filter(|&l| AnalyticAmplitudeSpec::initial_for_physical_level(v, cfg.levels, l).is_some())
            .collect(),
        _ => (0..cfg.levels).collect(),
    }
}

fn printed_state(variant: Variant, levels: usize, start: usize, t: f64) -> Result<Vec<Complex64>> {
    let m = AnalyticAmplitudeSpec::initial_for_physical_level(variant, levels, start).ok_or_else(|| {
        crate::error::CliError::Usage(format!("the printed closed form for variant {variant} does not start in level {start}"))
    })?;
    Ok(closed_form_state(&AnalyticAmplitudeSpec::new(variant, levels, m)?, t)?)
}

/// Ladder for the propagator. The first Legendre model's printed f_1 is
/// singular, so its couplings are inferred from the printed closed form.
fn ode_model(cfg: &RunConfig) -> Result<SystemModel> {
    match cfg.model {
        ModelChoice::Custom => Ok(SystemModel::custom(cfg.couplings.clone(), cfg.shifts.clone(), cfg.scale, "custom")?),
        ModelChoice::LegendreB => Ok(build_model(&LegendreSystem::new(cfg.levels, Variant::B, cfg.theta)?)?),
        ModelChoice::LegendreA => {
            let levels = cfg.levels;
            let source = |start: usize, n: usize, t: f64| Ok(printed_state(Variant::A, levels, start, t).map_err(core_only)?[n]);
            let inferred = infer_couplings(source, levels, &(1..levels).collect::<Vec<_>>(), &InferenceConfig::default())?;
            Ok(inferred.to_model("legendre-a (inferred)")?)
        }
    }
}

fn core_only(e: crate::error::CliError) -> qdyn_core::Error {
    match e {
        crate::error::CliError::Core(c) => c,
        other => qdyn_core::Error::Domain {
            op: "analytic source",
            detail: other.to_string(),
        },
    }
}

fn analytic_state(cfg: &RunConfig, model: Option<&SystemModel>, start: usize, t: f64) -> Result<Vec<Complex64>> {
    match (cfg.analytic, cfg.model.variant()) {
        (AnalyticSource::Printed, Some(v)) => printed_state(v, cfg.levels, start, t),
        (AnalyticSource::Printed, None) => Err(crate::error::CliError::Usage("printed closed forms exist only for the Legendre models".into())),
        (AnalyticSource::Spectral, _) => {
            let model = model.ok_or_else(|| crate::error::CliError::Usage("the spectral source needs a finite coupling table".into()))?;
            Ok(spectral_state(model, start, t)?.0)
        }
    }
}

fn spectral_model(cfg: &RunConfig) -> Result<Option<SystemModel>> {
    if cfg.analytic == AnalyticSource::Spectral {
        ode_model(cfg).map(Some)
    } else {
        Ok(None)
    }
}

fn analytic_trace(cfg: &RunConfig, model: Option<&SystemModel>, times: &[f64]) -> Result<PopulationTrace> {
    let mut tr = PopulationTrace {
        times: Vec::with_capacity(times.len()),
        amplitudes: Vec::with_capacity(times.len()),
        populations: Vec::with_capacity(times.len()),
        norms: Vec::with_capacity(times.len()),
        drift_record: Vec::with_capacity(times.len()),
        max_norm_drift: 0.0,
        failed: false,
        steps_taken: 0,
    };
    for &t in times {
        let a = AmplitudeVector(analytic_state(cfg, model, cfg.initial, t)?);
        let norm = a.norm();
        tr.max_norm_drift = tr.max_norm_drift.max((norm - 1.0).abs());
        tr.failed |= !(tr.max_norm_drift <= NORM_FAILURE_THRESHOLD);
        tr.times.push(t);
        tr.populations.push(a.populations());
        tr.norms.push(norm);
        tr.drift_record.push(tr.max_norm_drift);
        tr.amplitudes.push(a);
    }
    Ok(tr)
}

fn show(z: Complex64) -> String {
    format!("({:e}, {:e})", z.re, z.im)
}

fn initial_defect(tr: &PopulationTrace, start: usize) -> f64 {
    tr.amplitudes.first().map_or(f64::NAN, |a| {
        a.0.iter()
            .enumerate()
            .map(|(n, z)| (z - if n == start { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max)
    })
}

fn sibling(csv: &Path, suffix: &str) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
    csv.with_file_name(format!("{stem}.{suffix}"))
}

fn finish_trace(cfg: &RunConfig, tr: &PopulationTrace, path: &Path, title: &str, artifacts: &mut Vec<PathBuf>) -> Result<()> {
    write_trace_csv(tr, path)?;
    artifacts.push(path.to_path_buf());
    if cfg.output.plot {
        let gp = path.with_extension("gp");
        write_file(&gp, &plot_script(path, tr.levels(), title))?;
        artifacts.push(gp);
    }
    Ok(())
}

/// Runs one configured mode, writing its artifacts and report.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let mut report = VerificationReport::new(cfg.settings());
    let mut artifacts = Vec::new();
    let tol = cfg.effective_tol();
    match cfg.mode {
        Mode::Propagate => {
            let model = ode_model(cfg)?;
            let tr = propagate(&model, cfg.initial, &grid(cfg)?, &stepper(cfg))?;
            report.push(Check::at_most("norm-drift", tr.max_norm_drift, tol));
            report.note(format!("steps = {}", tr.steps_taken));
            couplings_note(&mut report, &model);
            finish_trace(cfg, &tr, &cfg.output.csv, "propagated populations", &mut artifacts)?;
        }
        Mode::Analytic => {
            let model = spectral_model(cfg)?;
            let tr = analytic_trace(cfg, model.as_ref(), &grid(cfg)?.sample_times())?;
            analytic_checks(&mut report, &tr, cfg.initial, tol);
            finish_trace(cfg, &tr, &cfg.output.csv, "analytic populations", &mut artifacts)?;
        }
        Mode::Compare => {
            let (ode, an, dev) = compare(cfg, &mut report, tol)?;
            finish_trace(cfg, &ode, &cfg.output.csv, "propagated populations", &mut artifacts)?;
            let an_path = sibling(&cfg.output.csv, "analytic.csv");
            finish_trace(cfg, &an, &an_path, "analytic populations", &mut artifacts)?;
            let dev_path = sibling(&cfg.output.csv, "deviation.csv");
            write_file(&dev_path, &deviation_csv(&ode.times, &dev))?;
            artifacts.push(dev_path);
        }
        Mode::VerifyOrtho => ortho_checks(&mut report, cfg.levels, tol)?,
        Mode::VerifyRecurrence => recurrence_checks(&mut report, cfg, tol)?,
        Mode::Infer => {
            let couplings = infer(cfg, &mut report, tol)?;
            write_file(&cfg.output.csv, &couplings_csv(&couplings))?;
            artifacts.push(cfg.output.csv.clone());
        }
    }
    report.elapsed = started.elapsed();
    let report_path = cfg.output.report_path();
    write_file(&report_path, &report.render())?;
    artifacts.push(report_path);
    Ok(RunOutcome { report, artifacts })
}

fn couplings_note(report: &mut VerificationReport, model: &SystemModel) {
    let list: Vec<String> = (1..model.levels())
        .map(|n| model.coupling(n).map_or("singular".into(), |f| format!("{f:?}")))
        .collect();
    report.note(format!("couplings ({}) = {}", model.label(), list.join(", ")));
}

fn analytic_checks(report: &mut VerificationReport, tr: &PopulationTrace, start: usize, tol: f64) {
    report.push(Check::at_most("analytic-initial-condition", initial_defect(tr, start), tol));
    report.push(Check::at_most("analytic-unitarity", tr.max_norm_drift, tol));
}

fn compare(cfg: &RunConfig, report: &mut VerificationReport, tol: f64) -> Result<(PopulationTrace, PopulationTrace, Vec<f64>)> {
    let model = ode_model(cfg)?;
    couplings_note(report, &model);
    let ode = propagate(&model, cfg.initial, &grid(cfg)?, &stepper(cfg))?;
    let an = analytic_trace(cfg, Some(&model), &ode.times)?;
    let dev: Vec<f64> = ode
        .populations
        .iter()
        .zip(&an.populations)
        .map(|(p, q)| p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    let worst = dev.iter().copied().fold(0.0, f64::max);
    report.push(Check::at_most("norm-drift", ode.max_norm_drift, DRIFT_TOL));
    analytic_checks(report, &an, cfg.initial, ANALYTIC_UNITARITY_TOL);
    report.push(Check::at_most("max-population-deviation", worst, tol));
    Ok((ode, an, dev))
}

fn ortho_checks(report: &mut VerificationReport, levels: usize, tol: f64) -> Result<()> {
    let rep = orthogonality_matrix(levels, tol)?;
    for p in &rep.pairs {
        report.push(Check::at_most(format!("orthogonality-{}-{}", p.m, p.l), p.rel_deviation, tol));
    }
    Ok(())
}

fn recurrence_checks(report: &mut VerificationReport, cfg: &RunConfig, tol: f64) -> Result<()> {
    // The audited relation belongs to the function family, whose printed
    // normalized form uses the first model's couplings.
    let system = LegendreSystem::new(cfg.levels, Variant::A, cfg.theta)?;
    let zs: Vec<f64> = (0..RECURRENCE_POINTS)
        .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / RECURRENCE_POINTS as f64).cos())
        .collect();
    let mut printed = 0.0_f64;
    for m in 1..=cfg.levels - 2 {
        let mut worst = 0.0_f64;
        for &z in &zs {
            let r = recurrence_residual(&system, m, z)?;
            worst = worst.max(r.unnormalized);
            printed = printed.max(r.normalized);
        }
        report.push(Check::at_most(format!("recurrence-{m}"), worst, tol));
    }
    report.note(format!(
        "printed normalized relation under {}: max residual {printed:e} (reported, not checked)",
        cfg.theta
    ));
    Ok(())
}

fn infer(cfg: &RunConfig, report: &mut VerificationReport, tol: f64) -> Result<Vec<f64>> {
    let model = spectral_model(cfg)?;
    let starts = analytic_start_levels(cfg);
    let source = |start: usize, n: usize, t: f64| Ok(analytic_state(cfg, model.as_ref(), start, t).map_err(core_only)?[n]);
    let icfg = InferenceConfig {
        threshold: tol,
        ..InferenceConfig::default()
    };
    let rep = infer_couplings_report(source, cfg.levels, &starts, &icfg)?;
    report.push(Check::at_most("inference-residual", rep.residual, tol));
    report.note(format!("inference h = {:?}, start levels = {starts:?}", icfg.h));
    report.note(format!("worst violation: {}", rep.worst));
    let table = match cfg.model.variant() {
        Some(v) => Some(build_model(&LegendreSystem::new(cfg.levels, v, cfg.theta)?)?),
        None => None,
    };
    for (k, f) in rep.couplings.iter().enumerate() {
        let printed = match &table {
            Some(m) => m.coupling(k + 1).map_or("singular".to_string(), |p| format!("{p:?}")),
            None => format!("{:?}", cfg.couplings[k]),
        };
        report.note(format!("f_{} = {f:?} (table: {printed})", k + 1));
    }
    for s in rep.samples.iter().filter(|s| s.initial == cfg.initial) {
        report.note(format!(
            "start {}: a_{}(0) = {}, a_{}'(0)/i = {}",
            s.initial,
            s.level,
            show(s.start),
            s.level,
            show(s.value)
        ));
    }
    Ok(rep.couplings)
}

/// All checks for one Legendre model: orthogonality, the three-term
/// relation, and propagator against the analytic source.
pub fn verify(model: ModelChoice, levels: usize, tol: Option<f64>, analytic: AnalyticSource, report_path: Option<&Path>) -> Result<RunOutcome> {
    let started = Instant::now();
    let mut cfg = RunConfig::new(model, levels, Mode::Compare);
    cfg.tol = tol;
    cfg.analytic = analytic;
    cfg.initial = analytic_start_levels(&cfg).first().copied().unwrap_or(0);
    cfg.validate()?;
    let mut settings = cfg.settings();
    settings.retain(|(k, _)| !matches!(k.as_str(), "csv" | "report" | "plot" | "mode"));
    settings.push(("ortho-tol".into(), format!("{:?}", Mode::VerifyOrtho.default_tol())));
    settings.push(("recurrence-tol".into(), format!("{:?}", Mode::VerifyRecurrence.default_tol())));
    let mut report = VerificationReport::new(settings);
    ortho_checks(&mut report, levels, Mode::VerifyOrtho.default_tol())?;
    if levels >= 3 {
        recurrence_checks(&mut report, &cfg, Mode::VerifyRecurrence.default_tol())?;
    }
    match compare(&cfg, &mut report, cfg.effective_tol()) {
        Ok(_) => {}
        Err(crate::error::CliError::Core(qdyn_core::Error::InferenceFailed { residual, threshold, detail })) => {
            report.push(Check::at_most("coupling-inference", residual, threshold));
            report.note(format!("no ladder to propagate: {detail}"));
        }
        Err(e) => return Err(e),
    }
    report.elapsed = started.elapsed();
    let mut artifacts = Vec::new();
    if let Some(p) = report_path {
        write_file(p, &report.render())?;
        artifacts.push(p.to_path_buf());
    }
    Ok(RunOutcome { report, artifacts })
}

/// Orthogonality matrix alone.
pub fn ortho(levels: usize, tol: Option<f64>, report_path: Option<&Path>) -> Result<RunOutcome> {
    let tol = tol.unwrap_or(Mode::VerifyOrtho.default_tol());
    if !(tol > 0.0) {
        return Err(crate::error::CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let started = Instant::now();
    let mut report = VerificationReport::new(vec![("levels".into(), levels.to_string()), ("tol".into(), format!("{tol:?}"))]);
    ortho_checks(&mut report, levels, tol)?;
    report.elapsed = started.elapsed();
    let mut artifacts = Vec::new();
    if let Some(p) = report_path {
        write_file(p, &report.render())?;
        artifacts.push(p.to_path_buf());
    }
    Ok(RunOutcome { report, artifacts })
}
