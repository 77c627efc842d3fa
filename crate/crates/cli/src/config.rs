//! INI-style run configuration.
//!
//! Three sections, `[system]`, `[time]` and `[output]`, hold `key = value`
//! lines. Everything after `#` on a line is a comment. Unknown sections,
//! unknown keys and repeated keys are errors that name the key and line.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use qdyn_core::analytic::AnalyticAmplitudeSpec;
use qdyn_core::dynamics::{StepperMethod, TimeGrid};
use qdyn_core::orthosys::{LegendreSystem, ThetaConvention, Variant};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    LegendreA,
    LegendreB,
    Custom,
}

impl ModelChoice {
    pub fn variant(self) -> Option<Variant> {
        match self {
            Self::LegendreA => Some(Variant::A),
            Self::LegendreB => Some(Variant::B),
            Self::Custom => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::LegendreA => "legendre-a",
            Self::LegendreB => "legendre-b",
            Self::Custom => "custom",
        }
    }
}

impl FromStr for ModelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "legendre-a" => Ok(Self::LegendreA),
            "legendre-b" => Ok(Self::LegendreB),
            "custom" => Ok(Self::Custom),
            _ => Err(format!("expected legendre-a, legendre-b or custom, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Propagate,
    Analytic,
    Compare,
    VerifyOrtho,
    VerifyRecurrence,
    Infer,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Self::Propagate,
        Self::Analytic,
        Self::Compare,
        Self::VerifyOrtho,
        Self::VerifyRecurrence,
        Self::Infer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Propagate => "propagate",
            Self::Analytic => "analytic",
            Self::Compare => "compare",
            Self::VerifyOrtho => "verify-ortho",
            Self::VerifyRecurrence => "verify-recurrence",
            Self::Infer => "infer",
        }
    }

    /// Tolerance used when the config does not set `tol`.
    pub fn default_tol(self) -> f64 {
        match self {
            Self::Propagate => 1e-9,
            Self::Analytic => 1e-8,
            Self::Compare => 1e-6,
            Self::VerifyOrtho => 1e-10,
            Self::VerifyRecurrence => 1e-11,
            Self::Infer => 1e-6,
        }
    }

    fn uses_analytic(self) -> bool {
        matches!(self, Self::Analytic | Self::Compare | Self::Infer)
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// Where analytic amplitudes come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnalyticSource {
    /// The finite ₂F₂ sums, evaluated term by term as written.
    #[default]
    Printed,
    /// Exact ladder solution from the discrete spectral measure.
    Spectral,
}

impl AnalyticSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Printed => "printed",
            Self::Spectral => "spectral",
        }
    }
}

impl FromStr for AnalyticSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "printed" => Ok(Self::Printed),
            "spectral" => Ok(Self::Spectral),
            _ => Err(format!("expected printed or spectral, got `{s}`")),
        }
    }
}

fn theta_from_str(s: &str) -> Result<ThetaConvention, String> {
    ThetaConvention::ALL
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("expected real_cut, imag_plus or imag_minus, got `{s}`"))
}

fn stepper_name(m: StepperMethod) -> &'static str {
    match m {
        StepperMethod::Rk4Fixed => "rk4",
        StepperMethod::Rk4StepDoubling => "rk4-doubling",
    }
}

fn stepper_from_str(s: &str) -> Result<StepperMethod, String> {
    match s {
        "rk4" => Ok(StepperMethod::Rk4Fixed),
        "rk4-doubling" => Ok(StepperMethod::Rk4StepDoubling),
        _ => Err(format!("expected rk4 or rk4-doubling, got `{s}`")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSettings {
    pub t_max: f64,
    pub dt: f64,
    pub output_stride: usize,
    pub stepper: StepperMethod,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for TimeSettings {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            dt: 1e-3,
            output_stride: 10,
            stepper: StepperMethod::Rk4Fixed,
            rel_tol: 1e-10,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub csv: PathBuf,
    /// Defaults to the CSV path with extension `report.txt`.
    pub report: Option<PathBuf>,
    pub plot: bool,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            csv: PathBuf::from("trace.csv"),
            report: None,
            plot: false,
        }
    }
}

impl OutputSettings {
    pub fn report_path(&self) -> PathBuf {
        self.report.clone().unwrap_or_else(|| self.csv.with_extension("report.txt"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub levels: usize,
    /// Physical level occupied at t = 0.
    pub initial: usize,
    /// f_1..f_{N−1}, custom models only.
    pub couplings: Vec<f64>,
    /// s_0..s_{N−1}, custom models only.
    pub shifts: Vec<f64>,
    /// Scale r, custom models only.
    pub scale: f64,
    pub theta: ThetaConvention,
    pub analytic: AnalyticSource,
    pub mode: Mode,
    pub tol: Option<f64>,
    pub time: TimeSettings,
    pub output: OutputSettings,
}

impl RunConfig {
    /// Minimal configuration for a Legendre model; everything else default.
    pub fn new(model: ModelChoice, levels: usize, mode: Mode) -> Self {
        Self {
            model,
            levels,
            initial: 0,
            couplings: Vec::new(),
            shifts: Vec::new(),
            scale: 1.0,
            theta: ThetaConvention::RealCut,
            analytic: AnalyticSource::Printed,
            mode,
            tol: None,
            time: TimeSettings::default(),
            output: OutputSettings::default(),
        }
    }

    pub fn effective_tol(&self) -> f64 {
        self.tol.unwrap_or_else(|| self.mode.default_tol())
    }

    /// Checks every cross-key constraint. Errors name the key; the line is
    /// looked up in `lines` when the config came from text.
    fn validate_with(&self, lines: &HashMap<&'static str, usize>) -> Result<(), ConfigError> {
        let fail = |key: &'static str, message: String| ConfigError::Invalid {
            line: lines.get(key).copied(),
            key,
            message,
        };
        match self.model.variant() {
            Some(v) => {
                LegendreSystem::new(self.levels, v, self.theta).map_err(|e| fail("levels", e.to_string()))?;
                if !self.couplings.is_empty() {
                    return Err(fail("couplings", "only custom models take a couplings table".into()));
                }
                if !self.shifts.is_empty() {
                    return Err(fail("shifts", "only custom models take a shifts table".into()));
                }
                if self.scale != 1.0 {
                    return Err(fail("scale", "only custom models take an explicit scale".into()));
                }
            }
            None => {
                if self.levels == 0 {
                    return Err(fail("levels", "a custom model needs at least one level".into()));
                }
                if self.couplings.len() + 1 != self.levels {
                    return Err(fail(
                        "couplings",
                        format!("expected {} couplings for levels = {}, got {}", self.levels - 1, self.levels, self.couplings.len()),
                    ));
                }
                if self.shifts.len() != self.levels {
                    return Err(fail(
                        "shifts",
                        format!("expected {} shifts for levels = {}, got {}", self.levels, self.levels, self.shifts.len()),
                    ));
                }
                if !(self.scale > 0.0 && self.scale.is_finite()) {
                    return Err(fail("scale", format!("must be positive and finite, got {}", self.scale)));
                }
            }
        }
        if self.initial >= self.levels {
            return Err(fail("initial", format!("must be below levels = {}, got {}", self.levels, self.initial)));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(fail("tol", format!("must be positive, got {tol}")));
            }
        }
        if self.mode.uses_analytic() && self.analytic == AnalyticSource::Printed {
            let Some(v) = self.model.variant() else {
                return Err(fail("analytic", "printed closed forms exist only for legendre-a and legendre-b".into()));
            };
            if AnalyticAmplitudeSpec::initial_for_physical_level(v, self.levels, self.initial).is_none() {
                return Err(fail(
                    "initial",
                    format!("the printed closed form for {} does not start in level {}", self.model.name(), self.initial),
                ));
            }
        }
        if self.mode.uses_analytic() && self.analytic == AnalyticSource::Spectral && self.model == ModelChoice::LegendreA {
            return Err(fail(
                "analytic",
                "legendre-a has no finite coupling table to build a spectral measure from; use analytic = printed".into(),
            ));
        }
        if self.mode == Mode::VerifyRecurrence && self.levels < 3 {
            return Err(fail("levels", "the three-term relation needs levels >= 3".into()));
        }
        if self.mode == Mode::VerifyOrtho && self.levels < 2 {
            return Err(fail("levels", "the orthogonality check needs levels >= 2".into()));
        }
        let t = &self.time;
        TimeGrid::new(t.t_max, t.dt, t.output_stride).map_err(|e| {
            let key = if !(t.dt > 0.0) || !t.dt.is_finite() {
                "dt"
            } else if t.output_stride == 0 {
                "output_stride"
            } else {
                "t_max"
            };
            fail(key, e.to_string())
        })?;
        if !(t.rel_tol > 0.0 && t.rel_tol.is_finite()) {
            return Err(fail("rel_tol", format!("must be positive, got {}", t.rel_tol)));
        }
        if t.max_steps == 0 {
            return Err(fail("max_steps", "must be at least 1".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with(&HashMap::new())
    }

    /// Text that [`parse_config`] maps back to `self`.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        // Writing to a String cannot fail.
        let _ = writeln!(s, "[system]");
        let _ = writeln!(s, "model = {}", self.model.name());
        let _ = writeln!(s, "levels = {}", self.levels);
        let _ = writeln!(s, "initial = {}", self.initial);
        let _ = writeln!(s, "mode = {}", self.mode.name());
        let _ = writeln!(s, "theta = {}", self.theta.name());
        let _ = writeln!(s, "analytic = {}", self.analytic.name());
        if let Some(tol) = self.tol {
            let _ = writeln!(s, "tol = {tol:?}");
        }
        if self.model == ModelChoice::Custom {
            let _ = writeln!(s, "couplings = {}", list(&self.couplings));
            let _ = writeln!(s, "shifts = {}", list(&self.shifts));
            let _ = writeln!(s, "scale = {:?}", self.scale);
        }
        let t = &self.time;
        let _ = writeln!(s, "\n[time]");
        let _ = writeln!(s, "t_max = {:?}", t.t_max);
        let _ = writeln!(s, "dt = {:?}", t.dt);
        let _ = writeln!(s, "output_stride = {}", t.output_stride);
        let _ = writeln!(s, "stepper = {}", stepper_name(t.stepper));
        let _ = writeln!(s, "rel_tol = {:?}", t.rel_tol);
        let _ = writeln!(s, "max_steps = {}", t.max_steps);
        let o = &self.output;
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "csv = {}", o.csv.display());
        if let Some(r) = &o.report {
            let _ = writeln!(s, "report = {}", r.display());
        }
        let _ = writeln!(s, "plot = {}", o.plot);
        s
    }

    /// Every setting with its effective value, for reports.
    pub fn settings(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("model".to_string(), self.model.name().to_string()),
            ("levels".into(), self.levels.to_string()),
            ("initial".into(), self.initial.to_string()),
            ("mode".into(), self.mode.name().into()),
            ("theta".into(), self.theta.name().into()),
            ("analytic".into(), self.analytic.name().into()),
            ("tol".into(), format!("{:?}", self.effective_tol())),
        ];
        if self.model == ModelChoice::Custom {
            let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
            out.push(("couplings".into(), list(&self.couplings)));
            out.push(("shifts".into(), list(&self.shifts)));
            out.push(("scale".into(), format!("{:?}", self.scale)));
        }
        let t = &self.time;
        out.extend([
            ("t_max".to_string(), format!("{:?}", t.t_max)),
            ("dt".into(), format!("{:?}", t.dt)),
            ("output_stride".into(), t.output_stride.to_string()),
            ("stepper".into(), stepper_name(t.stepper).into()),
            ("rel_tol".into(), format!("{:?}", t.rel_tol)),
            ("max_steps".into(), t.max_steps.to_string()),
            ("csv".into(), self.output.csv.display().to_string()),
            ("report".into(), self.output.report_path().display().to_string()),
            ("plot".into(), self.output.plot.to_string()),
        ]);
        out
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ini())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    System,
    Time,
    Output,
}

const SYSTEM_KEYS: &[&str] = &["model", "levels", "initial", "mode", "theta", "analytic", "tol", "couplings", "shifts", "scale"];
const TIME_KEYS: &[&str] = &["t_max", "dt", "output_stride", "stepper", "rel_tol", "max_steps"];
const OUTPUT_KEYS: &[&str] = &["csv", "report", "plot"];

struct Entry {
    line: usize,
    value: String,
}

fn value<T, E: fmt::Display>(entries: &HashMap<&'static str, Entry>, key: &'static str, parse: impl Fn(&str) -> Result<T, E>) -> Result<Option<T>, ConfigError> {
    match entries.get(key) {
        None => Ok(None),
        Some(e) => parse(&e.value).map(Some).map_err(|err| ConfigError::Invalid {
            line: Some(e.line),
            key,
            message: err.to_string(),
        }),
    }
}

fn float(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("expected a number, got `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got `{s}`"))
    }
}

fn integer(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("expected a non-negative integer, got `{s}`"))
}

fn float_list(s: &str) -> Result<Vec<f64>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| float(x.trim())).collect()
}

fn boolean(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

/// Parses and validates a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut section = None;
    let mut entries: HashMap<&'static str, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
            section = Some(match name.trim() {
                "system" => Section::System,
                "time" => Section::Time,
                "output" => Section::Output,
                other => {
                    return Err(ConfigError::Syntax {
                        line,
                        message: format!("unknown section [{other}]"),
                    })
                }
            });
            continue;
        }
        let Some((key, val)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        let Some(section) = section else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("key `{key}` appears before any section"),
            });
        };
        let allowed = match section {
            Section::System => SYSTEM_KEYS,
            Section::Time => TIME_KEYS,
            Section::Output => OUTPUT_KEYS,
        };
        let Some(&known) = allowed.iter().find(|k| **k == key) else {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        };
        if let Some(prev) = entries.get(known) {
            return Err(ConfigError::Invalid {
                line: Some(line),
                key: known,
                message: format!("repeated; first set on line {}", prev.line),
            });
        }
        entries.insert(
            known,
            Entry {
                line,
                value: val.trim().to_string(),
            },
        );
    }

    let model = value(&entries, "model", ModelChoice::from_str)?.ok_or(ConfigError::Missing { key: "model" })?;
    let levels = value(&entries, "levels", integer)?.ok_or(ConfigError::Missing { key: "levels" })?;
    let mut cfg = RunConfig::new(model, levels, Mode::Propagate);
    if let Some(v) = value(&entries, "mode", Mode::from_str)? {
        cfg.mode = v;
    }
    if let Some(v) = value(&entries, "initial", integer)? {
        cfg.initial = v;
    }
    if let Some(v) = value(&entries, "theta", theta_from_str)? {
        cfg.theta = v;
    }
    if let Some(v) = value(&entries, "analytic", AnalyticSource::from_str)? {
        cfg.analytic = v;
    }
    cfg.tol = value(&entries, "tol", float)?;
    if let Some(v) = value(&entries, "couplings", float_list)? {
        cfg.couplings = v;
    }
    if let Some(v) = value(&entries, "shifts", float_list)? {
        cfg.shifts = v;
    } else if model == ModelChoice::Custom {
        cfg.shifts = vec![0.0; levels];
    }
    if let Some(v) = value(&entries, "scale", float)? {
        cfg.scale = v;
    }
    if model == ModelChoice::Custom && !entries.contains_key("couplings") {
        return Err(ConfigError::Missing { key: "couplings" });
    }
    let t = &mut cfg.time;
    if let Some(v) = value(&entries, "t_max", float)? {
        t.t_max = v;
    }
    if let Some(v) = value(&entries, "dt", float)? {
        t.dt = v;
    }
    if let Some(v) = value(&entries, "output_stride", integer)? {
        t.output_stride = v;
    }
    if let Some(v) = value(&entries, "stepper", stepper_from_str)? {
        t.stepper = v;
    }
    if let Some(v) = value(&entries, "rel_tol", float)? {
        t.rel_tol = v;
    }
    if let Some(v) = value(&entries, "max_steps", integer)? {
        t.max_steps = v;
    }
    let o = &mut cfg.output;
    if let Some(v) = value(&entries, "csv", |s: &str| non_empty_path(s))? {
        o.csv = v;
    }
    o.report = value(&entries, "report", |s: &str| non_empty_path(s))?;
    if let Some(v) = value(&entries, "plot", boolean)? {
        o.plot = v;
    }

    let lines: HashMap<&'static str, usize> = entries.iter().map(|(k, e)| (*k, e.line)).collect();
    cfg.validate_with(&lines)?;
    Ok(cfg)
}

fn non_empty_path(s: &str) -> Result<PathBuf, String> {
    if s.is_empty() {
        Err("path must not be empty".into())
    } else {
        Ok(PathBuf::from(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_mapping() {
        let cfg = parse_config("[system]\nmodel=legendre-b\nlevels=4\ninitial=0\n").unwrap();
        assert_eq!(cfg.model, ModelChoice::LegendreB);
        assert_eq!(cfg.levels, 4);
        assert_eq!(cfg.initial, 0);
        assert_eq!(cfg.mode, Mode::Propagate);
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config("# header\n\n[system]  # the model\nmodel = legendre-b # two\nlevels = 2\n[time]\ndt = 0.01\n").unwrap();
        assert_eq!(cfg.time.dt, 0.01);
    }

    #[test]
    fn size_error_for_one_level() {
        let err = parse_config("[system]\nmodel = legendre-b\nlevels = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("levels") && msg.contains("line 3") && msg.contains("invalid system size"), "{msg}");
    }

    #[test]
    fn scale_singularity_for_two_levels() {
        let err = parse_config("[system]\nmodel = legendre-a\nlevels = 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("scale r is singular") && msg.contains("(N-2)(N+1)/2"), "{msg}");
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let err = parse_config("[system]\nmodel = legendre-b\nlevles = 3\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                line: 3,
                key: "levles".into()
            }
        );
    }

    #[test]
    fn key_in_wrong_section_is_unknown() {
        let err = parse_config("[time]\nmodel = legendre-b\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 2, .. }));
    }

    #[test]
    fn negative_dt_names_dt() {
        let err = parse_config("[system]\nmodel = legendre-b\nlevels = 2\n[time]\ndt = -1\n").unwrap_err();
        match err {
            ConfigError::Invalid { line, key, .. } => {
                assert_eq!(key, "dt");
                assert_eq!(line, Some(5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_mismatch_and_missing() {
        assert!(matches!(
            parse_config("[system]\nmodel = legendre-b\nlevels = three\n").unwrap_err(),
            ConfigError::Invalid { key: "levels", line: Some(3), .. }
        ));
        assert_eq!(parse_config("[system]\nlevels = 3\n").unwrap_err(), ConfigError::Missing { key: "model" });
        assert!(matches!(
            parse_config("[system]\nmodel = legendre-b\nlevels = 3\nlevels = 4\n").unwrap_err(),
            ConfigError::Invalid { key: "levels", line: Some(4), .. }
        ));
    }

    #[test]
    fn custom_tables() {
        let cfg = parse_config("[system]\nmodel = custom\nlevels = 3\ncouplings = 1.0, 2.236\nshifts = 0, 0, 0\n").unwrap();
        assert_eq!(cfg.couplings, vec![1.0, 2.236]);
        assert_eq!(cfg.shifts, vec![0.0; 3]);
        let err = parse_config("[system]\nmodel = custom\nlevels = 3\ncouplings = 1.0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "couplings", line: Some(4), .. }));
        let err = parse_config("[system]\nmodel = legendre-b\nlevels = 3\ncouplings = 1.0, 2.0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "couplings", .. }));
    }

    #[test]
    fn printed_closed_form_start_level_is_checked() {
        // The second-family sums start in levels 0..N−2.
        let err = parse_config("[system]\nmodel = legendre-b\nlevels = 3\ninitial = 2\nmode = analytic\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "initial", line: Some(4), .. }));
        assert!(parse_config("[system]\nmodel = legendre-b\nlevels = 3\ninitial = 2\nmode = analytic\nanalytic = spectral\n").is_ok());
    }

    #[test]
    fn serialization_round_trip() {
        let mut cfg = RunConfig::new(ModelChoice::Custom, 3, Mode::Compare);
        cfg.couplings = vec![0.1, 1.0 / 3.0];
        cfg.shifts = vec![0.0, -2.5e-7, 1e20];
        cfg.scale = 0.7;
        cfg.analytic = AnalyticSource::Spectral;
        cfg.tol = Some(3e-9);
        cfg.output.report = Some("out/r.txt".into());
        assert_eq!(parse_config(&cfg.to_ini()).unwrap(), cfg);
    }
}
