//! Couplings read off an amplitude source at t = 0.
//!
//! Any solution of the amplitude equations started in level m has
//! da_n/dt(0) = i f_{n+1} δ_{n+1,m} + i f_n δ_{n−1,m}, so a_{m−1}'(0)/i = f_m
//! and a_{m+1}'(0)/i = f_{m+1}, while every other level starts with zero
//! slope. Anything else in the source counts against the residual.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthosys::{ModelKind, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceConfig {
    /// Finite-difference step.
    pub h: f64,
    /// Largest acceptable residual, relative to max(1, max |f|).
    pub threshold: f64,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self { h: 1e-4, threshold: 1e-6 }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-6..=1e-3).contains(&self.h) {
            return Err(Error::domain("infer_couplings", format!("step h = {} outside [1e-6, 1e-3]", self.h)));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::domain("infer_couplings", "threshold must be positive"));
        }
        Ok(())
    }
}

/// One slope measurement a_level'(0)/i with the source started in `initial`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeSample {
    pub initial: usize,
    pub level: usize,
    pub value: Complex64,
    pub start: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferredCouplings {
    pub levels: usize,
    /// f_1..f_{N−1}.
    pub couplings: Vec<f64>,
    pub samples: Vec<SlopeSample>,
    /// Worst violation of the t = 0 structure, scaled by max(1, max |f|).
    pub residual: f64,
    /// What produced the worst violation.
    pub worst: String,
    pub config: InferenceConfig,
}

impl InferredCouplings {
    pub fn is_consistent(&self) -> bool {
        self.residual <= self.config.threshold
    }

    /// Ladder with the inferred couplings and zero shifts.
    pub fn to_model(&self, label: impl Into<String>) -> Result<SystemModel> {
        Ok(SystemModel::custom(self.couplings.clone(), vec![0.0; self.levels], 1.0, label)?.with_kind(ModelKind::Inferred))
    }
}

fn show(z: Complex64) -> String {
    format!("({:e}, {:e})", z.re, z.im)
}

/// 4th-order central difference at 0.
fn slope(source: &impl Fn(f64) -> Result<Complex64>, h: f64) -> Result<Complex64> {
    let (p1, m1, p2, m2) = (source(h)?, source(-h)?, source(2.0 * h)?, source(-2.0 * h)?);
    Ok((m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h))
}

/// Measures every slope and assembles the table without judging it.
///
/// `source(initial, level, t)` is a_level(t) for the system started in
/// `initial`. Each f_k needs initial level k or k−1 among
/// `initial_levels`.
pub fn infer_couplings_report<F>(source: F, levels: usize, initial_levels: &[usize], cfg: &InferenceConfig) -> Result<InferredCouplings>
where
    F: Fn(usize, usize, f64) -> Result<Complex64>,
{
    cfg.validate()?;
    if levels < 2 {
        return Err(Error::Size {
            levels,
            reason: "coupling inference needs N >= 2",
        });
    }
    if let Some(&m) = initial_levels.iter().find(|&&m| m >= levels) {
        return Err(Error::domain("infer_couplings", format!("initial level {m} outside 0..{levels}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut samples = Vec::new();
    let mut estimates: Vec<Vec<Complex64>> = vec![Vec::new(); levels];
    let mut violations: Vec<(f64, String)> = Vec::new();
    for &m in initial_levels {
        for n in 0..levels {
            let start = source(m, n, 0.0)?;
            let value = slope(&|t| source(m, n, t), cfg.h)? / i;
            samples.push(SlopeSample {
                initial: m,
                level: n,
                value,
                start,
            });
            let delta = if n == m { 1.0 } else { 0.0 };
            violations.push(((start - delta).norm(), format!("a_{n}(0) = {} with initial level {m}", show(start))));
            if n + 1 == m {
                estimates[m].push(value);
            } else if n == m + 1 {
                estimates[n].push(value);
            } else {
                violations.push((value.norm(), format!("level {n} has slope i·{} with initial level {m}", show(value))));
            }
        }
    }
    let mut couplings = Vec::with_capacity(levels - 1);
    for (k, est) in estimates.iter().enumerate().skip(1) {
        if est.is_empty() {
            return Err(Error::domain(
                "infer_couplings",
                format!("no initial level among {initial_levels:?} constrains f_{k}"),
            ));
        }
        let mean = est.iter().sum::<Complex64>() / est.len() as f64;
        for e in est {
            violations.push(((e - mean).norm(), format!("estimates of f_{k} disagree ({} vs mean {})", show(*e), show(mean))));
        }
        violations.push((mean.im.abs(), format!("f_{k} has imaginary part {}", mean.im)));
        couplings.push(mean.re);
    }
    let scale = couplings.iter().fold(1.0_f64, |a, f| a.max(f.abs()));
    let (worst_abs, worst) = violations
        .into_iter()
        .fold((0.0, String::from("none")), |acc, v| if v.0 > acc.0 { v } else { acc });
    Ok(InferredCouplings {
        levels,
        couplings,
        samples,
        residual: worst_abs / scale,
        worst,
        config: *cfg,
    })
}

/// As [`infer_couplings_report`], failing when the residual exceeds the
/// threshold.
pub fn infer_couplings<F>(source: F, levels: usize, initial_levels: &[usize], cfg: &InferenceConfig) -> Result<InferredCouplings>
where
    F: Fn(usize, usize, f64) -> Result<Complex64>,
{
    let report = infer_couplings_report(source, levels, initial_levels, cfg)?;
    if !report.is_consistent() {
        return Err(Error::InferenceFailed {
            residual: report.residual,
            threshold: cfg.threshold,
            detail: report.worst,
        });
    }
    Ok(report)
}
