//! Finite ₂F₂ sums for the amplitudes of the two Legendre-function systems.
//!
//! For the first system (index n counted as in the function family):
//!
//! a_n(t) = 2^{m−n+1} √π {m (N+m−1)! (N−m−1)!}^{1/2}
//!          {n (N+n−1)! / (N−n−1)!}^{1/2} e^{irt} (irt)^{n+m} / n!
//!          Σ_{k=0}^{N−m−1} Γ(N−k−½) (−2irt)^{N−m−1−k}
//!              / [(N+m−k−1)! (N−m−k−1)! k! Γ(N+n−k)]
//!          ₂F₂(N+n, n+½; N+n−k, 2n+1; −2irt).
//!
//! The second system is the same sum after relabelling the levels
//! n → N−1−n; the initial index m keeps its original meaning, so the
//! physically excited level is N−1−m.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthosys::{scale_a, scale_b, Variant};
use crate::specfun::{hyp2f2_detailed, ln_factorial, log_gamma, Hyp2F2Params};

/// Selects one closed-form amplitude family and its initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticAmplitudeSpec {
    pub variant: Variant,
    pub levels: usize,
    /// Initial index m in the family labelling, 1 <= m <= N−1.
    pub initial: usize,
    /// Relative tolerance handed to every ₂F₂ evaluation.
    pub hyp_tol: f64,
}

impl AnalyticAmplitudeSpec {
    pub const DEFAULT_HYP_TOL: f64 = 1e-16;

    pub fn new(variant: Variant, levels: usize, initial: usize) -> Result<Self> {
        let spec = Self {
            variant,
            levels,
            initial,
            hyp_tol: Self::DEFAULT_HYP_TOL,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_hyp_tol(mut self, hyp_tol: f64) -> Self {
        self.hyp_tol = hyp_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let min_levels = match self.variant {
            Variant::A => 3,
            Variant::B => 2,
        };
        if self.levels < min_levels {
            return Err(match self.variant {
                Variant::A => Error::ScaleSingularity { levels: self.levels },
                Variant::B => Error::Size {
                    levels: self.levels,
                    reason: "the closed form needs N >= 2",
                },
            });
        }
        if self.initial == 0 {
            return Err(Error::ExcludedIndex {
                levels: self.levels,
                index: 0,
                reason: "the prefactor sqrt(m) makes every amplitude vanish for m = 0",
            });
        }
        if self.initial >= self.levels {
            return Err(Error::ExcludedIndex {
                levels: self.levels,
                index: self.initial,
                reason: "initial index must satisfy 1 <= m <= N-1",
            });
        }
        if !(self.hyp_tol > 0.0) {
            return Err(Error::domain("AnalyticAmplitudeSpec", "hyp_tol must be positive"));
        }
        Ok(())
    }

    /// Level that is populated at t = 0 according to the equations of
    /// motion, in the physical labelling used by [`amplitude_closed_form`].
    pub fn physical_initial_level(&self) -> usize {
        match self.variant {
            Variant::A => self.initial,
            Variant::B => self.levels - 1 - self.initial,
        }
    }

    /// Index m for which this family starts in physical level `level`.
    pub fn initial_for_physical_level(variant: Variant, levels: usize, level: usize) -> Option<usize> {
        let m = match variant {
            Variant::A => level,
            Variant::B => (levels - 1).checked_sub(level)?,
        };
        (1..levels).contains(&m).then_some(m)
    }

    pub fn scale(&self) -> Result<f64> {
        match self.variant {
            Variant::A => scale_a(self.levels),
            Variant::B => scale_b(self.levels),
        }
    }

    fn family_index(&self, n: usize) -> usize {
        match self.variant {
            Variant::A => n,
            Variant::B => self.levels - 1 - n,
        }
    }
}

/// One summand of the k-sum, with its pieces kept apart for audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTerm {
    pub k: usize,
    /// Everything except the ₂F₂ factor, including the common prefactor.
    pub coefficient: Complex64,
    pub hyp: Complex64,
    pub hyp_error: f64,
    pub hyp_terms: usize,
    pub hyp_extended: bool,
    pub contribution: Complex64,
}

/// a_n(t) with its per-term breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormValue {
    pub value: Complex64,
    pub terms: Vec<ClosedFormTerm>,
}

impl ClosedFormValue {
    /// Largest term modulus over |value|; large ratios mean cancellation.
    pub fn cancellation_ratio(&self) -> f64 {
        let peak = self.terms.iter().map(|t| t.contribution.norm()).fold(0.0, f64::max);
        if self.value.norm() == 0.0 {
            if peak == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            peak / self.value.norm()
        }
    }
}

/// i^p for integer p.
fn i_pow(p: i64) -> Complex64 {
    match p.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// (i x)^p = |x|^p · i^p · sign(x)^p with an integer exponent.
fn imag_power(x: f64, p: usize) -> Complex64 {
    if p == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if x == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if x < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
    i_pow(p as i64) * (sign * (p as f64 * x.abs().ln()).exp())
}

/// Amplitude of physical level n at time t.
pub fn amplitude_closed_form(spec: &AnalyticAmplitudeSpec, n: usize, t: f64) -> Result<Complex64> {
    closed_form_detailed(spec, n, t).map(|v| v.value)
}

pub fn closed_form_detailed(spec: &AnalyticAmplitudeSpec, n: usize, t: f64) -> Result<ClosedFormValue> {
    spec.validate()?;
    let levels = spec.levels;
    if n >= levels {
        return Err(Error::ExcludedIndex {
            levels,
            index: n,
            reason: "level index must satisfy 0 <= n <= N-1",
        });
    }
    if !t.is_finite() {
        return Err(Error::domain("amplitude_closed_form", format!("time must be finite, got {t}")));
    }
    let big_n = levels as i64;
    let m = spec.initial as i64;
    let j = spec.family_index(n) as i64;
    if j == 0 {
        // The prefactor {j (N+j−1)!/(N−j−1)!}^{1/2} vanishes.
        return Ok(ClosedFormValue {
            value: Complex64::new(0.0, 0.0),
            terms: Vec::new(),
        });
    }
    let r = spec.scale()?;
    let rt = r * t;
    let lnf = |x: i64| ln_factorial(x as u64);

    let ln_prefactor = (m - j + 1) as f64 * LN_2
        + 0.5 * PI.ln()
        + 0.5 * ((m as f64).ln() + lnf(big_n + m - 1) + lnf(big_n - m - 1))
        + 0.5 * ((j as f64).ln() + lnf(big_n + j - 1) - lnf(big_n - j - 1))
        - lnf(j);
    let prefactor = Complex64::from_polar(ln_prefactor.exp(), rt) * imag_power(rt, (j + m) as usize);

    let arg = Complex64::new(0.0, -2.0 * rt);
    let mut terms = Vec::new();
    let mut value = Complex64::new(0.0, 0.0);
    for k in 0..=(big_n - m - 1) {
        let wrap = |source: Error| Error::ClosedFormTerm {
            k: k as usize,
            n,
            source: Box::new(source),
        };
        let ln_coef = log_gamma(big_n as f64 - k as f64 - 0.5).map_err(wrap)?
            - lnf(big_n + m - k - 1)
            - lnf(big_n - m - k - 1)
            - lnf(k)
            - lnf(big_n + j - k - 1);
        let q = (big_n - m - 1 - k) as usize;
        // (−2irt)^q = (i·(−2rt))^q
        let power = imag_power(-2.0 * rt, q);
        let coefficient = prefactor * power * ln_coef.exp();
        let params = Hyp2F2Params::new(
            (big_n + j) as f64,
            j as f64 + 0.5,
            (big_n + j - k) as f64,
            (2 * j + 1) as f64,
            arg,
        )
        .with_rel_tol(spec.hyp_tol);
        let hyp = hyp2f2_detailed(&params).map_err(wrap)?;
        let contribution = coefficient * hyp.value;
        value += contribution;
        terms.push(ClosedFormTerm {
            k: k as usize,
            coefficient,
            hyp: hyp.value,
            hyp_error: hyp.error_estimate,
            hyp_terms: hyp.terms,
            hyp_extended: hyp.extended_precision,
            contribution,
        });
    }
    Ok(ClosedFormValue { value, terms })
}

/// All N amplitudes at one time.
pub fn closed_form_state(spec: &AnalyticAmplitudeSpec, t: f64) -> Result<Vec<Complex64>> {
    (0..spec.levels).map(|n| amplitude_closed_form(spec, n, t)).collect()
}

/// Consistency audit of a closed form against the equations of motion.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptionReport {
    pub spec: AnalyticAmplitudeSpec,
    /// max_n |a_n(0) − δ_{n,m}| in the physical labelling.
    pub initial_defect: f64,
    pub initial_state: Vec<Complex64>,
    /// (t, Σ|a_n|² − 1) at each audited time.
    pub unitarity_defects: Vec<(f64, f64)>,
    /// Per-level k-sum breakdown at the largest audited time.
    pub terms_at_last_time: Vec<ClosedFormValue>,
}

impl TranscriptionReport {
    pub fn max_unitarity_defect(&self) -> f64 {
        self.unitarity_defects.iter().map(|&(_, d)| d.abs()).fold(0.0, f64::max)
    }
}

pub fn transcription_report(spec: &AnalyticAmplitudeSpec, times: &[f64]) -> Result<TranscriptionReport> {
    let initial_state = closed_form_state(spec, 0.0)?;
    let p = spec.physical_initial_level();
    let initial_defect = initial_state
        .iter()
        .enumerate()
        .map(|(n, a)| (a - if n == p { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    let mut unitarity_defects = Vec::with_capacity(times.len());
    for &t in times {
        let s = closed_form_state(spec, t)?;
        unitarity_defects.push((t, s.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0));
    }
    let t_last = times.iter().copied().fold(0.0, f64::max);
    let terms_at_last_time = (0..spec.levels)
        .map(|n| closed_form_detailed(spec, n, t_last))
        .collect::<Result<Vec<_>>>()?;
    Ok(TranscriptionReport {
        spec: *spec,
        initial_defect,
        initial_state,
        unitarity_defects,
        terms_at_last_time,
    })
}
