//! Generalized hypergeometric series ₂F₂(a1, a2; b1, b2; x) for complex x.
//!
//! Terms are generated by the ratio recurrence
//! T_{k+1} = T_k (a1+k)(a2+k) x / ((b1+k)(b2+k)(k+1)). For imaginary x of
//! modulus tens the terms climb to ~e^{|x|} before decaying while the sum
//! stays O(1), so a first pass in f64 with Neumaier-compensated accumulation
//! is re-run in paired-limb arithmetic whenever its rounding bound exceeds
//! the requested tolerance.

use num_complex::Complex64;

use super::ddouble::{ComplexDD, DoubleDouble};
use crate::error::{Error, Result};

/// Parameters of one ₂F₂ evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F2Params {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub arg: Complex64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Hyp2F2Params {
    pub const DEFAULT_REL_TOL: f64 = 1e-17;
    pub const DEFAULT_MAX_TERMS: usize = 20_000;

    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64, arg: Complex64) -> Self {
        Self {
            a1,
            a2,
            b1,
            b2,
            arg,
            rel_tol: Self::DEFAULT_REL_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, b) in [("b1", self.b1), ("b2", self.b2)] {
            if !b.is_finite() || (b <= 0.0 && b.fract() == 0.0) {
                return Err(Error::domain(
                    "hyp2f2",
                    format!("lower parameter {name} = {b} is a non-positive integer or not finite"),
                ));
            }
        }
        if !self.a1.is_finite() || !self.a2.is_finite() {
            return Err(Error::domain("hyp2f2", "upper parameters must be finite"));
        }
        if !self.arg.re.is_finite() || !self.arg.im.is_finite() {
            return Err(Error::domain("hyp2f2", format!("argument {} is not finite", self.arg)));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("hyp2f2", format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_terms < 1 {
            return Err(Error::domain("hyp2f2", "max_terms must be at least 1"));
        }
        Ok(())
    }
}

/// Series value with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F2Value {
    pub value: Complex64,
    /// Truncation plus rounding estimate, absolute.
    pub error_estimate: f64,
    pub terms: usize,
    /// Largest term modulus seen; `peak / |value|` measures cancellation.
    pub peak_term: f64,
    pub extended_precision: bool,
}

const CONSECUTIVE_SMALL: usize = 3;

/// ₂F₂ value; see [`hyp2f2_detailed`] for the error estimate.
pub fn hyp2f2(params: &Hyp2F2Params) -> Result<Complex64> {
    hyp2f2_detailed(params).map(|v| v.value)
}

pub fn hyp2f2_detailed(params: &Hyp2F2Params) -> Result<Hyp2F2Value> {
    params.validate()?;
    if params.arg == Complex64::new(0.0, 0.0) {
        return Ok(Hyp2F2Value {
            value: Complex64::new(1.0, 0.0),
            error_estimate: 0.0,
            terms: 1,
            peak_term: 1.0,
            extended_precision: false,
        });
    }
    let fast = sum_f64(params)?;
    if fast.error_estimate <= params.rel_tol.max(64.0 * f64::EPSILON) * fast.value.norm() {
        return Ok(fast);
    }
    sum_extended(params)
}

fn ratio(p: &Hyp2F2Params, k: f64) -> f64 {
    (p.a1 + k) * (p.a2 + k) / ((p.b1 + k) * (p.b2 + k) * (k + 1.0))
}

struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn new(x: f64) -> Self {
        Self { sum: x, comp: 0.0 }
    }
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn sum_f64(p: &Hyp2F2Params) -> Result<Hyp2F2Value> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut re = Neumaier::new(1.0);
    let mut im = Neumaier::new(0.0);
    let mut rounding = 0.0;
    let mut peak = 1.0_f64;
    let mut small_run = 0;
    for k in 0..p.max_terms {
        term = term * p.arg * ratio(p, k as f64);
        re.add(term.re);
        im.add(term.im);
        let mag = term.norm();
        peak = peak.max(mag);
        // Each ratio step contributes a handful of roundings to the term.
        rounding += 6.0 * (k + 1) as f64 * f64::EPSILON * mag;
        let sum = Complex64::new(re.value(), im.value());
        if mag <= p.rel_tol * sum.norm() {
            small_run += 1;
            if small_run >= CONSECUTIVE_SMALL {
                return Ok(Hyp2F2Value {
                    value: sum,
                    error_estimate: 2.0 * mag + rounding + f64::EPSILON * sum.norm(),
                    terms: k + 2,
                    peak_term: peak,
                    extended_precision: false,
                });
            }
        } else {
            small_run = 0;
        }
    }
    let sum = Complex64::new(re.value(), im.value());
    Err(Error::SeriesNonConvergence {
        op: "hyp2f2",
        terms: p.max_terms,
        partial: sum.norm(),
        last_term: term.norm(),
    })
}

fn sum_extended(p: &Hyp2F2Params) -> Result<Hyp2F2Value> {
    let dd = DoubleDouble::from_f64;
    let x = ComplexDD::from_c64(p.arg);
    let mut term = ComplexDD::ONE;
    let mut sum = ComplexDD::ONE;
    let mut rounding = 0.0;
    let mut peak = 1.0_f64;
    let mut small_run = 0;
    for k in 0..p.max_terms {
        let kf = k as f64;
        let num = (dd(p.a1) + dd(kf)) * (dd(p.a2) + dd(kf));
        let den = (dd(p.b1) + dd(kf)) * (dd(p.b2) + dd(kf)) * dd(kf + 1.0);
        term = (term * x).scale(num.div(den));
        sum = sum + term;
        let mag = term.norm_f64();
        peak = peak.max(mag);
        rounding += 8.0 * (k + 1) as f64 * DoubleDouble::EPSILON * mag;
        let total = sum.norm_f64();
        if mag <= p.rel_tol * total {
            small_run += 1;
            if small_run >= CONSECUTIVE_SMALL {
                let value = sum.to_c64();
                return Ok(Hyp2F2Value {
                    value,
                    error_estimate: 2.0 * mag + rounding + f64::EPSILON * value.norm(),
                    terms: k + 2,
                    peak_term: peak,
                    extended_precision: true,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::SeriesNonConvergence {
        op: "hyp2f2",
        terms: p.max_terms,
        partial: sum.norm_f64(),
        last_term: term.norm_f64(),
    })
}
