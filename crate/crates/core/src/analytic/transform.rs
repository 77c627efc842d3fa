//! Integral-transform amplitudes over the Legendre-function family,
//!
//! a_n(t) = ∫ ψ_m(z) ψ_n(z) e^{itrθ*(z)} dz/(1 − z²),   ψ_k = φ_k/d_k,
//!
//! and the projection of the kernel ψ_m e^{itrθ*} onto the family.
//!
//! For t ≠ 0 the integral is taken in u = z/√(1−z²), where
//! dz/(1−z²) = du/√(1+u²) and ψ_k decays like |u|^{−k}. The range is cut
//! at |u| = U and the two tails are added by repeated integration by parts,
//! whose first neglected term gives the reported tail bound. At t = 0 the
//! integral is the orthogonality integral and is taken in z = sin ϑ.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::closed_form::{amplitude_closed_form, AnalyticAmplitudeSpec};
use crate::error::{Error, Result};
use crate::orthosys::{normalized_phi_at, scale_a, scale_b, CutPoint, ThetaConvention, Variant};
use crate::quadrature::{integrate_doubling, DoublingConfig, GaussLegendre};

const POINTS_PER_PANEL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSolutionSpec {
    pub levels: usize,
    pub initial: usize,
    pub theta: ThetaConvention,
    /// r multiplying θ in the exponent.
    pub scale: f64,
    /// Truncation half-width U in the u variable.
    pub half_width: f64,
    pub node_budget: usize,
    /// Absolute tolerance for the truncated integral and for the tail bound.
    pub tol: f64,
}

impl QuadratureSolutionSpec {
    pub const DEFAULT_HALF_WIDTH: f64 = 1000.0;
    pub const DEFAULT_NODE_BUDGET: usize = 1 << 22;
    pub const DEFAULT_TOL: f64 = 1e-9;

    /// Spec with the scale r of the given coupling family.
    pub fn new(variant: Variant, levels: usize, initial: usize, theta: ThetaConvention) -> Result<Self> {
        let scale = match variant {
            Variant::A => scale_a(levels)?,
            Variant::B => scale_b(levels)?,
        };
        let spec = Self {
            levels,
            initial,
            theta,
            scale,
            half_width: Self::DEFAULT_HALF_WIDTH,
            node_budget: Self::DEFAULT_NODE_BUDGET,
            tol: Self::DEFAULT_TOL,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_theta(mut self, theta: ThetaConvention) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_half_width(mut self, half_width: f64) -> Self {
        self.half_width = half_width;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::Size {
                levels: self.levels,
                reason: "the Legendre system needs N >= 2",
            });
        }
        check_index(self.levels, self.initial)?;
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::domain("QuadratureSolutionSpec", "half-width U must be positive and finite"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain("QuadratureSolutionSpec", "tol must be positive"));
        }
        if !(self.scale.is_finite()) {
            return Err(Error::domain("QuadratureSolutionSpec", "scale r must be finite"));
        }
        if self.node_budget < 2 * POINTS_PER_PANEL {
            return Err(Error::domain("QuadratureSolutionSpec", "node budget is too small"));
        }
        Ok(())
    }
}

fn check_index(levels: usize, k: usize) -> Result<()> {
    if k == 0 || k >= levels {
        return Err(Error::ExcludedIndex {
            levels,
            index: k,
            reason: "transform amplitudes need 1 <= index <= N-1",
        });
    }
    Ok(())
}

/// Transform amplitude with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureAmplitude {
    pub value: Complex64,
    /// Bound on the part of both tails not captured by the correction.
    pub tail_bound: f64,
    /// Change of the truncated integral at the last panel doubling.
    pub last_change: f64,
    pub panels: usize,
    pub nodes_used: usize,
}

/// a_n(t) by quadrature.
pub fn amplitude_quadrature(spec: &QuadratureSolutionSpec, n: usize, t: f64) -> Result<Complex64> {
    amplitude_quadrature_detailed(spec, n, t).map(|a| a.value)
}

fn kernel_exponent(spec: &QuadratureSolutionSpec, t: f64, u: f64) -> Complex64 {
    // θ* for the configured branch.
    Complex64::new(0.0, t * spec.scale) * spec.theta.theta_from_ratio(u).conj()
}

/// ψ_m ψ_n /√(1+u²) without the oscillating factor.
fn envelope(levels: usize, m: usize, n: usize, u: f64) -> f64 {
    let p = CutPoint::from_ratio(u);
    normalized_phi_at(levels, m, p) * normalized_phi_at(levels, n, p) * p.w
}

fn integrand(spec: &QuadratureSolutionSpec, n: usize, t: f64, u: f64) -> Complex64 {
    kernel_exponent(spec, t, u).exp() * envelope(spec.levels, spec.initial, n, u)
}

fn at_zero_time(spec: &QuadratureSolutionSpec, n: usize) -> Result<QuadratureAmplitude> {
    let cfg = DoublingConfig {
        tol: spec.tol,
        initial_panels: 1,
        points_per_panel: 8,
        max_nodes: spec.node_budget,
    };
    let (levels, m) = (spec.levels, spec.initial);
    let r = integrate_doubling(&format!("a_{n}(0) (N = {levels}, m = {m})"), -FRAC_PI_2, FRAC_PI_2, &cfg, |a| {
        let p = CutPoint::from_angle(a);
        normalized_phi_at(levels, m, p) * normalized_phi_at(levels, n, p) / p.w
    })?;
    Ok(QuadratureAmplitude {
        value: Complex64::new(r.value, 0.0),
        tail_bound: 0.0,
        last_change: r.last_change,
        panels: r.panels,
        nodes_used: r.nodes_used,
    })
}

/// Rejects branches whose kernel grows along the integration path.
fn check_growth(spec: &QuadratureSolutionSpec, n: usize, t: f64) -> Result<()> {
    let u = spec.half_width;
    for side in [1.0, -1.0] {
        let near = integrand(spec, n, t, side * u).norm();
        let far = integrand(spec, n, t, side * 2.0 * u).norm();
        if !far.is_finite() || far > near {
            return Err(Error::DivergentIntegral {
                what: format!("a_{n}(t = {t}) under {}", spec.theta),
                cutoff: side * u,
                previous: near,
                current: far,
            });
        }
    }
    Ok(())
}

/// First three derivatives-by-parts of ∫_U^∞ g(v) e^{iωv} dv and the
/// size of the first dropped term, for slowly varying g.
fn oscillatory_tail(g: impl Fn(f64) -> f64, cutoff: f64, omega: f64) -> (Complex64, f64, f64) {
    let h = cutoff * 1e-3;
    let g0 = g(cutoff);
    let (gm2, gm1, gp1, gp2) = (g(cutoff - 2.0 * h), g(cutoff - h), g(cutoff + h), g(cutoff + 2.0 * h));
    let g1 = (gm2 - 8.0 * gm1 + 8.0 * gp1 - gp2) / (12.0 * h);
    let g2 = (-gm2 + 16.0 * gm1 - 30.0 * g0 + 16.0 * gp1 - gp2) / (12.0 * h * h);
    let iw = Complex64::new(0.0, omega);
    let phase = Complex64::from_polar(1.0, omega * cutoff);
    let value = phase * (-g0 / iw + g1 / (iw * iw) - g2 / (iw * iw * iw));
    let oscillatory_bound = g2.abs() / omega.abs().powi(3);
    // Without using the oscillation: |g| ~ v^{−p} integrates to |g| U/(p−1).
    let p = -cutoff * g1 / g0;
    let plain_bound = if g0 == 0.0 {
        0.0
    } else if p > 1.0 {
        g0.abs() * cutoff / (p - 1.0)
    } else {
        f64::INFINITY
    };
    (value, oscillatory_bound, plain_bound)
}

fn tails(spec: &QuadratureSolutionSpec, n: usize, t: f64) -> (Complex64, f64) {
    let (levels, m) = (spec.levels, spec.initial);
    let omega = spec.scale * t;
    let u = spec.half_width;
    let (right, rb, rp) = oscillatory_tail(|v| envelope(levels, m, n, v), u, omega);
    let (left, lb, lp) = oscillatory_tail(|v| envelope(levels, m, n, -v), u, -omega);
    if rb + lb <= rp + lp {
        (right + left, rb + lb)
    } else {
        (Complex64::new(0.0, 0.0), rp + lp)
    }
}

fn starting_panels(spec: &QuadratureSolutionSpec, t: f64) -> usize {
    let span = 2.0 * spec.half_width * (spec.scale * t).abs().max(1.0);
    ((span / 4.0).ceil() as usize).max(2).next_power_of_two()
}

pub fn amplitude_quadrature_detailed(spec: &QuadratureSolutionSpec, n: usize, t: f64) -> Result<QuadratureAmplitude> {
    spec.validate()?;
    check_index(spec.levels, n)?;
    if !t.is_finite() {
        return Err(Error::domain("amplitude_quadrature", format!("time must be finite, got {t}")));
    }
    if t == 0.0 {
        return at_zero_time(spec, n);
    }
    check_growth(spec, n, t)?;
    let what = format!("a_{n}(t = {t}) (N = {}, m = {})", spec.levels, spec.initial);
    let u = spec.half_width;
    let cfg = DoublingConfig {
        tol: 0.5 * spec.tol,
        initial_panels: starting_panels(spec, t),
        points_per_panel: POINTS_PER_PANEL,
        max_nodes: spec.node_budget,
    };
    let body = integrate_doubling(&what, -u, u, &cfg, |x| integrand(spec, n, t, x))?;
    let (tail, tail_bound) = if spec.theta == ThetaConvention::RealCut {
        tails(spec, n, t)
    } else {
        // The growth check leaves only decaying or bounded branches here.
        (Complex64::new(0.0, 0.0), integrand(spec, n, t, u).norm() * u + integrand(spec, n, t, -u).norm() * u)
    };
    if tail_bound > 0.5 * spec.tol {
        return Err(Error::TailTooLarge {
            what,
            tail: tail_bound,
            tol: 0.5 * spec.tol,
        });
    }
    Ok(QuadratureAmplitude {
        value: body.value + tail,
        tail_bound,
        last_change: body.last_change,
        panels: body.panels,
        nodes_used: body.nodes_used,
    })
}

/// Kernel U(t,·) expanded over the family, compared with the direct
/// transform amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProjectionReport {
    pub t: f64,
    /// (n, projection, direct amplitude) for 1 <= n <= N−1.
    pub entries: Vec<(usize, Complex64, Complex64)>,
    pub max_deviation: f64,
    /// 1 − Σ_n |c_n|²: zero iff the kernel lies in the span of ψ_1..ψ_{N−1}.
    pub completeness_defect: f64,
}

pub fn kernel_projection_check(spec: &QuadratureSolutionSpec, t: f64) -> Result<KernelProjectionReport> {
    spec.validate()?;
    let (levels, m) = (spec.levels, spec.initial);
    let rule = GaussLegendre::new(POINTS_PER_PANEL);
    let angle_rule = GaussLegendre::new(8);
    let mut sampled: HashMap<usize, Vec<(f64, f64, Complex64)>> = HashMap::new();
    let mut entries = Vec::with_capacity(levels - 1);
    for n in 1..levels {
        let direct = amplitude_quadrature_detailed(spec, n, t)?;
        // Kernel samples on the node set the direct computation settled on,
        // with weights folded in; reused for every n sharing that set.
        let nodes = sampled.entry(direct.panels).or_insert_with(|| {
            let mut out = Vec::with_capacity(direct.panels * POINTS_PER_PANEL);
            if t == 0.0 {
                push_nodes(&angle_rule, -FRAC_PI_2, FRAC_PI_2, direct.panels, |a, w| {
                    let p = CutPoint::from_angle(a);
                    out.push((a, w, Complex64::new(normalized_phi_at(levels, m, p) / p.w, 0.0)));
                });
            } else {
                let u = spec.half_width;
                push_nodes(&rule, -u, u, direct.panels, |x, w| {
                    let p = CutPoint::from_ratio(x);
                    out.push((x, w, kernel_exponent(spec, t, x).exp() * normalized_phi_at(levels, m, p) * p.w));
                });
            }
            out
        });
        let mut proj = Complex64::new(0.0, 0.0);
        for &(x, w, k) in nodes.iter() {
            let p = if t == 0.0 { CutPoint::from_angle(x) } else { CutPoint::from_ratio(x) };
            proj += k * (w * normalized_phi_at(levels, n, p));
        }
        if t != 0.0 && spec.theta == ThetaConvention::RealCut {
            proj += tails(spec, n, t).0;
        }
        entries.push((n, proj, direct.value));
    }
    let max_deviation = entries.iter().map(|(_, p, d)| (p - d).norm()).fold(0.0, f64::max);
    let completeness_defect = 1.0 - entries.iter().map(|(_, p, _)| p.norm_sqr()).sum::<f64>();
    Ok(KernelProjectionReport {
        t,
        entries,
        max_deviation,
        completeness_defect,
    })
}

fn push_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize, mut visit: impl FnMut(f64, f64)) {
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let hi = if p + 1 == panels { b } else { lo + h };
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            visit(mid + half * x, w * half);
        }
    }
}

/// Outcome of one transform evaluation in the branch audit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionSample {
    pub theta: ThetaConvention,
    pub t: f64,
    pub n: usize,
    pub transform: std::result::Result<Complex64, String>,
    pub closed_form: Complex64,
}

impl ConventionSample {
    pub fn deviation(&self) -> Option<f64> {
        self.transform.as_ref().ok().map(|v| (v - self.closed_form).norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionAudit {
    pub levels: usize,
    pub initial: usize,
    pub samples: Vec<ConventionSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConventionSummary {
    pub theta: ThetaConvention,
    /// max_n |a_n(0) − δ_{n,m}| from the transform.
    pub initial_defect: f64,
    /// Largest |transform − closed form| among t > 0 samples that evaluated.
    pub max_deviation: f64,
    pub failed_evaluations: usize,
    pub evaluated: usize,
}

impl ConventionAudit {
    pub fn summary(&self, theta: ThetaConvention) -> ConventionSummary {
        let mut s = ConventionSummary {
            theta,
            initial_defect: 0.0,
            max_deviation: 0.0,
            failed_evaluations: 0,
            evaluated: 0,
        };
        for x in self.samples.iter().filter(|x| x.theta == theta) {
            match &x.transform {
                Ok(v) if x.t == 0.0 => {
                    let delta = if x.n == self.initial { 1.0 } else { 0.0 };
                    s.initial_defect = s.initial_defect.max((v - delta).norm());
                }
                Ok(_) => {
                    s.evaluated += 1;
                    s.max_deviation = s.max_deviation.max(x.deviation().unwrap_or(0.0));
                }
                Err(_) => s.failed_evaluations += 1,
            }
        }
        s
    }
}

/// Transform amplitudes under every θ branch against the first-family
/// closed form with the same N and m.
pub fn theta_convention_audit(levels: usize, initial: usize, times: &[f64]) -> Result<ConventionAudit> {
    let closed = AnalyticAmplitudeSpec::new(Variant::A, levels, initial)?;
    let mut samples = Vec::new();
    for theta in ThetaConvention::ALL {
        let spec = QuadratureSolutionSpec::new(Variant::A, levels, initial, theta)?;
        for &t in times {
            for n in 1..levels {
                let transform = match amplitude_quadrature(&spec, n, t) {
                    Ok(v) => Ok(v),
                    Err(e) if e.is_non_convergence() => Err(e.to_string()),
                    Err(e) => return Err(e),
                };
                samples.push(ConventionSample {
                    theta,
                    t,
                    n,
                    transform,
                    closed_form: amplitude_closed_form(&closed, n, t)?,
                });
            }
        }
    }
    Ok(ConventionAudit {
        levels,
        initial,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(levels: usize, m: usize) -> QuadratureSolutionSpec {
        QuadratureSolutionSpec::new(Variant::A, levels, m, ThetaConvention::RealCut).unwrap()
    }

    #[test]
    fn zero_time_is_orthonormality() {
        for levels in 3..=6 {
            for m in 1..levels {
                let s = spec(levels, m);
                for n in 1..levels {
                    let v = amplitude_quadrature(&s, n, 0.0).unwrap();
                    let delta = if n == m { 1.0 } else { 0.0 };
                    assert!((v - delta).norm() < 1e-8, "N={levels} m={m} n={n}: {v}");
                }
            }
        }
    }

    #[test]
    fn opposite_parity_vanishes_at_zero_time() {
        let s = spec(5, 2);
        assert!(amplitude_quadrature(&s, 1, 0.0).unwrap().norm() < 1e-12);
        assert!(amplitude_quadrature(&s, 3, 0.0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn excluded_indices() {
        let s = spec(4, 1);
        assert!(matches!(amplitude_quadrature(&s, 0, 0.5), Err(Error::ExcludedIndex { .. })));
        assert!(QuadratureSolutionSpec::new(Variant::A, 4, 0, ThetaConvention::RealCut).is_err());
        assert!(s.with_half_width(-1.0).validate().is_err());
    }

    #[test]
    fn two_level_transform_is_a_fourier_integral() {
        // N = 2: ψ_1² du/√(1+u²) = du/(2(1+u²)^{3/2}), whose transform is
        // |ω| K_1(|ω|) with ω = r t. At ω = 1: K_1(1).
        let s = QuadratureSolutionSpec::new(Variant::B, 2, 1, ThetaConvention::RealCut).unwrap();
        let t = 1.0 / s.scale;
        let v = amplitude_quadrature(&s, 1, t).unwrap();
        let k1_of_1 = 0.601_907_230_197_234_6;
        assert!((v.re - k1_of_1).abs() < 1e-8, "{v}");
        assert!(v.im.abs() < 1e-8);
    }

    #[test]
    fn imaginary_branches_diverge() {
        let s = spec(3, 1).with_theta(ThetaConvention::ImagPlus);
        assert!(matches!(amplitude_quadrature(&s, 1, 0.5), Err(Error::DivergentIntegral { .. })));
        let s = s.with_theta(ThetaConvention::ImagMinus);
        assert!(matches!(amplitude_quadrature(&s, 2, 0.5), Err(Error::DivergentIntegral { .. })));
        // At t = 0 the branch is irrelevant.
        assert!((amplitude_quadrature(&s, 1, 0.0).unwrap() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn kernel_projection_reproduces_direct_values() {
        let s = spec(4, 2);
        for t in [0.0, 0.7] {
            let rep = kernel_projection_check(&s, t).unwrap();
            assert!(rep.max_deviation <= 1e-12, "t = {t}: {}", rep.max_deviation);
        }
        let rep = kernel_projection_check(&s, 0.0).unwrap();
        assert!(rep.completeness_defect.abs() < 1e-8);
    }

    #[test]
    fn halving_tolerance_and_doubling_cutoff_are_consistent() {
        let s = spec(3, 1);
        let a = amplitude_quadrature_detailed(&s, 2, 1.1).unwrap();
        let b = amplitude_quadrature_detailed(&s.with_half_width(2000.0), 2, 1.1).unwrap();
        let budget = a.tail_bound + b.tail_bound + 2.0 * s.tol;
        assert!((a.value - b.value).norm() <= budget, "{} vs {}", a.value, b.value);
    }
}
