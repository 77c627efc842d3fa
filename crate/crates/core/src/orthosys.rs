//! Orthogonal Legendre-function systems and the level models they induce.
//!
//! The family is φ^(N)_m(z) = (−1)^{N−m−1} (N−m−1)! P^m_{N−1}(z) on the cut
//! (−1, 1), orthogonal under dz/(1 − z²) with
//! d_m² = (N+m−1)! (N−m−1)! / m. The m = 0 member has infinite norm and is
//! kept out of the orthonormal basis; where a normalized relation would
//! need φ_0/d_0 that term is taken as 0.
//!
//! The relation the functions provably satisfy is the Ferrers order
//! recurrence rewritten through the prefactor:
//!
//! (N−m−1) φ_{m+1} + (N+m−1) φ_{m−1} = 2m z (1−z²)^{−1/2} φ_m.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_doubling, DoublingConfig};
use crate::specfun::{ferrers_legendre_parts, ln_factorial};

/// Which of the two Legendre-derived level models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Couplings f_m = r {(N−m)(N+m−1)/(m(m−1))}^{1/2}, r = 2{(N−2)(N+1)/2}^{−1/2}.
    A,
    /// Couplings f_n = r {n(2N−n+1)/((N−n+1)(N−n))}^{1/2}, r = {(N−1)/2}^{−1/2}.
    B,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::A => f.write_str("A"),
            Variant::B => f.write_str("B"),
        }
    }
}

/// Branch used for θ(z) on the cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ThetaConvention {
    /// θ = z/√(1−z²), real.
    #[default]
    RealCut,
    /// θ = +i z/√(1−z²).
    ImagPlus,
    /// θ = −i z/√(1−z²).
    ImagMinus,
}

impl ThetaConvention {
    pub const ALL: [ThetaConvention; 3] = [Self::RealCut, Self::ImagPlus, Self::ImagMinus];

    /// θ at the cut point with real ratio u = z/√(1−z²).
    pub fn theta_from_ratio(self, u: f64) -> Complex64 {
        match self {
            Self::RealCut => Complex64::new(u, 0.0),
            Self::ImagPlus => Complex64::new(0.0, u),
            Self::ImagMinus => Complex64::new(0.0, -u),
        }
    }

    pub fn theta(self, z: f64) -> Complex64 {
        self.theta_from_ratio(z / ((1.0 - z) * (1.0 + z)).sqrt())
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::RealCut => "real_cut",
            Self::ImagPlus => "imag_plus",
            Self::ImagMinus => "imag_minus",
        }
    }
}

impl fmt::Display for ThetaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Descriptor of one Legendre-function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegendreSystem {
    levels: usize,
    variant: Variant,
    theta: ThetaConvention,
}

impl LegendreSystem {
    pub fn new(levels: usize, variant: Variant, theta: ThetaConvention) -> Result<Self> {
        match variant {
            Variant::A if levels < 3 => return Err(Error::ScaleSingularity { levels }),
            Variant::B if levels < 2 => {
                return Err(Error::Size {
                    levels,
                    reason: "variant B needs at least two levels",
                })
            }
            _ => {}
        }
        Ok(Self { levels, variant, theta })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn theta(&self) -> ThetaConvention {
        self.theta
    }

    pub fn scale(&self) -> f64 {
        match self.variant {
            Variant::A => scale_a(self.levels).expect("validated at construction"),
            Variant::B => scale_b(self.levels).expect("validated at construction"),
        }
    }
}

/// r = 2 {(N−2)(N+1)/2}^{−1/2}.
pub fn scale_a(levels: usize) -> Result<f64> {
    if levels < 3 {
        return Err(Error::ScaleSingularity { levels });
    }
    let n = levels as f64;
    Ok(2.0 / ((n - 2.0) * (n + 1.0) / 2.0).sqrt())
}

/// r = {(N−1)/2}^{−1/2}.
pub fn scale_b(levels: usize) -> Result<f64> {
    if levels < 2 {
        return Err(Error::Size {
            levels,
            reason: "variant B needs at least two levels",
        });
    }
    Ok(1.0 / ((levels as f64 - 1.0) / 2.0).sqrt())
}

/// A point on the cut carried as (z, √(1 − z²)) so both can come from a
/// substitution without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CutPoint {
    pub z: f64,
    pub w: f64,
}

impl CutPoint {
    pub fn from_z(z: f64) -> Self {
        Self {
            z,
            w: ((1.0 - z) * (1.0 + z)).sqrt(),
        }
    }

    /// z = sin ϑ.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { z: s, w: c }
    }

    /// z = u/√(1+u²), so that u = z/√(1−z²).
    pub fn from_ratio(u: f64) -> Self {
        let h = u.hypot(1.0);
        Self { z: u / h, w: 1.0 / h }
    }

    pub fn ratio(&self) -> f64 {
        self.z / self.w
    }
}

fn check_member(levels: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::ExcludedIndex {
            levels,
            index: m,
            reason: "the m = 0 member has infinite norm",
        });
    }
    if m >= levels {
        return Err(Error::ExcludedIndex {
            levels,
            index: m,
            reason: "members with m >= N are outside the finite system",
        });
    }
    Ok(())
}

/// φ^(N)_m including the infinite-norm m = 0 member; 0 <= m < N.
pub(crate) fn phi_at(levels: usize, m: usize, p: CutPoint) -> f64 {
    debug_assert!(m < levels);
    let sign = if (levels - m - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let fact = ln_factorial((levels - m - 1) as u64).exp();
    sign * fact * ferrers_legendre_parts(levels - 1, m, p.z, p.w)
}

/// φ^(N)_m(z) = (−1)^{N−m−1} (N−m−1)! P^m_{N−1}(z), for 1 <= m <= N−1.
pub fn phi(levels: usize, m: usize, z: f64) -> Result<f64> {
    check_member(levels, m)?;
    if !(z.abs() < 1.0) {
        return Err(Error::domain("phi", format!("argument must satisfy |z| < 1, got {z}")));
    }
    Ok(phi_at(levels, m, CutPoint::from_z(z)))
}

/// ln d_m with d_m² = (N+m−1)! (N−m−1)! / m.
pub fn ln_norm_d(levels: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InfiniteNorm { levels });
    }
    check_member(levels, m)?;
    Ok(0.5 * (ln_factorial((levels + m - 1) as u64) + ln_factorial((levels - m - 1) as u64) - (m as f64).ln()))
}

pub fn norm_d(levels: usize, m: usize) -> Result<f64> {
    ln_norm_d(levels, m).map(f64::exp)
}

/// φ_m/d_m at a cut point, for 1 <= m < N.
pub(crate) fn normalized_phi_at(levels: usize, m: usize, p: CutPoint) -> f64 {
    let ln_d = ln_norm_d(levels, m).expect("caller checked the index");
    phi_at(levels, m, p) * (-ln_d).exp()
}

/// c_m = ½ {(N−m)(N+m−1)/(m(m−1))}^{1/2}, m >= 2.
///
/// With ψ_m = φ_m/d_m and θ = z/√(1−z²) the order recurrence becomes
/// θ ψ_m = c_{m+1} ψ_{m+1} + c_m ψ_{m−1} for 2 <= m <= N−1, while for m = 1
/// the right side carries N φ_0/(2 d_1) instead of a basis member.
pub fn normalized_relation_coefficient(levels: usize, m: usize) -> Result<f64> {
    if m < 2 || m > levels {
        return Err(Error::ExcludedIndex {
            levels,
            index: m,
            reason: "the normalized relation coefficient is defined for 2 <= m <= N",
        });
    }
    let (n, mf) = (levels as f64, m as f64);
    Ok(0.5 * ((n - mf) * (n + mf - 1.0) / (mf * (mf - 1.0))).sqrt())
}

/// One transition coupling f_n of a level model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Finite(f64),
    /// The closed-form expression diverges at this index.
    Singular,
}

impl Coupling {
    pub fn value(self) -> Option<f64> {
        match self {
            Coupling::Finite(v) => Some(v),
            Coupling::Singular => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    LegendreA,
    LegendreB,
    Custom,
    /// Couplings estimated from an amplitude source.
    Inferred,
}

/// N-level system: couplings f_1..f_{N−1} for transitions n−1 ↔ n, shifts
/// s_0..s_{N−1} with detunings ε_n = s_n − s_{n−1}, and the scale r.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    levels: usize,
    couplings: Vec<Coupling>,
    shifts: Vec<f64>,
    scale: f64,
    kind: ModelKind,
    label: String,
}

impl SystemModel {
    /// Model from explicit tables. `couplings[i]` is f_{i+1}.
    pub fn custom(couplings: Vec<f64>, shifts: Vec<f64>, scale: f64, label: impl Into<String>) -> Result<Self> {
        Self::from_parts(
            couplings.into_iter().map(Coupling::Finite).collect(),
            shifts,
            scale,
            ModelKind::Custom,
            label.into(),
        )
    }

    pub(crate) fn from_parts(
        couplings: Vec<Coupling>,
        shifts: Vec<f64>,
        scale: f64,
        kind: ModelKind,
        label: String,
    ) -> Result<Self> {
        let levels = shifts.len();
        if levels < 1 {
            return Err(Error::Size {
                levels,
                reason: "a model needs at least one level",
            });
        }
        if couplings.len() + 1 != levels {
            return Err(Error::domain(
                "SystemModel",
                format!("{} couplings given for {levels} levels; expected {}", couplings.len(), levels - 1),
            ));
        }
        for (i, c) in couplings.iter().enumerate() {
            if let Coupling::Finite(v) = c {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::domain(
                        "SystemModel",
                        format!("coupling f_{} = {v} must be finite and non-negative", i + 1),
                    ));
                }
            }
        }
        if let Some((i, s)) = shifts.iter().enumerate().find(|(_, s)| !s.is_finite()) {
            return Err(Error::domain("SystemModel", format!("shift s_{i} = {s} is not finite")));
        }
        if !scale.is_finite() {
            return Err(Error::domain("SystemModel", "scale r must be finite"));
        }
        Ok(Self {
            levels,
            couplings,
            shifts,
            scale,
            kind,
            label,
        })
    }

    pub(crate) fn with_kind(mut self, kind: ModelKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// f_n for 0 <= n <= N, with f_0 = f_N = 0. `None` marks a singular entry.
    pub fn coupling(&self, n: usize) -> Option<f64> {
        if n == 0 || n >= self.levels {
            Some(0.0)
        } else {
            self.couplings[n - 1].value()
        }
    }

    /// Transition indices whose coupling is singular.
    pub fn singular_indices(&self) -> Vec<usize> {
        self.couplings
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, Coupling::Singular))
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// f_1..f_{N−1}, or the first singular index as an error.
    pub fn finite_couplings(&self) -> Result<Vec<f64>> {
        self.couplings
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.value().ok_or_else(|| Error::SingularCoupling {
                    index: i + 1,
                    label: self.label.clone(),
                })
            })
            .collect()
    }

    /// ε_1..ε_{N−1}, ε_n = s_n − s_{n−1}.
    pub fn detunings(&self) -> Vec<f64> {
        self.shifts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn is_resonant(&self) -> bool {
        self.detunings().iter().all(|&e| e == 0.0)
    }
}

/// Level model induced by a Legendre system; all shifts are zero.
pub fn build_model(system: &LegendreSystem) -> Result<SystemModel> {
    let levels = system.levels();
    let n = levels as f64;
    let (couplings, scale, kind) = match system.variant() {
        Variant::A => {
            let r = scale_a(levels)?;
            let c = (1..levels)
                .map(|m| {
                    if m == 1 {
                        Coupling::Singular
                    } else {
                        let mf = m as f64;
                        Coupling::Finite(r * ((n - mf) * (n + mf - 1.0) / (mf * (mf - 1.0))).sqrt())
                    }
                })
                .collect();
            (c, r, ModelKind::LegendreA)
        }
        Variant::B => {
            let r = scale_b(levels)?;
            let c = (1..levels)
                .map(|k| {
                    let kf = k as f64;
                    Coupling::Finite(r * (kf * (2.0 * n - kf + 1.0) / ((n - kf + 1.0) * (n - kf))).sqrt())
                })
                .collect();
            (c, r, ModelKind::LegendreB)
        }
    };
    SystemModel::from_parts(
        couplings,
        vec![0.0; levels],
        scale,
        kind,
        format!("legendre-{}-N{}", system.variant().to_string().to_lowercase(), levels),
    )
}

/// E_n = E_0 + n ħω_l + ħΛ (s_n − s_0).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    pub base_energy: f64,
    pub photon_quantum: f64,
    pub rabi_scale: f64,
    pub levels: Vec<f64>,
}

impl EnergySpectrum {
    pub fn spacings(&self) -> Vec<f64> {
        self.levels.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn energy_levels(model: &SystemModel, base_energy: f64, photon_quantum: f64, rabi_scale: f64) -> EnergySpectrum {
    let s0 = model.shifts()[0];
    let levels = model
        .shifts()
        .iter()
        .enumerate()
        .map(|(n, &s)| base_energy + n as f64 * photon_quantum + rabi_scale * (s - s0))
        .collect();
    EnergySpectrum {
        base_energy,
        photon_quantum,
        rabi_scale,
        levels,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPair {
    pub m: usize,
    pub l: usize,
    pub value: f64,
    /// d_m² on the diagonal, 0 off it.
    pub expected: f64,
    pub abs_deviation: f64,
    /// |D|/(d_m d_l) off the diagonal, |D/d_m² − 1| on it.
    pub rel_deviation: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoCheckReport {
    pub levels: usize,
    pub tol: f64,
    pub pairs: Vec<OrthoPair>,
    pub pass: bool,
}

impl OrthoCheckReport {
    pub fn max_rel_deviation(&self) -> f64 {
        self.pairs.iter().map(|p| p.rel_deviation).fold(0.0, f64::max)
    }
}

/// D_{m,l} = ∫_{−1}^{1} φ_m φ_l dz/(1 − z²) for 1 <= m, l <= N−1, judged
/// against d_m² δ_{m,l} at relative tolerance `tol`.
///
/// The integral is taken in z = sin ϑ, where dz/(1−z²) = dϑ/cos ϑ and the
/// integrand cos^{m+l−1}ϑ × (polynomial in sin ϑ) is smooth, so
/// half-integer powers of (1 − z²) never reach the quadrature.
pub fn orthogonality_matrix(levels: usize, tol: f64) -> Result<OrthoCheckReport> {
    if levels < 2 {
        return Err(Error::Size {
            levels,
            reason: "the Legendre system needs N >= 2",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::domain("orthogonality_matrix", "tolerance must be positive"));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut pairs = Vec::new();
    for m in 1..levels {
        for l in 1..levels {
            let dm = norm_d(levels, m)?;
            let dl = norm_d(levels, l)?;
            let cfg = DoublingConfig {
                tol: 0.1 * tol * dm * dl,
                initial_panels: 1,
                points_per_panel: 8,
                ..DoublingConfig::default()
            };
            let r = integrate_doubling(&format!("D[{m},{l}] (N = {levels})"), -half_pi, half_pi, &cfg, |a| {
                let p = CutPoint::from_angle(a);
                phi_at(levels, m, p) * phi_at(levels, l, p) / p.w
            })?;
            let expected = if m == l { dm * dm } else { 0.0 };
            let abs_deviation = (r.value - expected).abs();
            let rel_deviation = if m == l {
                (r.value / expected - 1.0).abs()
            } else {
                r.value.abs() / (dm * dl)
            };
            pairs.push(OrthoPair {
                m,
                l,
                value: r.value,
                expected,
                abs_deviation,
                rel_deviation,
                nodes: r.nodes_used,
            });
        }
    }
    let pass = pairs.iter().all(|p| p.rel_deviation <= tol);
    Ok(OrthoCheckReport {
        levels,
        tol,
        pairs,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceResidual {
    /// |(N−m−1)φ_{m+1} + (N+m−1)φ_{m−1} − 2mzφ_m/√(1−z²)| over the sum of
    /// the three term magnitudes.
    pub unnormalized: f64,
    /// |f_{m+1}ψ_{m+1} + f_m ψ_{m−1} − rθψ_m| over the term magnitudes, with
    /// f, r from the variant-A coupling formula, θ from the configured
    /// convention and ψ_0 = 0.
    pub normalized: f64,
}

pub fn recurrence_residual(system: &LegendreSystem, m: usize, z: f64) -> Result<RecurrenceResidual> {
    let levels = system.levels();
    if m < 1 || m + 2 > levels {
        return Err(Error::ExcludedIndex {
            levels,
            index: m,
            reason: "the three-term relation is audited for 1 <= m <= N-2",
        });
    }
    if !(z.abs() < 1.0) {
        return Err(Error::domain("recurrence_residual", format!("argument must satisfy |z| < 1, got {z}")));
    }
    let p = CutPoint::from_z(z);
    let (n, mf) = (levels as f64, m as f64);
    let up = (n - mf - 1.0) * phi_at(levels, m + 1, p);
    let down = (n + mf - 1.0) * phi_at(levels, m - 1, p);
    let mid = 2.0 * mf * p.ratio() * phi_at(levels, m, p);
    let scale = up.abs() + down.abs() + mid.abs();
    let unnormalized = if scale == 0.0 { 0.0 } else { (up + down - mid).abs() / scale };

    let r = scale_a(levels)?;
    let printed_f = |k: usize| -> f64 {
        let kf = k as f64;
        r * ((n - kf) * (n + kf - 1.0) / (kf * (kf - 1.0))).sqrt()
    };
    let psi = |k: usize| normalized_phi_at(levels, k, p);
    let t_up = Complex64::new(printed_f(m + 1) * psi(m + 1), 0.0);
    let t_down = if m >= 2 {
        Complex64::new(printed_f(m) * psi(m - 1), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let t_mid = system.theta().theta_from_ratio(p.ratio()) * (r * psi(m));
    let nscale = t_up.norm() + t_down.norm() + t_mid.norm();
    let normalized = if nscale == 0.0 { 0.0 } else { (t_up + t_down - t_mid).norm() / nscale };
    Ok(RecurrenceResidual { unnormalized, normalized })
}
