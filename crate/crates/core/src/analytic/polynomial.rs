//! Amplitudes from an orthonormal polynomial family,
//!
//! a_n(t) = ∫ σ(x) q_m(x) q_n(x) e^{it(rx + s_n)} dx,
//!
//! where f_{n+1} q_{n+1} + f_n q_{n−1} = (rx + s_n) q_n. For a finite ladder
//! (f_N = 0) the measure that makes this solve the amplitude equations is
//! discrete: it sits on the eigenvalues of the tridiagonal matrix with
//! off-diagonal f_n and diagonal −s_n, which [`Measure::for_model`] builds.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::dynamics::AmplitudeVector;
use crate::error::{Error, Result};
use crate::orthosys::SystemModel;
use crate::quadrature::{integrate_doubling, DoublingConfig};

type Weight = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Orthogonality measure σ(x) dx.
#[derive(Clone)]
pub enum Measure {
    /// Density on (lower, upper).
    Continuous { lower: f64, upper: f64, weight: Weight },
    /// Point masses.
    Discrete { nodes: Vec<f64>, weights: Vec<f64> },
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Continuous { lower, upper, .. } => {
                f.debug_struct("Continuous").field("lower", lower).field("upper", upper).finish_non_exhaustive()
            }
            Measure::Discrete { nodes, weights } => {
                f.debug_struct("Discrete").field("nodes", nodes).field("weights", weights).finish()
            }
        }
    }
}

impl Measure {
    pub fn continuous(lower: f64, upper: f64, weight: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::domain("Measure", format!("need a finite interval, got ({lower}, {upper})")));
        }
        Ok(Measure::Continuous {
            lower,
            upper,
            weight: Arc::new(weight),
        })
    }

    pub fn discrete(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::domain("Measure", "nodes and weights must be non-empty and of equal length"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::domain("Measure", format!("negative or non-finite weight {w}")));
        }
        Ok(Measure::Discrete { nodes, weights })
    }

    /// Spectral measure of a finite ladder: nodes x_j = λ_j / r and
    /// weights V_{0j}², with (λ_j, V_{·j}) the eigenpairs of the coupling
    /// matrix.
    pub fn for_model(model: &SystemModel) -> Result<Self> {
        let (values, vectors) = eigensystem(model)?;
        let r = model.scale();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::domain("Measure::for_model", "scale r must be finite and non-zero"));
        }
        let nodes = values.iter().map(|l| l / r).collect();
        let weights = (0..values.len()).map(|j| vectors[(0, j)].powi(2)).collect();
        Measure::discrete(nodes, weights)
    }
}

/// Eigen-decomposition of the symmetric tridiagonal coupling matrix.
fn eigensystem(model: &SystemModel) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let levels = model.levels();
    let f = model.finite_couplings()?;
    let s = model.shifts();
    let mut a = DMatrix::<f64>::zeros(levels, levels);
    for n in 0..levels {
        a[(n, n)] = -s[n];
        if n + 1 < levels {
            a[(n, n + 1)] = f[n];
            a[(n + 1, n)] = f[n];
        }
    }
    let eig = SymmetricEigen::new(a);
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// q_0..q_top at x, by the three-term recurrence, with q_0 = 1/√μ_0.
fn orthonormal_values(model: &SystemModel, mass: f64, top: usize, x: f64) -> Vec<f64> {
    let r = model.scale();
    let s = model.shifts();
    let mut q = Vec::with_capacity(top + 1);
    q.push(1.0 / mass.sqrt());
    for n in 0..top {
        let f_next = model.coupling(n + 1).unwrap_or(0.0);
        let f_here = model.coupling(n).unwrap_or(0.0);
        let prev = if n == 0 { 0.0 } else { q[n - 1] };
        q.push(((r * x + s[n]) * q[n] - f_here * prev) / f_next);
    }
    q
}

/// a_n(t) for a polynomial family given by the model's f, s and r.
pub fn amplitude_polynomial_quadrature(
    measure: &Measure,
    model: &SystemModel,
    initial: usize,
    n: usize,
    t: f64,
    cfg: &DoublingConfig,
) -> Result<Complex64> {
    let levels = model.levels();
    if initial >= levels || n >= levels {
        return Err(Error::domain(
            "amplitude_polynomial_quadrature",
            format!("indices ({initial}, {n}) outside 0..{levels}"),
        ));
    }
    let top = initial.max(n);
    for k in 1..=top {
        match model.coupling(k) {
            Some(f) if f != 0.0 => {}
            _ => {
                return Err(Error::domain(
                    "amplitude_polynomial_quadrature",
                    format!("coupling f_{k} must be finite and non-zero to climb the recurrence"),
                ))
            }
        }
    }
    let r = model.scale();
    let phase = |x: f64| Complex64::from_polar(1.0, t * (r * x + model.shifts()[n]));
    match measure {
        Measure::Discrete { nodes, weights } => {
            let mass: f64 = weights.iter().sum();
            if mass <= 0.0 {
                return Err(Error::domain("amplitude_polynomial_quadrature", "measure has zero mass"));
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (&x, &w) in nodes.iter().zip(weights) {
                let q = orthonormal_values(model, mass, top, x);
                acc += phase(x) * (w * q[initial] * q[n]);
            }
            Ok(acc)
        }
        Measure::Continuous { lower, upper, weight } => {
            let negative = std::cell::Cell::new(None);
            let sample = |x: f64| {
                let w = weight(x);
                if !(w >= 0.0) && negative.get().is_none() {
                    negative.set(Some((x, w)));
                }
                w
            };
            let mass = integrate_doubling("weight mass", *lower, *upper, cfg, sample)?.value;
            if let Some((x, w)) = negative.get() {
                return Err(Error::domain(
                    "amplitude_polynomial_quadrature",
                    format!("weight is negative at x = {x}: {w}"),
                ));
            }
            if !(mass > 0.0) {
                return Err(Error::domain("amplitude_polynomial_quadrature", "weight has zero mass"));
            }
            let what = format!("polynomial amplitude a_{n}(t = {t}) from level {initial}");
            let res = integrate_doubling(&what, *lower, *upper, cfg, |x| {
                let q = orthonormal_values(model, mass, top, x);
                phase(x) * (sample(x) * q[initial] * q[n])
            })?;
            if let Some((x, w)) = negative.get() {
                return Err(Error::domain(
                    "amplitude_polynomial_quadrature",
                    format!("weight is negative at x = {x}: {w}"),
                ));
            }
            Ok(res.value)
        }
    }
}

/// Exact state of a finite ladder started in `initial`, from its
/// spectral measure: a_n(t) = e^{its_n} Σ_j V_{mj} V_{nj} e^{itλ_j}.
pub fn spectral_state(model: &SystemModel, initial: usize, t: f64) -> Result<AmplitudeVector> {
    let levels = model.levels();
    if initial >= levels {
        return Err(Error::domain("spectral_state", format!("initial level {initial} outside 0..{levels}")));
    }
    let (values, v) = eigensystem(model)?;
    let s = model.shifts();
    let out = (0..levels)
        .map(|n| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, &l)| Complex64::from_polar(v[(initial, j)] * v[(n, j)], t * l))
                .sum();
            sum * Complex64::from_polar(1.0, t * s[n])
        })
        .collect();
    Ok(AmplitudeVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{propagate, StepperConfig, TimeGrid};
    use crate::orthosys::{build_model, LegendreSystem, ThetaConvention, Variant};

    fn legendre_family(levels: usize) -> SystemModel {
        let f = (1..levels).map(|n| n as f64 / ((4 * n * n - 1) as f64).sqrt()).collect();
        SystemModel::custom(f, vec![0.0; levels], 1.0, "legendre").unwrap()
    }

    #[test]
    fn zero_time_orthonormality() {
        let model = legendre_family(5);
        let measure = Measure::continuous(-1.0, 1.0, |_| 0.5).unwrap();
        let cfg = DoublingConfig::default();
        for m in 0..4 {
            for n in 0..4 {
                let v = amplitude_polynomial_quadrature(&measure, &model, m, n, 0.0, &cfg).unwrap();
                let delta = if m == n { 1.0 } else { 0.0 };
                assert!((v - delta).norm() < 1e-10, "m={m} n={n}: {v}");
            }
        }
    }

    #[test]
    fn legendre_weight_gives_spherical_bessel_amplitudes() {
        // With σ = ½ on (−1, 1): a_n(t) = i^n √(2n+1) j_n(t) from level 0.
        let model = legendre_family(4);
        let measure = Measure::continuous(-1.0, 1.0, |_| 0.5).unwrap();
        let t: f64 = 1.7;
        let (s, c) = t.sin_cos();
        let j = [
            s / t,
            s / (t * t) - c / t,
            (3.0 / (t * t) - 1.0) * s / t - 3.0 * c / (t * t),
        ];
        for (n, jn) in j.iter().enumerate() {
            let v = amplitude_polynomial_quadrature(&measure, &model, 0, n, t, &DoublingConfig::default()).unwrap();
            let expected = Complex64::new(0.0, 1.0).powu(n as u32) * ((2 * n + 1) as f64).sqrt() * *jn;
            assert!((v - expected).norm() < 1e-11, "n={n}: {v} vs {expected}");
        }
    }

    #[test]
    fn single_level_point_mass() {
        let one = SystemModel::custom(vec![], vec![0.4], 1.0, "one").unwrap();
        let measure = Measure::discrete(vec![0.0], vec![1.0]).unwrap();
        let v = amplitude_polynomial_quadrature(&measure, &one, 0, 0, 2.5, &DoublingConfig::default()).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert!((v - Complex64::from_polar(1.0, 2.5 * 0.4)).norm() < 1e-15);
        // Its own spectral measure solves the (trivial) equation of motion.
        assert!((spectral_state(&one, 0, 2.5).unwrap()[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn symmetric_weight_parity() {
        let model = legendre_family(4);
        let measure = Measure::continuous(-1.0, 1.0, |x: f64| 1.0 - x * x).unwrap();
        let v = amplitude_polynomial_quadrature(&measure, &model, 0, 1, 0.0, &DoublingConfig::default()).unwrap();
        assert!(v.norm() < 1e-13);
    }

    #[test]
    fn negative_weight_is_rejected() {
        let model = legendre_family(3);
        let measure = Measure::continuous(-1.0, 1.0, |x: f64| x).unwrap();
        let err = amplitude_polynomial_quadrature(&measure, &model, 0, 0, 0.0, &DoublingConfig::default());
        assert!(matches!(err, Err(Error::Domain { .. })));
        assert!(Measure::discrete(vec![0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn spectral_measure_reproduces_propagation() {
        let detuned = SystemModel::custom(vec![1.0, 0.7, 1.3], vec![0.0, 0.3, -0.2, 0.5], 1.0, "det").unwrap();
        let grid = TimeGrid::new(2.0, 1e-3, 500).unwrap();
        let trace = propagate(&detuned, 1, &grid, &StepperConfig::default()).unwrap();
        let measure = Measure::for_model(&detuned).unwrap();
        for (t, a) in trace.times.iter().zip(&trace.amplitudes) {
            let exact = spectral_state(&detuned, 1, *t).unwrap();
            assert!(exact.max_abs_diff(a) < 1e-10, "t = {t}");
            for n in 0..4 {
                let v = amplitude_polynomial_quadrature(&measure, &detuned, 1, n, *t, &DoublingConfig::default()).unwrap();
                assert!((v - a[n]).norm() < 1e-9, "t = {t}, n = {n}");
            }
        }
    }

    #[test]
    fn spectral_state_of_second_family_is_unitary() {
        for levels in 2..=6 {
            let model = build_model(&LegendreSystem::new(levels, Variant::B, ThetaConvention::RealCut).unwrap()).unwrap();
            let s = spectral_state(&model, 0, 3.3).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
