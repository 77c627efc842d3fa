//! Direct propagation of the amplitude equations
//!
//! −i da_n/dt = f_{n+1} e^{−iε_{n+1}t} a_{n+1} + f_n e^{iε_n t} a_{n−1},
//!
//! with f_0 = f_N = 0, by classical fourth-order Runge–Kutta.

use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthosys::SystemModel;

/// Norm drift beyond which a trace is flagged as failed.
pub const NORM_FAILURE_THRESHOLD: f64 = 1e-6;

/// Amplitudes a_0..a_{N−1} at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(pub Vec<Complex64>);

impl AmplitudeVector {
    pub fn zeros(levels: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); levels])
    }

    /// a_n = δ_{n,m}.
    pub fn kronecker(levels: usize, m: usize) -> Self {
        let mut v = Self::zeros(levels);
        v.0[m] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|a| a.conj()).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<usize> for AmplitudeVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Σ |a_n|².
pub fn norm(state: &AmplitudeVector) -> f64 {
    state.0.iter().map(|a| a.norm_sqr()).sum()
}

/// Uniform sample schedule in dimensionless time t = Λτ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    dt: f64,
    output_stride: usize,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64, output_stride: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::TimeGrid(format!("t_max must be positive and finite, got {t_max}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::TimeGrid(format!("dt must be positive and finite, got {dt}")));
        }
        if dt > t_max {
            return Err(Error::TimeGrid(format!("dt = {dt} exceeds t_max = {t_max}")));
        }
        if output_stride == 0 {
            return Err(Error::TimeGrid("output_stride must be at least 1".into()));
        }
        let steps = (t_max / dt).round() as usize;
        if ((steps as f64) * dt - t_max).abs() > 1e-9 * t_max {
            return Err(Error::TimeGrid(format!("t_max = {t_max} is not a whole number of steps dt = {dt}")));
        }
        if steps % output_stride != 0 {
            return Err(Error::TimeGrid(format!(
                "output_stride = {output_stride} does not divide the {steps} steps"
            )));
        }
        Ok(Self {
            t_max,
            dt,
            output_stride,
            steps,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn output_stride(&self) -> usize {
        self.output_stride
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Times at which samples are recorded, starting at 0.
    pub fn sample_times(&self) -> Vec<f64> {
        (0..=self.steps)
            .step_by(self.output_stride)
            .map(|k| self.time_of_step(k))
            .collect()
    }

    fn time_of_step(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_max
        } else {
            k as f64 * self.dt
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepperMethod {
    #[default]
    Rk4Fixed,
    /// Each grid step is covered by sub-steps whose size is halved until a
    /// full step and two half steps agree to `rel_tol`.
    Rk4StepDoubling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub method: StepperMethod,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            method: StepperMethod::Rk4Fixed,
            rel_tol: 1e-10,
            max_steps: 50_000_000,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("StepperConfig", format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_steps == 0 {
            return Err(Error::domain("StepperConfig", "max_steps must be at least 1"));
        }
        Ok(())
    }
}

/// Sampled solution with unitarity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub amplitudes: Vec<AmplitudeVector>,
    pub populations: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    /// Running maximum of |norm − 1| up to each sample.
    pub drift_record: Vec<f64>,
    pub max_norm_drift: f64,
    /// Set when the drift exceeds [`NORM_FAILURE_THRESHOLD`].
    pub failed: bool,
    pub steps_taken: usize,
}

impl PopulationTrace {
    pub fn levels(&self) -> usize {
        self.amplitudes.first().map_or(0, |a| a.len())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, state: AmplitudeVector) {
        let n = state.norm();
        let drift = (n - 1.0).abs().max(self.max_norm_drift);
        self.max_norm_drift = drift;
        self.failed |= drift > NORM_FAILURE_THRESHOLD;
        self.times.push(t);
        self.populations.push(state.populations());
        self.amplitudes.push(state);
        self.norms.push(n);
        self.drift_record.push(drift);
    }
}

/// Precomputed right-hand side for one model.
struct Rhs {
    /// f_0..f_N.
    f: Vec<f64>,
    /// ε_0..ε_N with ε_0 = ε_N = 0 (never used with a nonzero coupling).
    eps: Vec<f64>,
    resonant: bool,
}

impl Rhs {
    fn new(model: &SystemModel) -> Result<Self> {
        let levels = model.levels();
        let inner = model.finite_couplings()?;
        let mut f = Vec::with_capacity(levels + 1);
        f.push(0.0);
        f.extend(inner);
        f.push(0.0);
        let mut eps = Vec::with_capacity(levels + 1);
        eps.push(0.0);
        eps.extend(model.detunings());
        eps.push(0.0);
        let resonant = eps.iter().all(|&e| e == 0.0);
        Ok(Self { f, eps, resonant })
    }

    /// dy/dt = i [f_{n+1} e^{−iε_{n+1}t} a_{n+1} + f_n e^{iε_n t} a_{n−1}].
    fn eval(&self, t: f64, y: &[Complex64], out: &mut [Complex64]) {
        let levels = y.len();
        let i = Complex64::new(0.0, 1.0);
        for n in 0..levels {
            let mut acc = Complex64::new(0.0, 0.0);
            if n + 1 < levels {
                let up = if self.resonant {
                    y[n + 1]
                } else {
                    Complex64::from_polar(1.0, -self.eps[n + 1] * t) * y[n + 1]
                };
                acc += up * self.f[n + 1];
            }
            if n > 0 {
                let down = if self.resonant {
                    y[n - 1]
                } else {
                    Complex64::from_polar(1.0, self.eps[n] * t) * y[n - 1]
                };
                acc += down * self.f[n];
            }
            out[n] = i * acc;
        }
    }
}

/// Time derivative of the amplitudes.
pub fn rhs(state: &AmplitudeVector, t: f64, model: &SystemModel) -> Result<AmplitudeVector> {
    if state.len() != model.levels() {
        return Err(Error::domain(
            "rhs",
            format!("state has {} levels, model has {}", state.len(), model.levels()),
        ));
    }
    let r = Rhs::new(model)?;
    let mut out = AmplitudeVector::zeros(state.len());
    r.eval(t, &state.0, &mut out.0);
    Ok(out)
}

struct Rk4Workspace {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Workspace {
    fn new(levels: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); levels];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    fn step(&mut self, rhs: &Rhs, t: f64, h: f64, y: &mut [Complex64]) {
        let n = y.len();
        rhs.eval(t, y, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k1[i] * (0.5 * h);
        }
        rhs.eval(t + 0.5 * h, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k2[i] * (0.5 * h);
        }
        rhs.eval(t + 0.5 * h, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k3[i] * h;
        }
        rhs.eval(t + h, &self.tmp, &mut self.k4);
        for i in 0..n {
            y[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * (h / 6.0);
        }
    }
}

/// Integrates over one interval [t, t + span] with step doubling; returns
/// the number of RK4 steps spent.
fn adaptive_interval(
    rhs: &Rhs,
    ws: &mut Rk4Workspace,
    t: f64,
    span: f64,
    h: &mut f64,
    y: &mut Vec<Complex64>,
    cfg: &StepperConfig,
    budget: usize,
) -> Result<usize> {
    let end = t + span;
    let mut now = t;
    let mut spent = 0;
    let mut full = y.clone();
    let mut half = y.clone();
    while (end - now).abs() > 1e-15 * end.abs().max(1.0) {
        let remaining = end - now;
        let step = if h.abs() >= remaining.abs() { remaining } else { h.copysign(remaining) };
        full.clone_from(y);
        half.clone_from(y);
        ws.step(rhs, now, step, &mut full);
        ws.step(rhs, now, 0.5 * step, &mut half);
        ws.step(rhs, now + 0.5 * step, 0.5 * step, &mut half);
        spent += 3;
        if spent > budget {
            return Err(Error::MaxSteps {
                max_steps: cfg.max_steps,
                t: now,
            });
        }
        let scale = half.iter().map(|a| a.norm()).fold(1.0, f64::max);
        let err = full.iter().zip(&half).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
        if err <= cfg.rel_tol {
            std::mem::swap(y, &mut half);
            now += step;
            if err < cfg.rel_tol / 64.0 {
                *h = (step.abs() * 2.0).min(span.abs());
            }
        } else {
            *h = 0.5 * step.abs();
        }
    }
    Ok(spent)
}

/// Propagates a_n(0) = δ_{n,m} over the grid.
pub fn propagate(model: &SystemModel, initial: usize, grid: &TimeGrid, cfg: &StepperConfig) -> Result<PopulationTrace> {
    cfg.validate()?;
    let levels = model.levels();
    if initial >= levels {
        return Err(Error::domain(
            "propagate",
            format!("initial level {initial} outside 0..{levels}"),
        ));
    }
    let rhs = Rhs::new(model)?;
    let mut ws = Rk4Workspace::new(levels);
    let mut y = AmplitudeVector::kronecker(levels, initial).0;
    let mut trace = PopulationTrace {
        times: Vec::new(),
        amplitudes: Vec::new(),
        populations: Vec::new(),
        norms: Vec::new(),
        drift_record: Vec::new(),
        max_norm_drift: 0.0,
        failed: false,
        steps_taken: 0,
    };
    trace.push(0.0, AmplitudeVector(y.clone()));
    let mut h = grid.dt();
    for k in 0..grid.steps() {
        let t0 = grid.time_of_step(k);
        let t1 = grid.time_of_step(k + 1);
        match cfg.method {
            StepperMethod::Rk4Fixed => {
                trace.steps_taken += 1;
                if trace.steps_taken > cfg.max_steps {
                    return Err(Error::MaxSteps {
                        max_steps: cfg.max_steps,
                        t: t0,
                    });
                }
                ws.step(&rhs, t0, t1 - t0, &mut y);
            }
            StepperMethod::Rk4StepDoubling => {
                let budget = cfg.max_steps.saturating_sub(trace.steps_taken);
                trace.steps_taken += adaptive_interval(&rhs, &mut ws, t0, t1 - t0, &mut h, &mut y, cfg, budget)?;
            }
        }
        if (k + 1) % grid.output_stride() == 0 {
            trace.push(t1, AmplitudeVector(y.clone()));
        }
    }
    Ok(trace)
}

/// State at a single (possibly negative) time by fixed RK4 steps of at most
/// |dt|.
pub fn evolve(model: &SystemModel, initial: &AmplitudeVector, t_end: f64, dt: f64) -> Result<AmplitudeVector> {
    if initial.len() != model.levels() {
        return Err(Error::domain("evolve", "state and model sizes differ"));
    }
    if !(dt > 0.0) || !t_end.is_finite() {
        return Err(Error::domain("evolve", "dt must be positive and t_end finite"));
    }
    let rhs = Rhs::new(model)?;
    let mut ws = Rk4Workspace::new(model.levels());
    let mut y = initial.0.clone();
    let steps = (t_end.abs() / dt).ceil() as usize;
    if steps == 0 {
        return Ok(AmplitudeVector(y));
    }
    let h = t_end / steps as f64;
    for k in 0..steps {
        ws.step(&rhs, k as f64 * h, h, &mut y);
    }
    Ok(AmplitudeVector(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthosys::{build_model, LegendreSystem, ThetaConvention, Variant};

    fn model_b(n: usize) -> SystemModel {
        build_model(&LegendreSystem::new(n, Variant::B, ThetaConvention::RealCut).unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rhs_examples() {
        let two = SystemModel::custom(vec![1.0], vec![0.0, 0.0], 1.0, "two").unwrap();
        let d = rhs(&AmplitudeVector::kronecker(2, 0), 0.0, &two).unwrap();
        assert_eq!(d.0, vec![c(0.0, 0.0), c(0.0, 1.0)]);

        let zero = SystemModel::custom(vec![0.0, 0.0], vec![0.0; 3], 1.0, "zero").unwrap();
        let s = AmplitudeVector(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0)]);
        assert!(rhs(&s, 1.3, &zero).unwrap().0.iter().all(|v| v.norm() == 0.0));

        let b3 = model_b(3);
        let d = rhs(&AmplitudeVector::kronecker(3, 1), 0.0, &b3).unwrap();
        assert!((d[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(d[1], c(0.0, 0.0));
        assert!((d[2] - c(0.0, 5f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn rhs_refuses_singular_models() {
        let a3 = build_model(&LegendreSystem::new(3, Variant::A, ThetaConvention::RealCut).unwrap()).unwrap();
        let err = rhs(&AmplitudeVector::kronecker(3, 1), 0.0, &a3).unwrap_err();
        assert!(matches!(err, Error::SingularCoupling { index: 1, .. }));
    }

    #[test]
    fn detuned_phases() {
        // ε_1 = 0.5: derivative of a_0 picks up e^{−iε_1 t}.
        let m = SystemModel::custom(vec![2.0], vec![0.0, 0.5], 1.0, "det").unwrap();
        let t = 0.7;
        let d = rhs(&AmplitudeVector::kronecker(2, 1), t, &m).unwrap();
        let expected = c(0.0, 1.0) * 2.0 * Complex64::from_polar(1.0, -0.5 * t);
        assert!((d[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&AmplitudeVector::kronecker(4, 2)), 1.0);
        assert_eq!(norm(&AmplitudeVector::zeros(3)), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((norm(&AmplitudeVector(vec![c(h, 0.0), c(0.0, h)])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_level_rabi() {
        let m = model_b(2);
        let grid = TimeGrid::new(3.0, 1e-3, 10).unwrap();
        let tr = propagate(&m, 0, &grid, &StepperConfig::default()).unwrap();
        for (t, p) in tr.times.iter().zip(&tr.populations) {
            assert!((p[0] - (2.0 * t).cos().powi(2)).abs() < 1e-10);
            assert!((p[1] - (2.0 * t).sin().powi(2)).abs() < 1e-10);
        }
        assert!(!tr.failed);
    }

    #[test]
    fn quarter_period_transfer() {
        let m = model_b(2);
        let t = std::f64::consts::FRAC_PI_4;
        let s = evolve(&m, &AmplitudeVector::kronecker(2, 0), t, 1e-3).unwrap();
        let p = s.populations();
        assert!(p[0].abs() < 1e-8 && (p[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn initial_sample_is_exact() {
        let m = model_b(4);
        let grid = TimeGrid::new(1e-12, 1e-12, 1).unwrap();
        let tr = propagate(&m, 2, &grid, &StepperConfig::default()).unwrap();
        assert_eq!(tr.amplitudes[0], AmplitudeVector::kronecker(4, 2));
        assert!(tr.amplitudes[1].max_abs_diff(&AmplitudeVector::kronecker(4, 2)) < 1e-11);
    }

    #[test]
    fn step_doubling_matches_closed_form() {
        let m = model_b(2);
        let grid = TimeGrid::new(2.0, 0.1, 1).unwrap();
        let cfg = StepperConfig {
            method: StepperMethod::Rk4StepDoubling,
            rel_tol: 1e-12,
            ..StepperConfig::default()
        };
        let tr = propagate(&m, 0, &grid, &cfg).unwrap();
        for (t, p) in tr.times.iter().zip(&tr.populations) {
            assert!((p[0] - (2.0 * t).cos().powi(2)).abs() < 1e-9, "t = {t}");
        }
        assert!(tr.steps_taken > grid.steps());
    }

    #[test]
    fn max_steps_enforced() {
        let m = model_b(3);
        let grid = TimeGrid::new(1.0, 0.01, 1).unwrap();
        let cfg = StepperConfig {
            max_steps: 10,
            ..StepperConfig::default()
        };
        assert!(matches!(propagate(&m, 0, &grid, &cfg), Err(Error::MaxSteps { .. })));
    }

    #[test]
    fn non_hermitian_drift_flags_failure() {
        // Detuning grows without bound in a few steps only if the integrator
        // is unstable; a coarse dt on a stiff coupling does that.
        let m = SystemModel::custom(vec![50.0], vec![0.0, 0.0], 1.0, "stiff").unwrap();
        let grid = TimeGrid::new(1.0, 0.1, 1).unwrap();
        let tr = propagate(&m, 0, &grid, &StepperConfig::default()).unwrap();
        assert!(tr.failed);
        assert!(tr.drift_record.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(1.0, -1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 2.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 0.3, 1).is_err());
        assert!(TimeGrid::new(1.0, 0.1, 3).is_err());
        let g = TimeGrid::new(1.0, 0.1, 5).unwrap();
        assert_eq!(g.sample_times(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn time_reversal() {
        for n in 2..=5 {
            let m = model_b(n);
            let init = AmplitudeVector::kronecker(n, 0);
            let fwd = evolve(&m, &init, 1.7, 1e-3).unwrap();
            let back = evolve(&m, &init, -1.7, 1e-3).unwrap();
            assert!(back.max_abs_diff(&fwd.conj()) < 1e-12);
        }
    }
}
