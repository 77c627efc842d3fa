//! Composite Gauss–Legendre quadrature with panel doubling.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be accumulated by the integrators.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Tricomi initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel rule on [a, b].
    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, f: impl Fn(f64) -> T) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }

    /// `panels` equal panels on [a, b].
    pub fn composite<T: Integrand>(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> T) -> T {
        let h = (b - a) / panels as f64;
        let mut acc = T::zero();
        for p in 0..panels {
            let lo = a + h * p as f64;
            let hi = if p + 1 == panels { b } else { lo + h };
            acc = acc + self.integrate(lo, hi, &f);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Settings for [`integrate_doubling`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingConfig {
    /// Absolute tolerance on the change between successive refinements.
    pub tol: f64,
    pub initial_panels: usize,
    pub points_per_panel: usize,
    /// Total node budget across all refinements.
    pub max_nodes: usize,
}

impl Default for DoublingConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            initial_panels: 2,
            points_per_panel: 12,
            max_nodes: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    /// Change between the last two refinements.
    pub last_change: f64,
    pub panels: usize,
    pub nodes_used: usize,
}

/// Doubles the panel count until two successive composite estimates
/// differ by less than `cfg.tol`.
pub fn integrate_doubling<T: Integrand>(
    what: &str,
    a: f64,
    b: f64,
    cfg: &DoublingConfig,
    f: impl Fn(f64) -> T,
) -> Result<QuadratureResult<T>> {
    if !(cfg.tol > 0.0) || cfg.initial_panels == 0 || cfg.points_per_panel == 0 {
        return Err(Error::domain("integrate_doubling", "tolerance, panel count and rule size must be positive"));
    }
    let rule = GaussLegendre::new(cfg.points_per_panel);
    let mut panels = cfg.initial_panels;
    let mut used = panels * rule.len();
    let mut prev = rule.composite(a, b, panels, &f);
    let mut change = f64::INFINITY;
    loop {
        let next_panels = panels * 2;
        let cost = next_panels * rule.len();
        if used + cost > cfg.max_nodes {
            return Err(Error::QuadratureNonConvergence {
                what: what.to_string(),
                nodes: used,
                last_change: change,
                tol: cfg.tol,
            });
        }
        let next = rule.composite(a, b, next_panels, &f);
        used += cost;
        change = (next + prev * -1.0).magnitude();
        panels = next_panels;
        if change < cfg.tol {
            return Ok(QuadratureResult {
                value: next,
                last_change: change,
                panels,
                nodes_used: used,
            });
        }
        prev = next;
    }
}
