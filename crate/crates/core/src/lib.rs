//! Excitation dynamics of N-level quantum systems in a monochromatic field.
//!
//! The crate has two independent routes to the level amplitudes a_n(t):
//! direct propagation of the tridiagonal amplitude equations
//! ([`dynamics`]) and closed-form or integral-transform solutions built on
//! orthogonal Legendre functions ([`analytic`], [`orthosys`]). Each route is
//! used to audit the other.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Coefficient tables keep their reference digits.
#![allow(clippy::excessive_precision)]

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod orthosys;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use specfun::ComplexValue;

pub use analytic::{AnalyticAmplitudeSpec, QuadratureSolutionSpec};
pub use dynamics::{AmplitudeVector, PopulationTrace, StepperConfig, StepperMethod, TimeGrid};
pub use orthosys::{
    Coupling, EnergySpectrum, LegendreSystem, ModelKind, OrthoCheckReport, SystemModel, ThetaConvention, Variant,
};
