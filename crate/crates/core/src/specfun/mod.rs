//! Scalar special functions: log-gamma, Ferrers functions and ₂F₂.

mod ddouble;
mod gamma;
mod hyp2f2;
mod legendre;

pub use ddouble::{ComplexDD, DoubleDouble};
pub use gamma::{ln_factorial, log_gamma};
pub use hyp2f2::{hyp2f2, hyp2f2_detailed, Hyp2F2Params, Hyp2F2Value};
pub use legendre::{ferrers_legendre, ferrers_legendre_orders};
pub(crate) use legendre::ferrers_legendre_parts;

/// Complex scalar used for amplitudes and series arguments.
pub type ComplexValue = num_complex::Complex64;
