//! Analytic routes to the amplitudes: the finite ₂F₂ sums of the two
//! Legendre-function systems, the integral transform over that family, the
//! polynomial-measure solution of a ladder, and inference of couplings
//! from any of them.

mod closed_form;
mod inference;
mod polynomial;
mod transform;

pub use closed_form::{
    amplitude_closed_form, closed_form_detailed, closed_form_state, transcription_report, AnalyticAmplitudeSpec,
    ClosedFormTerm, ClosedFormValue, TranscriptionReport,
};
pub use inference::{infer_couplings, infer_couplings_report, InferenceConfig, InferredCouplings, SlopeSample};
pub use polynomial::{amplitude_polynomial_quadrature, spectral_state, Measure};
pub use transform::{
    amplitude_quadrature, amplitude_quadrature_detailed, kernel_projection_check, theta_convention_audit,
    ConventionAudit, ConventionSample, ConventionSummary, KernelProjectionReport, QuadratureAmplitude,
    QuadratureSolutionSpec,
};
