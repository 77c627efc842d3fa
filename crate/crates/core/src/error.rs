use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op} did not converge after {terms} terms (partial sum magnitude {partial:.6e}, last term {last_term:.6e})")]
    SeriesNonConvergence {
        op: &'static str,
        terms: usize,
        partial: f64,
        last_term: f64,
    },

    #[error("quadrature for {what} did not converge within {nodes} nodes (last change {last_change:.3e}, tolerance {tol:.3e})")]
    QuadratureNonConvergence {
        what: String,
        nodes: usize,
        last_change: f64,
        tol: f64,
    },

    #[error("integral for {what} diverges: integrand magnitude at cutoff {cutoff} grew from {previous:.3e} to {current:.3e}")]
    DivergentIntegral {
        what: String,
        cutoff: f64,
        previous: f64,
        current: f64,
    },

    #[error("tail bound {tail:.3e} exceeds tolerance {tol:.3e} for {what}")]
    TailTooLarge { what: String, tail: f64, tol: f64 },

    #[error("index {index} is excluded from the Legendre system with N = {levels}: {reason}")]
    ExcludedIndex {
        levels: usize,
        index: usize,
        reason: &'static str,
    },

    #[error("norm d_0 is infinite for N = {levels}")]
    InfiniteNorm { levels: usize },

    #[error("scale r is singular for N = {levels}: r = 2{{(N-2)(N+1)/2}}^(-1/2) needs N >= 3")]
    ScaleSingularity { levels: usize },

    #[error("invalid system size N = {levels}: {reason}")]
    Size { levels: usize, reason: &'static str },

    #[error("coupling f_{index} is singular in model '{label}'; refusing to integrate")]
    SingularCoupling { index: usize, label: String },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxSteps { max_steps: usize, t: f64 },

    #[error("coupling inference failed: residual {residual:.3e} exceeds {threshold:.3e} ({detail})")]
    InferenceFailed {
        residual: f64,
        threshold: f64,
        detail: String,
    },

    #[error("in closed form (k = {k}, n = {n}): {source}")]
    ClosedFormTerm {
        k: usize,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid time grid: {0}")]
    TimeGrid(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures of an iterative or truncated numerical procedure,
    /// as opposed to invalid input.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::SeriesNonConvergence { .. }
            | Error::QuadratureNonConvergence { .. }
            | Error::DivergentIntegral { .. }
            | Error::TailTooLarge { .. }
            | Error::MaxSteps { .. } => true,
            Error::ClosedFormTerm { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
