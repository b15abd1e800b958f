use std::fmt;

use nalgebra::Complex;

/// A single failed parameter invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("config error: {0}")]
    Config(String),

    #[error("steady state did not converge after {iterations} iterations (residual {residual:e}, last <m> = {last})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: Complex<f64>,
    },

    #[error("singular steady-state denominator: {0}")]
    Singular(String),

    #[error("eigenvalue solver failed to converge")]
    EigenFailure,

    #[error("drift matrix is not stable (max Re λ = {margin:e})")]
    Unstable { margin: f64 },

    #[error("Lyapunov system is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("Lyapunov residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },

    #[error("symplectic eigenvalue pairing failed: {0}")]
    Pairing(String),

    #[error("covariance matrix is unphysical (min eigenvalue of C + iΣ/2 = {min_eigenvalue:e})")]
    Unphysical { min_eigenvalue: f64 },

    #[error("monogamy violated for bipartition {bipartition}: residual contangle {value:e}")]
    Monogamy { bipartition: &'static str, value: f64 },

    #[error("bad mode selection: {0}")]
    Modes(String),

    #[error("no stability boundary found below G = {limit:e}")]
    NoBoundary { limit: f64 },

    #[error("measure {0} is absent from every row")]
    MeasureAbsent(String),

    #[error("at {point}: {source}")]
    AtPoint {
        point: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Strips any `AtPoint` annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            e => e,
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.0.as_str()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
