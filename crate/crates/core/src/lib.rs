//! Entanglement between two intervals in the current-carrying steady state
//! of a tight-binding chain with a scatterer.
//!
//! Numeric measures come from restricted two-point correlation matrices,
//! and [`asymptotics`] evaluates the matching closed-form predictions.

pub mod asymptotics;
pub mod correlation;
pub mod entanglement;
pub mod numerics;
pub mod scattering;

pub use num_complex::Complex64;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("quadrature did not converge on [{a}, {b}]: error estimate {estimate:e} after {panels} panels")]
    NonConvergence { a: f64, b: f64, estimate: f64, panels: usize },
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    EigenNonConvergence(usize),
    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("eigenvalue {0} lies outside [0, 1]")]
    Spectrum(f64),
    #[error("I + Gamma+ Gamma- is numerically singular")]
    SingularResolvent,
    #[error("negativity has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("invalid geometry: {0}")]
    Geometry(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::EigenNonConvergence(_) => "NonConvergence",
            Error::NotHermitian(_) => "NotHermitian",
            Error::Singular => "Singular",
            Error::Domain(_) => "DomainError",
            Error::Spectrum(_) => "SpectrumError",
            Error::SingularResolvent => "SingularResolvent",
            Error::ImaginaryResidue(_) => "ImaginaryResidue",
            Error::Geometry(_) => "GeometryError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
