//! Numerical spectral analysis of the Gribov-Intissar operator family on
//! Bargmann space.
//!
//! The crate is organised around the objects the computations share:
//!
//! * [`basis`]: coefficient-space actions of the ladder operators and of the
//!   cubic Hamiltonians `H_{mu,lambda}` and `H^{p,m}` on Fock expansions;
//! * [`jacobi`]: scalar and block Jacobi truncations, characteristic
//!   polynomial recurrences, Aberth-Ehrlich spectra and the `sigma_0(mu)`
//!   curve;
//! * [`ortho`]: first/second-kind polynomials of the Jacobi-Gribov matrix,
//!   the Gaussian-tail function `phi` and its two derivative-polynomial
//!   families;
//! * [`deficiency`]: square-summability tests at zero energy, eigenvector
//!   decay bounds and the complete-indeterminacy verdicts;
//! * [`inverse`]: the integral right inverse `K_{0,lambda}`: kernel
//!   evaluation, quadrature and recurrence application, the norm ledger,
//!   finite-rank compactness bounds and the Nystrom Perron root.
//!
//! Everything is plain `f64`/`Complex64` arithmetic with fixed summation
//! orders, so results are reproducible bit-for-bit for identical inputs.

pub mod basis;
pub mod deficiency;
pub mod inverse;
pub mod jacobi;
pub mod numeric;
pub mod ortho;
pub mod quad;
pub mod verify;

use thiserror::Error;

/// Errors surfaced by the numerical routines.
///
/// Precondition violations (wrong basis tag, zero sizes) are programming
/// errors and panic instead; these variants are reserved for conditions a
/// correct caller can run into at runtime.
#[derive(Debug, Error)]
pub enum Error {
    /// An Aberth-Ehrlich root failed to reach the requested residual.
    #[error("root {index} did not reach the residual tolerance after {sweeps} sweeps")]
    NonConvergence { index: usize, sweeps: usize },

    /// Argument outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series classifier was fed a non-positive term.
    #[error("series term at n = {n} is not positive")]
    NonPositiveTerm { n: usize },

    /// A recurrence produced a value beyond 1e300; the solutions being
    /// followed are provably bounded, so this indicates a defect.
    #[error("recurrence overflow at n = {n}")]
    Overflow { n: usize },

    /// An exact polynomial identity failed to reduce to a constant.
    #[error("polynomial identity violated at n = {n}: {detail}")]
    IdentityViolation { n: usize, detail: String },

    /// A two-sided bound that holds as a theorem was violated numerically.
    #[error("bound violated at n = {n}: {detail}")]
    BoundViolation { n: usize, detail: String },

    /// Power iteration stalled before the Rayleigh quotient settled.
    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
