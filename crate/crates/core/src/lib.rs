//! Riccati–Padé eigenvalue method for one-dimensional Schrödinger operators
//! `-d²/dx² + V(x)` with even potentials.
//!
//! The regularized logarithmic derivative of a parity-definite eigenfunction
//! is expanded about the origin ([`riccati`]); eigenvalue estimates are the
//! roots of Hankel determinants built from its coefficients ([`hankel`],
//! [`solver`]). Roots of the `d = 0` and `d = 1` determinants bracket the
//! eigenvalue from below and above for quartic-type potentials.

pub mod error;
pub mod hankel;
pub mod number;
pub mod observables;
pub mod oracle;
pub mod poly;
pub mod potential;
pub mod riccati;
pub mod solver;
pub mod wavefunction;

pub use error::{Result, RpmError};
pub use number::{BigReal, DualReal, Precision};
pub use poly::RationalPoly;
pub use potential::PotentialSpec;

/// Parity index: 0 for even states, 1 for odd states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_index(s: u8) -> Result<Self> {
        match s {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            other => Err(RpmError::InvalidParameter(format!("parity must be 0 or 1, got {other}"))),
        }
    }

    pub fn index(self) -> u64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}
