//! Special functions for spherical boundary-value problems.
//!
//! Spherical Bessel and Hankel functions of complex argument, their
//! Riccati forms, and the spin-`l` angular-momentum matrices.

mod angular;
mod bessel;

pub use angular::AngularMomentumMatrices;
pub use bessel::{
    accuracy, riccati_bessel, spherical_bessel_j, spherical_bessel_j_array, spherical_bessel_y,
    spherical_hankel1, spherical_hankel1_array, Accuracy, RiccatiBessel,
};
pub(crate) use bessel::{cdiv, riccati_psi};

use thiserror::Error;

/// Largest order accepted by the Bessel routines.
pub const MAX_ORDER: u32 = 500;
/// Largest argument modulus covered by the tight accuracy contract.
pub const VALIDATED_ABS_ARG: f64 = 300.0;
/// Largest order covered by the tight accuracy contract.
pub const VALIDATED_ORDER: u32 = 200;
/// Largest order accepted by [`AngularMomentumMatrices::new`].
pub const MAX_ANGULAR_ORDER: u32 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("order l = {l} outside the supported range 0..={max}")]
    OrderOutOfRange { l: u32, max: u32 },
    #[error("argument must be nonzero for {function}")]
    ZeroArgument { function: &'static str },
    #[error("non-finite argument {re} + {im}i")]
    NonFiniteArgument { re: f64, im: f64 },
    #[error("{function} overflows double precision at l = {l}, |x| = {abs_x}")]
    Overflow {
        function: &'static str,
        l: u32,
        abs_x: f64,
    },
}

pub type Result<T> = std::result::Result<T, SpecFunError>;
