//! Series reversion, q-products and the special functions around them,
//! together with a verifier that checks numeric identities against
//! independent oracles.

pub mod error;
pub mod expr;
pub mod inversion;
pub mod numeric;
pub mod qseries;
pub mod quadint;
pub mod quadrature;
pub mod rational;
pub mod realanalog;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
