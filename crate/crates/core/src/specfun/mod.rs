//! Scalar special functions: gamma, null theta values and the modular
//! quantities built from them, Gauss and Appell hypergeometric series,
//! the incomplete beta function and Lambert W.

mod beta;
mod gamma;
mod lambert;
mod theta;

pub use beta::{appell_f1, hyp2f1, inc_beta};
pub use gamma::{gamma_fn, gamma_real};
pub use lambert::{lambert_w, LambertBranch};
pub use theta::{e_map, eta, k_r, mstar, rogers_ramanujan, theta2, theta3, Nome, UpperHalfPoint};
