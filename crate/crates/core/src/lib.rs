//! Computational Eichler cohomology for modular and generalized modular forms
//! of real weight.
//!
//! The crate is organised bottom-up:
//!
//! - [`modgroup`]: integer matrices, Möbius action, cusps and coset
//!   representatives for `SL2(Z)` and `Gamma0(N)`, word decomposition.
//! - [`automorphy`]: principal-branch powers, multiplier systems and the
//!   stroke operator.
//! - [`forms`]: truncated Fourier expansions and the shipped example forms.
//! - [`eichler`]: Eichler integrals, Bol's identity and period cocycles by
//!   two independent routes.
//! - [`cohomology`]: cocycles, coboundary and parabolicity tests, growth-space
//!   membership.
//! - [`poincare`]: generalized Poincaré and Eisenstein series and the
//!   automorphic-integral construction `F = -Psi/g + phi_0`.
//! - [`cli`]: the command-line front end.

pub mod automorphy;
pub mod cli;
pub mod cohomology;
pub mod eichler;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod modgroup;
pub mod poincare;
pub mod quadrature;
pub mod serial;
pub mod summation;

pub use error::{Error, Result};
pub use num_complex::Complex64;

use std::sync::Arc;

/// A function on the upper half-plane that can be evaluated pointwise.
pub type Function = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Wrap a closure as a shareable [`Function`].
pub fn function<F>(f: F) -> Function
where
    F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
{
    Arc::new(f)
}
