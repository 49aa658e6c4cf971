//! Coefficient-level laboratory for time-periodic evolution operators
//! `D_t + ωP` and `D_t + c(t)P` on the circle.
//!
//! The spectrum of `P` is modeled synthetically; every operator acts mode by
//! mode on the eigencoefficients `u_j(t)`.

pub mod error;
pub mod spectral_models;
pub mod torus_fn;
pub mod mode_solver;
pub mod regularity;
pub mod diophantine;
pub mod hypo_engine;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/torus-functions.md")]
    mod torus_functions {}
    #[doc = include_str!("../../../book/src/mode-equations.md")]
    mod mode_equations {}
    #[doc = include_str!("../../../book/src/small-divisors.md")]
    mod small_divisors {}
    #[doc = include_str!("../../../book/src/regularity.md")]
    mod regularity {}
    #[doc = include_str!("../../../book/src/hypoellipticity.md")]
    mod hypoellipticity {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
