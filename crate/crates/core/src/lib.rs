//! Binary classification under sparse adversarial corruption.
//!
//! A label `y` in {-1, +1} is observed through `d` noisy samples
//! `x_i = y c / sqrt(d) + z_i`, with noise `z_i` from an exponential-polynomial
//! density. An adversary may overwrite up to `k` samples arbitrarily. The
//! crate provides:
//!
//! * [`noise`]: exp-poly densities with Fisher information, shifted-density
//!   divergences, tail bounds and an audit of their regularity conditions;
//! * [`model`]: the data-generating process;
//! * [`classify`]: log-likelihood scores, the maximum-likelihood sign test
//!   and the truncated-sum classifier;
//! * [`attack`]: the worst-case adversary (closed form plus exhaustive
//!   oracle) and the maximal-coupling adversary;
//! * [`experiment`]: Monte Carlo error estimates, budget sweeps, reports;
//! * [`numerics`]: quadrature, polynomials, sampling and random streams.
//!
//! The `book/` directory next to this crate walks through the same material
//! with runnable listings; they are compiled and run as doctests.

pub mod attack;
pub mod classify;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod model;
pub mod noise;
pub mod numerics;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/classifiers.md")]
    mod classifiers {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
