//! Isentropic compressible flow in curved, piecewise-smooth pipes.
//!
//! The crate is organised bottom-up: [`eos`] holds the pressure laws,
//! [`geometry`] the pipe description, [`riemann`] the exact Riemann solvers
//! (classical and at junctions), [`stationary`] the steady profiles,
//! [`discretize`] the dyadic point-source approximation, [`fronttrack`] the
//! wave-front-tracking engine and [`refsolver`] a finite-volume oracle.

pub mod error;
pub mod discretize;
pub mod eos;
pub mod fronttrack;
pub mod geometry;
pub mod numerics;
pub mod refsolver;
pub mod riemann;
pub mod stationary;

pub use eos::{LawKind, PressureLaw, State};
pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
