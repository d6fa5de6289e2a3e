//! Numerical toolkit for the spin-statistics connection: spin-S rotation
//! representations, the first-order Galilean spinor wave equation, spin
//! precession in a rotating frame, and the interferometric and entangling
//! protocols that expose the exchange phase `(−1)^{2S}`.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod galilean;
pub mod par;
pub mod qcore;
pub mod spinrep;
pub mod suites;

pub use error::{Error, Result};
