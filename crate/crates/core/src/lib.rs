//! Scalar conservation law `u_t + w_t + u_x = 0` with a Preisach hysteresis output `w`.
//!
//! The crate provides an exact staircase representation of Preisach memory, an exact
//! Riemann solver, a dyadic wave-front tracking scheme and functionals that check the
//! variation, energy, entropy and contraction properties of computed solutions.

pub mod analysis;
pub mod error;
pub mod oracle;
pub mod preisach;
pub mod relay;
pub mod riemann;
pub mod wavefront;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use preisach::{FlipRegion, MemoryCurve, Triangle};
pub use analysis::{EnergyReport, EntropyProbe};
pub use relay::{Interpolation, PiecewiseMonotoneSignal, RelaySign, Threshold};

pub use riemann::{RiemannData, RiemannFan};
pub use wavefront::{Cell, Front, FrontKind, GridParams, PiecewiseState, Trajectory};
