//! Asymptotic-preserving semi-Lagrangian finite-difference schemes for kinetic
//! transport equations in the diffusive scaling
//!
//! `f_t + (v/ε) f_x = C(f)/ε²`, with the density `ρ = ⟨f⟩`.
//!
//! Each time step solves an implicit macroscopic equation for the density,
//! then an implicit upwind transport-relaxation system per discrete velocity,
//! then resets `ρ` to the velocity average of `f`.

// Negated comparisons reject NaN inputs on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod collision;
pub mod config;
pub mod error;
pub mod grid;
pub mod harness;
pub mod semilag;
pub mod solver1d;
pub mod solver2d;
pub mod stability;
pub mod state;
pub mod velocity;

pub use config::{Collision, Config, Order, Scattering, SchemeConfig};
pub use error::{Error, Result};
pub use grid::{Axis, Boundary, Grid};
pub use state::KineticState;
pub use velocity::{VelocityKind, VelocitySpace};
