//! Stability analysis for planar linear systems with one Caputo derivative of
//! order `q ∈ (0, 1]` and one classical derivative, and its application to a
//! dimensionally consistent fractional-order Morris-Lecar neuron.
//!
//! The crate is split into three layers:
//!
//! * [`charcore`]: the characteristic function `Δ(s) = s^{q+1} + a s + b s^q + c`,
//!   the Hopf locus `a⋆(b, c, q)` and the stability classifier, plus an
//!   independent rational-order root oracle.
//! * [`mlmodel`]: the Morris-Lecar model, its nondimensionalization, equilibrium
//!   branches, special voltages and critical fractional orders.
//! * [`fodesolve`]: a fractional Adams-Bashforth-Moulton integrator for
//!   mixed-order systems, a Mittag-Leffler series reference and a Caputo
//!   quadrature used to check the time-rescaling rule.

pub mod charcore;
mod error;
pub mod fodesolve;
pub mod mlmodel;
pub mod roots;

pub use error::{Error, Result};
