//! Construction and analysis of PPT bound-entangled states that carry
//! distillable secret key.
//!
//! The library builds a family of states on a key part (two qubits, held by
//! the communicating parties) tensored with a shield part (two d-dimensional
//! systems), evaluates positivity of the partial transpose, key
//! distillability, separability bounds, and noise tolerance, and computes
//! the entropic quantities behind them: closed-form von Neumann entropies,
//! Devetak-Winter rates on measured states, and coherent information across
//! a 50% erasure channel.
//!
//! Modules:
//! - [`linops`]: dense complex operators with tensor-factor bookkeeping.
//! - [`states`]: the state and operator families and their parametrization.
//! - [`criteria`]: verdict-producing conditions (PPT, key, separability,
//!   noise) plus the twirl, twisting, and measured-state machinery.
//! - [`analysis`]: entropy maximization, rate curves, erasure thresholds.

pub mod analysis;
pub mod criteria;
pub mod error;
pub mod linops;
pub mod states;

pub use error::{Error, Result};
pub use linops::{Operator, C64};
