//! Relativistic bulk-viscous fluids of Muller-Israel-Stewart type:
//! constitutive modelling, Lagrangian flow-line analysis, breakdown
//! certification for localized shell data, and 1+1 / spherically symmetric
//! evolution with virial diagnostics.
//!
//! The crate is organized as a library; see the `examples/` directory for
//! one runnable program per capability and the thin `misbulk` binary for
//! the file-driven command-line interface.

pub mod quad;
pub mod ode;
pub mod table;
pub mod constitutive;
pub mod state;
pub mod flowline;
pub mod shell;
pub mod certifier;
pub mod riemann;
pub mod solver;
pub mod config;
pub mod cli;

#[cfg(test)]
pub(crate) mod testrng;
