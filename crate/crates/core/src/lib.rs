//! Logic gates grown by topology optimisation of a heat-conducting material.
//!
//! A square plate is discretised into unit elements, each carrying a material
//! density. Heat is driven between input, output and outlet sites by fixed
//! temperatures or fluxes; the density field then evolves so that material
//! accumulates where heat-dissipation work per unit density exceeds the
//! global average. The converged layout at the output sites encodes the
//! logical result.
//!
//! * [`fem`]: mesh, SIMP conductivity, assembly, conjugate-gradient solve and
//!   per-element cost.
//! * [`optimizer`]: bang-bang and projected Euler density updates.
//! * [`gates`]: AND, XOR and half-adder layouts, input encoding, readout and
//!   truth tables.
//! * [`cli`]: configuration files, snapshot export and the command-line
//!   front end.

pub mod cli;
pub mod error;
pub mod fem;
pub mod gates;
pub mod optimizer;

pub use error::{Error, Result};
