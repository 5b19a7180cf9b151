//! Command-line front end for the delay-equation power-series solver.
//!
//! The library half holds everything testable: the TOML configuration
//! schema ([`config`]), the deterministic JSON report ([`report`]), and the
//! pipeline that connects them to the solver core ([`pipeline`]).  The
//! binary (`fdeseries`) is a thin argument-parsing shell over these.

pub mod config;
pub mod pipeline;
pub mod report;
