//! Command-line tooling, file formats and floating-point numerics for the
//! `conic-mirror-core` exact engine.

pub mod io;
pub mod numerics;
pub mod svg;
pub mod acceptance;
pub mod cli;
