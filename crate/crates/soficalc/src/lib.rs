//! Boolean-semiring calculator for sofic shifts and ω-automata.
//!
//! The crate computes the state spaces, bilinear pairings, identity
//! decompositions and circular languages that one-dimensional Boolean TQFTs
//! attach to shifts of finite and sofic type and to automata on infinite
//! words, and evaluates decorated one-dimensional defect diagrams against
//! several theory flavors. The `soficalc` binary exposes everything on the
//! command line; see the crate README for the file formats.

pub mod boolsemi;
pub mod error;
pub mod omega;
pub mod regular;
pub mod sofic;
pub mod tqft;
pub mod words;

pub use error::{Error, Result};

pub mod cli {
    /// Placeholder while the CLI is under construction.
    pub fn run(_args: impl Iterator<Item = String>) -> i32 {
        eprintln!("not yet implemented");
        2
    }
}
