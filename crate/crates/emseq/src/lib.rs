//! Toolkit for generating and empirically analysing the Ehrenfeucht-Mycielski
//! binary sequence: generation engines, occurrence-level queries, the trie of
//! repeated words with its strand and balance statistics, and machine checks
//! of the combinatorial claims about the sequence.

pub mod bits;
pub mod config;
pub mod engine;
pub mod error;
pub mod index;
pub mod io;
pub mod rtree;
pub mod verify;

pub use bits::{BitSequence, Word};
pub use engine::{EngineKind, Generator, StepTrace};
pub use error::EmError;
