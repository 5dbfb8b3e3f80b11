//! Recurring information cascades on social graphs.
//!
//! The crate is organised around a single pipeline:
//!
//! * [`graph`] builds or loads a people/pages social graph,
//! * [`simulate`] runs the multi-copy SIR model on it and emits an event log,
//! * [`burst`] finds peaks and bursts in daily reshare counts,
//! * [`cascade`] characterises cascades (populations, overlap, entropy, copies),
//! * [`features`] turns an initial burst into a fixed feature vector,
//! * [`predict`] trains and cross-validates recurrence classifiers.
//!
//! Every stochastic routine takes an explicit 64-bit seed and uses a
//! portable ChaCha generator, so results are bit-identical across runs
//! and platforms.

pub mod burst;
pub mod cascade;
mod error;
pub mod features;
pub mod graph;
pub mod predict;
pub mod rng;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
