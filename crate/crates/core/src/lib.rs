//! Balls-and-bins placement processes where each ball may only choose between
//! bins joined by an edge of an underlying graph, plus the grouped super-bin
//! schemes and rebalancing-move variants, and the diagnostics used to study
//! them (witness graphs, step detection, asymptotic bound evaluation).
//!
//! The crate is `no_std` (with `alloc`) so the simulation kernels can run
//! anywhere; file formats, configuration, and the CLI live in the companion
//! `ballast` crate.
//!
//! Module map:
//! - [`graph`]: bin graphs and their generators, uniform edge sampling.
//! - [`allocation`]: load state, single-choice and edge-two-choice inserts.
//! - [`moves`]: directed-orientation view with bounded rebalancing moves.
//! - [`grouped`]: aligned / unaligned-window / global-min super-bin schemes,
//!   k-step detection, and the q_r estimator.
//! - [`analysis`]: witness-graph construction, d-ary Fibonacci growth rates,
//!   bound-term evaluation, and cross-trial order statistics.
//! - [`process`]: a process descriptor and a seeded driver for whole runs.
//! - [`rng`]: the deterministic PRNG every process consumes.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod allocation;
pub mod analysis;
pub mod error;
pub mod graph;
pub mod grouped;
pub mod moves;
pub mod process;
pub mod rng;

pub use error::{Error, Result};
