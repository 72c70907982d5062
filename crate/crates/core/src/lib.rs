//! Allocation-only core of the sleepsense pipeline.
//!
//! Everything here is pure computation over in-memory frames and series:
//! per-pixel Gaussian-mixture background models for the depth and luma
//! channels, binary morphology, per-frame scoring, one-second epoch
//! aggregation with the rise/continue/fall event recurrence, per-epoch
//! motion classification and sleep efficiency, actigraphy-style
//! Cole/Sadeh scoring, and a seeded synthetic session generator.
//!
//! File formats, configuration parsing and the command line live in the
//! `sleepsense` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod actigraphy;
pub mod analysis;
pub mod background;
pub mod error;
pub mod events;
pub mod frame;
pub mod morphology;
pub mod scoring;
pub mod session;
pub mod sleep;
pub mod synth;

pub use error::{Error, Result};
