//! Inhomogeneous mark correlation functions for marked spatial point
//! patterns: intensity estimation, mark correlation and mark variogram
//! estimators, random-labelling global envelope tests and scenario
//! simulators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod envelope;
pub mod error;
pub mod geometry;
pub mod intensity;
pub mod io;
pub mod markcorr;
pub mod pattern;
pub mod rng;
pub mod simulate;
pub mod study;

pub use error::{Error, Result};
