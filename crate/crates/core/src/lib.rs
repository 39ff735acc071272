#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cauchy;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod geometry;
pub mod hull;
pub mod math;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
