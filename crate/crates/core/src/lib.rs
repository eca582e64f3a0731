//! Eulerian dynamical decoupling on finite groups of unitary controls.

pub mod analysis;
pub mod cayley;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod irreps;
pub mod linalg;
pub mod pulses;
pub mod schedule_io;

pub use error::{Error, Result};
