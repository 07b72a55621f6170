//! Quantum speed limit bounds and non-Markovianity measures for a qubit in
//! the damped Jaynes-Cummings model.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the command-line front end
//! and the sweep engine use.

pub mod bounds;
pub mod djc;
pub mod error;
pub mod non_markov;
pub mod path;
pub mod qubit;
pub mod scalar;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix2 = qubit::ComplexMatrix2<f64>;
pub type DensityMatrix = qubit::DensityMatrix<f64>;
pub type BlochVector = qubit::BlochVector<f64>;
pub type ModelParams = djc::ModelParams<f64>;
pub type PropagatorSample = djc::PropagatorSample<f64>;
pub type RateSample = djc::RateSample<f64>;
pub type DjcPath = djc::DjcPath<f64>;
pub type TimeGrid = path::TimeGrid<f64>;
pub type PathSample = path::PathSample<f64>;
pub type PathAnalysis = path::PathAnalysis<f64>;
pub type BoundsReport = bounds::BoundsReport<f64>;
pub type NonMarkovReport = non_markov::NonMarkovReport<f64>;
