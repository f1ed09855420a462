//! Synthetic rooftop-solar adoption and generation modelling.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the command-line tool uses.

// `!(x > y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boost;
pub mod calibrate;
pub mod data;
pub mod diffusion;
pub mod error;
pub mod metrics;
pub mod preprocess;
pub mod pv;
pub mod rng;
pub mod scalar;
pub mod sqft;
pub mod toygen;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Gbt = boost::GbtModel<f64>;
pub type OneVsRestGbt = boost::OneVsRest<f64>;
pub type Gp2 = calibrate::GpModel<f64, 2>;
pub type Distribution = metrics::DiscreteDistribution<f64>;
pub type Samples = pv::TimeInvariantSamples<f64>;
pub type Profile = pv::EnergyProfile<f64>;
pub type Profiles = pv::ProfileSet<f64>;
pub type Subclasses = sqft::SubclassWeights<f64>;
