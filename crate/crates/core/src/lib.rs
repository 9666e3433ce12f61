//! Production-frontier estimation through extreme conditional quantiles.
//!
//! The frontier `phi(x)` is the upper endpoint of outputs among firms using
//! at most `x` inputs. Conditioning on `X <= x` turns it into the endpoint of
//! a univariate distribution, estimated by high order statistics of the
//! dominated outputs. Two inference routes are provided:
//!
//! * [`subsampling`]: a bias-cancelling combination of two extreme quantiles
//!   with subsampling critical values.
//! * [`abc`]: a posterior for the frontier built from the fixed-k joint
//!   limit density of several extreme quantiles ([`limits`]).
//!
//! [`simlab`] reproduces Monte Carlo designs and [`cli`] backs the `frontier`
//! binary.

pub mod abc;
pub mod cli;
pub mod error;
pub mod evt;
pub mod interval;
pub mod limits;
pub mod rng;
pub mod sample;
pub mod simlab;
pub mod subsampling;
pub mod tuning;

pub use error::{Error, Result};
pub use interval::{IntervalEstimate, Method};
pub use limits::HGrid;
pub use sample::{effective_sample, EffectiveSample, Observation, Sample};
