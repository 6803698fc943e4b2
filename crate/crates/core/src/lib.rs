//! Outage analysis for load-sharing smart gateway diversity (LS-SGD) satellite
//! feeder networks.
//!
//! The number of gateways in outage is a Poisson binomial random variable
//! `S_N`. A network of `N` equal-capacity gateways fails to carry its demand
//! exactly when `S_N >= L`, where `L = N - ceil(r) + 1` and `r` is the ratio of
//! traffic demand to single-gateway capacity. Everything here is built around
//! that upper tail:
//!
//! * [`pbd`] computes it exactly (subset enumeration, DFT closed form,
//!   two-term recursion, FFT convolution tree).
//! * [`approx`] estimates or bounds it (binomial, Poisson, normal, refined
//!   normal, Chernoff) and reports total-variation diagnostics.
//! * [`sgd`] maps capacities and demands onto tail queries.
//! * [`oracle`] provides brute-force and Monte Carlo ground truth.
//! * [`experiments`] runs the random-configuration studies and timing sweeps.

pub mod approx;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod pbd;
pub mod sgd;

pub use error::{Error, Result};
pub use pbd::{OutageVector, PbdMoments, PbdPmf, TailQuery};
