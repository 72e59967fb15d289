//! Discrepancy of 1-factorizations of signed complete bipartite graphs.
//!
//! Given a signing of `K_{n,n}` (an `n x n` sign matrix), this crate
//!
//! * measures its overall discrepancy and switcher census,
//! * builds 1-factorizations whose matchings all carry large discrepancy
//!   when the signing has either large overall discrepancy ([`cyclic`]) or
//!   many switchers ([`switching`]),
//! * otherwise certifies spectrally that the signing is Hamming-close to a
//!   balanced one-sided signing ([`spectral`], [`dichotomy`]),
//!
//! and ships brute-force reference implementations ([`oracle`]) for small
//! instances.

pub mod census;
pub mod cli;
pub mod cyclic;
pub mod dichotomy;
pub mod error;
pub mod io;
pub mod oracle;
pub mod rational;
pub mod rng;
pub mod signing;
pub mod spectral;
pub mod switching;
pub mod two_factor;

pub use census::{SwitcherCensus, SwitcherRecord, SwitcherType};
pub use error::{Error, Result};
pub use rational::Rational;
pub use signing::{
    disc_graph, disc_matching, signed_sum, validate_factorization, OneFactorization, Orientation,
    PerfectMatching, SignMatrix, ValidationReport, Violation,
};
pub use two_factor::{Cycle, DoubleCover, TwoFactor, TwoFactorization};
