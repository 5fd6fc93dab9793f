//! Exact-arithmetic toolkit for payment computation in truthful mechanisms
//! and its communication cost.

pub mod algorithms;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod myerson;
pub mod parse;
pub mod protocol;
pub mod rational;

pub use domain::{AlternativeId, Grid, PlayerDomain, Profile, ScalarSet, SingleParamDomain, Valuation};
pub use error::{Error, Result};
pub use rational::{ExtendedRational, Rational};
