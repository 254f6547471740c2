//! Estimation of the Verdoorn, Kaldor and Rowthorn growth regressions on regional
//! sector panels.
//!
//! Pipeline: [`dataset`] turns level data into growth-rate series, [`regress`] fits
//! bivariate OLS with the usual diagnostics, [`verdoorn`] runs the four
//! specifications of one cell and checks their cross-equation identities, and
//! [`report`] renders table blocks. [`montecarlo`] generates synthetic panels and
//! runs recovery and influence experiments.

pub mod dataset;
pub mod error;
pub mod montecarlo;
pub mod regress;
pub mod report;
pub mod verdoorn;

pub use error::{Error, Result};
