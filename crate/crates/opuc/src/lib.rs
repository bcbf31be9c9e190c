//! Orthogonal polynomials on the unit circle for polynomial-Szegő weights:
//! Verblunsky coefficients, CMV matrices, sum rules, modified Szegő
//! functions, asymptotic diagnostics and the associated variational
//! principle — all at desk scale, with quadrature-backed verdicts.

pub mod asymptotics;
pub mod cmv;
pub mod config;
pub mod error;
pub mod grid;
pub mod measure;
pub mod outer;
pub mod report;
pub mod runner;
pub mod sumrule;
pub mod szego;
pub mod variational;

pub use error::{Error, Result};
