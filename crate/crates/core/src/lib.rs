//! Functional determinants of the fluctuation operator `K = -d²/dt² - Ω²(t)`
//! on a finite interval, for Dirichlet, periodic and antiperiodic boundary
//! conditions.
//!
//! Determinants are obtained from two homogeneous solutions and their
//! Wronskian (Gel'fand–Yaglom style endpoint formulas), from the amplitude/phase
//! (Ermakov–Pinney) parametrization, and, for operators with a zero mode, from
//! the ε-regularized limit. Two independent oracles back every formula: a
//! finite-difference lattice spectrum and the coupling-constant flow of the
//! Green-function trace.
//!
//! ```
//! use fundet::{profiles::{FrequencyProfile, Interval}, determinants, BoundaryCondition};
//!
//! let interval = Interval::new(0.0, 1.0).unwrap();
//! let profile = FrequencyProfile::constant(1.0, interval).unwrap();
//! let det = determinants::determinant(&profile, BoundaryCondition::Dirichlet, 1.0).unwrap();
//! assert!((det.value - 1f64.sin()).abs() < 1e-8);
//! ```

// `!(x > tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod determinants;
pub mod ermakov_bridge;
mod error;
pub mod green;
pub mod odesolve;
pub mod oracle;
pub mod profiles;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// Boundary conditions imposed on the fluctuations `y(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// `y(t_a) = y(t_b) = 0`
    Dirichlet,
    /// `y(t_b) = y(t_a)`, `y'(t_b) = y'(t_a)`
    Periodic,
    /// `y(t_b) = -y(t_a)`, `y'(t_b) = -y'(t_a)`
    Antiperiodic,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 3] = [
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Periodic,
        BoundaryCondition::Antiperiodic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Antiperiodic => "antiperiodic",
        }
    }

    /// `+1` for periodic, `-1` for antiperiodic, `None` for Dirichlet.
    pub fn twist(self) -> Option<f64> {
        match self {
            BoundaryCondition::Dirichlet => None,
            BoundaryCondition::Periodic => Some(1.0),
            BoundaryCondition::Antiperiodic => Some(-1.0),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "periodic" => Ok(BoundaryCondition::Periodic),
            "antiperiodic" => Ok(BoundaryCondition::Antiperiodic),
            other => Err(Error::InvalidArgument(format!(
                "unknown boundary condition '{other}'"
            ))),
        }
    }
}
