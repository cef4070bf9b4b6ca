//! Determinants from endpoint data of a homogeneous basis.
//!
//! Normalization: `Det K₀ = T` for Dirichlet, `Det K̃ = 4 sin²(ω₀T/2)` for
//! periodic and `4 cos²(ω₀T/2)` for antiperiodic, with `K̃ = −∂² − ω₀²`.

mod van_vleck;
mod zeromode;

pub use van_vleck::{van_vleck_check, VAN_VLECK_STENCIL};
pub use zeromode::{
    det_dirichlet_regularized, det_dirichlet_regularized_spec, det_periodic_regularized,
    periodic_zero_mode_basis, PeriodicZeroModeReport, ZeroModeReport, EPS_FACTOR,
    ZERO_MODE_PRESENCE,
};

use serde::Serialize;

use crate::green::endpoint_matrix;
use crate::odesolve::{make_basis, BasisConvention, HomogeneousBasis};
use crate::profiles::FrequencyProfile;
use crate::{BoundaryCondition, Error, Result};

/// `|sin|` or `|cos|` of `ω₀T/2` below this makes the reference singular.
pub const REFERENCE_DEGENERACY: f64 = 1e-8;
/// `|value| ≤ DEGENERACY · scale` sets [`DetResult::degenerate`].
pub const DEGENERACY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "operator", rename_all = "snake_case")]
pub enum Reference {
    /// `K₀ = −∂²`.
    Free,
    /// `K̃ = −∂² − ω₀²`.
    Oscillator { omega0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub wronskian: f64,
    /// `det Λ` or `det Λ̄`.
    pub endpoint_det: f64,
    /// `max|entry|² / |det|` of the endpoint matrix.
    pub condition: f64,
    pub monodromy_trace: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetResult {
    pub value: f64,
    pub ratio: f64,
    pub reference: Reference,
    pub bc: BoundaryCondition,
    /// The operator has a zero mode to working accuracy.
    pub degenerate: bool,
    pub diagnostics: Diagnostics,
}

/// Continuum determinant of the reference operator.
pub fn reference_det(bc: BoundaryCondition, t_len: f64, omega0: f64) -> Result<f64> {
    let half = 0.5 * omega0 * t_len;
    let (f, name) = match bc {
        BoundaryCondition::Dirichlet => return Ok(t_len),
        BoundaryCondition::Periodic => (half.sin(), "sin"),
        BoundaryCondition::Antiperiodic => (half.cos(), "cos"),
    };
    if !omega0.is_finite() || f.abs() < REFERENCE_DEGENERACY {
        return Err(Error::DegenerateReference(format!(
            "{name}(omega0*T/2) vanishes for omega0 = {omega0}, T = {t_len}; choose another omega0"
        )));
    }
    Ok(4.0 * f * f)
}

fn require_full_coupling(basis: &HomogeneousBasis) -> Result<()> {
    if basis.g != 1.0 {
        return Err(Error::InvalidArgument(format!(
            "determinants need a basis at g = 1, got g = {}",
            basis.g
        )));
    }
    Ok(())
}

fn evaluate(basis: &HomogeneousBasis, bc: BoundaryCondition, omega0: f64) -> Result<DetResult> {
    require_full_coupling(basis)?;
    let t_len = basis.length();
    let reference_value = reference_det(bc, t_len, omega0)?;
    let lam = endpoint_matrix(basis, bc);
    let value = lam.det / basis.wronskian;
    let trace = basis.monodromy_trace();
    let scale = match bc {
        BoundaryCondition::Dirichlet => t_len,
        _ => 2.0 + trace.abs(),
    };
    let max = lam.max_abs();
    Ok(DetResult {
        value,
        ratio: value / reference_value,
        reference: match bc {
            BoundaryCondition::Dirichlet => Reference::Free,
            _ => Reference::Oscillator { omega0 },
        },
        bc,
        degenerate: value.abs() <= DEGENERACY * scale,
        diagnostics: Diagnostics {
            wronskian: basis.wronskian,
            endpoint_det: lam.det,
            condition: if lam.det == 0.0 { f64::INFINITY } else { max * max / lam.det.abs() },
            monodromy_trace: trace,
        },
    })
}

/// `[η_a ξ_b − η_b ξ_a] / W`; ratio against `Det K₀ = T`.
pub fn det_dirichlet(basis: &HomogeneousBasis) -> Result<DetResult> {
    evaluate(basis, BoundaryCondition::Dirichlet, 0.0)
}

/// `det Λ̄ / W` with the upper (periodic) signs.
pub fn det_periodic(basis: &HomogeneousBasis, omega0: f64) -> Result<DetResult> {
    evaluate(basis, BoundaryCondition::Periodic, omega0)
}

/// `det Λ̄ / W` with the lower (antiperiodic) signs.
pub fn det_antiperiodic(basis: &HomogeneousBasis, omega0: f64) -> Result<DetResult> {
    evaluate(basis, BoundaryCondition::Antiperiodic, omega0)
}

pub fn det_with(basis: &HomogeneousBasis, bc: BoundaryCondition, omega0: f64) -> Result<DetResult> {
    evaluate(basis, bc, omega0)
}

/// Determinant of `K₁` for a profile; `omega0` is ignored for Dirichlet.
pub fn determinant(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
) -> Result<DetResult> {
    let basis = make_basis(profile, 1.0, BasisConvention::Canonical)?;
    evaluate(&basis, bc, omega0)
}
