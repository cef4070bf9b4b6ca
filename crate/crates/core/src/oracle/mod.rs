//! Independent checks of the endpoint formulas: finite-difference lattice
//! determinants and spectra, and the coupling-constant flow of the
//! Green-function trace.

mod gflow;
pub mod lattice;

pub use gflow::{
    flow_determinant, gflow_ratio, gflow_report, trace_at, trace_identity, GflowReport,
    TraceIdentity, CROSSING_TOLERANCE, DEFAULT_G_STEPS,
};
pub use lattice::LatticeOperator;

use serde::Serialize;

use crate::determinants::reference_det;
use crate::profiles::FrequencyProfile;
use crate::{BoundaryCondition, Error, Result};

/// Smallest mesh accepted for ratio computations.
pub const MIN_RATIO_MESH: usize = 16;
/// `|λ| < ZERO_MODE_TOLERANCE · scale` marks a lattice zero mode in ratios.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-10;
/// Threshold for the mode removed by the pseudo-determinant.
pub const PSEUDO_ZERO_TOLERANCE: f64 = 1e-8;

fn check_mesh(n: usize) -> Result<()> {
    if n < MIN_RATIO_MESH {
        return Err(Error::InvalidArgument(format!(
            "lattice mesh must have at least {MIN_RATIO_MESH} points, got {n}"
        )));
    }
    Ok(())
}

fn operators(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
    n: usize,
) -> Result<(LatticeOperator, LatticeOperator)> {
    let reference = lattice::reference_profile(profile, bc, omega0)?;
    Ok((
        LatticeOperator::new(profile, bc, 1.0, n)?,
        LatticeOperator::new(&reference, bc, 1.0, n)?,
    ))
}

fn refuse_zero_modes(op: &LatticeOperator) -> Result<()> {
    let count = lattice::near_zero_count(op, ZERO_MODE_TOLERANCE * op.scale());
    if count > 0 {
        return Err(Error::LatticeZeroMode { count });
    }
    Ok(())
}

/// `det A₁ / det Ã` for same-size lattices; `Ã` is the free operator
/// (Dirichlet) or `Ω² ≡ ω₀²` (periodic, antiperiodic).
pub fn lattice_ratio(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
    n: usize,
) -> Result<f64> {
    check_mesh(n)?;
    reference_det(bc, profile.interval().length(), omega0)?;
    let (a1, a0) = operators(profile, bc, omega0, n)?;
    refuse_zero_modes(&a1)?;
    refuse_zero_modes(&a0)?;
    let (l1, s1) = a1.log_det();
    let (l0, s0) = a0.log_det();
    Ok(s1 * s0 * (l1 - l0).exp())
}

/// Dirichlet ratio from the three-term recurrence instead of LDLᵀ.
pub fn recurrence_ratio(profile: &FrequencyProfile, n: usize) -> Result<f64> {
    check_mesh(n)?;
    let (a1, a0) = operators(profile, BoundaryCondition::Dirichlet, 0.0, n)?;
    let (l1, s1) = a1.recurrence_log_det().expect("tridiagonal");
    let (l0, s0) = a0.recurrence_log_det().expect("tridiagonal");
    Ok(s1 * s0 * (l1 - l0).exp())
}

/// Mesh with half the step of `n`.
pub fn refined_mesh(bc: BoundaryCondition, n: usize) -> usize {
    match bc {
        BoundaryCondition::Dirichlet => 2 * n + 1,
        _ => 2 * n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeEstimate {
    pub n: usize,
    pub coarse: f64,
    pub fine: f64,
    /// One Richardson step assuming `O(h²)` error: `(4·fine − coarse)/3`.
    pub extrapolated: f64,
}

pub fn lattice_ratio_extrapolated(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
    n: usize,
) -> Result<LatticeEstimate> {
    let coarse = lattice_ratio(profile, bc, omega0, n)?;
    let fine = lattice_ratio(profile, bc, omega0, refined_mesh(bc, n))?;
    Ok(LatticeEstimate {
        n,
        coarse,
        fine,
        extrapolated: (4.0 * fine - coarse) / 3.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub bc: BoundaryCondition,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub num_nonpositive: usize,
    pub zero_mode_index: Option<usize>,
    /// Product of the remaining eigenvalues over the reference lattice determinant.
    pub pseudo_det_ratio: f64,
    /// Continuum determinant of the reference operator.
    pub reference_det: f64,
    /// `pseudo_det_ratio · reference_det`, comparable with regularized determinants.
    pub aligned: f64,
}

/// Spectrum of the lattice operator with the single near-zero mode removed.
pub fn pseudo_det_ratio(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
    n: usize,
) -> Result<SpectrumReport> {
    check_mesh(n)?;
    let ref_det = reference_det(bc, profile.interval().length(), omega0)?;
    let (a1, a0) = operators(profile, bc, omega0, n)?;
    refuse_zero_modes(&a0)?;
    let eigenvalues = a1.eigenvalues();
    let tol = PSEUDO_ZERO_TOLERANCE * a1.scale();
    let zero: Vec<usize> = (0..n).filter(|&i| eigenvalues[i].abs() < tol).collect();
    if zero.len() != 1 {
        return Err(Error::LatticeZeroMode { count: zero.len() });
    }
    let k = zero[0];
    let (mut log, mut sign) = (0.0, 1.0);
    for (i, l) in eigenvalues.iter().enumerate() {
        if i != k {
            log += l.abs().ln();
            sign *= l.signum();
        }
    }
    let (l0, s0) = a0.log_det();
    let ratio = sign * s0 * (log - l0).exp();
    Ok(SpectrumReport {
        n,
        bc,
        num_nonpositive: eigenvalues.iter().filter(|&&l| l <= 0.0).count(),
        eigenvalues,
        zero_mode_index: Some(k),
        pseudo_det_ratio: ratio,
        reference_det: ref_det,
        aligned: ratio * ref_det,
    })
}

/// Number of non-positive lattice eigenvalues of `K_g` (Sturm count).
pub fn nonpositive_count(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    g: f64,
    n: usize,
) -> Result<usize> {
    let op = LatticeOperator::new(profile, bc, g, n)?;
    Ok(op.count_below(f64::MIN_POSITIVE))
}
