//! `Det K̃⁻¹K_g = C · exp(−∫₀^g Tr Ω²G_{g′} dg′)` evaluated by Gauss–Legendre
//! quadrature in the coupling.

use serde::Serialize;

use crate::determinants::reference_det;
use crate::green::{kernel, trace_omega_g, endpoint_matrix};
use crate::odesolve::{make_basis_with, BasisConvention, HomogeneousBasis, StepControl};
use crate::profiles::FrequencyProfile;
use crate::quadrature::{self, gauss_legendre};
use crate::{BoundaryCondition, Error, Result};

pub const DEFAULT_G_STEPS: usize = 32;
/// `|det Λ_g / W_g| < CROSSING_TOLERANCE · scale` flags a zero mode of `K_g`.
pub const CROSSING_TOLERANCE: f64 = 1e-8;

fn basis_at(profile: &FrequencyProfile, g: f64, control: &StepControl) -> Result<HomogeneousBasis> {
    make_basis_with(profile, g, BasisConvention::Canonical, control)
}

fn endpoint_ratio(basis: &HomogeneousBasis, bc: BoundaryCondition) -> (f64, f64) {
    let d = endpoint_matrix(basis, bc).det / basis.wronskian;
    let scale = match bc {
        BoundaryCondition::Dirichlet => basis.length(),
        _ => 2.0 + basis.monodromy_trace().abs(),
    };
    (d, scale)
}

/// `det Λ_g / W_g` (or `det Λ̄_g / W_g`) of `K_g`.
pub fn flow_determinant(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    g: f64,
    control: &StepControl,
) -> Result<f64> {
    Ok(endpoint_ratio(&basis_at(profile, g, control)?, bc).0)
}

/// `Tr Ω²G_g` for the given boundary condition.
pub fn trace_at(profile: &FrequencyProfile, bc: BoundaryCondition, g: f64) -> Result<f64> {
    let basis = basis_at(profile, g, &StepControl::default())?;
    trace_omega_g(&kernel(&basis, bc)?, profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceIdentity {
    pub g: f64,
    pub trace: f64,
    /// Central difference of `−log(det Λ_g / W_g)` in `g`.
    pub finite_difference: f64,
}

impl TraceIdentity {
    pub fn rel_err(&self) -> f64 {
        (self.trace - self.finite_difference).abs() / self.trace.abs().max(f64::MIN_POSITIVE)
    }
}

/// Compares `Tr Ω²G_g` with `−∂_g log(det Λ_g/W_g)`. The three solves share
/// one step mesh so the difference quotient is not polluted by step selection.
pub fn trace_identity(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    g: f64,
    dg: f64,
) -> Result<TraceIdentity> {
    if !(dg > 0.0 && g - dg >= 0.0 && g + dg <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "finite difference in g needs [g − dg, g + dg] inside [0, 1], got g = {g}, dg = {dg}"
        )));
    }
    let basis = basis_at(profile, g, &StepControl::default())?;
    let trace = trace_omega_g(&kernel(&basis, bc)?, profile)?;
    let mesh = StepControl::Mesh(basis.mesh().to_vec().into());
    let up = flow_determinant(profile, bc, g + dg, &mesh)?;
    let down = flow_determinant(profile, bc, g - dg, &mesh)?;
    if up.signum() != down.signum() {
        return Err(Error::FlowCrossing { g });
    }
    Ok(TraceIdentity {
        g,
        trace,
        finite_difference: -(up.abs().ln() - down.abs().ln()) / (2.0 * dg),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GflowReport {
    pub bc: BoundaryCondition,
    pub omega0: f64,
    /// `(g, Tr Ω²G_g)` at the quadrature nodes.
    pub nodes: Vec<(f64, f64)>,
    /// `∫₀¹ Tr dg` (Dirichlet, antiperiodic) or `∫₀¹ (Tr + 1/g) dg` (periodic).
    pub integral: f64,
    /// Prefactor multiplying `exp(−integral)`.
    pub constant: f64,
    pub ratio: f64,
}

pub fn gflow_ratio(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
    g_steps: usize,
) -> Result<f64> {
    gflow_report(profile, bc, omega0, g_steps).map(|r| r.ratio)
}

/// The flow starts from `K_0 = −∂²`. Its twisted endpoint ratio is `T`
/// (Dirichlet), `4` (antiperiodic) or `0` (periodic, constant zero mode). In
/// the periodic case `det Λ̄_g/W_g ≈ g·T∫Ω²` near `g = 0`, so the integrand is
/// regularized by `1/g` and the prefactor becomes `T∫Ω²`.
pub fn gflow_report(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
    g_steps: usize,
) -> Result<GflowReport> {
    if g_steps == 0 {
        return Err(Error::InvalidArgument("g_steps must be positive".into()));
    }
    let t_len = profile.interval().length();
    let reference = reference_det(bc, t_len, omega0)?;
    let start = match bc {
        BoundaryCondition::Dirichlet => t_len,
        BoundaryCondition::Antiperiodic => 4.0,
        BoundaryCondition::Periodic => {
            let iv = profile.interval();
            let c0 = t_len
                * quadrature::integrate(|t| profile.omega_sq(t), iv.t_a, iv.t_b, Default::default())?;
            if c0 == 0.0 {
                return Err(Error::FlowCrossing { g: 0.0 });
            }
            c0
        }
    };
    let mut nodes = Vec::with_capacity(g_steps);
    let mut integral = 0.0;
    let mut prev = (0.0, start.signum());
    for (g, w) in gauss_legendre(g_steps, 0.0, 1.0) {
        let basis = basis_at(profile, g, &StepControl::default())?;
        let (d, scale) = endpoint_ratio(&basis, bc);
        if d.abs() < CROSSING_TOLERANCE * scale {
            return Err(Error::FlowCrossing { g });
        }
        if d.signum() != prev.1 {
            return Err(Error::FlowCrossing { g: 0.5 * (prev.0 + g) });
        }
        prev = (g, d.signum());
        let k = kernel(&basis, bc).map_err(|e| match e {
            Error::ZeroMode(_) => Error::FlowCrossing { g },
            other => other,
        })?;
        let tr = trace_omega_g(&k, profile)?;
        nodes.push((g, tr));
        integral += w * match bc {
            BoundaryCondition::Periodic => tr + 1.0 / g,
            _ => tr,
        };
    }
    let constant = start / reference;
    Ok(GflowReport {
        bc,
        omega0,
        nodes,
        integral,
        constant,
        ratio: constant * (-integral).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Interval;

    fn constant(w: f64, t: f64) -> FrequencyProfile {
        FrequencyProfile::constant(w, Interval::new(0.0, t).unwrap()).unwrap()
    }

    #[test]
    fn free_flow_is_trivial() {
        let r = gflow_ratio(&constant(0.0, 1.0), BoundaryCondition::Dirichlet, 1.0, 8).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn unit_frequency_all_conditions() {
        let p = constant(1.0, 1.0);
        let d = gflow_ratio(&p, BoundaryCondition::Dirichlet, 1.0, 32).unwrap();
        assert!((d - 1f64.sin()).abs() < 1e-9);
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic] {
            let r = gflow_ratio(&p, bc, 1.0, 32).unwrap();
            assert!((r - 1.0).abs() < 1e-9, "{bc}: {r}");
        }
    }

    #[test]
    fn focal_crossing_is_reported() {
        let err = gflow_ratio(&constant(1.0, 4.0), BoundaryCondition::Dirichlet, 1.0, 32)
            .unwrap_err();
        match err {
            Error::FlowCrossing { g } => assert!((g - 0.6169).abs() < 0.05, "{g}"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn trace_matches_log_derivative() {
        let p = FrequencyProfile::modulated(1.0, 0.2, 3.0, Interval::new(0.0, 2.0).unwrap())
            .unwrap();
        for bc in BoundaryCondition::ALL {
            let id = trace_identity(&p, bc, 0.5, 1e-5).unwrap();
            assert!(id.rel_err() < 1e-6, "{bc}: {id:?}");
        }
    }
}
