//! Operators with a zero mode: ε-regularized Dirichlet determinant and the
//! periodic/antiperiodic counterpart reported next to the lattice oracle.

use serde::Serialize;

use crate::green::endpoint_matrix;
use crate::odesolve::{
    make_basis, solve_homogeneous, BasisConvention, Direction, HomogeneousBasis, Solution,
};
use crate::oracle::pseudo_det_ratio;
use crate::profiles::{FrequencyProfile, SyntheticZeroModeSpec};
use crate::quadrature::{self, Tolerance};
use crate::{BoundaryCondition, Error, Result};

/// `ε = EPS_FACTOR · T · max|ξ̇|` for the finite-ε chain.
pub const EPS_FACTOR: f64 = 1e-4;
/// A numerical zero mode needs `|u(t_b)| ≤ ZERO_MODE_PRESENCE · max|u|`.
pub const ZERO_MODE_PRESENCE: f64 = 1e-6;
/// Agreement required between the Richardson-refined ε quotient and the limit.
pub const CHAIN_TOLERANCE: f64 = 1e-3;

const NORM_TOLERANCE: Tolerance = Tolerance { abs: 1e-14, rel: 1e-13 };

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModeReport {
    /// `⟨ξ|ξ⟩`.
    pub xi_norm_sq: f64,
    pub dxi_a: f64,
    pub dxi_b: f64,
    pub eps: f64,
    /// `−ε ξ̇_a / ⟨ξ|ξ⟩`.
    pub lambda_eps: f64,
    /// Dirichlet determinant of the operator shifted by `λ^ε`.
    pub det_eps: f64,
    /// `⟨ξ|ξ⟩ / (ξ̇_a ξ̇_b)`.
    pub det_regularized: f64,
    /// `2Q(ε/2) − Q(ε)` with `Q = det_eps / λ^ε`.
    pub chain_quotient: f64,
    pub chain_rel_err: f64,
    pub chain_consistent: bool,
}

fn max_abs_derivative(xi: &dyn Fn(f64) -> f64, t_a: f64, t_b: f64) -> f64 {
    (0..=1024)
        .map(|k| xi(t_a + (t_b - t_a) * k as f64 / 1024.0).abs())
        .fold(0.0, f64::max)
}

/// Dirichlet determinant of `K₁ − λ` (profile `Ω² + λ`), from a basis of the
/// shifted operator: `ξ^ε` from `t_b` with slope `ξ̇_b`, `η^ε` from `t_a`.
fn shifted_det(profile: &FrequencyProfile, lambda: f64, dxi_b: f64) -> Result<f64> {
    let shifted = profile.shifted(lambda);
    let eta = solve_homogeneous(&shifted, 1.0, (0.0, 1.0), Direction::Forward)?;
    let xi = solve_homogeneous(&shifted, 1.0, (0.0, dxi_b), Direction::Backward)?;
    let basis = HomogeneousBasis::from_solutions(
        eta,
        xi,
        profile.interval(),
        1.0,
        BasisConvention::Custom,
    )?;
    Ok(endpoint_matrix(&basis, BoundaryCondition::Dirichlet).det / basis.wronskian)
}

fn regularize(
    profile: &FrequencyProfile,
    xi_norm_sq: f64,
    dxi_a: f64,
    dxi_b: f64,
    dxi_max: f64,
) -> Result<ZeroModeReport> {
    let t_len = profile.interval().length();
    let slope_floor = 1e-8 * dxi_max;
    if dxi_a.abs() <= slope_floor || dxi_b.abs() <= slope_floor {
        return Err(Error::InvalidZeroMode(format!(
            "zero mode needs nonzero endpoint slopes, got {dxi_a:e} and {dxi_b:e}"
        )));
    }
    let det_regularized = xi_norm_sq / (dxi_a * dxi_b);
    let eps = EPS_FACTOR * t_len * dxi_max;
    let quotient = |eps: f64| -> Result<(f64, f64, f64)> {
        let lambda = -eps * dxi_a / xi_norm_sq;
        let det = shifted_det(profile, lambda, dxi_b)?;
        Ok((lambda, det, det / lambda))
    };
    let (lambda_eps, det_eps, q1) = quotient(eps)?;
    let (_, _, q2) = quotient(0.5 * eps)?;
    let chain_quotient = 2.0 * q2 - q1;
    let chain_rel_err = (chain_quotient - det_regularized).abs() / det_regularized.abs();
    Ok(ZeroModeReport {
        xi_norm_sq,
        dxi_a,
        dxi_b,
        eps,
        lambda_eps,
        det_eps,
        det_regularized,
        chain_quotient,
        chain_rel_err,
        chain_consistent: chain_rel_err <= CHAIN_TOLERANCE,
    })
}

/// Regularized Dirichlet determinant for a profile built from a prescribed zero mode.
pub fn det_dirichlet_regularized_spec(spec: &SyntheticZeroModeSpec) -> Result<ZeroModeReport> {
    let profile = FrequencyProfile::zero_mode(spec)?;
    let iv = spec.interval();
    let norm = quadrature::integrate(|t| spec.xi(t).powi(2), iv.t_a, iv.t_b, NORM_TOLERANCE)?;
    let dmax = max_abs_derivative(&|t| spec.jet(t).d1, iv.t_a, iv.t_b);
    regularize(&profile, norm, spec.jet(iv.t_a).d1, spec.jet(iv.t_b).d1, dmax)
}

/// Regularized Dirichlet determinant, with the zero mode found numerically
/// (the solution with `ξ(t_a) = 0`, `ξ̇(t_a) = 1`).
pub fn det_dirichlet_regularized(profile: &FrequencyProfile) -> Result<ZeroModeReport> {
    let iv = profile.interval();
    let u = solve_homogeneous(profile, 1.0, (0.0, 1.0), Direction::Forward)?;
    let u_max = iv.grid(1025).into_iter().map(|t| u.value(t).abs()).fold(0.0, f64::max);
    let (u_b, du_b) = u.eval(iv.t_b);
    if u_b.abs() > ZERO_MODE_PRESENCE * u_max {
        return Err(Error::InvalidZeroMode(format!(
            "profile has no Dirichlet zero mode (|u(t_b)|/max|u| = {:.3e})",
            u_b.abs() / u_max
        )));
    }
    let norm = quadrature::integrate(|t| u.value(t).powi(2), iv.t_a, iv.t_b, NORM_TOLERANCE)?;
    let dmax = max_abs_derivative(&|t| u.derivative(t), iv.t_a, iv.t_b);
    regularize(profile, norm, 1.0, du_b, dmax)
}

/// Basis whose `ξ` is the periodic (antiperiodic) zero mode, with unit
/// initial-data norm, and whose `η` starts from that data rotated by 45°.
pub fn periodic_zero_mode_basis(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
) -> Result<HomogeneousBasis> {
    let s = bc.twist().ok_or_else(|| {
        Error::InvalidArgument("periodic zero modes need a periodic or antiperiodic condition".into())
    })?;
    let canonical = make_basis(profile, 1.0, BasisConvention::Canonical)?;
    let m = canonical.monodromy();
    let tr = m[0][0] + m[1][1];
    if (2.0 - s * tr).abs() > ZERO_MODE_PRESENCE * (2.0 + tr.abs()) {
        return Err(Error::InvalidZeroMode(format!(
            "{bc} operator has no zero mode (det(M ∓ 1) = {:.3e})",
            2.0 - s * tr
        )));
    }
    let a = [[m[0][0] - s, m[0][1]], [m[1][0], m[1][1] - s]];
    let row = if a[0][0].hypot(a[0][1]) >= a[1][0].hypot(a[1][1]) { a[0] } else { a[1] };
    let len = row[0].hypot(row[1]);
    let (v0, v1) = if len == 0.0 { (1.0, 0.0) } else { (-row[1] / len, row[0] / len) };
    // canonical basis: ξ_c has data (1,0), η_c has data (0,1)
    canonical.mixed([[v1 + v0, v0 - v1], [v1, v0]])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicZeroModeReport {
    pub bc: BoundaryCondition,
    pub xi_norm_sq: f64,
    pub xi_a: f64,
    pub xi_b: f64,
    pub dxi_a: f64,
    pub eta_a: f64,
    pub deta_a: f64,
    /// `(ξ_b ∓ ξ_a)⟨ξ|ξ⟩ / [η_a(η_a ξ̇_a − η̇_a ξ_b)]`, evaluated as written.
    pub formula: f64,
    /// Convention-aligned lattice pseudo-determinant, when the lattice has one zero mode.
    pub oracle: Option<f64>,
    pub oracle_error: Option<String>,
    /// `|formula − oracle| / |oracle|`.
    pub discrepancy: Option<f64>,
}

pub fn det_periodic_regularized(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
    lattice_n: usize,
) -> Result<PeriodicZeroModeReport> {
    let b = periodic_zero_mode_basis(profile, bc)?;
    let s = bc.twist().expect("checked by periodic_zero_mode_basis");
    let iv = profile.interval();
    let xi: &Solution = &b.xi;
    let norm = quadrature::integrate(|t| xi.value(t).powi(2), iv.t_a, iv.t_b, NORM_TOLERANCE)?;
    let inner = b.eta_a * b.dxi_a - b.deta_a * b.xi_b;
    let den = b.eta_a * inner;
    let scale = b.eta_a.abs() * ((b.eta_a * b.dxi_a).abs() + (b.deta_a * b.xi_b).abs());
    if !(den.abs() > 1e-12 * scale) {
        return Err(Error::DegenerateBasis(
            "regularized periodic formula has a vanishing denominator".into(),
        ));
    }
    let formula = (b.xi_b - s * b.xi_a) * norm / den;
    let (oracle, oracle_error) = match pseudo_det_ratio(profile, bc, omega0, lattice_n) {
        Ok(r) => (Some(r.aligned), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(PeriodicZeroModeReport {
        bc,
        xi_norm_sq: norm,
        xi_a: b.xi_a,
        xi_b: b.xi_b,
        dxi_a: b.dxi_a,
        eta_a: b.eta_a,
        deta_a: b.deta_a,
        formula,
        discrepancy: oracle.map(|o| (formula - o).abs() / o.abs()),
        oracle,
        oracle_error,
    })
}
