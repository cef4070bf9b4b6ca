//! Determinant ratios from the amplitude/phase pair `(p, q)`.
//!
//! With `p̈ + Ω²p = p⁻³` and `ω₀ q̇ p² = 1`, every solution of `ḧ + Ω²h = 0`
//! is `p(t)·sin(ω₀q(t) + c)` up to a factor, so endpoint data of `p` and
//! `q` are enough to write down the determinants.

use crate::determinants::{reference_det, DetResult, Diagnostics, Reference, DEGENERACY};
use crate::green::endpoint_matrix;
use crate::odesolve::{
    solve_ermakov, BasisConvention, ErmakovBc, ErmakovSolution, HomogeneousBasis, Solution,
};
use crate::profiles::FrequencyProfile;
use crate::{BoundaryCondition, Error, Result};

/// `|sin ω₀(q_b − q_a)|` below this is treated as a Dirichlet zero mode.
pub const PHASE_DEGENERACY: f64 = 1e-10;
/// Largest accepted `periodicity_residual / max(p_a, 1)` for the periodic formulas.
pub const PERIODICITY_TOLERANCE: f64 = 1e-6;

fn phase_span(sol: &ErmakovSolution) -> f64 {
    sol.omega0() * (sol.q_b - sol.q_a)
}

/// `p(t)·sin(ω₀(q(t) − q_a) + shift)` and its derivative.
fn phase_solution(sol: &ErmakovSolution, shift: f64, sign: f64, scale: f64) -> Solution {
    let s = sol.clone();
    Solution::new(move |t| {
        let (p, dp) = (s.p(t), s.dp(t));
        let phi = sign * s.omega0() * (s.q(t) - s.q_a) + shift;
        let (sin, cos) = phi.sin_cos();
        (scale * p * sin, scale * (dp * sin + sign * cos / p))
    })
}

/// Basis with `η_a = ξ_b = 0`, `η_b = ξ_a = 1`:
/// `ξ = p·sin ω₀(q_b − q) / (p_a sin ω₀(q_b − q_a))`,
/// `η = p·sin ω₀(q − q_a) / (p_b sin ω₀(q_b − q_a))`.
pub fn basis_from_pq(sol: &ErmakovSolution) -> Result<HomogeneousBasis> {
    let span = phase_span(sol);
    let sin = span.sin();
    if sin.abs() < PHASE_DEGENERACY {
        return Err(Error::ZeroMode(format!(
            "sin(omega0 (q_b - q_a)) = {sin:.3e}, the Dirichlet operator has a zero mode"
        )));
    }
    let eta = phase_solution(sol, 0.0, 1.0, 1.0 / (sol.p_b * sin));
    // sin ω₀(q_b − q) = sin(span − ω₀(q − q_a))
    let xi = phase_solution(sol, span, -1.0, 1.0 / (sol.p_a * sin));
    let mut b = HomogeneousBasis::from_solutions(
        eta,
        xi,
        sol.interval(),
        1.0,
        BasisConvention::ClassicalPath,
    )?;
    (b.eta_a, b.eta_b, b.xi_a, b.xi_b) = (0.0, 1.0, 1.0, 0.0);
    b.wronskian = -1.0 / (sol.p_a * sol.p_b * sin);
    Ok(b)
}

/// `p_a p_b sin ω₀(q_b − q_a) / T`.
pub fn det_ratio_dirichlet_pq(sol: &ErmakovSolution) -> Result<f64> {
    let sin = phase_span(sol).sin();
    if sin.abs() < PHASE_DEGENERACY {
        return Err(Error::ZeroMode(format!(
            "sin(omega0 (q_b - q_a)) = {sin:.3e}, the Dirichlet operator has a zero mode"
        )));
    }
    Ok(sol.p_a * sol.p_b * sin / sol.interval().length())
}

fn twisted_value(sol: &ErmakovSolution, bc: BoundaryCondition) -> Result<f64> {
    let tol = PERIODICITY_TOLERANCE * sol.p_a.max(1.0);
    if !(sol.periodicity_residual <= tol) {
        return Err(Error::NotPeriodic { residual: sol.periodicity_residual });
    }
    let half = 0.5 * phase_span(sol);
    match bc {
        BoundaryCondition::Periodic => Ok(4.0 * half.sin().powi(2)),
        BoundaryCondition::Antiperiodic => Ok(4.0 * half.cos().powi(2)),
        BoundaryCondition::Dirichlet => Err(Error::InvalidArgument(
            "periodic (p, q) ratio needs a periodic or antiperiodic condition".into(),
        )),
    }
}

/// `4 sin²(ω₀q_b/2)` (periodic) or `4 cos²(ω₀q_b/2)` (antiperiodic), over the
/// same expression for `Ω² ≡ reference_omega0²`. `sol` must be periodic.
pub fn det_ratio_periodic_pq(
    sol: &ErmakovSolution,
    bc: BoundaryCondition,
    reference_omega0: f64,
) -> Result<f64> {
    let value = twisted_value(sol, bc)?;
    Ok(value / reference_det(bc, sol.interval().length(), reference_omega0)?)
}

/// Determinant through the `(p, q)` route. Dirichlet uses the initial-value
/// amplitude with natural data, the twisted conditions the periodic one.
/// `omega0` sets the reference (twisted conditions) and the phase scale;
/// non-positive values fall back to 1 for the Dirichlet phase.
pub fn det_pq(profile: &FrequencyProfile, bc: BoundaryCondition, omega0: f64) -> Result<DetResult> {
    let t_len = profile.interval().length();
    let (sol, value, reference) = match bc {
        BoundaryCondition::Dirichlet => {
            let w = if omega0 > 0.0 && omega0.is_finite() { omega0 } else { 1.0 };
            let sol = solve_ermakov(profile, w, ErmakovBc::Natural)?;
            let ratio = det_ratio_dirichlet_pq(&sol)?;
            (sol, ratio * t_len, Reference::Free)
        }
        _ => {
            // the reference check comes first so a bad omega0 is reported as such
            reference_det(bc, t_len, omega0)?;
            let sol = solve_ermakov(profile, omega0, ErmakovBc::Periodic)?;
            let value = twisted_value(&sol, bc)?;
            (sol, value, Reference::Oscillator { omega0 })
        }
    };
    let reference_value = reference_det(bc, t_len, omega0)?;
    // η = p sin φ, ξ = p cos φ has W = −1
    let phase = HomogeneousBasis::from_solutions(
        phase_solution(&sol, 0.0, 1.0, 1.0),
        phase_solution(&sol, 0.5 * std::f64::consts::PI, 1.0, 1.0),
        sol.interval(),
        1.0,
        BasisConvention::Custom,
    )?;
    let lam = endpoint_matrix(&phase, bc);
    let trace = phase.monodromy_trace();
    let max = lam.max_abs();
    let scale = match bc {
        BoundaryCondition::Dirichlet => t_len,
        _ => 2.0 + trace.abs(),
    };
    Ok(DetResult {
        value,
        ratio: value / reference_value,
        reference,
        bc,
        degenerate: value.abs() <= DEGENERACY * scale,
        diagnostics: Diagnostics {
            wronskian: phase.wronskian,
            endpoint_det: lam.det,
            condition: if lam.det == 0.0 { f64::INFINITY } else { max * max / lam.det.abs() },
            monodromy_trace: trace,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinants::determinant;
    use crate::profiles::Interval;

    fn iv(t: f64) -> Interval {
        Interval::new(0.0, t).unwrap()
    }

    #[test]
    fn constant_frequency_basis() {
        let (w, t) = (1.3, 1.7);
        let p = FrequencyProfile::constant(w, iv(t)).unwrap();
        let sol = solve_ermakov(&p, w, ErmakovBc::Natural).unwrap();
        let b = basis_from_pq(&sol).unwrap();
        for s in [0.0, 0.3, 1.1, t] {
            assert!((b.xi.value(s) - (w * (t - s)).sin() / (w * t).sin()).abs() < 1e-8);
            assert!((b.eta.value(s) - (w * s).sin() / (w * t).sin()).abs() < 1e-8);
        }
        assert!((b.wronskian + b.eta.derivative(0.0)).abs() < 1e-8);
        assert!((b.wronskian - b.xi.derivative(t)).abs() < 1e-8);
        let r = det_ratio_dirichlet_pq(&sol).unwrap();
        assert!((r - (w * t).sin() / (w * t)).abs() < 1e-9);
    }

    #[test]
    fn free_pinney_ratio_is_one() {
        let p = FrequencyProfile::constant(0.0, iv(1.0)).unwrap();
        let sol = solve_ermakov(&p, 1.0, ErmakovBc::Initial { p0: 1.0, dp0: 0.0 }).unwrap();
        assert!((det_ratio_dirichlet_pq(&sol).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn periodic_constant_frequency() {
        let (w, w0, t) = (1.4, 0.9, 1.0);
        let p = FrequencyProfile::constant(w, iv(t)).unwrap();
        let sol = solve_ermakov(&p, w0, ErmakovBc::Periodic).unwrap();
        let r = det_ratio_periodic_pq(&sol, BoundaryCondition::Periodic, w0).unwrap();
        let expected = (w * t / 2.0).sin().powi(2) / (w0 * t / 2.0).sin().powi(2);
        assert!((r - expected).abs() < 1e-8);
        let same = det_ratio_periodic_pq(&sol, BoundaryCondition::Antiperiodic, w).unwrap();
        assert!((same - 1.0).abs() < 1e-8);
    }

    #[test]
    fn non_periodic_solution_is_refused() {
        let p = FrequencyProfile::constant(1.0, iv(1.0)).unwrap();
        let sol = solve_ermakov(&p, 1.0, ErmakovBc::Initial { p0: 2.0, dp0: 0.0 }).unwrap();
        assert!(matches!(
            det_ratio_periodic_pq(&sol, BoundaryCondition::Periodic, 1.0),
            Err(Error::NotPeriodic { .. })
        ));
    }

    #[test]
    fn agrees_with_endpoint_route() {
        let p = FrequencyProfile::modulated(1.0, 0.2, 3.0, iv(2.0)).unwrap();
        for bc in BoundaryCondition::ALL {
            let a = det_pq(&p, bc, 1.0).unwrap();
            let b = determinant(&p, bc, 1.0).unwrap();
            assert!((a.ratio - b.ratio).abs() < 1e-6 * b.ratio.abs().max(1.0), "{bc}: {a:?} {b:?}");
            assert!((a.diagnostics.monodromy_trace - b.diagnostics.monodromy_trace).abs() < 1e-6);
        }
    }
}
