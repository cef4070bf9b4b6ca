//! Green functions of `K_g = −∂²ₜ − gΩ²(t)` built from a homogeneous basis.

use crate::odesolve::HomogeneousBasis;
use crate::profiles::FrequencyProfile;
use crate::quadrature::{self, Tolerance};
use crate::{BoundaryCondition, Error, Result};

/// Relative threshold on `f(t_a,t_b)` and `Δ` below which a kernel is refused.
pub const KERNEL_DEGENERACY: f64 = 1e-10;

/// Quadrature tolerance for diagonal traces.
pub const TRACE_TOLERANCE: Tolerance = Tolerance { abs: 1e-11, rel: 1e-12 };

fn check_wronskian(basis: &HomogeneousBasis) -> Result<()> {
    let t = basis.length();
    let scale = basis.eta_a.abs().max(basis.deta_a.abs() * t)
        * basis.xi_a.abs().max(basis.dxi_a.abs() * t)
        / t;
    if !(basis.wronskian.abs() >= 1e-12 * scale) || !basis.wronskian.is_finite() {
        return Err(Error::DegenerateBasis(format!(
            "Wronskian {:e} is degenerate",
            basis.wronskian
        )));
    }
    Ok(())
}

/// `f(t,t′) = [η(t)ξ(t′) − ξ(t)η(t′)] / W`.
pub fn f_function(basis: &HomogeneousBasis, t: f64, t2: f64) -> Result<f64> {
    check_wronskian(basis)?;
    if t == t2 {
        return Ok(0.0);
    }
    let (e1, x1) = (basis.eta.value(t), basis.xi.value(t));
    let (e2, x2) = (basis.eta.value(t2), basis.xi.value(t2));
    Ok((e1 * x2 - x1 * e2) / basis.wronskian)
}

/// Retarded kernel `Θ(t − t′) f(t, t′)`.
pub fn retarded(basis: &HomogeneousBasis, t: f64, t2: f64) -> Result<f64> {
    if t > t2 {
        f_function(basis, t, t2)
    } else {
        check_wronskian(basis).map(|_| 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointMatrix {
    pub entries: [[f64; 2]; 2],
    pub bc: BoundaryCondition,
    pub det: f64,
}

impl EndpointMatrix {
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

/// `Λ` (Dirichlet) or `Λ̄` (periodic / antiperiodic) from the endpoint data.
pub fn endpoint_matrix(basis: &HomogeneousBasis, bc: BoundaryCondition) -> EndpointMatrix {
    let b = basis;
    let entries = match bc.twist() {
        None => [[b.eta_a, b.xi_a], [b.eta_b, b.xi_b]],
        Some(s) => [
            [b.eta_b - s * b.eta_a, b.xi_b - s * b.xi_a],
            [b.deta_b - s * b.deta_a, b.dxi_b - s * b.dxi_a],
        ],
    };
    let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
    EndpointMatrix { entries, bc, det }
}

#[derive(Debug, Clone)]
pub struct GreenKernel {
    basis: HomogeneousBasis,
    bc: BoundaryCondition,
    /// `f(t_a, t_b)`.
    f_ab: f64,
    /// `Δ = det Λ̄ / W`; `None` for Dirichlet.
    delta: Option<f64>,
}

#[derive(Clone, Copy)]
struct Point {
    phi: f64,
    dphi: f64,
    psi: f64,
    dpsi: f64,
}

impl GreenKernel {
    pub fn basis(&self) -> &HomogeneousBasis {
        &self.basis
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// `f(t_a,t_b)` for Dirichlet, `Δ` otherwise.
    pub fn denom(&self) -> f64 {
        self.delta.unwrap_or(self.f_ab)
    }

    pub fn f_ab(&self) -> f64 {
        self.f_ab
    }

    // φ(t) = f(t, t_a), ψ(t) = f(t_b, t) and their t-derivatives
    fn point(&self, t: f64) -> Point {
        let b = &self.basis;
        let w = b.wronskian;
        let (e, de) = b.eta.eval(t);
        let (x, dx) = b.xi.eval(t);
        Point {
            phi: (e * b.xi_a - x * b.eta_a) / w,
            dphi: (de * b.xi_a - dx * b.eta_a) / w,
            psi: (b.eta_b * x - b.xi_b * e) / w,
            dpsi: (b.eta_b * dx - b.xi_b * de) / w,
        }
    }

    fn dirichlet_part(&self, p: &Point, q: &Point, t: f64, t2: f64) -> f64 {
        // Θ(0) = 1/2
        let later = q.phi * p.psi;
        let earlier = p.phi * q.psi;
        let v = if t > t2 {
            later
        } else if t < t2 {
            earlier
        } else {
            0.5 * (later + earlier)
        };
        v / self.f_ab
    }

    fn twist_part(&self, p: &Point, q: &Point) -> f64 {
        match (self.bc.twist(), self.delta) {
            (Some(s), Some(d)) => -s * (p.phi + s * p.psi) * (q.phi + s * q.psi) / (d * self.f_ab),
            _ => 0.0,
        }
    }

    pub fn evaluate(&self, t: f64, t2: f64) -> f64 {
        let p = self.point(t);
        let q = if t == t2 { p } else { self.point(t2) };
        self.dirichlet_part(&p, &q, t, t2) + self.twist_part(&p, &q)
    }

    pub fn diagonal(&self, t: f64) -> f64 {
        self.evaluate(t, t)
    }

    /// `∂ₜG(t,t′)`; on the diagonal the mean of both one-sided limits.
    pub fn evaluate_dt(&self, t: f64, t2: f64) -> f64 {
        let p = self.point(t);
        let q = self.point(t2);
        let later = q.phi * p.dpsi;
        let earlier = p.dphi * q.psi;
        let d = if t > t2 {
            later
        } else if t < t2 {
            earlier
        } else {
            0.5 * (later + earlier)
        } / self.f_ab;
        let twist = match (self.bc.twist(), self.delta) {
            (Some(s), Some(dl)) => {
                -s * (p.dphi + s * p.dpsi) * (q.phi + s * q.psi) / (dl * self.f_ab)
            }
            _ => 0.0,
        };
        d + twist
    }

    /// `∂ₜG(t′+0, t′) − ∂ₜG(t′−0, t′)`; equals −1 for a correctly normalized kernel.
    pub fn derivative_jump(&self, t2: f64) -> f64 {
        let p = self.point(t2);
        (p.phi * p.dpsi - p.dphi * p.psi) / self.f_ab
    }
}

fn dirichlet_denominator(basis: &HomogeneousBasis) -> Result<f64> {
    check_wronskian(basis)?;
    let lam = endpoint_matrix(basis, BoundaryCondition::Dirichlet);
    let f_ab = lam.det / basis.wronskian;
    if !(f_ab.abs() > KERNEL_DEGENERACY * lam.max_abs() / basis.wronskian.abs()) {
        return Err(Error::ZeroMode(format!(
            "f(t_a, t_b) = {f_ab:e} vanishes: the Dirichlet problem at g = {} has a zero mode",
            basis.g
        )));
    }
    Ok(f_ab)
}

/// Dirichlet kernel, vanishing at `t_a` and `t_b`.
pub fn dirichlet_kernel(basis: &HomogeneousBasis) -> Result<GreenKernel> {
    let f_ab = dirichlet_denominator(basis)?;
    Ok(GreenKernel {
        basis: basis.clone(),
        bc: BoundaryCondition::Dirichlet,
        f_ab,
        delta: None,
    })
}

/// Periodic or antiperiodic kernel: the Dirichlet kernel plus a rank-one
/// correction restoring `G(t_b,·) = ±G(t_a,·)` and the same for `∂ₜG`.
pub fn periodic_kernel(basis: &HomogeneousBasis, bc: BoundaryCondition) -> Result<GreenKernel> {
    if bc.twist().is_none() {
        return Err(Error::InvalidArgument(
            "periodic_kernel needs a periodic or antiperiodic boundary condition".into(),
        ));
    }
    let f_ab = dirichlet_denominator(basis)?;
    let lam = endpoint_matrix(basis, bc);
    let delta = lam.det / basis.wronskian;
    if !(delta.abs() > KERNEL_DEGENERACY * lam.max_abs() / basis.wronskian.abs()) {
        return Err(Error::ZeroMode(format!(
            "{bc} operator at g = {} has a zero mode (Delta = {delta:e})",
            basis.g
        )));
    }
    Ok(GreenKernel {
        basis: basis.clone(),
        bc,
        f_ab,
        delta: Some(delta),
    })
}

/// Kernel for any boundary condition.
pub fn kernel(basis: &HomogeneousBasis, bc: BoundaryCondition) -> Result<GreenKernel> {
    match bc {
        BoundaryCondition::Dirichlet => dirichlet_kernel(basis),
        _ => periodic_kernel(basis, bc),
    }
}

/// `∫ Ω²(t) G(t,t) dt` by adaptive quadrature.
pub fn trace_omega_g(kernel: &GreenKernel, profile: &FrequencyProfile) -> Result<f64> {
    let iv = kernel.basis.interval;
    quadrature::integrate(
        |t| profile.omega_sq(t) * kernel.diagonal(t),
        iv.t_a,
        iv.t_b,
        TRACE_TOLERANCE,
    )
}

/// Dirichlet trace written directly as `∫ Ω² f(t,t_a) f(t_b,t) dt / f(t_a,t_b)`.
pub fn trace_dirichlet_closed_form(
    basis: &HomogeneousBasis,
    profile: &FrequencyProfile,
) -> Result<f64> {
    let f_ab = dirichlet_denominator(basis)?;
    let iv = basis.interval;
    let w = basis.wronskian;
    let integral = quadrature::integrate(
        |t| {
            let (e, x) = (basis.eta.value(t), basis.xi.value(t));
            let phi = (e * basis.xi_a - x * basis.eta_a) / w;
            let psi = (basis.eta_b * x - basis.xi_b * e) / w;
            profile.omega_sq(t) * phi * psi
        },
        iv.t_a,
        iv.t_b,
        TRACE_TOLERANCE,
    )?;
    Ok(integral / f_ab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odesolve::{make_basis, BasisConvention};
    use crate::profiles::Interval;

    fn basis(omega: f64, t: f64, c: BasisConvention) -> (FrequencyProfile, HomogeneousBasis) {
        let p = FrequencyProfile::constant(omega, Interval::new(0.0, t).unwrap()).unwrap();
        let b = make_basis(&p, 1.0, c).unwrap();
        (p, b)
    }

    #[test]
    fn f_is_antisymmetric_and_basis_free() {
        let (_, b) = basis(1.0, 2.0, BasisConvention::Canonical);
        let (_, c) = basis(1.0, 2.0, BasisConvention::ClassicalPath);
        assert_eq!(f_function(&b, 0.4, 0.4).unwrap(), 0.0);
        let v = f_function(&b, 1.3, 0.2).unwrap();
        assert!((v + f_function(&b, 0.2, 1.3).unwrap()).abs() < 1e-15);
        // f(t,t') = sin(t' − t) for unit frequency
        assert!((v - (0.2f64 - 1.3).sin()).abs() < 1e-10);
        assert!((f_function(&c, 1.3, 0.2).unwrap() - v).abs() < 1e-9);
    }

    #[test]
    fn free_endpoint_matrices() {
        let (_, b) = basis(0.0, 3.0, BasisConvention::Canonical);
        let d = endpoint_matrix(&b, BoundaryCondition::Dirichlet);
        let close = |m: [[f64; 2]; 2], e: [[f64; 2]; 2]| {
            m.iter().flatten().zip(e.iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-13)
        };
        assert!(close(d.entries, [[0.0, 1.0], [3.0, 1.0]]));
        assert!((d.det + 3.0).abs() < 1e-13);
        let p = endpoint_matrix(&b, BoundaryCondition::Periodic);
        assert!(close(p.entries, [[3.0, 0.0], [0.0, 0.0]]));
        assert!(p.det.abs() < 1e-13);
    }

    #[test]
    fn free_dirichlet_kernel() {
        let (_, b) = basis(0.0, 1.0, BasisConvention::Canonical);
        let g = dirichlet_kernel(&b).unwrap();
        assert!((g.evaluate(0.25, 0.5) - 0.125).abs() < 1e-14);
        assert_eq!(g.evaluate(0.0, 0.7), 0.0);
        assert!((g.derivative_jump(0.3) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_frequency_dirichlet_kernel() {
        let (_, b) = basis(1.0, std::f64::consts::FRAC_PI_2, BasisConvention::Canonical);
        let g = dirichlet_kernel(&b).unwrap();
        let (t1, t2) = (std::f64::consts::PI / 6.0, std::f64::consts::PI / 3.0);
        assert!((g.evaluate(t1, t2) - 0.25).abs() < 1e-9);
    }

    #[test]
    fn periodic_diagonal_of_constant_frequency() {
        let (_, b) = basis(1.0, 1.0, BasisConvention::Canonical);
        let g = periodic_kernel(&b, BoundaryCondition::Periodic).unwrap();
        let expect = -(0.5f64).cos() / (2.0 * 0.5f64.sin());
        for t in [0.0, 0.3, 0.77, 1.0] {
            assert!((g.diagonal(t) - expect).abs() < 1e-9, "{}", g.diagonal(t));
        }
    }

    #[test]
    fn twisted_boundary_conditions_hold() {
        let p = FrequencyProfile::modulated(1.0, 0.2, 3.0, Interval::new(0.0, 2.0).unwrap())
            .unwrap();
        let b = make_basis(&p, 1.0, BasisConvention::Canonical).unwrap();
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic] {
            let s = bc.twist().unwrap();
            let g = periodic_kernel(&b, bc).unwrap();
            for t2 in [0.1, 0.9, 1.7] {
                assert!((g.evaluate(2.0, t2) - s * g.evaluate(0.0, t2)).abs() < 1e-9);
                assert!((g.evaluate_dt(2.0, t2) - s * g.evaluate_dt(0.0, t2)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn free_periodic_kernel_is_degenerate() {
        let (_, b) = basis(0.0, 1.0, BasisConvention::Canonical);
        assert!(matches!(
            periodic_kernel(&b, BoundaryCondition::Periodic),
            Err(Error::ZeroMode(_))
        ));
    }

    #[test]
    fn free_trace_with_unit_weight() {
        // K_0 kernel weighted by Ω² ≡ 1 gives ∫ t(1 − t) dt
        let iv = Interval::new(0.0, 1.0).unwrap();
        let unit = FrequencyProfile::constant(1.0, iv).unwrap();
        let b = make_basis(&unit, 0.0, BasisConvention::Canonical).unwrap();
        let k = dirichlet_kernel(&b).unwrap();
        assert!((trace_omega_g(&k, &unit).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((trace_dirichlet_closed_form(&b, &unit).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }
}
