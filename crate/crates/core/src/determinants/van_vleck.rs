use crate::odesolve::{solve_homogeneous, Direction, Solution};
use crate::profiles::FrequencyProfile;
use crate::quadrature::{self, Tolerance};
use crate::{Error, Result};

/// Endpoint displacement used for the mixed second difference of the action.
pub const VAN_VLECK_STENCIL: f64 = 1e-3;

const ACTION_TOLERANCE: Tolerance = Tolerance { abs: 1e-20, rel: 1e-13 };

/// `−M (∂²S/∂x_a∂x_b)⁻¹` for `S = (M/2)∫(ẋ² − Ω²x²)dt`.
///
/// Each classical path is found by linear shooting and its action by adaptive
/// quadrature; the mixed derivative is a central difference over `x ∈ {±δ}²`.
/// The result does not depend on `M` because `S` is proportional to it.
pub fn van_vleck_check(profile: &FrequencyProfile, mass: f64) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
    }
    let iv = profile.interval();
    let u1 = solve_homogeneous(profile, 1.0, (1.0, 0.0), Direction::Forward)?;
    let u2 = solve_homogeneous(profile, 1.0, (0.0, 1.0), Direction::Forward)?;
    let (u1_b, u2_b) = (u1.value(iv.t_b), u2.value(iv.t_b));
    let u2_max = iv.grid(257).into_iter().map(|t| u2.value(t).abs()).fold(0.0, f64::max);
    if u2_b.abs() <= 1e-8 * u2_max {
        return Err(Error::DegenerateBasis(
            "classical boundary-value problem is singular (focal point at t_b)".into(),
        ));
    }
    let action = |xa: f64, xb: f64| -> Result<f64> {
        // x = x_a u1 + s u2 with x(t_b) = x_b
        let s = (xb - xa * u1_b) / u2_b;
        let path: Solution = u1.combine(xa, &u2, s);
        let lagrangian = |t: f64| {
            let (x, v) = path.eval(t);
            0.5 * mass * (v * v - profile.omega_sq(t) * x * x)
        };
        quadrature::integrate(lagrangian, iv.t_a, iv.t_b, ACTION_TOLERANCE)
    };
    let d = VAN_VLECK_STENCIL;
    let mixed = (action(d, d)? - action(d, -d)? - action(-d, d)? + action(-d, -d)?) / (4.0 * d * d);
    Ok(-mass / mixed)
}
