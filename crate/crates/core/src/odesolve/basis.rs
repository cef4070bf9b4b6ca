use std::sync::Arc;

use super::{check_coupling, integrate, linear_accel, Solution, StepControl};
use crate::profiles::{FrequencyProfile, Interval};
use crate::{Error, Result};

/// Relative size of `u(t_b)` below which the classical-path basis is refused.
pub const CLASSICAL_DEGENERACY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisConvention {
    /// `η_a = ξ_b = 0`, `η_b = ξ_a = 1`.
    ClassicalPath,
    /// `ξ(t_a) = 1, ξ̇(t_a) = 0, η(t_a) = 0, η̇(t_a) = 1`.
    Canonical,
    /// Anything else (mixed bases, bases built from other data).
    Custom,
}

/// Two independent solutions of `ḧ + gΩ²h = 0` with their endpoint data.
#[derive(Debug, Clone)]
pub struct HomogeneousBasis {
    pub eta: Solution,
    pub xi: Solution,
    pub eta_a: f64,
    pub eta_b: f64,
    pub xi_a: f64,
    pub xi_b: f64,
    pub deta_a: f64,
    pub deta_b: f64,
    pub dxi_a: f64,
    pub dxi_b: f64,
    /// `η ξ̇ − η̇ ξ`, evaluated at `t_a`.
    pub wronskian: f64,
    pub g: f64,
    pub interval: Interval,
    pub convention: BasisConvention,
}

impl HomogeneousBasis {
    /// Builds a basis from two solutions, reading off endpoint data.
    pub fn from_solutions(
        eta: Solution,
        xi: Solution,
        interval: Interval,
        g: f64,
        convention: BasisConvention,
    ) -> Result<Self> {
        let (eta_a, deta_a) = eta.eval(interval.t_a);
        let (eta_b, deta_b) = eta.eval(interval.t_b);
        let (xi_a, dxi_a) = xi.eval(interval.t_a);
        let (xi_b, dxi_b) = xi.eval(interval.t_b);
        let wronskian = eta_a * dxi_a - deta_a * xi_a;
        let scale = (eta_a.abs() + deta_a.abs()) * (xi_a.abs() + dxi_a.abs());
        if !(wronskian.abs() > 1e-12 * scale) {
            return Err(Error::DegenerateBasis(format!(
                "solutions are linearly dependent (W = {wronskian:e})"
            )));
        }
        Ok(HomogeneousBasis {
            eta,
            xi,
            eta_a,
            eta_b,
            xi_a,
            xi_b,
            deta_a,
            deta_b,
            dxi_a,
            dxi_b,
            wronskian,
            g,
            interval,
            convention,
        })
    }

    /// New basis `η' = m₀₀η + m₀₁ξ`, `ξ' = m₁₀η + m₁₁ξ`.
    pub fn mixed(&self, m: [[f64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            return Err(Error::InvalidArgument("mixing matrix is singular".into()));
        }
        let mix = |p: f64, q: f64, row: [f64; 2]| row[0] * p + row[1] * q;
        Ok(HomogeneousBasis {
            eta: self.eta.combine(m[0][0], &self.xi, m[0][1]),
            xi: self.eta.combine(m[1][0], &self.xi, m[1][1]),
            eta_a: mix(self.eta_a, self.xi_a, m[0]),
            eta_b: mix(self.eta_b, self.xi_b, m[0]),
            xi_a: mix(self.eta_a, self.xi_a, m[1]),
            xi_b: mix(self.eta_b, self.xi_b, m[1]),
            deta_a: mix(self.deta_a, self.dxi_a, m[0]),
            deta_b: mix(self.deta_b, self.dxi_b, m[0]),
            dxi_a: mix(self.deta_a, self.dxi_a, m[1]),
            dxi_b: mix(self.deta_b, self.dxi_b, m[1]),
            wronskian: det * self.wronskian,
            g: self.g,
            interval: self.interval,
            convention: BasisConvention::Custom,
        })
    }

    pub fn length(&self) -> f64 {
        self.interval.length()
    }

    /// Wronskian evaluated at `t`.
    pub fn wronskian_at(&self, t: f64) -> f64 {
        let (e, de) = self.eta.eval(t);
        let (x, dx) = self.xi.eval(t);
        e * dx - de * x
    }

    /// `max |W(t) − W| / |W|` over `n` uniform points.
    pub fn wronskian_drift(&self, n: usize) -> f64 {
        self.interval
            .grid(n.max(2))
            .into_iter()
            .map(|t| (self.wronskian_at(t) - self.wronskian).abs())
            .fold(0.0, f64::max)
            / self.wronskian.abs()
    }

    /// Trace of the monodromy (transfer) matrix over one interval; basis independent.
    pub fn monodromy_trace(&self) -> f64 {
        (self.eta_b * self.dxi_a - self.xi_b * self.deta_a - self.deta_b * self.xi_a
            + self.dxi_b * self.eta_a)
            / self.wronskian
    }

    /// Transfer matrix `[[y_b],[ẏ_b]] = M [[y_a],[ẏ_a]]`.
    pub fn monodromy(&self) -> [[f64; 2]; 2] {
        // y = c_η η + c_ξ ξ, coefficients fixed by the data (1,0) and (0,1) at t_a
        let w = self.wronskian;
        let c1 = (self.dxi_a / w, -self.deta_a / w);
        let c2 = (-self.xi_a / w, self.eta_a / w);
        [
            [
                c1.0 * self.eta_b + c1.1 * self.xi_b,
                c2.0 * self.eta_b + c2.1 * self.xi_b,
            ],
            [
                c1.0 * self.deta_b + c1.1 * self.dxi_b,
                c2.0 * self.deta_b + c2.1 * self.dxi_b,
            ],
        ]
    }

    /// Forward integration mesh of the underlying solve, if any.
    pub fn mesh(&self) -> &[f64] {
        self.eta.mesh()
    }
}

/// Builds a basis with the default adaptive tolerances.
pub fn make_basis(
    profile: &FrequencyProfile,
    g: f64,
    convention: BasisConvention,
) -> Result<HomogeneousBasis> {
    make_basis_with(profile, g, convention, &StepControl::default())
}

/// Builds a basis. A [`StepControl::Mesh`] is replayed for the forward solve
/// (and reversed for the backward solve of the classical-path convention).
pub fn make_basis_with(
    profile: &FrequencyProfile,
    g: f64,
    convention: BasisConvention,
    control: &StepControl,
) -> Result<HomogeneousBasis> {
    check_coupling(g)?;
    let iv = profile.interval();
    match convention {
        BasisConvention::Canonical | BasisConvention::Custom => {
            let accel = |t: f64, x: &[f64; 2], _: &[f64; 2]| {
                let w = -g * profile.omega_sq(t);
                [w * x[0], w * x[1]]
            };
            let (tr, mesh) = integrate(accel, iv.t_a, [1.0, 0.0], [0.0, 1.0], iv.t_b, control)?;
            let tr = Arc::new(tr);
            let xi = Solution::from_component(tr.clone(), 0, mesh.clone());
            let eta = Solution::from_component(tr, 1, mesh);
            HomogeneousBasis::from_solutions(eta, xi, iv, g, BasisConvention::Canonical)
        }
        BasisConvention::ClassicalPath => {
            let (fwd, u_mesh) =
                integrate(linear_accel(profile, g), iv.t_a, [0.0], [1.0], iv.t_b, control)?;
            let back_control = match control {
                StepControl::Mesh(m) => {
                    let mut r = m.to_vec();
                    r.reverse();
                    StepControl::Mesh(r.into())
                }
                c => c.clone(),
            };
            let (bwd, v_mesh) = integrate(
                linear_accel(profile, g),
                iv.t_b,
                [0.0],
                [-1.0],
                iv.t_a,
                &back_control,
            )?;
            let u_b = fwd.eval(iv.t_b).0[0];
            let v_a = bwd.eval(iv.t_a).0[0];
            let u_max = (0..fwd.len())
                .map(|i| fwd.node(i).0[0].abs())
                .fold(0.0, f64::max);
            if u_b.abs() <= CLASSICAL_DEGENERACY * u_max {
                return Err(Error::DegenerateBasis(format!(
                    "degenerate endpoint matrix at g = {g}: a Dirichlet zero mode is present, \
                     use the zero-mode operations instead"
                )));
            }
            let eta = Solution::from_component(Arc::new(fwd), 0, u_mesh).scaled(1.0 / u_b);
            let xi = Solution::from_component(Arc::new(bwd), 0, v_mesh).scaled(1.0 / v_a);
            let mut b =
                HomogeneousBasis::from_solutions(eta, xi, iv, g, BasisConvention::ClassicalPath)?;
            // exact endpoint data by construction
            b.eta_a = 0.0;
            b.eta_b = 1.0;
            b.xi_a = 1.0;
            b.xi_b = 0.0;
            b.wronskian = -b.deta_a;
            Ok(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(t: f64) -> Interval {
        Interval::new(0.0, t).unwrap()
    }

    #[test]
    fn free_canonical_basis() {
        let p = FrequencyProfile::constant(0.0, iv(2.0)).unwrap();
        let b = make_basis(&p, 1.0, BasisConvention::Canonical).unwrap();
        assert_eq!(b.eta_b, 2.0);
        assert_eq!(b.xi_b, 1.0);
        // η ξ̇ − η̇ ξ = t·0 − 1·1
        assert_eq!(b.wronskian, -1.0);
    }

    #[test]
    fn classical_path_matches_sines() {
        let (w, t) = (1.3, 1.7);
        let p = FrequencyProfile::constant(w, iv(t)).unwrap();
        let b = make_basis(&p, 1.0, BasisConvention::ClassicalPath).unwrap();
        for s in [0.2, 0.9, 1.5] {
            let eta = (w * s).sin() / (w * t).sin();
            let xi = (w * (t - s)).sin() / (w * t).sin();
            assert!((b.eta.value(s) - eta).abs() < 1e-9);
            assert!((b.xi.value(s) - xi).abs() < 1e-9);
        }
        assert!((b.wronskian - (-w / (w * t).sin())).abs() < 1e-9);
        assert!((b.wronskian - b.dxi_b).abs() < 1e-8);
    }

    #[test]
    fn classical_path_refuses_zero_mode() {
        let p = FrequencyProfile::constant(std::f64::consts::PI, iv(1.0)).unwrap();
        let err = make_basis(&p, 1.0, BasisConvention::ClassicalPath).unwrap_err();
        assert!(err.to_string().contains("degenerate endpoint matrix"));
    }

    #[test]
    fn wronskian_is_constant() {
        let p = FrequencyProfile::modulated(1.0, 0.2, 3.0, iv(2.0)).unwrap();
        for c in [BasisConvention::Canonical, BasisConvention::ClassicalPath] {
            let b = make_basis(&p, 0.8, c).unwrap();
            assert!(b.wronskian_drift(200) < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn monodromy_of_constant_frequency() {
        let (w, t) = (1.0, 1.0);
        let p = FrequencyProfile::constant(w, iv(t)).unwrap();
        let b = make_basis(&p, 1.0, BasisConvention::ClassicalPath).unwrap();
        let m = b.monodromy();
        assert!((m[0][0] - t.cos()).abs() < 1e-9);
        assert!((m[0][1] - t.sin()).abs() < 1e-9);
        assert!((m[1][0] + t.sin()).abs() < 1e-9);
        assert!((b.monodromy_trace() - 2.0 * t.cos()).abs() < 1e-9);
    }

    #[test]
    fn mixing_scales_wronskian() {
        let p = FrequencyProfile::modulated(1.0, 0.2, 3.0, iv(2.0)).unwrap();
        let b = make_basis(&p, 1.0, BasisConvention::Canonical).unwrap();
        let m = b.mixed([[2.0, 1.0], [0.5, 3.0]]).unwrap();
        assert!((m.wronskian - 5.5 * b.wronskian).abs() < 1e-12);
        assert!(m.wronskian_drift(50) < 1e-9);
        assert!(b.mixed([[1.0, 2.0], [2.0, 4.0]]).is_err());
    }
}
