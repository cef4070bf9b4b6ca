//! Ermakov–Pinney amplitude `p̈ + Ω²p = p⁻³` with phase `ω₀ q̇ p² = 1`.

use std::sync::Arc;

use super::{integrate, make_basis_with, BasisConvention, StepControl, Trajectory};
use crate::profiles::{FrequencyProfile, Interval};
use crate::{Error, Result};

const SHOOTING_MAX_ITER: usize = 100;
const SHOOTING_TOL: f64 = 1e-8;
const SHOOTING_FD_STEP: f64 = 1e-6;

/// Boundary data for [`solve_ermakov`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErmakovBc {
    Initial { p0: f64, dp0: f64 },
    /// `p(t_a) = Ω(t_a)^{-1/2}` (or 1 when `Ω²(t_a) ≤ 0`), `ṗ(t_a) = 0`.
    Natural,
    /// `(p, ṗ)` equal at both ends.
    Periodic,
}

#[derive(Debug, Clone)]
pub struct ErmakovSolution {
    traj: Arc<Trajectory<2>>,
    omega0: f64,
    interval: Interval,
    pub p_a: f64,
    pub p_b: f64,
    pub dp_a: f64,
    pub dp_b: f64,
    pub q_a: f64,
    pub q_b: f64,
    /// `max(|p_b − p_a|, |ṗ_b − ṗ_a|)`.
    pub periodicity_residual: f64,
    /// `max_s |p(t_a + s) − p(t_b − s)|`, reported for periodic solutions only.
    pub evenness_residual: Option<f64>,
    pub shooting_iterations: usize,
}

impl ErmakovSolution {
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn p(&self, t: f64) -> f64 {
        self.traj.eval(t).0[0]
    }

    pub fn dp(&self, t: f64) -> f64 {
        self.traj.eval(t).1[0]
    }

    pub fn q(&self, t: f64) -> f64 {
        self.traj.eval(t).0[1]
    }

    pub fn dq(&self, t: f64) -> f64 {
        self.traj.eval(t).1[1]
    }

    /// `max |ω₀ q̇ p² − 1|` on `n` uniform points.
    pub fn constraint_residual(&self, n: usize) -> f64 {
        self.interval
            .grid(n.max(2))
            .into_iter()
            .map(|t| {
                let (x, v) = self.traj.eval(t);
                (self.omega0 * v[1] * x[0] * x[0] - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn min_p(&self) -> f64 {
        (0..self.traj.len())
            .map(|i| self.traj.node(i).0[0])
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn solve_ermakov(
    profile: &FrequencyProfile,
    omega0: f64,
    bc: ErmakovBc,
) -> Result<ErmakovSolution> {
    solve_ermakov_with(profile, omega0, bc, &StepControl::default())
}

pub fn solve_ermakov_with(
    profile: &FrequencyProfile,
    omega0: f64,
    bc: ErmakovBc,
    control: &StepControl,
) -> Result<ErmakovSolution> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega0 must be positive, got {omega0}")));
    }
    let iv = profile.interval();
    match bc {
        ErmakovBc::Initial { p0, dp0 } => {
            if !(p0 > 0.0 && p0.is_finite() && dp0.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "Ermakov initial amplitude must be positive, got p0 = {p0}"
                )));
            }
            finish(profile, omega0, p0, dp0, control, 0, false)
        }
        ErmakovBc::Natural => {
            let w2 = profile.omega_sq(iv.t_a);
            let p0 = if w2 > 0.0 { w2.powf(-0.25) } else { 1.0 };
            finish(profile, omega0, p0, 0.0, control, 0, false)
        }
        ErmakovBc::Periodic => {
            let (p0, dp0) = invariant_guess(profile, control)?;
            let (p0, dp0, iters) = shoot(profile, p0, dp0, control)?;
            finish(profile, omega0, p0, dp0, control, iters, true)
        }
    }
}

fn run(
    profile: &FrequencyProfile,
    omega0: f64,
    p0: f64,
    dp0: f64,
    control: &StepControl,
) -> Result<(Trajectory<2>, Arc<[f64]>)> {
    let iv = profile.interval();
    let accel = |t: f64, x: &[f64; 2], v: &[f64; 2]| {
        let p = x[0];
        if p <= 0.0 {
            return [f64::NAN, f64::NAN];
        }
        let p3 = p * p * p;
        [-profile.omega_sq(t) * p + 1.0 / p3, -2.0 * v[0] / (omega0 * p3)]
    };
    let q_dot0 = 1.0 / (omega0 * p0 * p0);
    integrate(accel, iv.t_a, [p0, 0.0], [dp0, q_dot0], iv.t_b, control).map_err(|e| match e {
        Error::NonFinite { t } | Error::StepSizeUnderflow { t } => Error::ErmakovSingular { t },
        other => other,
    })
}

fn endpoint_state(profile: &FrequencyProfile, p0: f64, dp0: f64, control: &StepControl) -> Result<(f64, f64)> {
    // ω₀ does not enter the amplitude equation
    let (tr, _) = run(profile, 1.0, p0, dp0, control)?;
    let (xb, vb) = tr.node(tr.len() - 1);
    Ok((xb[0], vb[0]))
}

/// Initial data of the periodic amplitude from the monodromy's invariant form.
///
/// With `P = Y Yᵀ` for a unit-Wronskian fundamental matrix `Y`, periodicity of
/// `(p, ṗ)` is `M P Mᵀ = P`; then `p_a² = P₀₀` and `p_a ṗ_a = P₀₁`.
fn invariant_guess(profile: &FrequencyProfile, control: &StepControl) -> Result<(f64, f64)> {
    let basis = make_basis_with(profile, 1.0, BasisConvention::Canonical, control)?;
    let m = basis.monodromy();
    let trace = m[0][0] + m[1][1];
    if !(trace.abs() < 2.0) {
        return Err(Error::UnstableMonodromy { trace });
    }
    let apply = |p: [[f64; 2]; 2]| -> [f64; 3] {
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        r[i][j] += m[i][k] * p[k][l] * m[j][l];
                    }
                }
            }
        }
        [r[0][0] - p[0][0], r[0][1] - p[0][1], r[1][1] - p[1][1]]
    };
    let cols = [
        apply([[1.0, 0.0], [0.0, 0.0]]),
        apply([[0.0, 1.0], [1.0, 0.0]]),
        apply([[0.0, 0.0], [0.0, 1.0]]),
    ];
    let rows: [[f64; 3]; 3] = std::array::from_fn(|i| [cols[0][i], cols[1][i], cols[2][i]]);
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    };
    let norm = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>();
    let mut n = [cross(rows[0], rows[1]), cross(rows[0], rows[2]), cross(rows[1], rows[2])]
        .into_iter()
        .max_by(|x, y| norm(*x).total_cmp(&norm(*y)))
        .expect("three candidates");
    let det = n[0] * n[2] - n[1] * n[1];
    if !(det > 0.0) {
        return Err(Error::UnstableMonodromy { trace });
    }
    let s = if n[0] > 0.0 { 1.0 } else { -1.0 } / det.sqrt();
    n.iter_mut().for_each(|x| *x *= s);
    let p0 = n[0].sqrt();
    Ok((p0, n[1] / p0))
}

fn shoot(
    profile: &FrequencyProfile,
    mut p0: f64,
    mut dp0: f64,
    control: &StepControl,
) -> Result<(f64, f64, usize)> {
    let residual = |p0: f64, dp0: f64| -> Result<[f64; 2]> {
        let (pb, dpb) = endpoint_state(profile, p0, dp0, control)?;
        Ok([pb - p0, dpb - dp0])
    };
    let mut f = residual(p0, dp0)?;
    let mut last = f[0].abs().max(f[1].abs());
    for iter in 0..SHOOTING_MAX_ITER {
        if last <= SHOOTING_TOL * p0.max(1.0) {
            return Ok((p0, dp0, iter));
        }
        let hp = SHOOTING_FD_STEP * p0.abs().max(1.0);
        let hd = SHOOTING_FD_STEP * dp0.abs().max(1.0);
        let fp = residual(p0 + hp, dp0)?;
        let fd = residual(p0, dp0 + hd)?;
        let j = [
            [(fp[0] - f[0]) / hp, (fd[0] - f[0]) / hd],
            [(fp[1] - f[1]) / hp, (fd[1] - f[1]) / hd],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det.abs() > 0.0) {
            return Err(Error::ShootingFailed { iterations: iter, residual: last });
        }
        let mut dx = [
            -(j[1][1] * f[0] - j[0][1] * f[1]) / det,
            -(-j[1][0] * f[0] + j[0][0] * f[1]) / det,
        ];
        // keep the amplitude positive
        while p0 + dx[0] <= 0.1 * p0 {
            dx = [0.5 * dx[0], 0.5 * dx[1]];
        }
        p0 += dx[0];
        dp0 += dx[1];
        f = residual(p0, dp0)?;
        last = f[0].abs().max(f[1].abs());
    }
    if last <= SHOOTING_TOL * p0.max(1.0) {
        return Ok((p0, dp0, SHOOTING_MAX_ITER));
    }
    Err(Error::ShootingFailed { iterations: SHOOTING_MAX_ITER, residual: last })
}

fn finish(
    profile: &FrequencyProfile,
    omega0: f64,
    p0: f64,
    dp0: f64,
    control: &StepControl,
    iterations: usize,
    periodic: bool,
) -> Result<ErmakovSolution> {
    let iv = profile.interval();
    let (tr, _) = run(profile, omega0, p0, dp0, control)?;
    let traj = Arc::new(tr);
    let (xa, va) = traj.eval(iv.t_a);
    let (xb, vb) = traj.eval(iv.t_b);
    let mut sol = ErmakovSolution {
        traj,
        omega0,
        interval: iv,
        p_a: xa[0],
        p_b: xb[0],
        dp_a: va[0],
        dp_b: vb[0],
        q_a: xa[1],
        q_b: xb[1],
        periodicity_residual: (xb[0] - xa[0]).abs().max((vb[0] - va[0]).abs()),
        evenness_residual: None,
        shooting_iterations: iterations,
    };
    if sol.min_p() <= 0.0 {
        return Err(Error::ErmakovSingular { t: iv.t_a });
    }
    if periodic {
        let half = 0.5 * iv.length();
        let even = (0..=200)
            .map(|k| {
                let s = half * k as f64 / 200.0;
                (sol.p(iv.t_a + s) - sol.p(iv.t_b - s)).abs()
            })
            .fold(0.0, f64::max);
        sol.evenness_residual = Some(even);
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(t: f64) -> Interval {
        Interval::new(0.0, t).unwrap()
    }

    #[test]
    fn constant_frequency_gives_constant_amplitude() {
        let w = 1.7;
        let p = FrequencyProfile::constant(w, iv(1.0)).unwrap();
        let s = solve_ermakov(&p, w, ErmakovBc::Initial { p0: w.powf(-0.5), dp0: 0.0 }).unwrap();
        for t in [0.0, 0.4, 1.0] {
            assert!((s.p(t) - w.powf(-0.5)).abs() < 1e-12);
            assert!((s.q(t) - t).abs() < 1e-10);
        }
        assert!(s.constraint_residual(100) < 1e-8);
    }

    #[test]
    fn periodic_shooting_finds_constant_solution() {
        let w = 1.3;
        let p = FrequencyProfile::constant(w, iv(1.0)).unwrap();
        let s = solve_ermakov(&p, 1.0, ErmakovBc::Periodic).unwrap();
        assert!((s.p_a - w.powf(-0.5)).abs() < 1e-8);
        assert!(s.dp_a.abs() < 1e-8);
        assert!(s.periodicity_residual < 1e-8);
    }

    #[test]
    fn free_pinney_solution() {
        let p = FrequencyProfile::constant(0.0, iv(1.0)).unwrap();
        let s = solve_ermakov(&p, 1.0, ErmakovBc::Initial { p0: 1.0, dp0: 0.0 }).unwrap();
        for t in [0.25, 0.5, 1.0f64] {
            assert!((s.p(t) - (1.0 + t * t).sqrt()).abs() < 1e-9);
            assert!((s.q(t) - t.atan()).abs() < 1e-9);
        }
    }

    #[test]
    fn periodic_modulated_amplitude() {
        let p = FrequencyProfile::modulated(1.0, 0.2, 3.0, iv(2.0 * std::f64::consts::PI / 3.0))
            .unwrap();
        let s = solve_ermakov(&p, 1.0, ErmakovBc::Periodic).unwrap();
        assert!(s.periodicity_residual < 1e-8);
        assert!(s.min_p() > 0.0);
        assert!(s.evenness_residual.is_some());
    }

    #[test]
    fn hyperbolic_monodromy_is_rejected() {
        let p = FrequencyProfile::from_fn(iv(1.0), "inverted", |_| -1.0).unwrap();
        assert!(matches!(
            solve_ermakov(&p, 1.0, ErmakovBc::Periodic),
            Err(Error::UnstableMonodromy { .. })
        ));
    }
}
