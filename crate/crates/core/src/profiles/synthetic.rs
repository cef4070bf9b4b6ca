use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::jet::Jet;
use super::{Interval, ScalarFn};
use crate::{Error, Result};

type JetFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;

const VALIDATION_SAMPLES: usize = 10_000;
/// Finite-difference step for shapes without analytic derivatives, relative to T.
const FD_STEP: f64 = 1e-4;
/// Width of the endpoint zone where `-ξ''/ξ` is replaced by its extrapolated limit.
const BLEND_ANALYTIC: f64 = 1e-4;
const BLEND_FD: f64 = 2e-2;

/// A prescribed Dirichlet zero mode `ξ(t)` from which `Ω² = -ξ''/ξ` is built.
#[derive(Clone)]
pub struct SyntheticZeroModeSpec {
    interval: Interval,
    name: String,
    xi: JetFn,
    analytic: bool,
}

impl fmt::Debug for SyntheticZeroModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyntheticZeroModeSpec")
            .field("interval", &self.interval)
            .field("name", &self.name)
            .field("analytic", &self.analytic)
            .finish()
    }
}

impl SyntheticZeroModeSpec {
    pub const BUILTIN: [&'static str; 2] = ["sinpi", "sinpi_skew"];

    /// Built-in shapes, with `s = (t - t_a)/T`:
    /// - `sinpi`: `sin(π s)`, giving the constant profile `π²/T²`;
    /// - `sinpi_skew`: `sin(π s) (1 + 0.1 sin²(π s) (1 + s))`, a smooth
    ///   asymmetric profile.
    pub fn builtin(name: &str, interval: Interval) -> Result<Self> {
        let (t_a, t_len) = (interval.t_a, interval.length());
        match name {
            "sinpi" => Self::from_jet(interval, name, move |t| {
                ((t - Jet::constant(t_a)) * (PI / t_len)).sin()
            }),
            "sinpi_skew" => Self::from_jet(interval, name, move |t| {
                let s = (t - Jet::constant(t_a)) * (1.0 / t_len);
                let sp = (s * PI).sin();
                sp * ((sp * sp * (s + 1.0)) * 0.1 + 1.0)
            }),
            other => Err(Error::InvalidArgument(format!(
                "unknown zero-mode shape '{other}' (expected one of {:?})",
                Self::BUILTIN
            ))),
        }
    }

    /// Shape with exact derivatives supplied through [`Jet`] arithmetic.
    pub fn from_jet<F>(interval: Interval, name: &str, f: F) -> Result<Self>
    where
        F: Fn(Jet) -> Jet + Send + Sync + 'static,
    {
        let spec = SyntheticZeroModeSpec {
            interval,
            name: name.to_string(),
            xi: Arc::new(move |t| f(Jet::variable(t))),
            analytic: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Shape given only by values; derivatives by 4th-order central differences
    /// with step `T·1e-4`.
    pub fn from_fn<F>(interval: Interval, name: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let h = FD_STEP * interval.length();
        let xi: JetFn = Arc::new(move |t| {
            let (fm2, fm1, f0, fp1, fp2) = (f(t - 2.0 * h), f(t - h), f(t), f(t + h), f(t + 2.0 * h));
            Jet {
                value: f0,
                d1: (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h),
                d2: (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h),
            }
        });
        let spec = SyntheticZeroModeSpec {
            interval,
            name: name.to_string(),
            xi,
            analytic: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    pub fn xi(&self, t: f64) -> f64 {
        (self.xi)(t).value
    }

    /// `ξ`, `ξ'`, `ξ''` at `t`.
    pub fn jet(&self, t: f64) -> Jet {
        (self.xi)(t)
    }

    fn validate(&self) -> Result<()> {
        let iv = self.interval;
        let t_len = iv.length();
        let grid = iv.grid(VALIDATION_SAMPLES + 1);
        let jets: Vec<Jet> = grid.iter().map(|&t| self.jet(t)).collect();
        if let Some((t, _)) = grid.iter().zip(&jets).find(|(_, j)| {
            !(j.value.is_finite() && j.d1.is_finite() && j.d2.is_finite())
        }) {
            return Err(Error::InvalidZeroMode(format!("non-finite value at t = {t}")));
        }
        let amp = jets.iter().fold(0.0_f64, |m, j| m.max(j.value.abs()));
        if amp == 0.0 {
            return Err(Error::InvalidZeroMode("xi vanishes identically".into()));
        }
        let (ja, jb) = (jets[0], jets[jets.len() - 1]);
        for (label, j) in [("t_a", ja), ("t_b", jb)] {
            if j.value.abs() > 1e-10 * amp {
                return Err(Error::InvalidZeroMode(format!(
                    "xi({label}) = {} is not zero",
                    j.value
                )));
            }
        }
        let interior = &jets[1..jets.len() - 1];
        let sign = interior[0].value.signum();
        if let Some(k) = interior
            .iter()
            .position(|j| j.value == 0.0 || j.value.signum() != sign)
        {
            return Err(Error::InvalidZeroMode(format!(
                "xi has an interior zero near t = {}",
                grid[k + 1]
            )));
        }
        for (label, j) in [("t_a", ja), ("t_b", jb)] {
            if j.d1.abs() <= 1e-8 * amp / t_len {
                return Err(Error::InvalidZeroMode(format!(
                    "xi'({label}) vanishes; the endpoint limit of -xi''/xi is undefined"
                )));
            }
        }
        let curv = interior.iter().fold(0.0_f64, |m, j| m.max(j.d2.abs()));
        let curv_scale = curv.max(amp / (t_len * t_len));
        for (label, j) in [("t_a", ja), ("t_b", jb)] {
            if j.d2.abs() > 1e-6 * curv_scale {
                return Err(Error::InvalidZeroMode(format!(
                    "-xi''/xi diverges at {label} (xi''({label}) = {:.6e} while xi({label}) = 0)",
                    j.d2
                )));
            }
        }
        Ok(())
    }

    /// `Ω²(t) = -ξ''/ξ`, with the endpoint zones replaced by the cubic through
    /// four nearby samples (which extrapolates to the one-sided limit).
    pub(crate) fn omega_sq_fn(&self) -> Result<ScalarFn> {
        let iv = self.interval;
        let blend = if self.analytic { BLEND_ANALYTIC } else { BLEND_FD } * iv.length();
        let offsets = [blend / 8.0, blend / 4.0, blend / 2.0, blend];
        let ratio = {
            let xi = self.xi.clone();
            move |t: f64| {
                let j = xi(t);
                -j.d2 / j.value
            }
        };
        let left: Vec<f64> = offsets.iter().map(|d| ratio(iv.t_a + d)).collect();
        let right: Vec<f64> = offsets.iter().map(|d| ratio(iv.t_b - d)).collect();
        if let Some(v) = left.iter().chain(&right).find(|v| !v.is_finite()) {
            return Err(Error::InvalidZeroMode(format!(
                "-xi''/xi is not finite near the endpoints ({v})"
            )));
        }
        Ok(Arc::new(move |t: f64| {
            let da = t - iv.t_a;
            let db = iv.t_b - t;
            if da < blend {
                lagrange(&offsets, &left, da)
            } else if db < blend {
                lagrange(&offsets, &right, db)
            } else {
                ratio(t)
            }
        }))
    }

    /// One-sided limits of `-ξ''/ξ` at `(t_a, t_b)`.
    pub fn endpoint_limits(&self) -> Result<(f64, f64)> {
        let f = self.omega_sq_fn()?;
        Ok((f(self.interval.t_a), f(self.interval.t_b)))
    }
}

fn lagrange(xs: &[f64; 4], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += w * ys[i];
    }
    acc
}
