//! Frequency profiles `Ω²(t)` that parametrize the operator `-d²/dt² - Ω²(t)`.

mod config;
pub mod jet;
mod synthetic;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use config::ProfileConfig;
pub use synthetic::SyntheticZeroModeSpec;

/// Number of sample points used to screen profiles for non-finite values and jumps.
pub const SCREEN_SAMPLES: usize = 10_000;
/// Relative neighbour jump above which a sample pair is suspicious.
pub const JUMP_TOLERANCE: f64 = 1e-3;
/// Tolerance on `|Ω²(t_a) - Ω²(t_b)|` (relative to `1 + |Ω²(t_a)|`) for periodicity.
pub const PERIODICITY_TOLERANCE: f64 = 1e-10;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed time interval `[t_a, t_b]` with `t_b > t_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub t_a: f64,
    pub t_b: f64,
}

impl Interval {
    pub fn new(t_a: f64, t_b: f64) -> Result<Self> {
        if !(t_a.is_finite() && t_b.is_finite() && t_b > t_a) {
            return Err(Error::InvalidInterval { t_a, t_b });
        }
        Ok(Interval { t_a, t_b })
    }

    /// `T = t_b - t_a`
    pub fn length(&self) -> f64 {
        self.t_b - self.t_a
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_a && t <= self.t_b
    }

    /// Uniform grid of `n >= 2` points including both endpoints.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2);
        let h = self.length() / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { self.t_b } else { self.t_a + i as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Constant { omega: f64 },
    /// `Ω²(t) = ω² (1 + ε sin(ν t))`
    Modulated { omega: f64, eps: f64, nu: f64 },
    SyntheticZeroMode { shape: String },
    User,
}

impl ProfileKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ProfileKind::Constant { .. } => "constant",
            ProfileKind::Modulated { .. } => "modulated",
            ProfileKind::SyntheticZeroMode { .. } => "synthetic-zero-mode",
            ProfileKind::User => "user",
        }
    }
}

/// An evaluable `Ω²(t)` on a fixed interval. Immutable and cheap to clone.
#[derive(Clone)]
pub struct FrequencyProfile {
    omega_sq: ScalarFn,
    kind: ProfileKind,
    interval: Interval,
    periodic_with: Option<f64>,
    description: String,
}

impl fmt::Debug for FrequencyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyProfile")
            .field("kind", &self.kind)
            .field("interval", &self.interval)
            .field("periodic_with", &self.periodic_with)
            .field("description", &self.description)
            .finish()
    }
}

impl FrequencyProfile {
    /// `Ω²(t) = ω²` for all t.
    pub fn constant(omega: f64, interval: Interval) -> Result<Self> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "constant profile needs a finite omega >= 0, got {omega}"
            )));
        }
        let w2 = omega * omega;
        Ok(FrequencyProfile {
            omega_sq: Arc::new(move |_| w2),
            kind: ProfileKind::Constant { omega },
            interval,
            periodic_with: Some(interval.length()),
            description: format!("constant omega={omega}"),
        })
    }

    /// `Ω²(t) = ω² (1 + ε sin(ν t))`.
    pub fn modulated(omega: f64, eps: f64, nu: f64, interval: Interval) -> Result<Self> {
        if !(omega.is_finite() && eps.is_finite() && nu.is_finite()) {
            return Err(Error::InvalidArgument(
                "modulated profile parameters must be finite".into(),
            ));
        }
        let w2 = omega * omega;
        let f: ScalarFn = Arc::new(move |t: f64| w2 * (1.0 + eps * (nu * t).sin()));
        let mut p = Self::checked(
            f,
            interval,
            ProfileKind::Modulated { omega, eps, nu },
            format!("modulated omega={omega} eps={eps} nu={nu}"),
        )?;
        if eps == 0.0 {
            p.periodic_with = Some(interval.length());
        }
        Ok(p)
    }

    /// Wraps an arbitrary closure. The closure is screened for non-finite
    /// values and jumps on a dense grid.
    pub fn from_fn<F>(interval: Interval, description: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::checked(Arc::new(f), interval, ProfileKind::User, description.into())
    }

    /// Profile for which `spec.xi` is an exact Dirichlet zero mode:
    /// `Ω²(t) = -ξ''(t)/ξ(t)`.
    pub fn zero_mode(spec: &SyntheticZeroModeSpec) -> Result<Self> {
        let f = spec.omega_sq_fn()?;
        Self::checked(
            f,
            spec.interval(),
            ProfileKind::SyntheticZeroMode {
                shape: spec.name().to_string(),
            },
            format!("synthetic zero mode xi={}", spec.name()),
        )
    }

    fn checked(
        omega_sq: ScalarFn,
        interval: Interval,
        kind: ProfileKind,
        description: String,
    ) -> Result<Self> {
        screen(&*omega_sq, interval)?;
        let (wa, wb) = (omega_sq(interval.t_a), omega_sq(interval.t_b));
        let periodic_with = ((wa - wb).abs() <= PERIODICITY_TOLERANCE * (1.0 + wa.abs()))
            .then(|| interval.length());
        Ok(FrequencyProfile {
            omega_sq,
            kind,
            interval,
            periodic_with,
            description,
        })
    }

    /// `Ω² + shift`, same interval. Used to build spectrally shifted operators.
    pub fn shifted(&self, shift: f64) -> FrequencyProfile {
        let inner = self.omega_sq.clone();
        FrequencyProfile {
            omega_sq: Arc::new(move |t| inner(t) + shift),
            kind: ProfileKind::User,
            interval: self.interval,
            periodic_with: self.periodic_with,
            description: format!("{} shifted by {shift}", self.description),
        }
    }

    #[inline]
    pub fn omega_sq(&self, t: f64) -> f64 {
        (self.omega_sq)(t)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn periodic_with(&self) -> Option<f64> {
        self.periodic_with
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `(t, Ω²(t))` on a uniform grid of `grid_size >= 2` points.
    pub fn sample(&self, grid_size: usize) -> Result<Vec<(f64, f64)>> {
        if grid_size < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid_size must be at least 2, got {grid_size}"
            )));
        }
        self.interval
            .grid(grid_size)
            .into_iter()
            .map(|t| {
                let w = self.omega_sq(t);
                if w.is_finite() {
                    Ok((t, w))
                } else {
                    Err(Error::NonFinite { t })
                }
            })
            .collect()
    }

    /// Largest `|Ω²|` on the screening grid.
    pub fn max_abs(&self) -> f64 {
        self.interval
            .grid(1025)
            .into_iter()
            .map(|t| self.omega_sq(t).abs())
            .fold(0.0, f64::max)
    }
}

/// Rejects non-finite samples and isolated jumps.
///
/// A neighbour difference counts as a jump when it exceeds `JUMP_TOLERANCE`
/// of the profile scale and also dwarfs the adjacent differences, so steep
/// but smooth profiles pass.
fn screen(f: &(dyn Fn(f64) -> f64 + Send + Sync), interval: Interval) -> Result<()> {
    let ts = interval.grid(SCREEN_SAMPLES + 1);
    let mut vals = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { t });
        }
        vals.push(v);
    }
    let t_len = interval.length();
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + 1.0 / (t_len * t_len);
    let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for i in 0..diffs.len() {
        let d = diffs[i];
        if d <= JUMP_TOLERANCE * scale {
            continue;
        }
        let left = if i > 0 { diffs[i - 1] } else { 0.0 };
        let right = diffs.get(i + 1).copied().unwrap_or(0.0);
        if d > 10.0 * left.max(right) {
            return Err(Error::Discontinuous {
                t: 0.5 * (ts[i] + ts[i + 1]),
                jump: d / scale,
            });
        }
    }
    Ok(())
}
