//! Solutions of `ḧ + g·Ω²(t)·h = 0` and of the Ermakov–Pinney equation.

mod basis;
mod ermakov;
mod integrator;

use std::fmt;
use std::sync::Arc;

pub use basis::{make_basis, make_basis_with, BasisConvention, HomogeneousBasis};
pub use ermakov::{solve_ermakov, solve_ermakov_with, ErmakovBc, ErmakovSolution};
pub use integrator::{StepControl, DEFAULT_ATOL, DEFAULT_RTOL};

pub(crate) use integrator::{integrate, Trajectory};

use crate::profiles::FrequencyProfile;
use crate::{Error, Result};

type Curve = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// A scalar solution with dense output: `eval(t)` gives `(h(t), ḣ(t))`.
#[derive(Clone)]
pub struct Solution {
    curve: Curve,
    mesh: Arc<[f64]>,
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solution")
            .field("nodes", &self.mesh.len())
            .finish()
    }
}

impl Solution {
    /// Wraps an analytic or externally computed solution.
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        Solution {
            curve: Arc::new(f),
            mesh: Arc::from(Vec::new()),
        }
    }

    pub(crate) fn with_mesh(curve: Curve, mesh: Arc<[f64]>) -> Self {
        Solution { curve, mesh }
    }

    pub(crate) fn from_component<const M: usize>(
        tr: Arc<Trajectory<M>>,
        k: usize,
        mesh: Arc<[f64]>,
    ) -> Self {
        let curve: Curve = Arc::new(move |t| {
            let (x, v) = tr.eval(t);
            (x[k], v[k])
        });
        Solution { curve, mesh }
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        (self.curve)(t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.eval(t).1
    }

    /// Accepted integrator nodes in integration order; empty for analytic solutions.
    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Solution, b: f64) -> Solution {
        let (f, g) = (self.curve.clone(), other.curve.clone());
        let curve: Curve = Arc::new(move |t| {
            let (x, dx) = f(t);
            let (y, dy) = g(t);
            (a * x + b * y, a * dx + b * dy)
        });
        Solution::with_mesh(curve, self.mesh.clone())
    }

    pub fn scaled(&self, k: f64) -> Solution {
        let f = self.curve.clone();
        let curve: Curve = Arc::new(move |t| {
            let (x, dx) = f(t);
            (k * x, k * dx)
        });
        Solution::with_mesh(curve, self.mesh.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Initial data at `t_a`.
    Forward,
    /// Initial data at `t_b`.
    Backward,
}

pub(crate) fn check_coupling(g: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidArgument(format!(
            "coupling g must lie in [0, 1], got {g}"
        )));
    }
    Ok(())
}

pub(crate) fn linear_accel(
    profile: &FrequencyProfile,
    g: f64,
) -> impl Fn(f64, &[f64; 1], &[f64; 1]) -> [f64; 1] + '_ {
    move |t, x, _| [-g * profile.omega_sq(t) * x[0]]
}

/// Solves `ḧ = −g·Ω²(t)·h` across the profile's interval from the given end.
pub fn solve_homogeneous(
    profile: &FrequencyProfile,
    g: f64,
    init: (f64, f64),
    direction: Direction,
) -> Result<Solution> {
    solve_homogeneous_with(profile, g, init, direction, &StepControl::default())
}

pub fn solve_homogeneous_with(
    profile: &FrequencyProfile,
    g: f64,
    init: (f64, f64),
    direction: Direction,
    control: &StepControl,
) -> Result<Solution> {
    check_coupling(g)?;
    if init.0 == 0.0 && init.1 == 0.0 {
        return Err(Error::InvalidArgument(
            "initial data (0, 0) gives the trivial solution".into(),
        ));
    }
    let iv = profile.interval();
    let (t0, t1) = match direction {
        Direction::Forward => (iv.t_a, iv.t_b),
        Direction::Backward => (iv.t_b, iv.t_a),
    };
    let (tr, mesh) = integrate(linear_accel(profile, g), t0, [init.0], [init.1], t1, control)?;
    Ok(Solution::from_component(Arc::new(tr), 0, mesh))
}
