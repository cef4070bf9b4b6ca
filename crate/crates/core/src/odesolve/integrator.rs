//! Dormand–Prince 5(4) for second-order systems `x'' = a(t, x, x')` with
//! quintic Hermite dense output built from `(x, x', x'')` at the accepted nodes.

use std::sync::Arc;

use crate::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;

/// How the integrator chooses its steps.
#[derive(Debug, Clone)]
pub enum StepControl {
    Adaptive { rtol: f64, atol: f64 },
    /// Step exactly through the given nodes (first = start, last = end).
    /// Used to compare nearby problems on an identical discretization.
    Mesh(Arc<[f64]>),
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl::Adaptive {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// b - b*, 5th minus embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Accepted nodes in ascending time with dense evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Trajectory<const M: usize> {
    t: Vec<f64>,
    x: Vec<[f64; M]>,
    v: Vec<[f64; M]>,
    a: Vec<[f64; M]>,
}

impl<const M: usize> Trajectory<M> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    #[cfg(test)]
    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn node(&self, i: usize) -> ([f64; M], [f64; M]) {
        (self.x[i], self.v[i])
    }

    /// Position and velocity at `t`. Outside the covered range the end
    /// segment's polynomial is used.
    pub fn eval(&self, t: f64) -> ([f64; M], [f64; M]) {
        let n = self.t.len();
        if n == 1 {
            return (self.x[0], self.v[0]);
        }
        let i = self.t.partition_point(|&s| s <= t).clamp(1, n - 1) - 1;
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        if t == t0 {
            return (self.x[i], self.v[i]);
        }
        if t == t1 {
            return (self.x[i + 1], self.v[i + 1]);
        }
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
        let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 0.5 * (s3 - 2.0 * s4 + s5);
        let d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let d2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
        let d3 = -d0;
        let d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let d5 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
        let (x0, v0, a0) = (&self.x[i], &self.v[i], &self.a[i]);
        let (x1, v1, a1) = (&self.x[i + 1], &self.v[i + 1], &self.a[i + 1]);
        let mut x = [0.0; M];
        let mut v = [0.0; M];
        for k in 0..M {
            x[k] = h0 * x0[k]
                + h * h1 * v0[k]
                + h * h * h2 * a0[k]
                + h3 * x1[k]
                + h * h4 * v1[k]
                + h * h * h5 * a1[k];
            v[k] = (d0 * x0[k] + h * d1 * v0[k] + h * h * d2 * a0[k] + d3 * x1[k]
                + h * d4 * v1[k]
                + h * h * d5 * a1[k])
                / h;
        }
        (x, v)
    }
}

struct StepOut<const M: usize> {
    x: [f64; M],
    v: [f64; M],
    a: [f64; M],
    err_x: [f64; M],
    err_v: [f64; M],
}

fn dp_step<const M: usize, F>(
    accel: &F,
    t: f64,
    x: &[f64; M],
    v: &[f64; M],
    a0: &[f64; M],
    h: f64,
) -> StepOut<M>
where
    F: Fn(f64, &[f64; M], &[f64; M]) -> [f64; M],
{
    // kx[s] = stage velocity, kv[s] = stage acceleration
    let mut kx = [[0.0; M]; 7];
    let mut kv = [[0.0; M]; 7];
    kx[0] = *v;
    kv[0] = *a0;
    for s in 1..7 {
        let mut xs = *x;
        let mut vs = *v;
        for (j, &aij) in A[s].iter().enumerate().take(s) {
            if aij == 0.0 {
                continue;
            }
            for k in 0..M {
                xs[k] += h * aij * kx[j][k];
                vs[k] += h * aij * kv[j][k];
            }
        }
        kx[s] = vs;
        kv[s] = accel(t + C[s] * h, &xs, &vs);
    }
    // FSAL: stage 7 is evaluated at the 5th-order solution
    let mut xn = *x;
    let mut vn = *v;
    for (j, &bj) in A[6].iter().enumerate() {
        for k in 0..M {
            xn[k] += h * bj * kx[j][k];
            vn[k] += h * bj * kv[j][k];
        }
    }
    let mut err_x = [0.0; M];
    let mut err_v = [0.0; M];
    for (j, &ej) in E.iter().enumerate() {
        for k in 0..M {
            err_x[k] += h * ej * kx[j][k];
            err_v[k] += h * ej * kv[j][k];
        }
    }
    StepOut {
        x: xn,
        v: vn,
        a: kv[6],
        err_x,
        err_v,
    }
}

fn all_finite<const M: usize>(xs: &[f64; M]) -> bool {
    xs.iter().all(|v| v.is_finite())
}

/// Integrates from `t0` to `t1` (either direction). Returns the trajectory
/// (ascending in time) and the accepted mesh in integration order.
pub(crate) fn integrate<const M: usize, F>(
    accel: F,
    t0: f64,
    x0: [f64; M],
    v0: [f64; M],
    t1: f64,
    control: &StepControl,
) -> Result<(Trajectory<M>, Arc<[f64]>)>
where
    F: Fn(f64, &[f64; M], &[f64; M]) -> [f64; M],
{
    let a0 = accel(t0, &x0, &v0);
    if !(all_finite(&x0) && all_finite(&v0) && all_finite(&a0)) {
        return Err(Error::NonFinite { t: t0 });
    }
    let mut tr = Trajectory {
        t: vec![t0],
        x: vec![x0],
        v: vec![v0],
        a: vec![a0],
    };
    match control {
        StepControl::Mesh(mesh) => {
            if mesh.len() < 2 || mesh[0] != t0 || mesh[mesh.len() - 1] != t1 {
                return Err(Error::InvalidArgument(
                    "step mesh must start at t0 and end at t1".into(),
                ));
            }
            for w in mesh.windows(2) {
                let i = tr.t.len() - 1;
                let out = dp_step(&accel, w[0], &tr.x[i], &tr.v[i], &tr.a[i], w[1] - w[0]);
                if !(all_finite(&out.x) && all_finite(&out.v) && all_finite(&out.a)) {
                    return Err(Error::NonFinite { t: w[1] });
                }
                tr.t.push(w[1]);
                tr.x.push(out.x);
                tr.v.push(out.v);
                tr.a.push(out.a);
            }
        }
        StepControl::Adaptive { rtol, atol } => {
            adaptive(&accel, &mut tr, t1, *rtol, *atol)?;
        }
    }
    let mesh: Arc<[f64]> = tr.t.clone().into();
    if t1 < t0 {
        tr.t.reverse();
        tr.x.reverse();
        tr.v.reverse();
        tr.a.reverse();
    }
    Ok((tr, mesh))
}

fn adaptive<const M: usize, F>(
    accel: &F,
    tr: &mut Trajectory<M>,
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Result<()>
where
    F: Fn(f64, &[f64; M], &[f64; M]) -> [f64; M],
{
    const SAFETY: f64 = 0.9;
    const MIN_FACTOR: f64 = 0.2;
    const MAX_FACTOR: f64 = 5.0;

    let t0 = tr.t[0];
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(());
    }
    let dir = (t1 - t0).signum();
    let mut h = dir * span * 1e-3;
    let mut rejected_last = false;
    loop {
        let i = tr.t.len() - 1;
        let t = tr.t[i];
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok(());
        }
        let last = h.abs() >= remaining;
        let t_new = if last { t1 } else { t + h };
        // the step actually taken, so a replayed mesh reproduces it bit for bit
        let h_eff = t_new - t;
        if h_eff.abs() < 1e-14 * t.abs().max(span) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let out = dp_step(accel, t, &tr.x[i], &tr.v[i], &tr.a[i], h_eff);
        let mut sum = 0.0;
        for k in 0..M {
            let sx = atol + rtol * tr.x[i][k].abs().max(out.x[k].abs());
            let sv = atol + rtol * tr.v[i][k].abs().max(out.v[k].abs());
            sum += (out.err_x[k] / sx).powi(2) + (out.err_v[k] / sv).powi(2);
        }
        let err = (sum / (2 * M) as f64).sqrt();
        if !err.is_finite() {
            // Overflow in a trial step: retry much shorter before giving up.
            h = h_eff * MIN_FACTOR;
            rejected_last = true;
            continue;
        }
        if err <= 1.0 {
            if !(all_finite(&out.x) && all_finite(&out.v) && all_finite(&out.a)) {
                return Err(Error::NonFinite { t: t + h });
            }
            tr.t.push(t_new);
            tr.x.push(out.x);
            tr.v.push(out.v);
            tr.a.push(out.a);
            let mut factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if rejected_last {
                factor = factor.min(1.0);
            }
            rejected_last = false;
            h = h_eff * factor;
        } else {
            h = h_eff * (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            rejected_last = true;
        }
    }
}
