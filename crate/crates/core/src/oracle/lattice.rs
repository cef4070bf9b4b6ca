//! Second-order finite-difference discretization of `K_g` and its spectrum.
//!
//! Dirichlet uses the `N` interior points of a grid with `h = T/(N+1)`;
//! periodic and antiperiodic use `N` points with `h = T/N` and a wrap-around
//! coupling of `∓1/h²` in the corners.

use crate::profiles::FrequencyProfile;
use crate::{BoundaryCondition, Error, Result};

pub const MIN_MESH: usize = 3;
/// Bisection stops at this fraction of the spectral range.
pub const EIGEN_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct LatticeOperator {
    pub bc: BoundaryCondition,
    pub g: f64,
    pub step: f64,
    /// Diagonal `2/h² − gΩ²(tᵢ)`.
    pub diag: Vec<f64>,
    /// Constant off-diagonal `−1/h²`.
    pub off: f64,
    /// Corner entry `A[0][N−1]`, present for periodic (`−1/h²`) and antiperiodic (`+1/h²`).
    pub corner: Option<f64>,
}

impl LatticeOperator {
    pub fn new(profile: &FrequencyProfile, bc: BoundaryCondition, g: f64, n: usize) -> Result<Self> {
        if n < MIN_MESH {
            return Err(Error::InvalidArgument(format!(
                "lattice needs at least {MIN_MESH} points, got {n}"
            )));
        }
        let iv = profile.interval();
        let t = iv.length();
        let h = match bc {
            BoundaryCondition::Dirichlet => t / (n + 1) as f64,
            _ => t / n as f64,
        };
        let inv = 1.0 / (h * h);
        let diag = (0..n)
            .map(|i| {
                let w2 = match bc {
                    BoundaryCondition::Dirichlet => profile.omega_sq(iv.t_a + (i + 1) as f64 * h),
                    // the seam node sees both ends
                    _ if i == 0 => 0.5 * (profile.omega_sq(iv.t_a) + profile.omega_sq(iv.t_b)),
                    _ => profile.omega_sq(iv.t_a + i as f64 * h),
                };
                2.0 * inv - g * w2
            })
            .collect::<Vec<_>>();
        if let Some(i) = diag.iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFinite { t: iv.t_a + i as f64 * h });
        }
        Ok(LatticeOperator {
            bc,
            g,
            step: h,
            diag,
            off: -inv,
            corner: bc.twist().map(|s| -s * inv),
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Bound on the spectral radius.
    pub fn scale(&self) -> f64 {
        let c = self.corner.map_or(0.0, f64::abs);
        self.diag.iter().fold(0.0, |m: f64, d| m.max(d.abs())) + 2.0 * self.off.abs() + c
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(v.len(), n);
        let mut out: Vec<f64> = (0..n).map(|i| self.diag[i] * v[i]).collect();
        for i in 0..n - 1 {
            out[i] += self.off * v[i + 1];
            out[i + 1] += self.off * v[i];
        }
        if let Some(c) = self.corner {
            out[0] += c * v[n - 1];
            out[n - 1] += c * v[0];
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                self.apply(&e)
            })
            .collect()
    }

    /// `(log|det|, sign)` of `A − σI`.
    pub fn log_det_shifted(&self, sigma: f64) -> (f64, f64) {
        match self.corner {
            None => {
                let mut acc = LogDet::default();
                tridiag_pivots(&self.diag, self.off, sigma, |d| acc.push(d));
                (acc.log, acc.sign)
            }
            Some(_) => {
                let (mut acc, schur) = self.cyclic(sigma);
                acc.push(schur);
                (acc.log, acc.sign)
            }
        }
    }

    pub fn log_det(&self) -> (f64, f64) {
        self.log_det_shifted(0.0)
    }

    /// Determinant by the three-term recurrence `D_k = a_k D_{k−1} − b² D_{k−2}`,
    /// rescaled as it goes. Dirichlet only.
    pub fn recurrence_log_det(&self) -> Option<(f64, f64)> {
        if self.corner.is_some() {
            return None;
        }
        let b2 = self.off * self.off;
        let (mut prev, mut cur) = (1.0, self.diag[0]);
        let mut log_scale = 0.0;
        for &a in &self.diag[1..] {
            let next = a * cur - b2 * prev;
            prev = cur;
            cur = next;
            let m = cur.abs().max(prev.abs());
            if m > 1e100 || (m < 1e-100 && m > 0.0) {
                prev /= m;
                cur /= m;
                log_scale += m.ln();
            }
        }
        Some((cur.abs().ln() + log_scale, cur.signum()))
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        match self.corner {
            None => {
                let mut neg = 0;
                tridiag_pivots(&self.diag, self.off, sigma, |d| neg += usize::from(d < 0.0));
                neg
            }
            Some(_) => {
                let (acc, schur) = self.cyclic(sigma);
                acc.negatives + usize::from(schur < 0.0)
            }
        }
    }

    /// Leading block via LDLᵀ, last pivot as a Schur complement (Haynsworth inertia).
    fn cyclic(&self, sigma: f64) -> (LogDet, f64) {
        let n = self.len();
        let m = n - 1;
        let c = self.corner.expect("cyclic lattice");
        // coupling column of the last row into the leading block
        let mut col = vec![0.0; m];
        col[0] += c;
        col[m - 1] += self.off;
        let mut acc = LogDet::default();
        let mut pivots = Vec::with_capacity(m);
        tridiag_pivots(&self.diag[..m], self.off, sigma, |d| {
            acc.push(d);
            pivots.push(d);
        });
        // forward substitution L y = col, then cᵀ T⁻¹ c = Σ y_i² / d_i
        let mut y = col;
        for i in 1..m {
            y[i] -= self.off / pivots[i - 1] * y[i - 1];
        }
        let quad: f64 = y.iter().zip(&pivots).map(|(yi, d)| yi * yi / d).sum();
        (acc, self.diag[m] - sigma - quad)
    }

    /// All eigenvalues in ascending order, by bisection on the inertia count.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.len();
        let r = self.scale();
        (0..n).map(|k| self.kth_eigenvalue(k, -r, r)).collect()
    }

    fn kth_eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        // invariant: count_below(lo) <= k < count_below(hi)
        let tol = EIGEN_TOLERANCE * (hi - lo);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Default)]
struct LogDet {
    log: f64,
    sign: f64,
    negatives: usize,
    started: bool,
}

impl LogDet {
    fn push(&mut self, d: f64) {
        if !self.started {
            self.sign = 1.0;
            self.started = true;
        }
        self.log += d.abs().ln();
        if d < 0.0 {
            self.sign = -self.sign;
            self.negatives += 1;
        }
        if d == 0.0 {
            self.sign = 0.0;
        }
    }
}

/// LDLᵀ pivots of `tridiag(b, a − σ, b)`; exact zeros are nudged so the
/// inertia count stays defined.
fn tridiag_pivots(a: &[f64], b: f64, sigma: f64, mut each: impl FnMut(f64)) {
    let b2 = b * b;
    let tiny = f64::MIN_POSITIVE.sqrt() * (b.abs() + 1.0);
    let mut d = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        d = if i == 0 { ai - sigma } else { ai - sigma - b2 / d };
        if d == 0.0 {
            d = -tiny;
        }
        each(d);
    }
}

/// Reference lattice for ratios: free for Dirichlet, `Ω² ≡ ω₀²` otherwise.
pub fn reference_profile(
    profile: &FrequencyProfile,
    bc: BoundaryCondition,
    omega0: f64,
) -> Result<FrequencyProfile> {
    let w = if bc == BoundaryCondition::Dirichlet { 0.0 } else { omega0 };
    FrequencyProfile::constant(w, profile.interval())
}

/// Count of eigenvalues with `|λ| < tol`.
pub fn near_zero_count(op: &LatticeOperator, tol: f64) -> usize {
    op.count_below(tol) - op.count_below(-tol)
}
