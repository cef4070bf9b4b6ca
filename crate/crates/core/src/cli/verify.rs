//! Verification suites: closed forms against the lattice and coupling-flow
//! oracles, one CSV row per comparison.

use std::f64::consts::PI;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use super::format::fmt_f64;
use super::CliError;
use crate::determinants::{det_dirichlet_regularized_spec, determinant, van_vleck_check};
use crate::ermakov_bridge::det_pq;
use crate::oracle::{gflow_ratio, lattice_ratio_extrapolated, pseudo_det_ratio, trace_identity};
use crate::profiles::{FrequencyProfile, Interval, SyntheticZeroModeSpec};
use crate::{BoundaryCondition, Result};

const LATTICE_N: usize = 2000;
const PSEUDO_N: usize = 400;
const G_STEPS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Dirichlet,
    Periodic,
    Antiperiodic,
    Zeromode,
    Gflow,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Dirichlet => "dirichlet",
            Suite::Periodic => "periodic",
            Suite::Antiperiodic => "antiperiodic",
            Suite::Zeromode => "zeromode",
            Suite::Gflow => "gflow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub profile: String,
    pub bc: BoundaryCondition,
    pub n: Option<usize>,
    pub closed_form: f64,
    pub oracle: f64,
    pub rel_err: f64,
    pub check: &'static str,
    pub tolerance: f64,
    pub pass: bool,
}

fn row(
    profile: &str,
    bc: BoundaryCondition,
    n: Option<usize>,
    check: &'static str,
    closed_form: f64,
    oracle: f64,
    tolerance: f64,
) -> VerifyRow {
    let rel_err = (closed_form - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
    VerifyRow {
        profile: profile.to_string(),
        bc,
        n,
        closed_form,
        oracle,
        rel_err,
        check,
        tolerance,
        // NaN fails
        pass: rel_err <= tolerance,
    }
}

fn constant(w: f64, t: f64) -> Result<(String, FrequencyProfile)> {
    Ok((format!("constant(omega={w},T={t})"), FrequencyProfile::constant(w, Interval::new(0.0, t)?)?))
}

fn modulated() -> Result<(String, FrequencyProfile)> {
    let p = FrequencyProfile::modulated(1.0, 0.2, 3.0, Interval::new(0.0, 2.0)?)?;
    Ok(("modulated(omega=1,eps=0.2,nu=3,T=2)".into(), p))
}

fn lattice_rows(rows: &mut Vec<VerifyRow>, name: &str, p: &FrequencyProfile, bc: BoundaryCondition) -> Result<()> {
    let closed = determinant(p, bc, 1.0)?.ratio;
    let e = lattice_ratio_extrapolated(p, bc, 1.0, LATTICE_N)?;
    rows.push(row(name, bc, Some(LATTICE_N), "lattice", closed, e.coarse, 2e-4));
    rows.push(row(name, bc, Some(LATTICE_N), "lattice_extrapolated", closed, e.extrapolated, 1e-6));
    Ok(())
}

fn dirichlet(rows: &mut Vec<VerifyRow>) -> Result<()> {
    let bc = BoundaryCondition::Dirichlet;
    for t in [0.5, 1.0, 3.0] {
        let (name, p) = constant(0.0, t)?;
        rows.push(row(&name, bc, None, "analytic", determinant(&p, bc, 1.0)?.value, t, 1e-10));
    }
    for (w, t) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.5)] {
        let (name, p) = constant(w, t)?;
        let exact = (w * t).sin() / w;
        rows.push(row(&name, bc, None, "analytic", determinant(&p, bc, 1.0)?.value, exact, 1e-8));
        rows.push(row(&name, bc, None, "van_vleck", determinant(&p, bc, 1.0)?.value, van_vleck_check(&p, 1.0)?, 1e-5));
    }
    for (w, t) in [(1.0, 1.0), (2.0, 1.0)] {
        let (name, p) = constant(w, t)?;
        lattice_rows(rows, &name, &p, bc)?;
    }
    let (name, p) = modulated()?;
    lattice_rows(rows, &name, &p, bc)?;
    let d = determinant(&p, bc, 1.0)?;
    rows.push(row(&name, bc, None, "van_vleck", d.value, van_vleck_check(&p, 1.0)?, 1e-5));
    rows.push(row(&name, bc, None, "pq_route", det_pq(&p, bc, 1.0)?.ratio, d.ratio, 1e-6));
    Ok(())
}

fn twisted(rows: &mut Vec<VerifyRow>, bc: BoundaryCondition) -> Result<()> {
    for (w, t) in [(1.3, 1.0), (1.0, 2.5)] {
        let (name, p) = constant(w, t)?;
        let half = 0.5 * w * t;
        let exact = 4.0 * if bc == BoundaryCondition::Periodic { half.sin() } else { half.cos() }.powi(2);
        let d = determinant(&p, bc, w)?;
        rows.push(row(&name, bc, None, "analytic", d.value, exact, 1e-8));
        rows.push(row(&name, bc, None, "self_ratio", d.ratio, 1.0, 1e-10));
    }
    let (name, p) = modulated()?;
    lattice_rows(rows, &name, &p, bc)?;
    let d = determinant(&p, bc, 1.0)?;
    rows.push(row(&name, bc, None, "pq_route", det_pq(&p, bc, 1.0)?.ratio, d.ratio, 1e-6));
    Ok(())
}

fn zeromode(rows: &mut Vec<VerifyRow>) -> Result<()> {
    let bc = BoundaryCondition::Dirichlet;
    let iv = Interval::new(0.0, 1.0)?;
    let spec = SyntheticZeroModeSpec::builtin("sinpi", iv)?;
    let name = "synthetic(xi=sinpi,T=1)";
    let r = det_dirichlet_regularized_spec(&spec)?;
    let exact = -1.0 / (2.0 * PI * PI);
    rows.push(row(name, bc, None, "regularized_analytic", r.det_regularized, exact, 1e-6));
    rows.push(row(name, bc, None, "eps_chain", r.chain_quotient, r.det_regularized, 1e-3));
    let s = pseudo_det_ratio(&FrequencyProfile::zero_mode(&spec)?, bc, 1.0, PSEUDO_N)?;
    rows.push(row(
        name,
        bc,
        Some(PSEUDO_N),
        "pseudo_det_magnitude",
        r.det_regularized.abs(),
        s.aligned.abs(),
        1e-4,
    ));
    Ok(())
}

fn gflow(rows: &mut Vec<VerifyRow>) -> Result<()> {
    let (name, p) = constant(1.0, 1.0)?;
    let bc = BoundaryCondition::Dirichlet;
    rows.push(row(&name, bc, Some(G_STEPS), "gflow", 1f64.sin(), gflow_ratio(&p, bc, 1.0, G_STEPS)?, 1e-5));
    let (name, p) = modulated()?;
    for bc in BoundaryCondition::ALL {
        let closed = determinant(&p, bc, 1.0)?.ratio;
        rows.push(row(&name, bc, Some(G_STEPS), "gflow", closed, gflow_ratio(&p, bc, 1.0, G_STEPS)?, 1e-5));
        for g in [0.2, 0.5, 0.8] {
            let id = trace_identity(&p, bc, g, 1e-5)?;
            let check = match g {
                x if x < 0.3 => "trace_identity_g0.2",
                x if x < 0.6 => "trace_identity_g0.5",
                _ => "trace_identity_g0.8",
            };
            rows.push(row(&name, bc, None, check, id.trace, id.finite_difference, 1e-5));
        }
    }
    Ok(())
}

/// Rows for a suite, in a fixed order.
pub fn verify_rows(suite: Suite) -> std::result::Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Dirichlet {
        dirichlet(&mut rows)?;
    }
    if all || suite == Suite::Periodic {
        twisted(&mut rows, BoundaryCondition::Periodic)?;
    }
    if all || suite == Suite::Antiperiodic {
        twisted(&mut rows, BoundaryCondition::Antiperiodic)?;
    }
    if all || suite == Suite::Zeromode {
        zeromode(&mut rows)?;
    }
    if all || suite == Suite::Gflow {
        gflow(&mut rows)?;
    }
    Ok(rows)
}

pub(super) fn write_csv(rows: &[VerifyRow], out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["profile", "bc", "n", "closed_form", "oracle", "rel_err", "check", "tolerance", "pass"])?;
    for r in rows {
        w.write_record([
            r.profile.clone(),
            r.bc.to_string(),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            fmt_f64(r.closed_form),
            fmt_f64(r.oracle),
            fmt_f64(r.rel_err),
            r.check.to_string(),
            format!("{:e}", r.tolerance),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
