//! Acceptance checks. One PASS/FAIL line per criterion; the process exits
//! nonzero if any criterion fails. Tolerances and runtime budgets are fixed
//! here, not read from anywhere else.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fundet::determinants::{
    det_dirichlet_regularized_spec, det_with, determinant, van_vleck_check,
};
use fundet::ermakov_bridge::{det_pq, det_ratio_dirichlet_pq, det_ratio_periodic_pq};
use fundet::green::kernel;
use fundet::odesolve::{make_basis, solve_ermakov, BasisConvention, ErmakovBc};
use fundet::oracle::{gflow_ratio, lattice_ratio_extrapolated, pseudo_det_ratio, trace_identity};
use fundet::profiles::{FrequencyProfile, Interval, SyntheticZeroModeSpec};
use fundet::{BoundaryCondition, Result};
use rand::{rngs::StdRng, Rng, SeedableRng};

const ALL: [BoundaryCondition; 3] = BoundaryCondition::ALL;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn constant(w: f64, t: f64) -> FrequencyProfile {
    FrequencyProfile::constant(w, Interval::new(0.0, t).unwrap()).unwrap()
}

fn modulated() -> FrequencyProfile {
    FrequencyProfile::modulated(1.0, 0.2, 3.0, Interval::new(0.0, 2.0).unwrap()).unwrap()
}

/// Largest error seen against its tolerance.
#[derive(Default)]
struct Worst {
    ratio: f64,
    what: String,
}

impl Worst {
    fn see(&mut self, err: f64, tol: f64, what: impl Into<String>) {
        let r = if err.is_nan() { f64::INFINITY } else { err / tol };
        if r >= self.ratio {
            self.ratio = r;
            self.what = format!("{} err {:.2e} tol {:.0e}", what.into(), err, tol);
        }
    }

    fn ok(&self) -> bool {
        self.ratio <= 1.0
    }
}

fn c1() -> Result<Worst> {
    let mut w = Worst::default();
    for t in [0.5, 1.0, 3.0] {
        let d = determinant(&constant(0.0, t), BoundaryCondition::Dirichlet, 1.0)?;
        w.see((d.value - t).abs(), 1e-10, format!("T={t}"));
    }
    Ok(w)
}

fn c2() -> Result<Worst> {
    let mut w = Worst::default();
    let mut negative = false;
    for (om, t) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.5)] {
        let d = determinant(&constant(om, t), BoundaryCondition::Dirichlet, 1.0)?;
        w.see((d.value - (om * t).sin() / om).abs(), 1e-8, format!("omega={om},T={t}"));
        negative |= d.value < 0.0;
    }
    // sin(2.5)/1 is positive; the focal point lies at ωT = π
    let d = determinant(&constant(1.0, 3.5), BoundaryCondition::Dirichlet, 1.0)?;
    w.see((d.value - 3.5f64.sin()).abs(), 1e-8, "omega=1,T=3.5");
    negative |= d.value < 0.0;
    if !negative {
        w.see(f64::NAN, 1.0, "no negative value past the focal point");
    }
    Ok(w)
}

fn c3() -> Result<Worst> {
    let mut w = Worst::default();
    for (om, t) in [(1.0, 1.0), (1.3, 2.0), (0.7, 3.0)] {
        let p = constant(om, t);
        let half = 0.5 * om * t;
        let per = determinant(&p, BoundaryCondition::Periodic, om)?;
        let anti = determinant(&p, BoundaryCondition::Antiperiodic, om)?;
        w.see((per.value - 4.0 * half.sin().powi(2)).abs(), 1e-8, format!("periodic omega={om}"));
        w.see((anti.value - 4.0 * half.cos().powi(2)).abs(), 1e-8, format!("antiperiodic omega={om}"));
        w.see((per.ratio - 1.0).abs(), 1e-10, "periodic ratio");
        w.see((anti.ratio - 1.0).abs(), 1e-10, "antiperiodic ratio");
    }
    Ok(w)
}

fn c4() -> Result<Worst> {
    let mut w = Worst::default();
    let p = modulated();
    for bc in ALL {
        let closed = determinant(&p, bc, 1.0)?.ratio;
        let e = lattice_ratio_extrapolated(&p, bc, 1.0, 2000)?;
        w.see(rel(e.coarse, closed), 2e-4, format!("{bc} N=2000"));
        w.see(rel(e.extrapolated, closed), 1e-6, format!("{bc} extrapolated"));
    }
    Ok(w)
}

fn c5() -> Result<Worst> {
    let mut w = Worst::default();
    let p = modulated();
    let closed = determinant(&p, BoundaryCondition::Dirichlet, 1.0)?.ratio;
    let flow = gflow_ratio(&p, BoundaryCondition::Dirichlet, 1.0, 32)?;
    w.see(rel(flow, closed), 1e-5, "dirichlet, 32 nodes");
    Ok(w)
}

fn c6() -> Result<Worst> {
    let mut w = Worst::default();
    let p = modulated();
    for bc in ALL {
        for g in [0.2, 0.5, 0.8] {
            let id = trace_identity(&p, bc, g, 1e-5)?;
            w.see(id.rel_err(), 1e-5, format!("{bc} g={g}"));
        }
    }
    Ok(w)
}

fn c7() -> Result<Worst> {
    let mut w = Worst::default();
    for (name, p) in [("constant", constant(1.3, 1.1)), ("modulated", modulated())] {
        let d = determinant(&p, BoundaryCondition::Dirichlet, 1.0)?.value;
        w.see(rel(van_vleck_check(&p, 1.0)?, d), 1e-5, name);
    }
    Ok(w)
}

fn c8() -> Result<Worst> {
    let mut w = Worst::default();
    let iv = Interval::new(0.0, 1.0)?;
    let spec = SyntheticZeroModeSpec::builtin("sinpi", iv)?;
    let r = det_dirichlet_regularized_spec(&spec)?;
    w.see((r.det_regularized + 1.0 / (2.0 * PI * PI)).abs(), 1e-6, "regularized value");
    w.see(r.chain_rel_err, 1e-3, "eps chain");
    let s = pseudo_det_ratio(&FrequencyProfile::zero_mode(&spec)?, BoundaryCondition::Dirichlet, 1.0, 400)?;
    w.see(rel(s.aligned.abs(), r.det_regularized.abs()), 1e-4, "lattice pseudo-determinant");
    Ok(w)
}

fn c9() -> Result<Worst> {
    let mut w = Worst::default();
    let mut rng = StdRng::seed_from_u64(9);
    let p = modulated();
    let b = make_basis(&p, 1.0, BasisConvention::Canonical)?;
    let base: Vec<f64> = ALL.iter().map(|&bc| det_with(&b, bc, 1.0).map(|d| d.value)).collect::<Result<_>>()?;
    let mut done = 0;
    while done < 50 {
        let m: [[f64; 2]; 2] = [[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]];
        if (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() < 0.1 {
            continue;
        }
        let mixed = b.mixed(m)?;
        for (bc, v) in ALL.iter().zip(&base) {
            w.see(rel(det_with(&mixed, *bc, 1.0)?.value, *v), 1e-9, format!("{bc} mixing {done}"));
        }
        done += 1;
    }
    Ok(w)
}

fn c10() -> Result<Worst> {
    let mut w = Worst::default();
    let mut rng = StdRng::seed_from_u64(10);
    let profiles = [
        constant(1.0, 1.0),
        constant(2.0, 1.0),
        modulated(),
        FrequencyProfile::modulated(1.5, 0.3, 5.0, Interval::new(0.0, 1.0)?)?,
        FrequencyProfile::from_fn(Interval::new(-0.5, 1.0)?, "1 + t^2 / 2", |t| 1.0 + 0.5 * t * t)?,
    ];
    for (i, p) in profiles.iter().enumerate() {
        let iv = p.interval();
        let basis = make_basis(p, 1.0, BasisConvention::Canonical)?;
        for bc in ALL {
            let k = kernel(&basis, bc)?;
            let tag = |what: &str| format!("profile {i} {bc} {what}");
            let mut pairs = 0;
            while pairs < 100 {
                let t = rng.gen_range(iv.t_a..iv.t_b);
                let s = rng.gen_range(iv.t_a..iv.t_b);
                if (t - s).abs() < 0.01 {
                    continue;
                }
                pairs += 1;
                w.see((k.evaluate(t, s) - k.evaluate(s, t)).abs(), 1e-9, tag("symmetry"));
                let d = 1e-9;
                w.see((k.evaluate(s + d, s) - k.evaluate(s - d, s)).abs(), 1e-7, tag("continuity"));
                let jump = k.evaluate_dt(s + d, s) - k.evaluate_dt(s - d, s);
                w.see((jump + 1.0).abs(), 1e-6, tag("jump"));
                // fourth-order difference of ∂ₜG
                let h = 1e-3;
                let (lo, hi) = (t.min(s), t.max(s));
                if t - 2.0 * h > iv.t_a && t + 2.0 * h < iv.t_b && (hi - lo) > 2.5 * h {
                    let f = |x: f64| k.evaluate_dt(x, s);
                    let d2 = (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h);
                    let residual = -d2 - p.omega_sq(t) * k.evaluate(t, s);
                    w.see(residual.abs(), 1e-6, tag("annihilation"));
                }
                match bc.twist() {
                    None => {
                        w.see(k.evaluate(iv.t_a, s).abs(), 1e-9, tag("G(t_a, s)"));
                        w.see(k.evaluate(t, iv.t_b).abs(), 1e-9, tag("G(t, t_b)"));
                    }
                    Some(sign) => {
                        w.see((k.evaluate(iv.t_b, s) - sign * k.evaluate(iv.t_a, s)).abs(), 1e-7, tag("value twist"));
                        w.see((k.evaluate_dt(iv.t_b, s) - sign * k.evaluate_dt(iv.t_a, s)).abs(), 1e-7, tag("derivative twist"));
                    }
                }
            }
        }
    }
    Ok(w)
}

fn c11() -> Result<Worst> {
    let mut w = Worst::default();
    for (name, p) in [("constant", constant(1.3, 1.0)), ("modulated", modulated())] {
        for bc in ALL {
            let endpoint = determinant(&p, bc, 1.0)?.ratio;
            w.see(rel(det_pq(&p, bc, 1.0)?.ratio, endpoint), 1e-6, format!("{name} {bc} path"));
        }
        let d0 = det_ratio_dirichlet_pq(&solve_ermakov(&p, 1.0, ErmakovBc::Natural)?)?;
        let s0 = solve_ermakov(&p, 1.0, ErmakovBc::Periodic)?;
        let p0 = det_ratio_periodic_pq(&s0, BoundaryCondition::Periodic, 1.0)?;
        let a0 = det_ratio_periodic_pq(&s0, BoundaryCondition::Antiperiodic, 1.0)?;
        for om in [0.7, 2.3] {
            let d = det_ratio_dirichlet_pq(&solve_ermakov(&p, om, ErmakovBc::Natural)?)?;
            let s = solve_ermakov(&p, om, ErmakovBc::Periodic)?;
            w.see(rel(d, d0), 1e-7, format!("{name} dirichlet omega0={om}"));
            w.see(rel(det_ratio_periodic_pq(&s, BoundaryCondition::Periodic, 1.0)?, p0), 1e-7, format!("{name} periodic omega0={om}"));
            w.see(rel(det_ratio_periodic_pq(&s, BoundaryCondition::Antiperiodic, 1.0)?, a0), 1e-7, format!("{name} antiperiodic omega0={om}"));
        }
    }
    Ok(w)
}

type Check = fn() -> Result<Worst>;

fn main() -> ExitCode {
    let criteria: [(&str, Check, Option<Duration>); 11] = [
        ("free operator normalization", c1, Some(Duration::from_millis(100))),
        ("constant-frequency dirichlet", c2, Some(Duration::from_secs(1))),
        ("constant-frequency periodic/antiperiodic", c3, Some(Duration::from_secs(1))),
        ("lattice oracle equivalence", c4, Some(Duration::from_secs(30))),
        ("coupling-flow identity", c5, Some(Duration::from_secs(10))),
        ("trace identity", c6, None),
        ("van vleck cross-check", c7, None),
        ("regularized zero mode", c8, Some(Duration::from_secs(30))),
        ("basis invariance", c9, None),
        ("green kernel properties", c10, None),
        ("ermakov path equivalence", c11, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let over = budget.is_some_and(|b| elapsed > b);
        let (pass, detail) = match &outcome {
            Ok(w) if w.ok() && !over => (true, format!("worst: {}", w.what)),
            Ok(w) if over => (false, format!("over budget {:?}; worst: {}", budget.unwrap(), w.what)),
            Ok(w) => (false, format!("worst: {}", w.what)),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {:<42} {:>9.3}s  {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
