use fundet::determinants::{det_with, determinant};
use fundet::ermakov_bridge::{det_ratio_dirichlet_pq, det_ratio_periodic_pq};
use fundet::green::kernel;
use fundet::odesolve::{
    make_basis, make_basis_with, solve_ermakov, solve_homogeneous, BasisConvention, Direction,
    ErmakovBc, StepControl,
};
use fundet::oracle::nonpositive_count;
use fundet::profiles::{FrequencyProfile, Interval};
use fundet::quadrature::{integrate, Tolerance};
use fundet::BoundaryCondition;
use proptest::prelude::*;

fn modulated(omega: f64, eps: f64, nu: f64, t: f64) -> FrequencyProfile {
    FrequencyProfile::modulated(omega, eps, nu, Interval::new(0.0, t).unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn bc_strategy() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![
        Just(BoundaryCondition::Dirichlet),
        Just(BoundaryCondition::Periodic),
        Just(BoundaryCondition::Antiperiodic),
    ]
}

/// Profiles whose Dirichlet, periodic and antiperiodic operators stay away
/// from zero modes: `ωT` in a window where none of sin ωT, sin², cos² vanish.
fn profile_strategy() -> impl Strategy<Value = FrequencyProfile> {
    (0.6f64..1.3, 0.0f64..0.3, 0.5f64..6.0, 0.8f64..1.8)
        .prop_filter("away from zero modes", |(w, _, _, t)| {
            let x = w * t;
            x > 0.5 && x < 2.6
        })
        .prop_map(|(w, e, n, t)| modulated(w, e, n, t))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn basis_mixing_leaves_determinants_unchanged(
        p in profile_strategy(),
        m in prop::array::uniform4(-2.0f64..2.0),
        bc in bc_strategy(),
    ) {
        let mix = [[m[0], m[1]], [m[2], m[3]]];
        prop_assume!((m[0] * m[3] - m[1] * m[2]).abs() > 0.2);
        let b = make_basis(&p, 1.0, BasisConvention::Canonical).unwrap();
        let a = det_with(&b, bc, 1.0).unwrap().value;
        let c = det_with(&b.mixed(mix).unwrap(), bc, 1.0).unwrap().value;
        prop_assert!(rel(c, a) < 1e-9, "{a} vs {c}");
    }

    #[test]
    fn wronskian_is_constant(p in profile_strategy(), g in 0.0f64..=1.0) {
        for conv in [BasisConvention::Canonical, BasisConvention::ClassicalPath] {
            let b = make_basis(&p, g, conv).unwrap();
            prop_assert!(b.wronskian_drift(200) < 1e-9, "{:?}: {}", conv, b.wronskian_drift(200));
        }
    }

    #[test]
    fn superposition(
        p in profile_strategy(),
        a in -2.0f64..2.0, b in -2.0f64..2.0,
        x1 in -1.0f64..1.0, v1 in -1.0f64..1.0,
    ) {
        let (x2, v2) = (0.3, -0.7);
        let s1 = solve_homogeneous(&p, 1.0, (x1, v1 + 1.5), Direction::Forward).unwrap();
        let s2 = solve_homogeneous(&p, 1.0, (x2, v2), Direction::Forward).unwrap();
        let s = solve_homogeneous(&p, 1.0, (a * x1 + b * x2, a * (v1 + 1.5) + b * v2), Direction::Forward).unwrap();
        for t in p.interval().grid(17) {
            let expected = a * s1.value(t) + b * s2.value(t);
            let scale = a.abs() * s1.value(t).abs() + b.abs() * s2.value(t).abs() + 1.0;
            prop_assert!((s.value(t) - expected).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn ermakov_phase_constraint(p in profile_strategy(), w0 in 0.5f64..2.5) {
        let s = solve_ermakov(&p, w0, ErmakovBc::Natural).unwrap();
        prop_assert!(s.constraint_residual(200) < 1e-8);
    }

    #[test]
    fn pq_ratios_do_not_depend_on_omega0(p in profile_strategy()) {
        let base_d = det_ratio_dirichlet_pq(&solve_ermakov(&p, 1.0, ErmakovBc::Natural).unwrap()).unwrap();
        let per = solve_ermakov(&p, 1.0, ErmakovBc::Periodic).unwrap();
        let base_p = det_ratio_periodic_pq(&per, BoundaryCondition::Periodic, 1.0).unwrap();
        for w0 in [0.7, 2.3] {
            let d = det_ratio_dirichlet_pq(&solve_ermakov(&p, w0, ErmakovBc::Natural).unwrap()).unwrap();
            prop_assert!(rel(d, base_d) < 1e-7);
            let s = solve_ermakov(&p, w0, ErmakovBc::Periodic).unwrap();
            let r = det_ratio_periodic_pq(&s, BoundaryCondition::Periodic, 1.0).unwrap();
            prop_assert!(rel(r, base_p) < 1e-7);
        }
    }

    #[test]
    fn green_symmetry_and_boundary_conditions(p in profile_strategy(), bc in bc_strategy(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let iv = p.interval();
        let (t, s) = (iv.t_a + u * iv.length(), iv.t_a + v * iv.length());
        let k = kernel(&make_basis(&p, 1.0, BasisConvention::Canonical).unwrap(), bc).unwrap();
        prop_assert!((k.evaluate(t, s) - k.evaluate(s, t)).abs() < 1e-9);
        prop_assert!((k.derivative_jump(s) + 1.0).abs() < 1e-6);
        match bc.twist() {
            None => {
                prop_assert!(k.evaluate(iv.t_a, s).abs() < 1e-9);
                prop_assert!(k.evaluate(t, iv.t_b).abs() < 1e-9);
            }
            Some(sign) => {
                prop_assert!((k.evaluate(iv.t_b, s) - sign * k.evaluate(iv.t_a, s)).abs() < 1e-7);
                prop_assert!((k.evaluate_dt(iv.t_b, s) - sign * k.evaluate_dt(iv.t_a, s)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn nonpositive_count_grows_with_coupling(w in 0.5f64..8.0, t in 0.5f64..3.0, bc in bc_strategy()) {
        let p = modulated(w, 0.3, 2.0, t);
        let counts: Vec<usize> = (0..=10)
            .map(|k| nonpositive_count(&p, bc, k as f64 / 10.0, 200).unwrap())
            .collect();
        prop_assert!(counts.windows(2).all(|c| c[0] <= c[1]), "{counts:?}");
    }
}

/// `d/dt [η̇ ∂_g ξ − η ∂_g ξ̇] = Ω² ξ η` along the coupling.
#[test]
fn coupling_derivative_identity() {
    let p = modulated(1.0, 0.2, 3.0, 2.0);
    let (g, dg, dt) = (0.6, 1e-5, 1e-4);
    let mid = make_basis(&p, g, BasisConvention::Canonical).unwrap();
    let mesh = StepControl::Mesh(mid.mesh().to_vec().into());
    let up = make_basis_with(&p, g + dg, BasisConvention::Canonical, &mesh).unwrap();
    let down = make_basis_with(&p, g - dg, BasisConvention::Canonical, &mesh).unwrap();
    let x = |t: f64| {
        let (e, de) = mid.eta.eval(t);
        let (xu, dxu) = up.xi.eval(t);
        let (xd, dxd) = down.xi.eval(t);
        de * (xu - xd) / (2.0 * dg) - e * (dxu - dxd) / (2.0 * dg)
    };
    for t in [0.3, 0.9, 1.5] {
        let lhs = (x(t + dt) - x(t - dt)) / (2.0 * dt);
        let rhs = p.omega_sq(t) * mid.xi.value(t) * mid.eta.value(t);
        assert!(rel(lhs, rhs) < 1e-5, "t = {t}: {lhs} vs {rhs}");
    }
}

/// `∫ G(t,s) (K φ)(s) ds = φ(t)` for `φ` vanishing at both ends.
#[test]
fn dirichlet_kernel_inverts_operator() {
    let p = modulated(1.2, 0.25, 4.0, 1.5);
    let iv = p.interval();
    let k = kernel(&make_basis(&p, 1.0, BasisConvention::Canonical).unwrap(), BoundaryCondition::Dirichlet).unwrap();
    let c = std::f64::consts::PI / iv.length();
    let phi = move |t: f64| (c * t).sin() * (1.0 + 0.3 * t);
    // −φ̈ − Ω²φ
    let k_phi = |t: f64| {
        let (s, co) = (c * t).sin_cos();
        let d2 = -c * c * s * (1.0 + 0.3 * t) + 2.0 * 0.3 * c * co;
        -d2 - p.omega_sq(t) * phi(t)
    };
    let tol = Tolerance { abs: 1e-12, rel: 1e-10 };
    for t in [0.2, 0.7, 1.1] {
        let left = integrate(|s| k.evaluate(t, s) * k_phi(s), iv.t_a, t, tol).unwrap();
        let right = integrate(|s| k.evaluate(t, s) * k_phi(s), t, iv.t_b, tol).unwrap();
        assert!((left + right - phi(t)).abs() < 1e-4, "t = {t}");
    }
}

#[test]
fn determinant_sign_flips_past_focal_point() {
    let iv = |t: f64| Interval::new(0.0, t).unwrap();
    let before = determinant(&FrequencyProfile::constant(1.0, iv(3.0)).unwrap(), BoundaryCondition::Dirichlet, 1.0).unwrap();
    let after = determinant(&FrequencyProfile::constant(1.0, iv(3.3)).unwrap(), BoundaryCondition::Dirichlet, 1.0).unwrap();
    assert!(before.value > 0.0 && after.value < 0.0);
}
