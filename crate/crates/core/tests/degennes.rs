use magbound::degennes::constants::weighted_energy_with_order;
use magbound::degennes::*;
use magbound::Error;
use proptest::prelude::*;

/// Ground level of the Neumann oscillator by shooting: integrate
/// `u'' = ((t - xi)^2 - mu) u` from `u(0) = 1, u'(0) = 0` with RK4 and bisect
/// on the sign of `u` at the far end.
fn shooting_level(xi: f64, lo: f64, hi: f64) -> f64 {
    let end = 7.0;
    let step = 5e-4;
    let overshoots = |mu: f64| {
        let rhs = |t: f64, u: f64| ((t - xi).powi(2) - mu) * u;
        let (mut t, mut u, mut v) = (0.0, 1.0, 0.0);
        while t < end {
            let k1u = v;
            let k1v = rhs(t, u);
            let k2u = v + 0.5 * step * k1v;
            let k2v = rhs(t + 0.5 * step, u + 0.5 * step * k1u);
            let k3u = v + 0.5 * step * k2v;
            let k3v = rhs(t + 0.5 * step, u + 0.5 * step * k2u);
            let k4u = v + step * k3v;
            let k4v = rhs(t + step, u + step * k3u);
            u += step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += step;
            if u < 0.0 {
                return true;
            }
        }
        false
    };
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if overshoots(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn level_at_zero_is_harmonic() {
    let s = solve_h_xi(0.0, &HalfLineGrid::reference()).unwrap();
    assert!((s.mu - 1.0).abs() < 1e-6);
}

#[test]
fn level_matches_shooting_oracle() {
    let s = solve_h_xi(0.5, &HalfLineGrid::new(20.0, 2001, "fd4").unwrap()).unwrap();
    let oracle = shooting_level(0.5, 0.5, 1.0);
    assert!((s.mu - oracle).abs() < 1e-7, "grid {} vs shooting {}", s.mu, oracle);
}

#[test]
fn minimum_level_near_quoted_value() {
    let (c, sol) = reference();
    assert!((c.theta0 - 0.59).abs() < 5e-3);
    assert!((sol.mu - c.theta0).abs() == 0.0);
    assert!(0.5 < c.theta0 && c.theta0 < 1.0);
    assert!((c.xi0 * c.xi0 - c.theta0).abs() < 1e-8);
    assert!(c.mu_second > 0.0);
    assert!(c.mu_first.abs() < 1e-6);
    assert!((c.c1 - sol.eigenfunction[0].powi(2) / 3.0).abs() == 0.0);
}

#[test]
fn minimizer_is_independent_of_the_shooting_oracle() {
    let (c, _) = reference();
    let oracle = shooting_level(c.xi0, 0.5, 0.7);
    assert!((c.theta0 - oracle).abs() < 1e-8);
}

#[test]
fn moment_identities() {
    let (c, sol) = reference();
    assert!(moment(sol, 1, None).abs() < 1e-8);
    assert!((moment(sol, 3, None) - c.c1 / 2.0).abs() < 1e-6 * c.c1);
    let w = [0.0, -2.0 * c.xi0, 1.0];
    assert!((moment(sol, 1, Some(&w)) - c.c1 / 2.0).abs() < 1e-6 * c.c1);
    assert!((weighted_energy_identity(sol) - 1.5 * c.c1).abs() < 1e-6 * c.c1);
}

#[test]
fn weighted_identity_agrees_between_difference_orders() {
    let (_, sol) = reference();
    let second = weighted_energy_with_order(sol, 2);
    let fourth = weighted_energy_with_order(sol, 4);
    assert!((second - fourth).abs() < 1e-6, "{second} vs {fourth}");
}

#[test]
fn weighted_identity_is_raw_away_from_minimizer() {
    let s = solve_h_xi(1.1, &HalfLineGrid::reference()).unwrap();
    let (c, _) = reference();
    assert!((weighted_energy_identity(&s) - 1.5 * c.c1).abs() > 1e-3);
}

#[test]
fn refinement_changes_minimum_by_little() {
    let (c, _) = reference();
    let fine = find_theta0(&HalfLineGrid::new(20.0, 8001, "fd4").unwrap(), DEFAULT_BRACKET).unwrap();
    assert!((fine.theta0 - c.theta0).abs() < 1e-8);
}

#[test]
fn cut_profiles_converge() {
    let (c, sol) = reference();
    let half = CutoffProfile::new(sol.grid.t_max / 2.0, "mollifier").unwrap();
    let p = build_f_ell(sol, &half).unwrap();
    assert!((p.norm_sq - 1.0).abs() < 1e-10);
    assert!((p.energy - c.theta0).abs() < 1e-10);
    assert!((p.weighted_energy - 1.5 * c.c1).abs() < 1e-6 * c.c1);
    assert!((p.weighted_moment - 0.5 * c.c1).abs() < 1e-6 * c.c1);
    for name in cutoffs().names() {
        let short = build_f_ell(sol, &CutoffProfile::new(5.0, name).unwrap()).unwrap();
        let long = build_f_ell(sol, &CutoffProfile::new(10.0, name).unwrap()).unwrap();
        let (es, el) = ((short.energy - c.theta0).abs(), (long.energy - c.theta0).abs());
        assert!(el * 1e3 < es, "{name}: {es:e} -> {el:e}");
    }
}

#[test]
fn tail_decay_on_reference_and_short_grids() {
    let (_, sol) = reference();
    let d = verify_tail_decay(sol);
    assert!(d.tail_mass < 1e-12);
    assert!(!d.truncation_warning);
    assert!(d.rate_increasing);
    assert!(d.rate_at(12.0).unwrap() > d.rate_at(6.0).unwrap());

    let short = HalfLineGrid::unchecked(8.0, 801, "fd4").unwrap();
    assert!(matches!(solve_h_xi(0.77, &short), Err(Error::Truncation { .. })));
    let s = solve_untruncated(0.77, &short).unwrap();
    assert!(verify_tail_decay(&s).truncation_warning);
}

#[test]
fn schemes_agree_at_their_orders() {
    let (c, _) = reference();
    let fd2 = find_theta0(&HalfLineGrid::new(20.0, 4001, "fd2").unwrap(), DEFAULT_BRACKET).unwrap();
    assert!((fd2.theta0 - c.theta0).abs() < 1e-5);
    assert!((fd2.c1 - c.c1).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn level_bounded_below_by_minimum(xi in 0.0f64..2.5) {
        let (c, _) = reference();
        let s = solve_h_xi(xi, &HalfLineGrid::new(20.0, 1001, "fd4").unwrap()).unwrap();
        prop_assert!(s.mu >= c.theta0 - 1e-8);
        prop_assert!(s.mu <= 1.0 + 1e-8);
    }

    #[test]
    fn ground_state_normalized_and_positive(xi in 0.0f64..2.0) {
        let s = solve_h_xi(xi, &HalfLineGrid::new(20.0, 801, "fd4").unwrap()).unwrap();
        prop_assert!((s.integrate_squared(|_| 1.0) - 1.0).abs() < 1e-12);
        let n = s.eigenfunction.len();
        prop_assert!(s.eigenfunction[..n - 1].iter().all(|v| *v > 0.0));
        let d = s.scheme_derivative();
        prop_assert!(d[0].abs() < 1e-12);
    }

    #[test]
    fn cutoffs_are_plateaus(x in -2.0f64..2.0) {
        for name in cutoffs().names() {
            let z = cutoffs().build(name, &Default::default()).unwrap();
            let v = z.value(x);
            prop_assert!((0.0..=1.0).contains(&v));
            if x.abs() <= 0.5 { prop_assert_eq!(v, 1.0); }
            if x.abs() >= 1.0 { prop_assert_eq!(v, 0.0); }
            prop_assert_eq!(v, z.value(-x));
        }
    }

    #[test]
    fn solves_are_deterministic(xi in 0.3f64..1.3) {
        let g = HalfLineGrid::new(16.0, 401, "fd4").unwrap();
        let a = solve_h_xi(xi, &g).unwrap();
        let b = solve_h_xi(xi, &g).unwrap();
        prop_assert_eq!(a, b);
    }
}
