use magbound::corner::*;
use magbound::degennes::*;
use magbound::quad::{gauss20, uniform_breaks};
use num_complex::Complex64;
use proptest::prelude::*;

fn trial_with(config: CornerTrialConfig) -> CornerTrial {
    let (c, g) = reference();
    assemble_trial_state(&config, c, g).unwrap()
}

fn trial(delta: f64) -> CornerTrial {
    trial_with(CornerTrialConfig::with_defaults(delta))
}

fn edge_mode(ell: f64, length: f64) -> EdgeMode {
    let (c, g) = reference();
    EdgeMode {
        profile: CutGroundState::new(GroundState::new(g), CutoffProfile::new(ell, "mollifier").unwrap()),
        along: CutoffProfile::new(length, "mollifier").unwrap(),
        xi: c.xi0,
    }
}

/// The transition-sector formula with the linear profile, evaluated without
/// clamping so difference stencils near the sector edges stay smooth.
fn sector_formula(t: &CornerTrial, x: [f64; 2]) -> Complex64 {
    let (d, g, xi0) = (t.delta(), t.gamma(), t.xi0);
    let r = x[0].hypot(x[1]);
    let theta = x[1].atan2(x[0]);
    let s = 2.0 * (theta - 0.5 * (std::f64::consts::PI - d)) / g;
    let a = xi0 * (0.5 * (d + g)).sin();
    let b = 0.25 * d.sin() * g.cos();
    let phase = b * r * r - s * (a * r - b * r * r);
    Complex64::from_polar(t.profile.value(r * theta.sin()), phase)
}

/// Magnetic energy density from five-point differences of the sector formula.
/// The step shrinks near the corner, where the phase is only Lipschitz.
fn difference_density(t: &CornerTrial, x: [f64; 2]) -> f64 {
    let h = (0.05 * x[0].hypot(x[1])).min(1e-3);
    let d = |e: [f64; 2]| {
        let at = |k: f64| sector_formula(t, [x[0] + k * h * e[0], x[1] + k * h * e[1]]);
        (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
    };
    let (u, dx, dy) = (sector_formula(t, x), d([1.0, 0.0]), d([0.0, 1.0]));
    let i = Complex64::i();
    (-i * dx - x[1] * u).norm_sqr() + dy.norm_sqr()
}

/// Sector energy by a plain `(r, theta)` product rule over the difference
/// density.
fn sector_oracle(t: &CornerTrial) -> f64 {
    let (lo, _) = t.geometry.transition_angles();
    let rule = gauss20();
    let support = t.profile.support();
    rule.composite(&uniform_breaks(lo + 1e-12, t.geometry.bisector() - 1e-12, 0.01), 1, |theta| {
        let outer = support / theta.sin();
        let (c, s) = (theta.cos(), theta.sin());
        rule.composite(&uniform_breaks(0.0, outer, 0.25), 1, |r| r * difference_density(t, [r * c, r * s]))
    })
}

#[test]
fn reflected_edge_mode_has_equal_energy() {
    let mode = edge_mode(10.0, 12.0);
    for &d in &[0.05, 0.1, 0.3] {
        let tz = Trapezoid { delta: d, opening: 0.5 * (d + d.sqrt()), height: 10.0, length: 12.0 };
        let plus = tz.energy_cartesian(&mode, 0.5);
        let minus = tz.energy_reflected_polar(&reflected_partner(&mode, d), 0.5);
        assert!((plus - minus).abs() < 1e-10 * plus, "delta {d}: {plus} vs {minus}");
    }
}

#[test]
fn flat_reflection_mirrors_the_vertical_axis() {
    let mode = edge_mode(8.0, 10.0);
    let p = reflected_partner(&mode, 0.0);
    for x in [[-1.0, 0.5], [-3.2, 2.0]] {
        let expect = mode.eval([-x[0], x[1]]).0.conj();
        let gauge = Complex64::from_polar(1.0, -magbound::corner::geometry::matching_phase(0.0, x));
        assert!((p.eval(x).0 - gauge * expect).norm() < 1e-15);
    }
    let tz = Trapezoid { delta: 0.0, opening: 0.05, height: 8.0, length: 10.0 };
    let (a, b) = (tz.energy_cartesian(&mode, 0.5), tz.energy_reflected_polar(&p, 0.5));
    assert!((a - b).abs() < 1e-10 * a);
}

#[test]
fn sector_quadrature_matches_difference_oracle() {
    let t = trial(1e-2);
    let e = sector_energy(&t).unwrap();
    let oracle = sector_oracle(&t);
    assert!((e.integrals.energy - oracle).abs() < 1e-8 * oracle, "{} vs {oracle}", e.integrals.energy);
}

#[test]
fn sector_energy_within_cubic_envelope_of_model() {
    for &d in &[1e-3, 1e-2] {
        let t = trial(d);
        let e = sector_energy(&t).unwrap();
        let g = t.gamma();
        assert!((e.integrals.energy - e.model).abs() <= 5.0 * g.powi(3), "delta {d}");
        assert!(e.refinement_gap < 1e-10);
    }
}

#[test]
fn sector_model_expansion_remainder_scales() {
    // delta / gamma^2 fixed: the remainder divided by delta^2 / gamma stays bounded
    // and tends to a constant.
    let mut scaled = Vec::new();
    for &d in &[1e-3, 4e-3, 1.6e-2] {
        let mut cfg = CornerTrialConfig::with_defaults(d);
        cfg.gamma = (2.0 * d).sqrt();
        let t = trial_with(cfg);
        let p = ProfileIntegrals::of(&t);
        let g = t.gamma();
        let model = 0.5 * g * magbound::corner::energy::sector_model_integral(&t);
        let expansion = 0.5 * g * p.weighted_energy + 0.5 * d * p.mixed_moment;
        scaled.push((model - expansion) / (d * d / g));
    }
    for w in scaled.windows(2) {
        assert!((w[0] - w[1]).abs() < 0.05 * w[0].abs(), "{scaled:?}");
    }
}

#[test]
fn flat_limit_of_sector_model() {
    let mut cfg = CornerTrialConfig::with_defaults(1e-2);
    cfg.delta = 1e-9;
    let t = trial_with(cfg);
    let p = ProfileIntegrals::of(&t);
    let model = magbound::corner::energy::sector_model_integral(&t);
    assert!((model - p.weighted_energy).abs() < 1e-7);
}

#[test]
fn mollified_transition_changes_energy_at_third_order() {
    let lin = trial(1e-2);
    let mut cfg = CornerTrialConfig::with_defaults(1e-2);
    cfg.chi = "mollified".into();
    let smooth = trial_with(cfg);
    let a = sector_energy(&lin).unwrap().integrals.energy;
    let b = sector_energy(&smooth).unwrap().integrals.energy;
    assert!(b > a);
    assert!(b - a < lin.gamma().powi(3) * 5.0);
}

#[test]
fn wedge_energy_scales_with_opening() {
    let one = trial_with(CornerTrialConfig { gamma: 0.04, ..CornerTrialConfig::with_defaults(1e-2) });
    let two = trial_with(CornerTrialConfig { gamma: 0.09, ..CornerTrialConfig::with_defaults(1e-2) });
    let eta = exponential(1.0, 0.01).unwrap();
    let a = trapezoid_energy(&one, eta.as_ref()).unwrap();
    let b = trapezoid_energy(&two, eta.as_ref()).unwrap();
    // Openings (delta + gamma) are 0.05 and 0.1.
    let ratio = b.wedge / a.wedge;
    assert!((ratio - 2.0).abs() < 0.04, "{ratio}");
    assert!((a.wedge - a.wedge_closed_form).abs() < 1e-10 * a.wedge);
}

#[test]
fn long_plateau_rectangle_approaches_level() {
    let (c, _) = reference();
    let t = trial(1e-3);
    let length = 200.0;
    let eta = Plateau { length, ramp: 1.0 };
    let e = trapezoid_energy(&t, &eta).unwrap();
    assert!((e.rectangle / eta.norm_sq() - c.theta0).abs() < 1e-10);
}

#[test]
fn trapezoid_bound_with_equal_angles() {
    let mut cfg = CornerTrialConfig::with_defaults(1e-2);
    cfg.gamma = 1e-2;
    cfg.ell = 10.0;
    let t = trial_with(cfg);
    let (c, _) = reference();
    let eta = exponential(1.0, 0.05).unwrap();
    let e = trapezoid_energy(&t, eta.as_ref()).unwrap();
    let p = ProfileIntegrals::of(&t);
    let bound = c.theta0 * eta.norm_sq() - 0.5 * (t.delta() + t.gamma()) * p.weighted_energy;
    assert!(e.energy - bound <= 10.0 * t.gamma().powi(3), "{} vs {bound}", e.energy);
}

#[test]
fn j_excess_is_c1() {
    let (c, _) = reference();
    let b = corner_bound_at(&CornerTrialConfig::with_defaults(1e-3), c, &reference().1).unwrap();
    assert!((b.j_excess - c.c1).abs() < 1e-10);
    assert!((b.norm_sq - b.norm_model).abs() < 1e-6);
}

#[test]
fn optimal_cutoff_bound_below_level() {
    let (c, g) = reference();
    let d = 1e-2;
    let b = corner_bound_at(&CornerTrialConfig::with_defaults(d), c, g).unwrap();
    assert!(b.quotient <= c.theta0 - 0.25 * c.c1 * c.c1 * d * d * 0.8, "gap {:e}", b.gap);
}

#[test]
fn plateau_cutoff_gives_only_first_order_window() {
    let (c, g) = reference();
    let d = 1e-2;
    let t = assemble_trial_state(&CornerTrialConfig::with_defaults(d), c, g).unwrap();
    for length in [20.0, 80.0] {
        let eta = Plateau { length, ramp: 1.0 };
        let b = corner_upper_bound(&t, &eta).unwrap();
        assert!(b.quotient >= c.theta0 - c.c1 * d / length);
    }
}

#[test]
fn mirror_sector_energy_differs_at_second_order() {
    for &d in &[1e-3, 1e-2, 3e-2] {
        let t = trial(d);
        let a = sector_energy(&t).unwrap().integrals.energy;
        let b = mirror_sector_energy(&t).unwrap().integrals.energy;
        assert!((a - b).abs() <= 0.5 * d * d, "delta {d}: {:e}", (a - b).abs());
    }
}

/// `eta Psi` on the part of the positive trapezoid beyond the plateau.
struct CutEdge<'a> {
    mode: &'a EdgeMode,
    eta: &'a dyn Longitudinal,
}

impl Field for CutEdge<'_> {
    fn eval(&self, x: [f64; 2]) -> (Complex64, [Complex64; 2]) {
        let (u, g) = self.mode.eval(x);
        let (e, de) = (self.eta.value(x[0]), self.eta.slope(x[0]));
        (e * u, [de * u + e * g[0], e * g[1]])
    }
}

#[test]
fn integration_by_parts_identity_for_exponential_cutoff() {
    let mode = edge_mode(6.0, 1e9);
    let eta = exponential(1.0, 0.4).unwrap();
    let cut = CutEdge { mode: &mode, eta: eta.as_ref() };
    let end = eta.reach() + 20.0;
    let rule = gauss20();
    let area = |f: &dyn Fn([f64; 2]) -> f64| {
        rule.composite(&uniform_breaks(0.0, 6.0, 0.25), 1, |y| rule.composite(&uniform_breaks(1.0, end, 0.5), 1, |x| f([x, y])))
    };
    let lhs = area(&|x| magnetic_density(&cut, x));
    let weighted = area(&|x| eta.value(x[0]).powi(2) * magnetic_density(&mode, x));
    let norm = rule.composite(&uniform_breaks(0.0, 6.0, 0.25), 1, |y| mode.profile.value(y).powi(2));
    let tail_slope = eta.slope_norm_sq();
    assert!((lhs - weighted - norm * tail_slope).abs() < 1e-9 * lhs, "{lhs} vs {}", weighted + norm * tail_slope);
}

#[test]
fn exponential_functional_matches_quadrature() {
    for &(d, eps) in &[(0.1, 1.0), (0.01, 1.0), (0.05, 0.5), (0.2, 2.0), (1e-3, 3.0)] {
        let o = optimize_eta(d / 0.25, eps, 0.25).unwrap();
        for rate in [o.best_rate, o.simple_rate] {
            let eta = Exponential { epsilon: eps, rate };
            let breaks = magbound::quad::with_splits(uniform_breaks(0.0, eta.reach() * 3.0, 0.5 / rate.max(1e-3)), &[eps]);
            let n = gauss20().composite(&breaks, 1, |x| eta.value(x).powi(2));
            let s = gauss20().composite(&breaks, 1, |x| eta.slope(x).powi(2));
            let quad = (s - 0.5 * d * 1.0) / n;
            let closed = exponential_functional(rate, eps, d);
            assert!((quad - closed).abs() < 1e-12, "d {d} eps {eps}: {quad} vs {closed}");
        }
    }
    let o = optimize_eta(0.1 / 0.25, 1.0, 0.25).unwrap();
    assert!((o.best_rate - 0.5 * (-1.0 + 1.2f64.sqrt())).abs() < 1e-15);
}

#[test]
fn simple_rate_gives_quarter_square() {
    let (c, _) = reference();
    let o = optimize_eta(1e-2, 1.0, c.c1).unwrap();
    let target = -0.25 * (c.c1 * 1e-2).powi(2);
    assert!((o.simple_value - target).abs() < 0.05 * target.abs());
    assert!((o.simple_norm_sq - 1.0 - 1.0 / (c.c1 * 1e-2)).abs() < 1e-9);
    let tiny = optimize_eta(1e-14, 1.0, c.c1).unwrap();
    assert!(tiny.best_rate < 1e-14 && tiny.best_value.abs() < 1e-28);
}

#[test]
fn fit_recovers_synthetic_coefficients() {
    let (theta0, k) = (0.59, 0.016);
    let deltas = [1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 3e-2];
    let exact: Vec<_> = deltas.iter().map(|&d| (d, theta0 - k * d * d)).collect();
    let f = fit_delta_squared_coefficient(&exact, theta0).unwrap();
    // Only the rounding of theta0 - k delta^2 separates the fit from k.
    assert!((f.coefficient - k).abs() < 1e-7 * k);
    let dirty: Vec<_> = deltas.iter().map(|&d| (d, theta0 - k * d * d - d.powf(2.5))).collect();
    let f = fit_delta_squared_coefficient(&dirty, theta0).unwrap();
    assert!((f.coefficient - k).abs() < 0.01 * k);
}

#[test]
fn empty_sweep_is_rejected() {
    let (c, g) = reference();
    assert!(corner_sweep(&[], c, g).is_err());
}

/// Linear profile plus an odd cubic bump vanishing at the ends.
#[derive(Debug)]
struct Bent(f64);

impl Transition for Bent {
    fn name(&self) -> &'static str {
        "bent"
    }
    fn value(&self, u: f64) -> f64 {
        if u.abs() >= 1.0 {
            u.signum()
        } else {
            u + self.0 * u * (1.0 - u * u)
        }
    }
    fn slope(&self, u: f64) -> f64 {
        if u.abs() >= 1.0 {
            0.0
        } else {
            1.0 + self.0 * (1.0 - 3.0 * u * u)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn branches_glue(delta in 1e-3f64..0.2, spread in 1.2f64..2.5) {
        let mut cfg = CornerTrialConfig::with_defaults(delta);
        cfg.gamma = (delta * spread).min(0.6);
        cfg.ell = 0.9 / (0.5 * (cfg.delta + cfg.gamma)).tan().max(0.1);
        cfg.ell = cfg.ell.min(15.0);
        let t = trial_with(cfg);
        prop_assert!(t.gluing_mismatch(40) < 1e-12);
        let x = [0.3, 1.1];
        prop_assert!((t.value(x).norm() - t.value(t.geometry.reflect(x)).norm()).abs() < 1e-13);
    }

    #[test]
    fn linear_transition_minimizes_sector_energy(bend in prop_oneof![-0.3f64..-0.05, 0.05f64..0.3]) {
        let base = trial(1e-2);
        let mut bent = trial(1e-2);
        bent.chi = Box::new(Bent(bend));
        let a = sector_energy(&base).unwrap().integrals.energy;
        let b = sector_energy(&bent).unwrap().integrals.energy;
        prop_assert!(b > a, "bend {bend}: {b} <= {a}");
    }

    #[test]
    fn random_fields_have_mirror_energy(cx in 1.0f64..3.0, cy in 0.6f64..1.6, kx in -2.0f64..2.0, ky in -2.0f64..2.0, re in -1.0f64..1.0) {
        let field = BumpField { bumps: vec![
            Bump { center: [cx, cy], radius: 0.5, amplitude: Complex64::new(re, 1.0), wave: [kx, ky] },
            Bump { center: [cx + 0.6, cy * 0.7], radius: 0.4, amplitude: Complex64::new(0.5, -re), wave: [ky, kx] },
        ]};
        let tz = Trapezoid { delta: 0.3, opening: 0.4, height: 2.5, length: 5.0 };
        let plus = tz.energy_cartesian(&field, 0.05);
        let minus = tz.energy_reflected_polar(&reflected_partner(&field, 0.3), 0.05);
        prop_assert!((plus - minus).abs() < 1e-9 * plus, "{plus} vs {minus}");
    }
}
