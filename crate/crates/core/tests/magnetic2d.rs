use std::sync::Arc;

use magbound::corner::{corner_bound_at, CornerTrialConfig};
use magbound::curved::{curved_upper_bound, CurvatureProfile, CurvedBoundConfig};
use magbound::degennes::{reference, solve_h_xi, HalfLineGrid};
use magbound::error::Error;
use magbound::magnetic2d::*;
use magbound::registry::Args;
use num_complex::Complex64;
use proptest::prelude::*;

fn theta0() -> f64 {
    reference().0.theta0
}

fn corner(delta: f64) -> Arc<dyn DomainKind> {
    Arc::new(CornerKind { delta })
}

fn halfplane() -> Arc<dyn DomainKind> {
    Arc::from(domain_kinds().build("halfplane", &Args::new()).unwrap())
}

#[test]
fn fiber_matches_half_line_oscillator() {
    let grid = HalfLineGrid::reference();
    for xi in [0.4, reference().0.xi0, 1.3] {
        let exact = solve_h_xi(xi, &grid).unwrap().mu;
        let fiber = fiber_eigenvalue(xi, 1e-4, 2.5e-4, 10.0).unwrap();
        assert!((fiber - exact).abs() < 1e-6, "xi = {xi}: {fiber} vs {exact}");
    }
}

#[test]
fn bloch_waves_reduce_to_the_fiber() {
    let (h, depth, xi) = (0.1, 3.0, 0.83);
    let dom = TruncatedDomain::new(halfplane(), 2.0, depth, h).unwrap();
    let op = assemble(&dom, &Gauge::default()).unwrap();
    let nt = (depth / h).round() as usize;
    let u: Vec<f64> = (0..nt).map(|j| (-(j as f64 * h - 0.7).powi(2)).exp() * (1.0 + 0.1 * j as f64)).collect();
    let psi: Vec<Complex64> = op
        .unknowns
        .iter()
        .map(|&node| {
            let [s, t] = dom.mesh.coords[node];
            Complex64::from_polar(u[(t / h).round() as usize], xi * s)
        })
        .collect();
    let k_psi = op.matvec(&psi);
    let (kf, _) = fiber_pencil(xi, h, h, nt);
    let ku = kf.matvec(&u);
    let mut checked = 0;
    for (i, &node) in op.unknowns.iter().enumerate() {
        let [s, t] = dom.mesh.coords[node];
        // Columns next to the cut see the Dirichlet neighbour.
        if s.abs() > 2.0 - 1.5 * h {
            continue;
        }
        let expected = Complex64::from_polar(h, xi * s) * ku[(t / h).round() as usize];
        assert!((k_psi[i] - expected).norm() < 1e-12, "{:?} vs {:?}", k_psi[i], expected);
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn fiber_infimum_approaches_theta0() {
    let t0 = theta0();
    let (xi1, coarse) = discrete_threshold(0.1, 0.1, 8.0).unwrap();
    let (_, fine) = discrete_threshold(0.05, 0.05, 8.0).unwrap();
    assert!((xi1 - reference().0.xi0).abs() < 1e-2);
    assert!((fine - t0).abs() < 2e-4, "{fine}");
    // Second-order scheme: halving h divides the error by about four.
    let ratio = (coarse - t0) / (fine - t0);
    assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
}

#[test]
fn constant_function_without_field_has_zero_energy() {
    let mut dom = TruncatedDomain::new(corner(0.3), 2.0, 1.5, 0.1).unwrap();
    dom.mesh.tags.iter_mut().for_each(|t| {
        if *t == BoundaryTag::Artificial {
            *t = BoundaryTag::Physical;
        }
    });
    let op = assemble(&dom, &Gauge::zero()).unwrap();
    let ones = vec![Complex64::new(1.0, 0.0); op.dimension];
    assert!(op.rayleigh(&ones).abs() < 1e-13);
    let rep = lowest_eigenvalues(&op, 1, -0.5).unwrap();
    assert!(rep.lowest().abs() < 1e-12, "{}", rep.lowest());
}

#[test]
fn operator_is_exactly_hermitian() {
    for kind in [corner(0.5), halfplane()] {
        let dom = TruncatedDomain::new(kind, 4.0, 3.0, 0.1).unwrap();
        assert!(assemble(&dom, &Gauge::default()).unwrap().is_hermitian());
    }
}

#[test]
fn inconsistent_tags_are_rejected() {
    let mut dom = TruncatedDomain::new(corner(0.3), 2.0, 1.5, 0.1).unwrap();
    let first_physical = dom.mesh.tags.iter().position(|t| *t == BoundaryTag::Physical).unwrap();
    dom.mesh.tags[first_physical] = BoundaryTag::Interior;
    assert!(matches!(assemble(&dom, &Gauge::default()), Err(Error::Assembly(_))));
}

#[test]
fn corner_has_a_bound_state() {
    let rep = solve_kind(&corner(0.5), 30.0, 0.04, 1).unwrap();
    assert!(rep.lowest() < theta0() - 1e-3, "{}", rep.lowest());
    assert!(rep.residuals[0] < RESIDUAL_LIMIT);
}

#[test]
fn truncation_error_decays_with_radius() {
    let fit = domain_truncation_study(&corner(0.5), &[15.0, 22.0, 30.0], 0.1).unwrap();
    let l = &fit.lambda;
    assert!((l[2] - l[1]).abs() < (l[1] - l[0]).abs(), "{l:?}");
    assert!(fit.rate.unwrap() > 0.0 && fit.error < (l[2] - l[1]).abs());
}

#[test]
fn flat_strip_has_no_bound_state() {
    let radii = [10.0, 20.0, 30.0];
    let lambda: Vec<f64> = radii.iter().map(|&r| solve_kind(&halfplane(), r, 0.1, 1).unwrap().lowest()).collect();
    let (_, threshold) = discrete_threshold(0.1, 0.1, DEFAULT_DEPTH).unwrap();
    assert!(lambda.windows(2).all(|w| w[1] < w[0]), "{lambda:?}");
    assert!(lambda.iter().all(|&l| l > threshold), "{lambda:?} vs {threshold}");
}

#[test]
fn zero_mean_curvature_binds_nothing_at_desk_scale() {
    let args = Args::new().with("delta", 0.1).with("mean", 1.0).with("width", 2.0).with("dipole", 1.0);
    let kind: Arc<dyn DomainKind> = Arc::from(domain_kinds().build("curved", &args).unwrap());
    let (_, threshold) = discrete_threshold(0.1, 0.1, DEFAULT_DEPTH).unwrap();
    let rep = solve_kind(&kind, 30.0, 0.1, 1).unwrap();
    assert!(rep.lowest() > threshold, "{} vs {threshold}", rep.lowest());
}

#[test]
fn flattening_corner_approaches_the_strip_from_below() {
    let (r, h) = (20.0, 0.1);
    let strip = solve_kind(&halfplane(), r, h, 1).unwrap().lowest();
    let lambda: Vec<f64> = [0.2, 0.1, 0.05, 0.01].iter().map(|&d| solve_kind(&corner(d), r, h, 1).unwrap().lowest()).collect();
    assert!(lambda.windows(2).all(|w| w[0] < w[1]), "{lambda:?}");
    assert!(lambda[3] < strip && strip - lambda[3] < 1e-3, "{lambda:?} {strip}");
}

#[test]
fn duplicate_runs_are_bit_identical() {
    let run = || serde_json::to_string(&solve_kind(&corner(0.4), 8.0, 0.1, 4).unwrap()).unwrap();
    assert_eq!(run(), run());
}

#[test]
fn corner_quasimode_dominates() {
    let (c, g) = reference();
    let bound = corner_bound_at(&CornerTrialConfig::with_defaults(0.1), c, g).unwrap();
    let rep = extrapolated_lowest(&corner(0.1), &[20.0, 40.0, 60.0], &[0.1], 1).unwrap();
    let verdict = verify_bound_consistency(&rep, &QuasiModeBound::from(&bound)).unwrap();
    assert!(verdict.pass && verdict.margin > 0.0, "{verdict:?}");
    // The same report pushed above the quotient must fail.
    let mut forged = rep.clone();
    forged.extrapolation = ExtrapolationRecord::default();
    forged.eigenvalues[0] = bound.quotient + 1e-3;
    let bad = verify_bound_consistency(&forged, &QuasiModeBound::from(&bound)).unwrap();
    assert!(!bad.pass && bad.margin < 0.0);
}

#[test]
fn curved_quasimode_dominates() {
    let (c, g) = reference();
    let delta = 0.05;
    let args = Args::new().with("delta", delta).with("mean", 1.0);
    let profile = CurvatureProfile::build("bump", &args).unwrap();
    let bound = curved_upper_bound(&profile, delta, &CurvedBoundConfig::default(), c, g).unwrap();
    let kind: Arc<dyn DomainKind> = Arc::from(domain_kinds().build("curved", &args).unwrap());
    let rep = extrapolated_lowest(&kind, &[60.0, 90.0, 120.0], &[0.1, 0.075], 1).unwrap();
    let verdict = verify_bound_consistency(&rep, &QuasiModeBound::try_from(&bound).unwrap()).unwrap();
    assert!(verdict.pass, "{verdict:?}");
}

#[test]
fn mismatched_geometry_is_refused() {
    let (c, g) = reference();
    let bound = corner_bound_at(&CornerTrialConfig::with_defaults(0.1), c, g).unwrap();
    let rep = solve_kind(&corner(0.2), 5.0, 0.1, 1).unwrap();
    assert!(matches!(verify_bound_consistency(&rep, &QuasiModeBound::from(&bound)), Err(Error::Config(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn gauge_shift_leaves_spectrum_unchanged(
        a in prop::collection::vec(-2.0f64..2.0, 3),
        p in prop::collection::vec(-1.5f64..1.5, 6),
        c in prop::collection::vec(0.0f64..6.3, 3),
    ) {
        let dom = TruncatedDomain::new(corner(0.5), 6.0, 4.0, 0.1).unwrap();
        let shift = WaveShift { terms: (0..3).map(|k| (a[k], [p[2 * k], p[2 * k + 1]], c[k])).collect() };
        let base = solve(&dom, &Gauge::default(), 4, DEFAULT_SHIFT).unwrap();
        let moved = solve(&dom, &Gauge::default().shifted(Arc::new(shift)), 4, DEFAULT_SHIFT).unwrap();
        prop_assert_eq!(base.eigenvalues.len(), moved.eigenvalues.len());
        for (x, y) in base.eigenvalues.iter().zip(&moved.eigenvalues) {
            prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
        }
    }

    #[test]
    fn form_is_nonnegative(seed in 0u64..1000, delta in 0.05f64..0.9) {
        let dom = TruncatedDomain::new(corner(delta), 3.0, 2.0, 0.1).unwrap();
        let op = assemble(&dom, &Gauge::default()).unwrap();
        let psi: Vec<Complex64> = (0..op.dimension)
            .map(|i| {
                let x = (i as f64 + seed as f64) * 0.618;
                Complex64::new(x.sin(), (1.7 * x).cos())
            })
            .collect();
        prop_assert!(op.rayleigh(&psi) >= 0.0);
        let rep = lowest_eigenvalues(&op, 2, -0.5).unwrap();
        prop_assert!(rep.eigenvalues.iter().all(|&l| l >= -1e-12));
    }
}
