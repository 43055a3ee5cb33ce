use std::sync::Arc;
use std::time::Instant;

use magbound::corner::{
    corner_bound_at, corner_sweep, exponential_functional, fit_delta_squared_coefficient, optimize_eta, reflected_partner,
    CornerTrialConfig, EdgeMode, Exponential, Longitudinal, Trapezoid,
};
use magbound::curved::{compute_a, curved_sweep, fit_curved_sweep, CurvatureProfile, CurvedBound, CurvedBoundConfig};
use magbound::degennes::{
    moment, reference, solve_h_xi, weighted_energy_identity, CutGroundState, CutoffProfile, GroundState, HalfLineGrid,
};
use magbound::magnetic2d::*;
use magbound::quad::{gauss20, uniform_breaks, with_splits};
use magbound::registry::Args;
use magbound::weak::{fit_convergence, weak_sweep, PotentialProfile, WeakCouplingConfig};
use magbound::{Error, Result};

use crate::bundle::{ConstantsRecord, ModuleFailure, ReportBundle, SpectrumRecord, Table, VerdictRecord};
use crate::config::{Command, Preset, RunConfig};

pub const BAND_RANGE: (f64, f64, usize) = (0.2, 1.6, 57);
pub const SYMMETRY_DELTAS: [f64; 3] = [0.05, 0.1, 0.3];
/// `(d, epsilon)` pairs for the closed form of the cutoff functional.
pub const CUTOFF_PAIRS: [(f64, f64); 5] = [(0.1, 1.0), (0.01, 1.0), (0.05, 0.5), (0.2, 2.0), (1e-3, 3.0)];
pub const CORNER_DELTAS: [f64; 6] = [1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 3e-2];
pub const CURVED_DELTAS: [f64; 6] = [1e-3, 2e-3, 3e-3, 5e-3, 7e-3, 1e-2];
pub const WEAK_DELTAS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
/// Corner openings for the 2D check, with the truncation radii used for each.
pub const CROSS_CHECK: [(f64, [f64; 3]); 2] = [(0.5, [15.0, 22.0, 30.0]), (0.3, [30.0, 45.0, 60.0])];
pub const MESH_STEPS: [f64; 3] = [0.1, 0.075, 0.05];
pub const DOMINANCE_DELTA: f64 = 0.1;
pub const DOMINANCE_RADII: [f64; 3] = [20.0, 40.0, 60.0];

const DEGENNES: &str = "degennes-core";
const CORNER: &str = "corner-quasimode";
const CURVED: &str = "curved-quasimode";
const WEAK: &str = "weak-coupling";
const TWO_D: &str = "magnetic-2d";

type StageFn<'a> = Box<dyn FnOnce(&mut ReportBundle) -> Result<()> + 'a>;

/// A named unit of work. `name` keys the timings, `module` tags failures.
pub struct Stage<'a> {
    pub module: &'static str,
    pub name: &'static str,
    run: StageFn<'a>,
}

fn stage<'a>(module: &'static str, name: &'static str, run: impl FnOnce(&mut ReportBundle) -> Result<()> + 'a) -> Stage<'a> {
    Stage { module, name, run: Box::new(run) }
}

/// Validates the config, then runs its stages in order. A failing stage stops
/// the run and marks the bundle partial; the error is kept with its module.
pub fn run(config: &RunConfig) -> Result<ReportBundle> {
    config.validate()?;
    let mut bundle = ReportBundle::new(config.clone());
    for s in stages(&config.command) {
        let start = Instant::now();
        let outcome = (s.run)(&mut bundle);
        bundle.timings.push((s.name.to_string(), start.elapsed().as_secs_f64()));
        if let Err(e) = outcome {
            bundle.partial = true;
            bundle.failure = Some(ModuleFailure { module: s.module.into(), error: e.to_string() });
            break;
        }
    }
    Ok(bundle)
}

pub fn stages(command: &Command) -> Vec<Stage<'_>> {
    match command {
        Command::Degennes { xi_min, xi_max, points } => {
            vec![stage(DEGENNES, "degennes", move |b| degennes(b, *xi_min, *xi_max, *points))]
        }
        Command::CornerBound { deltas } => vec![stage(CORNER, "corner-sweep", move |b| corner(b, deltas))],
        Command::CurvedBound { kappa, mean, width, path, deltas, rho, c_hat } => vec![stage(CURVED, "curved-sweep", move |b| {
            let mut args = Args::new().with("mean", *mean).with("width", *width);
            if let Some(p) = path {
                args = args.with_path(p.clone());
            }
            let profile = CurvatureProfile::build(kappa, &args)?;
            let config = CurvedBoundConfig { rho: *rho, c_hat: *c_hat, ..Default::default() };
            curved(b, "curved_sweep", &profile, deltas, &config)?;
            Ok(())
        })],
        Command::WeakCoupling { potential, mean, deltas, window, n } => vec![stage(WEAK, "weak-sweep", move |b| {
            let profile = PotentialProfile::build(potential, &Args::new().with("mean", *mean))?;
            weak(b, &profile, deltas, &WeakCouplingConfig { window: *window, n: *n })
        })],
        Command::Solve2d { kind, delta, radius, h, k, mean, width, field } => {
            vec![stage(TWO_D, "solve2d", move |b| solve2d(b, kind, *delta, *radius, *h, *k, *mean, *width, *field))]
        }
        Command::Reproduce { preset } => preset_stages(*preset),
    }
}

fn preset_stages(preset: Preset) -> Vec<Stage<'static>> {
    match preset {
        Preset::Theorem1 => vec![
            stage(DEGENNES, "degennes", |b| degennes(b, BAND_RANGE.0, BAND_RANGE.1, BAND_RANGE.2)),
            stage(CORNER, "symmetry", symmetry),
            stage(CORNER, "cutoff", cutoff),
            stage(CORNER, "corner-sweep", |b| corner(b, &CORNER_DELTAS)),
            stage(TWO_D, "cross-check", cross_check),
        ],
        Preset::Theorem2 => vec![
            stage(DEGENNES, "constants", |b| {
                constants(b);
                Ok(())
            }),
            stage(CURVED, "curved-sweep", curved_preset),
            stage(CURVED, "a-coefficient", a_coefficient),
        ],
        Preset::Appendix => vec![
            stage(DEGENNES, "constants", |b| {
                constants(b);
                Ok(())
            }),
            stage(WEAK, "weak-sweep", |b| {
                let profile = PotentialProfile::build("well", &Args::new().with("mean", -2.0))?;
                weak(b, &profile, &WEAK_DELTAS, &WeakCouplingConfig::default())
            }),
        ],
    }
}

fn some(xs: &[f64]) -> Vec<Option<f64>> {
    xs.iter().map(|&x| Some(x)).collect()
}

fn constants(b: &mut ReportBundle) {
    let (c, _) = reference();
    b.constants = Some(ConstantsRecord {
        module: DEGENNES.into(),
        config_hash: b.config_hash.clone(),
        theta0: c.theta0,
        xi0: c.xi0,
        c1: c.c1,
        mu_first: c.mu_first,
        mu_second: c.mu_second,
    });
}

fn degennes(b: &mut ReportBundle, xi_min: f64, xi_max: f64, points: usize) -> Result<()> {
    let (c, sol) = reference();
    constants(b);
    let t0 = c.theta0;
    b.contract(
        Some(1),
        DEGENNES,
        "theta0 range and xi0^2 = theta0",
        t0 > 0.585 && t0 < 0.595 && (c.xi0 * c.xi0 - t0).abs() < 1e-8,
        format!("theta0 = {t0:.12}, |xi0^2 - theta0| = {:.3e}", (c.xi0 * c.xi0 - t0).abs()),
    );
    let c1 = c.c1;
    let residual = moment(sol, 1, None).abs();
    let identities = [
        ("weighted energy", weighted_energy_identity(sol), 1.5 * c1),
        ("weighted moment", moment(sol, 1, Some(&[0.0, -2.0 * c.xi0, 1.0])), 0.5 * c1),
        ("third moment", moment(sol, 3, None), 0.5 * c1),
    ];
    let worst = identities.iter().map(|(_, v, t)| (v - t).abs()).fold(0.0, f64::max);
    let detail = identities.iter().map(|(n, v, t)| format!("{n} {v:.12} vs {t:.12}")).collect::<Vec<_>>().join("; ");
    b.contract(
        Some(2),
        DEGENNES,
        "identity suite",
        residual < 1e-8 && worst < 1e-6 * c1,
        format!("first moment {residual:.3e}; {detail}"),
    );
    b.contract(
        Some(3),
        DEGENNES,
        "mu is stationary and convex at xi0",
        c.mu_second > 0.0 && c.mu_first.abs() < 1e-6,
        format!("mu' = {:.3e}, mu'' = {:.9}", c.mu_first, c.mu_second),
    );
    b.fit(
        "identities",
        DEGENNES,
        &[("first_moment", residual), ("weighted_energy", identities[0].1), ("weighted_moment", identities[1].1), ("third_moment", identities[2].1)],
    );

    let grid = HalfLineGrid::reference();
    let mut table = Table::new("band_function", DEGENNES, &["xi", "mu"]);
    let step = (xi_max - xi_min) / (points - 1) as f64;
    let mut lowest = (f64::NAN, f64::INFINITY);
    for i in 0..points {
        let xi = xi_min + step * i as f64;
        let mu = solve_h_xi(xi, &grid)?.mu;
        if mu < lowest.1 {
            lowest = (xi, mu);
        }
        table.push(some(&[xi, mu]));
    }
    b.tables.push(table);
    if c.xi0 > xi_min && c.xi0 < xi_max {
        b.contract(
            None,
            DEGENNES,
            "band minimum sits at xi0",
            (lowest.0 - c.xi0).abs() <= step && lowest.1 >= t0 - 1e-9,
            format!("sampled minimum mu({:.6}) = {:.12}", lowest.0, lowest.1),
        );
    }
    Ok(())
}

fn symmetry(b: &mut ReportBundle) -> Result<()> {
    let (c, g) = reference();
    let mode = EdgeMode {
        profile: CutGroundState::new(GroundState::new(g), CutoffProfile::new(10.0, "mollifier")?),
        along: CutoffProfile::new(12.0, "mollifier")?,
        xi: c.xi0,
    };
    let mut table = Table::new("symmetry", CORNER, &["delta", "cartesian", "reflected", "relative"]);
    let mut worst: f64 = 0.0;
    for d in SYMMETRY_DELTAS {
        let tz = Trapezoid { delta: d, opening: 0.5 * (d + d.sqrt()), height: 10.0, length: 12.0 };
        let plus = tz.energy_cartesian(&mode, 0.5);
        let minus = tz.energy_reflected_polar(&reflected_partner(&mode, d), 0.5);
        let rel = (plus - minus).abs() / plus;
        worst = worst.max(rel);
        table.push(some(&[d, plus, minus, rel]));
    }
    b.tables.push(table);
    b.contract(Some(4), CORNER, "reflected pair has equal energy", worst < 1e-9, format!("worst relative difference {worst:.3e}"));
    Ok(())
}

fn cutoff(b: &mut ReportBundle) -> Result<()> {
    // The closed form is scale free; c1 = 1/4 just fixes the units of d.
    let scale = 0.25;
    let rule = gauss20();
    let mut table = Table::new("cutoff", CORNER, &["d", "epsilon", "rate", "quadrature", "closed_form"]);
    let mut worst: f64 = 0.0;
    for (d, eps) in CUTOFF_PAIRS {
        let o = optimize_eta(d / scale, eps, scale)?;
        for rate in [o.best_rate, o.simple_rate] {
            let eta = Exponential { epsilon: eps, rate };
            let breaks = with_splits(uniform_breaks(0.0, eta.reach() * 3.0, 0.5 / rate.max(1e-3)), &[eps]);
            let n = rule.composite(&breaks, 1, |x| eta.value(x).powi(2));
            let s = rule.composite(&breaks, 1, |x| eta.slope(x).powi(2));
            let quad = (s - 0.5 * d) / n;
            let closed = exponential_functional(rate, eps, d);
            worst = worst.max((quad - closed).abs());
            table.push(some(&[d, eps, rate, quad, closed]));
        }
    }
    b.tables.push(table);
    b.contract(Some(5), CORNER, "cutoff functional closed form", worst < 1e-12, format!("worst difference {worst:.3e}"));

    let c1 = reference().0.c1;
    let delta = 1e-2;
    let o = optimize_eta(delta, 1.0, c1)?;
    let target = -0.25 * (c1 * delta).powi(2);
    b.contract(
        Some(5),
        CORNER,
        "cutoff value at rate c1 delta / 2",
        (o.simple_value - target).abs() < 0.05 * target.abs(),
        format!("{:.6e} vs {target:.6e}", o.simple_value),
    );
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x` over the positive points.
fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn corner(b: &mut ReportBundle, deltas: &[f64]) -> Result<()> {
    let (c, g) = reference();
    let configs: Vec<CornerTrialConfig> = deltas.iter().map(|&d| CornerTrialConfig::with_defaults(d)).collect();
    let bounds = corner_sweep(&configs, c, g)?;
    let mut table = Table::new("corner_sweep", CORNER, &["delta", "gamma", "ell", "quotient", "gap", "scaled_gap"]);
    let mut pairs = Vec::new();
    for (cfg, bound) in configs.iter().zip(&bounds) {
        let gap = c.theta0 - bound.quotient;
        table.push(some(&[cfg.delta, cfg.gamma, cfg.ell, bound.quotient, gap, gap / (cfg.delta * cfg.delta)]));
        pairs.push((cfg.delta, bound.quotient));
    }
    b.tables.push(table);
    let target = 0.25 * c.c1 * c.c1;
    let gaps: Vec<(f64, f64)> = pairs.iter().map(|&(d, q)| (d, c.theta0 - q)).collect();
    if pairs.len() < 4 {
        return Ok(());
    }
    let fit = fit_delta_squared_coefficient(&pairs, c.theta0)?;
    let relative = fit.coefficient / target - 1.0;
    b.fit(
        "corner_coefficient",
        CORNER,
        &[
            ("coefficient", fit.coefficient),
            ("slope", fit.slope),
            ("order", fit.order),
            ("residual", fit.residual),
            ("target", target),
            ("relative_error", relative),
            ("loglog_slope", loglog_slope(&gaps).unwrap_or(f64::NAN)),
        ],
    );
    b.contract(
        Some(6),
        CORNER,
        "extrapolated gap coefficient matches c1^2/4",
        relative.abs() < 0.1,
        format!("coefficient {:.6e} vs {target:.6e} ({:+.1}%)", fit.coefficient, 100.0 * relative),
    );
    Ok(())
}

fn corner_kind(delta: f64) -> Arc<dyn DomainKind> {
    Arc::new(CornerKind { delta })
}

fn record_spectrum(b: &mut ReportBundle, name: String, report: SpectralReport) {
    b.spectra.push(SpectrumRecord { name, module: TWO_D.into(), config_hash: b.config_hash.clone(), report });
}

fn cross_check(b: &mut ReportBundle) -> Result<()> {
    let (c, g) = reference();
    let limit = c.theta0 - 1e-3;
    let mut table = Table::new("cross_check", TWO_D, &["delta", "radius", "h", "lambda", "extrapolated", "error"]);
    for (delta, radii) in CROSS_CHECK {
        let rep = extrapolated_lowest(&corner_kind(delta), &radii, &MESH_STEPS, 1)?;
        let (value, error) = rep.extrapolated();
        table.push(some(&[delta, rep.radius, rep.h, rep.lowest(), value, error]));
        b.contract(
            Some(10),
            TWO_D,
            "corner has a bound state below theta0 - 1e-3",
            value + error < limit,
            format!("delta {delta}: lambda1 = {value:.6} +- {error:.1e} vs {limit:.6}"),
        );
        record_spectrum(b, format!("corner_{delta}"), rep);
    }
    b.tables.push(table);

    let dom = TruncatedDomain::new(corner_kind(0.5), 15.0, DEFAULT_DEPTH, 0.1)?;
    let shift = WaveShift { terms: vec![(0.7, [0.3, -0.5], 1.1), (-1.2, [0.9, 0.4], 0.2), (0.4, [-0.2, 1.3], 2.5)] };
    let base = solve(&dom, &Gauge::default(), 4, DEFAULT_SHIFT)?;
    let moved = solve(&dom, &Gauge::default().shifted(Arc::new(shift)), 4, DEFAULT_SHIFT)?;
    if base.eigenvalues.len() != moved.eigenvalues.len() {
        return Err(Error::Consistency("gauge shift changed the number of converged eigenvalues".into()));
    }
    let drift = base.eigenvalues.iter().zip(&moved.eigenvalues).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    b.fit("gauge_drift", TWO_D, &[("max_drift", drift), ("eigenvalues", base.eigenvalues.len() as f64)]);
    b.contract(Some(10), TWO_D, "spectrum is gauge invariant", drift < 1e-9, format!("max drift {drift:.3e} over {} eigenvalues", base.eigenvalues.len()));

    let bound = corner_bound_at(&CornerTrialConfig::with_defaults(DOMINANCE_DELTA), c, g)?;
    let rep = extrapolated_lowest(&corner_kind(DOMINANCE_DELTA), &DOMINANCE_RADII, &MESH_STEPS[..1], 1)?;
    let verdict = verify_bound_consistency(&rep, &QuasiModeBound::from(&bound))?;
    b.contract(
        Some(10),
        TWO_D,
        "lowest eigenvalue lies below the corner quasi-mode quotient",
        verdict.pass && verdict.margin > 0.0,
        format!("lambda1 = {:.6}, quotient = {:.6}, margin {:.3e}", verdict.lambda, verdict.quotient, verdict.margin),
    );
    record_spectrum(b, format!("corner_{DOMINANCE_DELTA}"), rep);
    b.verdicts.push(VerdictRecord { name: "corner_dominance".into(), module: TWO_D.into(), config_hash: b.config_hash.clone(), verdict });
    Ok(())
}

fn curved(b: &mut ReportBundle, name: &str, profile: &CurvatureProfile, deltas: &[f64], config: &CurvedBoundConfig) -> Result<Vec<CurvedBound>> {
    let (c, g) = reference();
    let bounds = curved_sweep(profile, deltas, config, c, g)?;
    let mut table = Table::new(name, CURVED, &["delta", "certified", "quotient", "gap", "scaled_gap", "model_quotient"]);
    for bd in &bounds {
        let certified = if bd.certified { 1.0 } else { 0.0 };
        table.push(vec![
            Some(bd.delta),
            Some(certified),
            bd.quotient,
            bd.gap,
            bd.gap.map(|g| g / (bd.delta * bd.delta)),
            bd.model_quotient,
        ]);
    }
    b.tables.push(table);
    let mean = profile.mean;
    if !(mean > 0.0) {
        let silent = bounds.iter().all(|bd| !bd.certified && bd.reason.is_some());
        b.contract(
            Some(7),
            CURVED,
            "non-positive mean curvature yields no certificate",
            silent,
            format!("mean {mean:.3}: {} of {} points certified", bounds.iter().filter(|bd| bd.certified).count(), bounds.len()),
        );
        return Ok(bounds);
    }
    if bounds.iter().filter(|bd| bd.certified).count() >= 4 {
        let fit = fit_curved_sweep(&bounds, c.theta0)?;
        let target = (0.5 * c.c1 * mean).powi(2);
        let relative = fit.coefficient / target - 1.0;
        b.fit(
            &format!("{name}_coefficient"),
            CURVED,
            &[("mean", mean), ("coefficient", fit.coefficient), ("slope", fit.slope), ("residual", fit.residual), ("target", target), ("relative_error", relative)],
        );
        b.contract(
            Some(7),
            CURVED,
            "gap coefficient matches (c1 mean / 2)^2",
            relative.abs() < 0.1,
            format!("mean {mean:.3}: coefficient {:.6e} vs {target:.6e} ({:+.2}%)", fit.coefficient, 100.0 * relative),
        );
    }
    Ok(bounds)
}

fn bump(mean: f64) -> Result<CurvatureProfile> {
    CurvatureProfile::build("bump", &Args::new().with("mean", mean))
}

fn curved_preset(b: &mut ReportBundle) -> Result<()> {
    let config = CurvedBoundConfig::default();
    let mut coefficients = Vec::new();
    for mean in [1.0, 2.0] {
        curved(b, &format!("curved_sweep_mean{mean}"), &bump(mean)?, &CURVED_DELTAS, &config)?;
        let key = format!("curved_sweep_mean{mean}_coefficient");
        if let Some(f) = b.fits.iter().find(|f| f.name == key) {
            coefficients.push(f.values["coefficient"]);
        }
    }
    if let [one, two] = coefficients[..] {
        let ratio = two / one;
        b.fit("curved_scaling", CURVED, &[("ratio", ratio)]);
        b.contract(Some(7), CURVED, "doubling the mean curvature quadruples the gap", (ratio / 4.0 - 1.0).abs() < 0.1, format!("ratio {ratio:.6}"));
    } else {
        b.contract(Some(7), CURVED, "doubling the mean curvature quadruples the gap", false, "too few certified points to fit".into());
    }
    curved(b, "curved_sweep_negative", &bump(-1.0)?, &CURVED_DELTAS, &config)?;
    Ok(())
}

fn a_coefficient(b: &mut ReportBundle) -> Result<()> {
    let (c, g) = reference();
    let a = compute_a(g);
    let value = a.value();
    b.fit("a_coefficient", CURVED, &[("value", value), ("direct", a.direct), ("c1", c.c1)]);
    b.contract(Some(8), CURVED, "A = -c1", (value + c.c1).abs() < 1e-6 * c.c1, format!("A = {value:.12}, -c1 = {:.12}", -c.c1));
    Ok(())
}

fn weak(b: &mut ReportBundle, profile: &PotentialProfile, deltas: &[f64], config: &WeakCouplingConfig) -> Result<()> {
    let results = weak_sweep(profile, deltas, config)?;
    let mut table = Table::new("weak_sweep", WEAK, &["delta", "nu", "effective", "excess"]);
    for r in &results {
        table.push(vec![Some(r.delta), r.nu, r.effective, r.gap()]);
    }
    b.tables.push(table);
    if let Some(last) = results.iter().min_by(|x, y| x.delta.total_cmp(&y.delta)) {
        if let (Some(nu), Some(eff)) = (last.nu, last.effective) {
            b.contract(
                Some(9),
                WEAK,
                "nu approaches -mean^2/4",
                (nu - eff).abs() < 0.05 * eff.abs(),
                format!("nu({}) = {nu:.9} vs {eff:.9}", last.delta),
            );
        } else {
            b.contract(Some(9), WEAK, "nu approaches -mean^2/4", false, format!("no bound state at delta {}", last.delta));
        }
    }
    if results.iter().filter(|r| r.gap().is_some()).count() >= 3 {
        let fit = fit_convergence(&results)?;
        b.fit(
            "weak_convergence",
            WEAK,
            &[("exponent", fit.exponent), ("prefactor", fit.prefactor), ("monotone", if fit.monotone { 1.0 } else { 0.0 })],
        );
        b.contract(Some(9), WEAK, "excess decays at least like delta^0.4", fit.exponent >= 0.4, format!("exponent {:.4}", fit.exponent));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve2d(b: &mut ReportBundle, kind: &str, delta: f64, radius: f64, h: f64, k: usize, mean: f64, width: f64, field: bool) -> Result<()> {
    let args = Args::new().with("delta", delta).with("mean", mean).with("width", width);
    let kind: Arc<dyn DomainKind> = Arc::from(domain_kinds().build(kind, &args)?);
    let rep = solve_kind(&kind, radius, h, k)?;
    let (_, threshold) = discrete_threshold(h, h, DEFAULT_DEPTH)?;
    let mut table = Table::new("solve2d_spectrum", TWO_D, &["index", "lambda", "residual", "below_threshold"]);
    for (i, (l, r)) in rep.eigenvalues.iter().zip(&rep.residuals).enumerate() {
        table.push(some(&[i as f64, *l, *r, if *l < threshold { 1.0 } else { 0.0 }]));
    }
    b.tables.push(table);
    b.fit("solve2d_threshold", TWO_D, &[("discrete_threshold", threshold), ("h", h)]);
    let worst = rep.residuals.iter().copied().fold(0.0, f64::max);
    b.contract(None, TWO_D, "eigenpairs converged", worst < RESIDUAL_LIMIT, format!("worst residual {worst:.3e}"));
    if field {
        let dom = TruncatedDomain::new(kind.clone(), radius, DEFAULT_DEPTH, h)?;
        let mut dump = Table::new("solve2d_field", TWO_D, &["node", "x1", "x2", "re", "im"]);
        if let Some(v) = rep.vectors.first() {
            for (&node, z) in rep.unknowns.iter().zip(v) {
                let [x1, x2] = dom.mesh.nodes[node];
                dump.push(some(&[node as f64, x1, x2, z.re, z.im]));
            }
        }
        b.field = Some(dump);
    }
    record_spectrum(b, format!("{}_{delta}", kind.name()), rep);
    Ok(())
}
