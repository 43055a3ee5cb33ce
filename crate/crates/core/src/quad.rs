//! Quadrature rules shared by every module.
//!
//! Composite Gauss-Legendre on caller-supplied panel breaks is used for all
//! integrals of smooth closed-form integrands; composite Simpson is used for
//! data sampled on a uniform grid.

use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// A Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(points: usize) -> Self {
        let points = points.max(2);
        let rule = GaussLegendre::new(points).expect("degree >= 2");
        let (nodes, weights) = rule.into_node_weight_pairs().into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over consecutive breakpoints; each panel is split into
    /// `sub` equal pieces.
    pub fn composite<F: FnMut(f64) -> f64>(&self, breaks: &[f64], sub: usize, mut f: F) -> f64 {
        let sub = sub.max(1);
        let mut total = 0.0;
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            let step = (b - a) / sub as f64;
            for k in 0..sub {
                let lo = a + step * k as f64;
                total += self.integrate(lo, lo + step, &mut f);
            }
        }
        total
    }
}

/// Shared 20-point rule, the default panel rule across the crate.
pub fn gauss20() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(20))
}

/// Shared 10-point rule for inner dimensions of tensor quadratures.
pub fn gauss10() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(10))
}

/// Composite Simpson weights for `n` uniformly spaced samples with spacing `h`.
/// `n` must be odd so the interval count is even.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd sample count >= 3");
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Breakpoints `a, a + step, ...` up to and including `b`.
pub fn uniform_breaks(a: f64, b: f64, max_step: f64) -> Vec<f64> {
    let count = (((b - a) / max_step).ceil() as usize).max(1);
    (0..=count)
        .map(|k| a + (b - a) * k as f64 / count as f64)
        .collect()
}

/// Merge extra breakpoints into a sorted break list, dropping points outside
/// the range and near-duplicates.
pub fn with_splits(mut breaks: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    let (lo, hi) = (breaks[0], *breaks.last().unwrap());
    for &x in extra {
        if x > lo && x < hi {
            breaks.push(x);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + b.abs()));
    breaks
}
