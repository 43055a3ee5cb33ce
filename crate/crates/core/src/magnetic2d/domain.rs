use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::corner::reflect;
use crate::curved::CurvatureProfile;
use crate::error::{Error, Result};
use crate::quad::gauss10;
use crate::registry::{Args, Registry};

/// Default depth of the boundary strip kept by the truncation.
pub const DEFAULT_DEPTH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryTag {
    Interior,
    /// Part of the true boundary; magnetic Neumann, imposed weakly.
    Physical,
    /// Cut introduced by the truncation; homogeneous Dirichlet.
    Artificial,
}

/// Triangulation with per-node boundary tags. `coords` holds the
/// boundary-fitted coordinates (signed arclength, depth) of each node.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub coords: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub tags: Vec<BoundaryTag>,
}

fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self, t: [usize; 3]) -> f64 {
        signed_area(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]).abs()
    }

    /// Edges used by exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut edges: Vec<_> = count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        edges.sort_unstable();
        edges
    }

    /// Structural checks: indices in range, no degenerate or folded
    /// triangles, and tags that agree with the topological boundary.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.coords.len() != n || self.tags.len() != n {
            return Err(Error::Assembly(format!(
                "{n} nodes but {} coordinates and {} tags",
                self.coords.len(),
                self.tags.len()
            )));
        }
        let mut orientation = 0.0;
        for (k, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Assembly(format!("triangle {k} has invalid vertices {t:?}")));
            }
            let a = signed_area(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]);
            let scale = (0..3).map(|i| {
                let (p, q) = (self.nodes[t[i]], self.nodes[t[(i + 1) % 3]]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            });
            let longest = scale.fold(0.0, f64::max);
            if a.abs() <= 1e-12 * longest * longest {
                return Err(Error::Assembly(format!("triangle {k} is degenerate")));
            }
            // Triangles are listed with a common orientation in boundary-fitted
            // coordinates; a sign flip in the plane means the map folded.
            let fitted = signed_area(self.coords[t[0]], self.coords[t[1]], self.coords[t[2]]);
            let o = a.signum() * fitted.signum();
            if orientation == 0.0 {
                orientation = o;
            } else if o != orientation {
                return Err(Error::Assembly(format!("triangle {k} is inverted")));
            }
        }
        let mut on_boundary = vec![false; n];
        for (a, b) in self.boundary_edges() {
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
        for (i, (&tag, &b)) in self.tags.iter().zip(&on_boundary).enumerate() {
            match (tag, b) {
                (BoundaryTag::Interior, true) => {
                    return Err(Error::Assembly(format!("node {i} lies on the boundary but is tagged interior")))
                }
                (BoundaryTag::Physical | BoundaryTag::Artificial, false) => {
                    return Err(Error::Assembly(format!("node {i} is tagged {tag:?} but is interior")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// A 2D domain family that can be cut to a boundary strip and meshed.
pub trait DomainKind: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn delta(&self) -> f64;
    /// Structured mesh of the strip `|s| <= radius`, `0 <= t <= depth`
    /// along the boundary, with spacing at most `h`.
    fn mesh(&self, radius: f64, depth: f64, h: f64) -> Result<Mesh>;
}

/// Index grid of a structured strip: columns `0..=2m`, rows `0..=nt`.
struct Grid {
    m: usize,
    nt: usize,
}

impl Grid {
    fn new(radius: f64, depth: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && radius > h && depth > h) {
            return Err(Error::Config(format!("need 0 < h < radius, depth; got h = {h}, radius = {radius}, depth = {depth}")));
        }
        Ok(Self { m: (radius / h).ceil() as usize, nt: (depth / h).ceil() as usize })
    }

    fn id(&self, col: usize, row: usize) -> usize {
        col * (self.nt + 1) + row
    }

    fn tag(&self, col: usize, row: usize) -> BoundaryTag {
        if col == 0 || col == 2 * self.m || row == self.nt {
            BoundaryTag::Artificial
        } else if row == 0 {
            BoundaryTag::Physical
        } else {
            BoundaryTag::Interior
        }
    }

    /// Splits each cell along its shorter diagonal.
    fn triangles(&self, nodes: &[[f64; 2]]) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(4 * self.m * self.nt);
        let d = |p: usize, q: usize| (nodes[p][0] - nodes[q][0]).hypot(nodes[p][1] - nodes[q][1]);
        for col in 0..2 * self.m {
            for row in 0..self.nt {
                let a = self.id(col, row);
                let b = self.id(col + 1, row);
                let c = self.id(col, row + 1);
                let e = self.id(col + 1, row + 1);
                if d(b, c) <= d(a, e) {
                    out.push([a, b, c]);
                    out.push([b, e, c]);
                } else {
                    out.push([a, b, e]);
                    out.push([a, e, c]);
                }
            }
        }
        out
    }

    fn assemble(&self, radius: f64, depth: f64, place: impl Fn(usize, usize) -> [f64; 2]) -> Mesh {
        let (hs, ht) = (radius / self.m as f64, depth / self.nt as f64);
        let n = (2 * self.m + 1) * (self.nt + 1);
        let mut nodes = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        let mut tags = Vec::with_capacity(n);
        for col in 0..=2 * self.m {
            for row in 0..=self.nt {
                nodes.push(place(col, row));
                coords.push([(col as f64 - self.m as f64) * hs, row as f64 * ht]);
                tags.push(self.tag(col, row));
            }
        }
        let triangles = self.triangles(&nodes);
        Mesh { nodes, coords, triangles, tags }
    }
}

/// The sector of opening `pi - delta` with edges on the positive `x1` axis
/// and the ray of angle `pi - delta`. The kept strip is the union of the
/// depth-`depth` bands along both edges, glued on the bisector.
#[derive(Debug, Clone, Copy)]
pub struct CornerKind {
    pub delta: f64,
}

impl DomainKind for CornerKind {
    fn name(&self) -> &'static str {
        "corner"
    }

    fn delta(&self) -> f64 {
        self.delta
    }

    fn mesh(&self, radius: f64, depth: f64, h: f64) -> Result<Mesh> {
        let delta = self.delta;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("corner delta = {delta} outside (0, 1)")));
        }
        let g = Grid::new(radius, depth, h)?;
        let (hs, ht) = (radius / g.m as f64, depth / g.nt as f64);
        let slope = (0.5 * delta).tan();
        // Columns right of the centre sit along the x1 axis starting at the
        // bisector; columns left of it are their mirror images.
        let mesh = g.assemble(radius, depth, |col, row| {
            let t = row as f64 * ht;
            let i = col as f64 - g.m as f64;
            let x = [t * slope + i.abs() * hs, t];
            if i < 0.0 {
                reflect(delta, x)
            } else {
                x
            }
        });
        Ok(mesh)
    }
}

/// Boundary curve turning with curvature `delta * kappa(s)` in arclength,
/// with the domain on its left. A zero profile gives the half-plane.
#[derive(Debug, Clone)]
pub struct CurvedKind {
    pub profile: Option<CurvatureProfile>,
    pub delta: f64,
}

impl CurvedKind {
    fn curvature(&self, s: f64) -> f64 {
        self.profile.as_ref().map_or(0.0, |p| self.delta * p.value(s))
    }

    /// Tangent angle and position at the given increasing arclengths,
    /// anchored at `s = 0` with the tangent along `x1`.
    pub fn frame(&self, s: &[f64]) -> Vec<(f64, [f64; 2])> {
        let rule = gauss10();
        let angle_step = |a: f64, b: f64| -> f64 {
            if self.profile.is_none() {
                return 0.0;
            }
            rule.integrate(a, b, |u| self.curvature(u))
        };
        // Integrate from the anchor outwards in both directions.
        let walk = |from: f64, to: f64, phi0: f64, x0: [f64; 2]| -> (f64, [f64; 2]) {
            let pieces = (((to - from).abs() / 0.05).ceil() as usize).max(1);
            let step = (to - from) / pieces as f64;
            let (mut phi, mut x) = (phi0, x0);
            for k in 0..pieces {
                let a = from + step * k as f64;
                let b = a + step;
                let (mut dx, mut dy) = (0.0, 0.0);
                for (u, w) in rule.mapped(a, b) {
                    let p = phi + angle_step(a, u);
                    dx += w * p.cos();
                    dy += w * p.sin();
                }
                x = [x[0] + dx, x[1] + dy];
                phi += angle_step(a, b);
            }
            (phi, x)
        };
        let mut out = vec![(0.0, [0.0, 0.0]); s.len()];
        let start = s.partition_point(|&v| v < 0.0);
        let (mut phi, mut x, mut at) = (0.0, [0.0, 0.0], 0.0);
        for k in start..s.len() {
            (phi, x) = walk(at, s[k], phi, x);
            at = s[k];
            out[k] = (phi, x);
        }
        let (mut phi, mut x, mut at) = (0.0, [0.0, 0.0], 0.0);
        for k in (0..start).rev() {
            (phi, x) = walk(at, s[k], phi, x);
            at = s[k];
            out[k] = (phi, x);
        }
        out
    }
}

fn segments_cross(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> bool {
    let o1 = signed_area(p, q, r);
    let o2 = signed_area(p, q, s);
    let o3 = signed_area(r, s, p);
    let o4 = signed_area(r, s, q);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

impl DomainKind for CurvedKind {
    fn name(&self) -> &'static str {
        if self.profile.is_some() {
            "curved"
        } else {
            "halfplane"
        }
    }

    fn delta(&self) -> f64 {
        self.delta
    }

    fn mesh(&self, radius: f64, depth: f64, h: f64) -> Result<Mesh> {
        let g = Grid::new(radius, depth, h)?;
        let (hs, ht) = (radius / g.m as f64, depth / g.nt as f64);
        let s: Vec<f64> = (0..=2 * g.m).map(|c| (c as f64 - g.m as f64) * hs).collect();
        let frame = self.frame(&s);
        let normal = |phi: f64| [-phi.sin(), phi.cos()];
        // Normal segments must not meet, otherwise the strip overlaps itself.
        let seg = |k: usize| {
            let (phi, x) = frame[k];
            let n = normal(phi);
            (x, [x[0] + depth * n[0], x[1] + depth * n[1]])
        };
        for i in 0..frame.len() {
            let (p, q) = seg(i);
            for j in i + 1..frame.len() {
                let (r, t) = seg(j);
                if segments_cross(p, q, r, t) {
                    return Err(Error::Domain(format!(
                        "boundary strip of depth {depth} is not injective: normals at s = {:.3} and s = {:.3} cross",
                        s[i], s[j]
                    )));
                }
            }
        }
        let mesh = g.assemble(radius, depth, |col, row| {
            let (phi, x) = frame[col];
            let n = normal(phi);
            let t = row as f64 * ht;
            [x[0] + t * n[0], x[1] + t * n[1]]
        });
        Ok(mesh)
    }
}

/// Registry of domain kinds (args: `delta`; curved also takes the bump
/// arguments `mean`, `width`, `center`, or `dipole = 1` for a zero-mean
/// profile).
pub fn domain_kinds() -> &'static Registry<dyn DomainKind> {
    static REG: OnceLock<Registry<dyn DomainKind>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn DomainKind> = Registry::new("domain kind");
        r.register("corner", "sector of opening pi - delta (args: delta)", |a| {
            Ok(Box::new(CornerKind { delta: a.get("delta", 0.5) }))
        });
        r.register("curved", "slightly curved half-plane (args: delta, mean, width, center, dipole)", |a| {
            let name = if a.get("dipole", 0.0) != 0.0 { "dipole" } else { "bump" };
            let profile = CurvatureProfile::build(name, a)?;
            Ok(Box::new(CurvedKind { profile: Some(profile), delta: a.get("delta", 0.1) }))
        });
        r.register("halfplane", "flat half-plane", |_| Ok(Box::new(CurvedKind { profile: None, delta: 0.0 })));
        r
    })
}

/// A meshed truncation of one of the domain kinds.
#[derive(Debug, Clone)]
pub struct TruncatedDomain {
    pub kind: Arc<dyn DomainKind>,
    pub radius: f64,
    pub depth: f64,
    pub h: f64,
    pub mesh: Mesh,
}

impl TruncatedDomain {
    pub fn new(kind: Arc<dyn DomainKind>, radius: f64, depth: f64, h: f64) -> Result<Self> {
        let mesh = kind.mesh(radius, depth, h)?;
        mesh.validate()?;
        Ok(Self { kind, radius, depth, h, mesh })
    }

    pub fn build(kind: &str, args: &Args, radius: f64, h: f64) -> Result<Self> {
        Self::new(Arc::from(domain_kinds().build(kind, args)?), radius, DEFAULT_DEPTH, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_mesh_is_consistent_and_symmetric() {
        let d = TruncatedDomain::new(Arc::new(CornerKind { delta: 0.4 }), 3.0, 2.0, 0.25).unwrap();
        let m = &d.mesh;
        // Physical nodes lie on one of the two edges.
        for (x, tag) in m.nodes.iter().zip(&m.tags) {
            if *tag == BoundaryTag::Physical {
                let on_first = x[1].abs() < 1e-12;
                let on_second = (x[0] * 0.4f64.sin() + x[1] * 0.4f64.cos()).abs() < 1e-12;
                assert!(on_first || on_second, "{x:?}");
            }
        }
        let total: f64 = m.triangles.iter().map(|&t| m.area(t)).sum();
        // Two parallelogram bands glued along the bisector.
        let band = 3.0 * 2.0;
        assert!((total - 2.0 * band).abs() < 1e-12, "{total}");
    }

    #[test]
    fn flat_curve_is_the_axis() {
        let k = CurvedKind { profile: None, delta: 0.0 };
        let f = k.frame(&[-2.0, 0.0, 1.5]);
        assert!((f[0].1[0] + 2.0).abs() < 1e-14 && f[0].1[1] == 0.0);
        assert!((f[2].1[0] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn constant_turning_traces_a_circle() {
        // Unit-mean bump of large width: nearly constant curvature near 0.
        let p = CurvatureProfile::build("bump", &Args::new().with("mean", 1.0).with("width", 1.0)).unwrap();
        let k = CurvedKind { profile: Some(p.clone()), delta: 0.3 };
        let s: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
        let f = k.frame(&s);
        // Total turning equals delta * mean.
        let turn = f.last().unwrap().0 - f[0].0;
        assert!((turn - 0.3 * p.mean).abs() < 1e-10);
        // Arclength is preserved.
        let len: f64 = f.windows(2).map(|w| (w[1].1[0] - w[0].1[0]).hypot(w[1].1[1] - w[0].1[1])).sum();
        assert!(len <= 4.0 && len > 4.0 - 1e-3);
    }

    #[test]
    fn tags_are_checked() {
        let mut m = CornerKind { delta: 0.2 }.mesh(2.0, 1.0, 0.25).unwrap();
        let mid = m.len() / 2;
        m.tags[mid] = BoundaryTag::Physical;
        assert!(matches!(m.validate(), Err(Error::Assembly(_))));
    }

    #[test]
    fn strong_bending_is_rejected() {
        let p = CurvatureProfile::build("bump", &Args::new().with("mean", 3.0).with("width", 0.5)).unwrap();
        let k = CurvedKind { profile: Some(p), delta: 1.0 };
        assert!(matches!(k.mesh(4.0, 3.0, 0.1), Err(Error::Domain(_))));
    }
}
