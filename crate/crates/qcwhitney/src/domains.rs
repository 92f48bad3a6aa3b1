//! Bounded domain catalog with exact distance oracles.
//!
//! Every domain knows the signed distance from a point to its complement
//! (positive inside, non-positive outside) and, crucially, the exact minimum
//! of that distance over an axis-aligned cube. The cube minimum is closed
//! form per shape, which lets the decomposition checks run without sampling
//! slack.

use crate::error::{Error, Result};
use crate::geometry::{circle_points, fibonacci_sphere_points, BallN, PointN, MAX_DIM};

#[derive(Clone, Debug)]
enum Shape {
    /// Open axis-aligned box.
    Box { lo: PointN, hi: PointN },
    /// Open ball.
    Ball { center: PointN, radius: f64 },
    /// Unit square with the closed upper-right quarter removed (2-d).
    LShape,
    /// Neighbourhood of radius rho around the segment [-a, a] x {0} (2-d).
    Stadium { half_length: f64, rho: f64 },
    /// All of R^n; only useful as a condenser ambient.
    WholeSpace,
    /// The empty set.
    Empty,
}

#[derive(Clone, Debug)]
pub struct Domain {
    name: String,
    dim: usize,
    shape: Shape,
    /// Declared, not computed: the complement is unbounded and connected.
    /// Holds for every bounded catalog entry.
    is_simple: bool,
}

fn signed_box_distance(lo: &PointN, hi: &PointN, p: &PointN) -> f64 {
    let mut d = f64::INFINITY;
    for a in 0..p.dim() {
        d = d.min(p.get(a) - lo.get(a)).min(hi.get(a) - p.get(a));
    }
    d
}

/// Euclidean distance from p to a closed box, 0 inside.
fn box_exterior_distance(lo: &PointN, hi: &PointN, p: &PointN) -> f64 {
    let mut s = 0.0;
    for a in 0..p.dim() {
        let d = (lo.get(a) - p.get(a)).max(p.get(a) - hi.get(a)).max(0.0);
        s += d * d;
    }
    s.sqrt()
}

/// Distance between the intervals [alo, ahi] and [blo, bhi].
fn interval_gap(alo: f64, ahi: f64, blo: f64, bhi: f64) -> f64 {
    (blo - ahi).max(alo - bhi).max(0.0)
}

/// Distance from p to the segment [-a, a] x {0}.
fn segment_distance(p: &PointN, a: f64) -> f64 {
    let dx = (p.x().abs() - a).max(0.0);
    (dx * dx + p.y() * p.y()).sqrt()
}

/// Largest |q - c| over the vertices of the box (the maximum over the whole
/// box, since the norm is convex).
fn farthest_vertex_distance(lo: &PointN, hi: &PointN, c: &PointN) -> f64 {
    let mut s = 0.0;
    for a in 0..c.dim() {
        let d = (lo.get(a) - c.get(a)).abs().max((hi.get(a) - c.get(a)).abs());
        s += d * d;
    }
    s.sqrt()
}

const LSHAPE_CUT: f64 = 0.5;

impl Domain {
    fn new(name: &str, dim: usize, shape: Shape) -> Self {
        let is_simple = !matches!(shape, Shape::WholeSpace | Shape::Empty);
        Domain { name: name.to_string(), dim, shape, is_simple }
    }

    pub fn unit_square() -> Self {
        Domain::new("square", 2, Shape::Box { lo: PointN::xy(0.0, 0.0), hi: PointN::xy(1.0, 1.0) })
    }

    pub fn unit_cube() -> Self {
        Domain::new(
            "cube",
            3,
            Shape::Box { lo: PointN::xyz(0.0, 0.0, 0.0), hi: PointN::xyz(1.0, 1.0, 1.0) },
        )
    }

    /// Unit square minus the closed square [1/2,1] x [1/2,1].
    pub fn lshape() -> Self {
        Domain::new("lshape", 2, Shape::LShape)
    }

    /// Radius-1/2 neighbourhood of the segment from (-1, 0) to (1, 0).
    pub fn stadium() -> Self {
        Domain::new("stadium", 2, Shape::Stadium { half_length: 1.0, rho: 0.5 })
    }

    pub fn unit_disk() -> Self {
        Domain::new("disk", 2, Shape::Ball { center: PointN::xy(0.0, 0.0), radius: 1.0 })
    }

    pub fn unit_ball3() -> Self {
        Domain::new("ball", 3, Shape::Ball { center: PointN::xyz(0.0, 0.0, 0.0), radius: 1.0 })
    }

    pub fn ball(center: PointN, radius: f64) -> Result<Self> {
        if radius <= 0.0 || !radius.is_finite() || !center.is_finite() {
            return Err(Error::Config("ball needs a finite center and positive radius".into()));
        }
        let dim = center.dim();
        Ok(Domain::new(if dim == 2 { "disk" } else { "ball" }, dim, Shape::Ball { center, radius }))
    }

    pub fn box_domain(lo: PointN, hi: PointN) -> Result<Self> {
        if lo.dim() != hi.dim() || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config("box corners must be finite and of equal dimension".into()));
        }
        for a in 0..lo.dim() {
            if lo.get(a) >= hi.get(a) {
                return Err(Error::Config("box corners must satisfy lo < hi on every axis".into()));
            }
        }
        let dim = lo.dim();
        Ok(Domain::new("box", dim, Shape::Box { lo, hi }))
    }

    pub fn whole_space(dim: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Domain::new("whole-space", dim, Shape::WholeSpace))
    }

    pub fn empty(dim: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Domain::new("empty", dim, Shape::Empty))
    }

    /// Catalog lookup used by the CLI.
    pub fn by_name(name: &str, dim: usize) -> Result<Self> {
        let d = match (name, dim) {
            ("square", 2) => Domain::unit_square(),
            ("cube", 3) => Domain::unit_cube(),
            ("lshape", 2) => Domain::lshape(),
            ("stadium", 2) => Domain::stadium(),
            ("disk", 2) => Domain::unit_disk(),
            ("ball", 3) => Domain::unit_ball3(),
            ("whole-space", d) => Domain::whole_space(d)?,
            ("empty", d) => Domain::empty(d)?,
            _ => {
                return Err(Error::Config(format!(
                    "no domain named {:?} in dimension {}",
                    name, dim
                )))
            }
        };
        Ok(d)
    }

    /// (name, dimension, description) rows for the catalog listing.
    pub fn catalog() -> Vec<(&'static str, usize, &'static str)> {
        vec![
            ("square", 2, "open unit square (0,1)^2"),
            ("cube", 3, "open unit cube (0,1)^3"),
            ("lshape", 2, "unit square minus the closed quarter [1/2,1]^2"),
            ("stadium", 2, "radius-1/2 neighbourhood of the segment (-1,0)..(1,0)"),
            ("disk", 2, "open unit disk"),
            ("ball", 3, "open unit ball"),
            ("whole-space", 0, "all of R^n (any dimension, unbounded)"),
            ("empty", 0, "the empty set (any dimension)"),
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.shape, Shape::WholeSpace)
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(self.shape, Shape::Empty)
    }

    pub fn is_simple(&self) -> bool {
        self.is_simple
    }

    /// Signed distance from p to the complement: positive inside the domain,
    /// 0 on the boundary, negative outside; the magnitude is the Euclidean
    /// distance to the boundary on both sides.
    pub fn dist_to_complement(&self, p: &PointN) -> f64 {
        debug_assert_eq!(p.dim(), self.dim);
        match &self.shape {
            Shape::Box { lo, hi } => {
                let inside = signed_box_distance(lo, hi, p);
                if inside >= 0.0 {
                    inside
                } else {
                    -box_exterior_distance(lo, hi, p)
                }
            }
            Shape::Ball { center, radius } => radius - p.dist(center),
            Shape::LShape => {
                let lo = PointN::xy(0.0, 0.0);
                let hi = PointN::xy(1.0, 1.0);
                let cut_lo = PointN::xy(LSHAPE_CUT, LSHAPE_CUT);
                let outer = signed_box_distance(&lo, &hi, p);
                let inside_cut = signed_box_distance(&cut_lo, &hi, p);
                let cut = if inside_cut > 0.0 {
                    -inside_cut
                } else {
                    box_exterior_distance(&cut_lo, &hi, p)
                };
                let v = outer.min(cut);
                if v >= 0.0 {
                    return v;
                }
                // outside: Euclidean distance to the closure, which is the
                // union of two closed rectangles
                let leg_bottom = box_exterior_distance(&lo, &PointN::xy(1.0, LSHAPE_CUT), p);
                let leg_left = box_exterior_distance(&lo, &PointN::xy(LSHAPE_CUT, 1.0), p);
                -leg_bottom.min(leg_left)
            }
            Shape::Stadium { half_length, rho } => rho - segment_distance(p, *half_length),
            Shape::WholeSpace => f64::INFINITY,
            Shape::Empty => f64::NEG_INFINITY,
        }
    }

    /// Exact minimum of max(dist_to_complement, 0) over the closed box
    /// [lo, hi]: 0 as soon as the box meets the complement.
    pub fn cube_clearance(&self, lo: &PointN, hi: &PointN) -> f64 {
        debug_assert_eq!(lo.dim(), self.dim);
        let v = match &self.shape {
            Shape::Box { lo: alo, hi: ahi } => {
                let mut d = f64::INFINITY;
                for a in 0..self.dim {
                    d = d.min(lo.get(a) - alo.get(a)).min(ahi.get(a) - hi.get(a));
                }
                d
            }
            Shape::Ball { center, radius } => radius - farthest_vertex_distance(lo, hi, center),
            Shape::LShape => {
                let alo = PointN::xy(0.0, 0.0);
                let ahi = PointN::xy(1.0, 1.0);
                let mut outer = f64::INFINITY;
                for a in 0..2 {
                    outer = outer.min(lo.get(a) - alo.get(a)).min(ahi.get(a) - hi.get(a));
                }
                let gx = interval_gap(lo.x(), hi.x(), LSHAPE_CUT, 1.0);
                let gy = interval_gap(lo.y(), hi.y(), LSHAPE_CUT, 1.0);
                let cut = if gx == 0.0 && gy == 0.0 {
                    0.0
                } else {
                    (gx * gx + gy * gy).sqrt()
                };
                outer.min(cut)
            }
            Shape::Stadium { half_length, rho } => {
                // distance to the segment is convex, so its box maximum sits
                // at a vertex
                let mut worst = 0.0f64;
                for &x in &[lo.x(), hi.x()] {
                    for &y in &[lo.y(), hi.y()] {
                        worst = worst.max(segment_distance(&PointN::xy(x, y), *half_length));
                    }
                }
                rho - worst
            }
            Shape::WholeSpace => f64::INFINITY,
            Shape::Empty => f64::NEG_INFINITY,
        };
        v.max(0.0)
    }

    /// Exact test: the closed box does not meet the closed domain at all.
    pub fn box_entirely_outside(&self, lo: &PointN, hi: &PointN) -> bool {
        match &self.shape {
            Shape::Box { lo: alo, hi: ahi } => {
                (0..self.dim).any(|a| hi.get(a) < alo.get(a) || lo.get(a) > ahi.get(a))
            }
            Shape::Ball { center, radius } => box_exterior_distance(lo, hi, center) > *radius,
            Shape::LShape => {
                let inside_cut = lo.x() >= LSHAPE_CUT && lo.y() >= LSHAPE_CUT;
                let outside_outer = hi.x() < 0.0 || lo.x() > 1.0 || hi.y() < 0.0 || lo.y() > 1.0;
                inside_cut || outside_outer
            }
            Shape::Stadium { half_length, rho } => {
                let gx = interval_gap(lo.x(), hi.x(), -half_length, *half_length);
                let gy = interval_gap(lo.y(), hi.y(), 0.0, 0.0);
                (gx * gx + gy * gy).sqrt() > *rho
            }
            Shape::WholeSpace => false,
            Shape::Empty => true,
        }
    }

    /// Tight axis-aligned bounding box; None for unbounded or empty domains.
    pub fn bounding_box(&self) -> Option<(PointN, PointN)> {
        match &self.shape {
            Shape::Box { lo, hi } => Some((*lo, *hi)),
            Shape::Ball { center, radius } => {
                let mut lo = *center;
                let mut hi = *center;
                for a in 0..self.dim {
                    lo.set(a, center.get(a) - radius);
                    hi.set(a, center.get(a) + radius);
                }
                Some((lo, hi))
            }
            Shape::LShape => Some((PointN::xy(0.0, 0.0), PointN::xy(1.0, 1.0))),
            Shape::Stadium { half_length, rho } => Some((
                PointN::xy(-half_length - rho, -rho),
                PointN::xy(half_length + rho, *rho),
            )),
            Shape::WholeSpace | Shape::Empty => None,
        }
    }

    /// Whether the closed ball sits inside the open domain.
    pub fn contains_ball(&self, ball: &BallN) -> bool {
        ball.radius >= 0.0 && self.dist_to_complement(&ball.center) > ball.radius
    }

    /// The factor K with dist(center, complement) = K * radius, in (1, inf].
    /// Errors when the closed ball is not strictly inside the domain.
    pub fn embedding_coefficient(&self, ball: &BallN) -> Result<f64> {
        if ball.radius <= 0.0 {
            return Err(Error::DegenerateBody("ball with non-positive radius".into()));
        }
        let d = self.dist_to_complement(&ball.center);
        if !self.contains_ball(ball) {
            return Err(Error::Containment {
                x: ball.center.x(),
                y: ball.center.y(),
                z: if self.dim == 3 { ball.center.z() } else { 0.0 },
                depth: ball.radius - d,
            });
        }
        let k = d / ball.radius;
        if k <= 1.0 {
            return Err(Error::InconsistentOracle(format!(
                "embedding coefficient {} not in (1, inf] for a contained ball",
                k
            )));
        }
        Ok(k)
    }

    /// Roughly `count` points spread over the boundary. Used to seed distance
    /// estimates for mapped domains.
    pub fn boundary_probes(&self, count: usize) -> Vec<PointN> {
        let count = count.max(8);
        match &self.shape {
            Shape::Box { lo, hi } => {
                if self.dim == 2 {
                    box_perimeter_2d(lo, hi, count)
                } else {
                    box_faces_3d(lo, hi, count)
                }
            }
            Shape::Ball { center, radius } => {
                if self.dim == 2 {
                    circle_points(center, *radius, count)
                } else {
                    fibonacci_sphere_points(center, *radius, count)
                }
            }
            Shape::LShape => {
                let c = LSHAPE_CUT;
                let verts = [
                    PointN::xy(0.0, 0.0),
                    PointN::xy(1.0, 0.0),
                    PointN::xy(1.0, c),
                    PointN::xy(c, c),
                    PointN::xy(c, 1.0),
                    PointN::xy(0.0, 1.0),
                ];
                polygon_perimeter(&verts, count)
            }
            Shape::Stadium { half_length, rho } => stadium_perimeter(*half_length, *rho, count),
            Shape::WholeSpace | Shape::Empty => Vec::new(),
        }
    }
}

fn box_perimeter_2d(lo: &PointN, hi: &PointN, count: usize) -> Vec<PointN> {
    let verts = [
        PointN::xy(lo.x(), lo.y()),
        PointN::xy(hi.x(), lo.y()),
        PointN::xy(hi.x(), hi.y()),
        PointN::xy(lo.x(), hi.y()),
    ];
    polygon_perimeter(&verts, count)
}

/// Arclength-even walk around a closed polygon.
fn polygon_perimeter(verts: &[PointN], count: usize) -> Vec<PointN> {
    let m = verts.len();
    let lengths: Vec<f64> = (0..m).map(|i| verts[i].dist(&verts[(i + 1) % m])).collect();
    let total: f64 = lengths.iter().sum();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut t = total * k as f64 / count as f64;
        for i in 0..m {
            if t <= lengths[i] || i == m - 1 {
                out.push(verts[i].lerp(&verts[(i + 1) % m], (t / lengths[i]).min(1.0)));
                break;
            }
            t -= lengths[i];
        }
    }
    out
}

fn box_faces_3d(lo: &PointN, hi: &PointN, count: usize) -> Vec<PointN> {
    let per_face = (count / 6).max(4);
    let k = (per_face as f64).sqrt().ceil() as usize;
    let mut out = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for &fixed in &[lo.get(axis), hi.get(axis)] {
            for i in 0..=k {
                for j in 0..=k {
                    let mut cs = [0.0; 3];
                    cs[axis] = fixed;
                    cs[u] = lo.get(u) + (hi.get(u) - lo.get(u)) * i as f64 / k as f64;
                    cs[v] = lo.get(v) + (hi.get(v) - lo.get(v)) * j as f64 / k as f64;
                    out.push(PointN::xyz(cs[0], cs[1], cs[2]));
                }
            }
        }
    }
    out
}

fn stadium_perimeter(a: f64, rho: f64, count: usize) -> Vec<PointN> {
    use std::f64::consts::PI;
    let total = 4.0 * a + 2.0 * PI * rho;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut t = total * k as f64 / count as f64;
        if t < 2.0 * a {
            out.push(PointN::xy(-a + t, -rho));
            continue;
        }
        t -= 2.0 * a;
        if t < PI * rho {
            let th = -PI / 2.0 + t / rho;
            out.push(PointN::xy(a + rho * th.cos(), rho * th.sin()));
            continue;
        }
        t -= PI * rho;
        if t < 2.0 * a {
            out.push(PointN::xy(a - t, rho));
            continue;
        }
        t -= 2.0 * a;
        let th = PI / 2.0 + t / rho;
        out.push(PointN::xy(-a + rho * th.cos(), rho * th.sin()));
    }
    out
}
