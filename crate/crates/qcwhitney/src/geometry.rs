//! Points, balls, sampled bodies and their measured metrics.
//!
//! A `SampledBody` stands in for a compact connected set: boundary samples,
//! interior samples and a resolution bound (largest gap between neighbouring
//! boundary samples). All measured quantities -- diameter, inradius,
//! circumradius, interior dilatation -- are computed from the samples alone.

use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Sub};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Point of R^2 or R^3. Copyable; the dimension travels with the point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointN {
    dim: u8,
    xs: [f64; MAX_DIM],
}

impl PointN {
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            coords.len() >= 2 && coords.len() <= MAX_DIM,
            "points must have dimension 2 or 3"
        );
        let mut xs = [0.0; MAX_DIM];
        xs[..coords.len()].copy_from_slice(coords);
        PointN { dim: coords.len() as u8, xs }
    }

    pub fn xy(x: f64, y: f64) -> Self {
        PointN { dim: 2, xs: [x, y, 0.0] }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        PointN { dim: 3, xs: [x, y, z] }
    }

    /// Origin of R^dim.
    pub fn zero(dim: usize) -> Self {
        assert!((2..=MAX_DIM).contains(&dim));
        PointN { dim: dim as u8, xs: [0.0; MAX_DIM] }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.xs[..self.dim as usize]
    }

    pub fn x(&self) -> f64 {
        self.xs[0]
    }

    pub fn y(&self) -> f64 {
        self.xs[1]
    }

    pub fn z(&self) -> f64 {
        self.xs[2]
    }

    pub fn get(&self, axis: usize) -> f64 {
        debug_assert!(axis < self.dim());
        self.xs[axis]
    }

    pub fn set(&mut self, axis: usize, v: f64) {
        debug_assert!(axis < self.dim());
        self.xs[axis] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }

    pub fn dist2(&self, other: &PointN) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for a in 0..self.dim as usize {
            let d = self.xs[a] - other.xs[a];
            s += d * d;
        }
        s
    }

    pub fn dist(&self, other: &PointN) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.coords().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &PointN) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for a in 0..self.dim as usize {
            s += self.xs[a] * other.xs[a];
        }
        s
    }

    /// Point on the segment self -> other at parameter t.
    pub fn lerp(&self, other: &PointN, t: f64) -> PointN {
        *self + (*other - *self) * t
    }
}

impl Add for PointN {
    type Output = PointN;
    fn add(self, rhs: PointN) -> PointN {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = self;
        for a in 0..self.dim as usize {
            out.xs[a] += rhs.xs[a];
        }
        out
    }
}

impl Sub for PointN {
    type Output = PointN;
    fn sub(self, rhs: PointN) -> PointN {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = self;
        for a in 0..self.dim as usize {
            out.xs[a] -= rhs.xs[a];
        }
        out
    }
}

impl Mul<f64> for PointN {
    type Output = PointN;
    fn mul(self, rhs: f64) -> PointN {
        let mut out = self;
        for a in 0..self.dim as usize {
            out.xs[a] *= rhs;
        }
        out
    }
}

/// Closed ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallN {
    pub center: PointN,
    pub radius: f64,
}

impl BallN {
    pub fn new(center: PointN, radius: f64) -> Self {
        BallN { center, radius }
    }

    pub fn contains(&self, p: &PointN) -> bool {
        if self.radius < 0.0 {
            return false;
        }
        // absolute slack scaled to the coordinate magnitude: point clusters
        // far smaller than the rounding of their coordinates still count as
        // covered
        let tol = 1.0 + 1e-12;
        let m = self.center.norm();
        let slack = 1e-28 * (1.0 + m * m);
        p.dist2(&self.center) <= self.radius * self.radius * tol * tol + slack
    }
}

/// Discrete stand-in for a compact connected body.
#[derive(Clone, Debug)]
pub struct SampledBody {
    pub boundary_samples: Vec<PointN>,
    pub interior_samples: Vec<PointN>,
    /// Largest gap between a boundary sample and its nearest boundary
    /// neighbour. Measured metrics are trusted to this scale.
    pub resolution: f64,
}

impl SampledBody {
    /// Build a body and measure its resolution from the boundary samples.
    pub fn from_samples(boundary: Vec<PointN>, interior: Vec<PointN>) -> Result<Self> {
        let resolution = measured_resolution(&boundary);
        let body = SampledBody { boundary_samples: boundary, interior_samples: interior, resolution };
        body.validate()?;
        Ok(body)
    }

    pub fn with_resolution(boundary: Vec<PointN>, interior: Vec<PointN>, resolution: f64) -> Result<Self> {
        let body = SampledBody { boundary_samples: boundary, interior_samples: interior, resolution };
        body.validate()?;
        Ok(body)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.boundary_samples.is_empty() {
            return Err(Error::DegenerateBody("no boundary samples".into()));
        }
        let dim = self.boundary_samples[0].dim();
        for p in self.all_samples() {
            if !p.is_finite() {
                return Err(Error::DegenerateBody("non-finite sample coordinate".into()));
            }
            if p.dim() != dim {
                return Err(Error::DegenerateBody("mixed sample dimensions".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.boundary_samples[0].dim()
    }

    pub fn all_samples(&self) -> impl Iterator<Item = &PointN> {
        self.boundary_samples.iter().chain(self.interior_samples.iter())
    }

    pub fn sample_count(&self) -> usize {
        self.boundary_samples.len() + self.interior_samples.len()
    }

    /// Axis-aligned bounding box over all samples.
    pub fn bounding_box(&self) -> (PointN, PointN) {
        let dim = self.dim();
        let mut lo = [f64::INFINITY; MAX_DIM];
        let mut hi = [f64::NEG_INFINITY; MAX_DIM];
        for p in self.all_samples() {
            for a in 0..dim {
                lo[a] = lo[a].min(p.get(a));
                hi[a] = hi[a].max(p.get(a));
            }
        }
        (PointN::new(&lo[..dim]), PointN::new(&hi[..dim]))
    }

    /// Write as `kind,x,y[,z]` rows, kind B for boundary and I for interior.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let dim = self.dim();
        if dim == 2 {
            writeln!(w, "kind,x,y")?;
        } else {
            writeln!(w, "kind,x,y,z")?;
        }
        let mut row = |kind: &str, p: &PointN| -> Result<()> {
            let cs: Vec<String> = p.coords().iter().map(|c| format!("{:.16e}", c)).collect();
            writeln!(w, "{},{}", kind, cs.join(","))?;
            Ok(())
        };
        for p in &self.boundary_samples {
            row("B", p)?;
        }
        for p in &self.interior_samples {
            row("I", p)?;
        }
        Ok(())
    }

    /// Parse the format written by `write_csv`; a header row is optional.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut boundary = Vec::new();
        let mut interior = Vec::new();
        let mut dim: Option<usize> = None;
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("kind") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 3 || fields.len() > 4 {
                return Err(Error::Config(format!("line {}: expected kind,x,y[,z]", ln + 1)));
            }
            let mut cs = [0.0; MAX_DIM];
            for (a, f) in fields[1..].iter().enumerate() {
                cs[a] = f
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: bad coordinate {:?}", ln + 1, f)))?;
            }
            let d = fields.len() - 1;
            match dim {
                None => dim = Some(d),
                Some(prev) if prev != d => {
                    return Err(Error::Config(format!("line {}: mixed dimensions", ln + 1)))
                }
                _ => {}
            }
            let p = PointN::new(&cs[..d]);
            match fields[0] {
                "B" => boundary.push(p),
                "I" => interior.push(p),
                other => return Err(Error::Config(format!("line {}: unknown kind {:?}", ln + 1, other))),
            }
        }
        SampledBody::from_samples(boundary, interior)
    }
}

/// Largest nearest-neighbour gap among the given samples; 0 for fewer than 2.
pub fn measured_resolution(samples: &[PointN]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for (i, p) in samples.iter().enumerate() {
        let mut nearest = f64::INFINITY;
        for (j, q) in samples.iter().enumerate() {
            if i != j {
                nearest = nearest.min(p.dist2(q));
            }
        }
        worst = worst.max(nearest);
    }
    worst.sqrt()
}

/// Metrics of a sampled body.
#[derive(Clone, Copy, Debug)]
pub struct BodyMetrics {
    pub diameter: f64,
    pub circumradius: f64,
    pub inradius: f64,
    /// Interior dilatation: circumradius over inradius.
    pub dilatation: f64,
    pub circumcenter: PointN,
}

/// Largest pairwise distance over the boundary samples.
pub fn diameter(body: &SampledBody) -> Result<f64> {
    let pts = &body.boundary_samples;
    if pts.len() < 2 {
        return Err(Error::DegenerateBody("diameter needs at least 2 boundary samples".into()));
    }
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(pts[i].dist2(&pts[j]));
        }
    }
    Ok(best.sqrt())
}

/// Radius and center of the smallest ball containing every sample.
pub fn exterior_radius(body: &SampledBody) -> Result<(f64, PointN)> {
    let ball = enclosing_ball(body)?;
    Ok((ball.radius, ball.center))
}

/// Smallest enclosing ball over all samples of the body.
pub fn enclosing_ball(body: &SampledBody) -> Result<BallN> {
    let pts: Vec<PointN> = body.all_samples().copied().collect();
    min_enclosing_ball(&pts)
}

/// Largest distance from an interior sample to the boundary samples.
pub fn interior_radius(body: &SampledBody) -> Result<f64> {
    if body.interior_samples.is_empty() {
        return Err(Error::DegenerateBody("interior radius needs interior samples".into()));
    }
    if body.boundary_samples.is_empty() {
        return Err(Error::DegenerateBody("interior radius needs boundary samples".into()));
    }
    let mut best = 0.0f64;
    for p in &body.interior_samples {
        let mut nearest = f64::INFINITY;
        for q in &body.boundary_samples {
            nearest = nearest.min(p.dist2(q));
        }
        best = best.max(nearest);
    }
    Ok(best.sqrt())
}

/// Distance from the body to the complement of the domain: min over the
/// boundary samples of the domain's distance oracle. Errors if any sample
/// lies outside the closed domain.
pub fn set_distance(body: &SampledBody, domain: &crate::domains::Domain) -> Result<f64> {
    for p in body.all_samples() {
        let d = domain.dist_to_complement(p);
        if d < -1e-9 {
            return Err(Error::Containment {
                x: p.x(),
                y: p.y(),
                z: if p.dim() == 3 { p.z() } else { 0.0 },
                depth: -d,
            });
        }
    }
    let mut best = f64::INFINITY;
    for p in &body.boundary_samples {
        best = best.min(domain.dist_to_complement(p).max(0.0));
    }
    Ok(best)
}

/// All measured metrics of a body. Bodies with no interior samples (or an
/// inradius of zero) are rejected, since their dilatation is undefined.
pub fn body_metrics(body: &SampledBody) -> Result<BodyMetrics> {
    body.validate()?;
    let diameter = diameter(body)?;
    if diameter <= 0.0 {
        return Err(Error::DegenerateBody("zero diameter".into()));
    }
    let ball = enclosing_ball(body)?;
    let inradius = interior_radius(body)?;
    if inradius <= 0.0 {
        return Err(Error::DegenerateBody("zero inradius".into()));
    }
    debug_assert!(inradius <= ball.radius * (1.0 + 1e-9));
    debug_assert!(ball.radius <= diameter * (1.0 + 1e-9));
    debug_assert!(diameter <= 2.0 * ball.radius * (1.0 + 1e-9));
    Ok(BodyMetrics {
        diameter,
        circumradius: ball.radius,
        inradius,
        dilatation: ball.radius / inradius,
        circumcenter: ball.center,
    })
}

/// Smallest ball enclosing the points. Randomized incremental construction
/// with a fixed shuffle seed, so results are deterministic; support sets of
/// up to dim+1 points are solved exactly.
pub fn min_enclosing_ball(points: &[PointN]) -> Result<BallN> {
    if points.is_empty() {
        return Err(Error::DegenerateBody("no points for enclosing ball".into()));
    }
    let dim = points[0].dim();
    for p in points {
        if !p.is_finite() {
            return Err(Error::DegenerateBody("non-finite point".into()));
        }
        if p.dim() != dim {
            return Err(Error::DegenerateBody("mixed point dimensions".into()));
        }
    }
    let mut shuffled = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba11);
    shuffled.shuffle(&mut rng);
    let mut support = Vec::with_capacity(dim + 1);
    Ok(welzl(&shuffled, &mut support, dim))
}

fn welzl(pts: &[PointN], support: &mut Vec<PointN>, dim: usize) -> BallN {
    let mut ball = ball_of_support(support);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..pts.len() {
        if !ball.contains(&pts[i]) {
            support.push(pts[i]);
            ball = welzl(&pts[..i], support, dim);
            support.pop();
        }
    }
    ball
}

/// Exact smallest ball with 0..=dim+1 points: tries every pair, triple and
/// (in 3-d) quadruple, keeping the smallest candidate that covers the set.
/// Handles collinear and coplanar support sets.
fn ball_of_support(support: &[PointN]) -> BallN {
    match support.len() {
        0 => return BallN::new(PointN::xy(0.0, 0.0), -1.0),
        1 => return BallN::new(support[0], 0.0),
        _ => {}
    }
    let mut best: Option<BallN> = None;
    let mut consider = |cand: BallN| {
        if support.iter().all(|p| cand.contains(p)) {
            match best {
                Some(b) if b.radius <= cand.radius => {}
                _ => best = Some(cand),
            }
        }
    };
    for i in 0..support.len() {
        for j in (i + 1)..support.len() {
            consider(two_point_ball(&support[i], &support[j]));
            for k in (j + 1)..support.len() {
                if let Some(b) = circumball3(&support[i], &support[j], &support[k]) {
                    consider(b);
                }
                for l in (k + 1)..support.len() {
                    if let Some(b) = circumball4(&support[i], &support[j], &support[k], &support[l]) {
                        consider(b);
                    }
                }
            }
        }
    }
    best.unwrap_or_else(|| {
        // near-coincident support where every candidate misses the cover
        // check by rounding noise: fall back to the centroid ball
        let mut c = support[0];
        for p in &support[1..] {
            c = c + *p;
        }
        c = c * (1.0 / support.len() as f64);
        let r = support.iter().map(|p| p.dist(&c)).fold(0.0f64, f64::max);
        BallN::new(c, r * (1.0 + 1e-12))
    })
}

fn two_point_ball(a: &PointN, b: &PointN) -> BallN {
    let center = a.lerp(b, 0.5);
    BallN::new(center, center.dist(a).max(center.dist(b)))
}

/// Circumball of three points (works in dimension 2 or 3); None when they
/// are collinear.
fn circumball3(a: &PointN, b: &PointN, c: &PointN) -> Option<BallN> {
    let u = *b - *a;
    let v = *c - *a;
    let uu = u.dot(&u);
    let vv = v.dot(&v);
    let uv = u.dot(&v);
    let det = 2.0 * (uu * vv - uv * uv);
    if det.abs() <= 1e-14 * uu.max(vv).max(1e-300).powi(2) {
        return None;
    }
    let s = (vv * uu - uv * vv) / det;
    let t = (uu * vv - uv * uu) / det;
    let center = *a + u * s + v * t;
    Some(BallN::new(center, center.dist(a)))
}

/// Circumball of four points in R^3; None when they are coplanar.
fn circumball4(a: &PointN, b: &PointN, c: &PointN, d: &PointN) -> Option<BallN> {
    if a.dim() != 3 {
        return None;
    }
    let rows = [*b - *a, *c - *a, *d - *a];
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (i, r) in rows.iter().enumerate() {
        for (j, val) in r.coords().iter().enumerate() {
            m[i][j] = 2.0 * val;
        }
        rhs[i] = r.dot(r);
    }
    let x = solve3(m, rhs)?;
    let center = *a + PointN::xyz(x[0], x[1], x[2]);
    Some(BallN::new(center, center.dist(a)))
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    let mut scale = 0.0f64;
    for row in &m {
        for v in row {
            scale = scale.max(v.abs());
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() <= 1e-12 * scale.max(1e-300) {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut s = rhs[col];
        for k in (col + 1)..3 {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

/// m points evenly spaced on a circle (dimension 2).
pub fn circle_points(center: &PointN, radius: f64, m: usize) -> Vec<PointN> {
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        out.push(PointN::xy(
            center.x() + radius * th.cos(),
            center.y() + radius * th.sin(),
        ));
    }
    out
}

/// m points on a sphere (dimension 3) in a Fibonacci spiral.
pub fn fibonacci_sphere_points(center: &PointN, radius: f64, m: usize) -> Vec<PointN> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let th = 2.0 * std::f64::consts::PI * k as f64 / golden;
        out.push(PointN::xyz(
            center.x() + radius * rho * th.cos(),
            center.y() + radius * rho * th.sin(),
            center.z() + radius * z,
        ));
    }
    out
}

/// Evenly spread points on the sphere of the given dimension.
pub fn sphere_points(center: &PointN, radius: f64, m: usize) -> Vec<PointN> {
    match center.dim() {
        2 => circle_points(center, radius, m),
        _ => fibonacci_sphere_points(center, radius, m),
    }
}

/// Centers of a lattice with the given spacing covering [lo, hi], filtered
/// by a predicate.
pub fn lattice_points<F: Fn(&PointN) -> bool>(
    lo: &PointN,
    hi: &PointN,
    spacing: f64,
    keep: F,
) -> Vec<PointN> {
    let dim = lo.dim();
    let mut counts = [1usize; MAX_DIM];
    for a in 0..dim {
        counts[a] = ((((hi.get(a) - lo.get(a)) / spacing) + 0.5 - 1e-9).floor() as usize).max(1);
    }
    let mut out = Vec::new();
    let mut idx = [0usize; MAX_DIM];
    loop {
        let mut cs = [0.0; MAX_DIM];
        for a in 0..dim {
            cs[a] = lo.get(a) + (idx[a] as f64 + 0.5) * spacing;
        }
        let p = PointN::new(&cs[..dim]);
        if keep(&p) {
            out.push(p);
        }
        // odometer increment
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < counts[a] {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == dim {
                return out;
            }
        }
    }
}

/// Sampled closed ball: sphere samples on the boundary, concentric shells
/// plus the center inside.
pub fn sample_ball(ball: &BallN, boundary_count: usize) -> Result<SampledBody> {
    let dim = ball.center.dim();
    let m = boundary_count.max(if dim == 2 { 8 } else { 32 });
    let boundary = sphere_points(&ball.center, ball.radius, m);
    let mut interior = vec![ball.center];
    let shells = 4usize;
    for j in 1..shells {
        let f = j as f64 / shells as f64;
        let count = if dim == 2 {
            ((m as f64 * f).round() as usize).max(4)
        } else {
            ((m as f64 * f * f).round() as usize).max(6)
        };
        interior.extend(sphere_points(&ball.center, ball.radius * f, count));
    }
    SampledBody::from_samples(boundary, interior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Brute-force smallest enclosing ball: every pair, triple and quadruple
    /// candidate, smallest one that covers the set.
    fn meb_oracle(points: &[PointN]) -> BallN {
        let mut best: Option<BallN> = None;
        let mut consider = |cand: BallN| {
            if points.iter().all(|p| cand.contains(p)) {
                match best {
                    Some(b) if b.radius <= cand.radius => {}
                    _ => best = Some(cand),
                }
            }
        };
        for p in points {
            consider(BallN::new(*p, 0.0));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                consider(two_point_ball(&points[i], &points[j]));
                for k in (j + 1)..points.len() {
                    if let Some(b) = circumball3(&points[i], &points[j], &points[k]) {
                        consider(b);
                    }
                    for l in (k + 1)..points.len() {
                        if let Some(b) = circumball4(&points[i], &points[j], &points[k], &points[l]) {
                            consider(b);
                        }
                    }
                }
            }
        }
        best.unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> PointN {
        let mut cs = [0.0; MAX_DIM];
        for c in cs.iter_mut().take(dim) {
            *c = rng.random_range(-10.0..10.0);
        }
        PointN::new(&cs[..dim])
    }

    #[test]
    fn point_arithmetic() {
        let a = PointN::xy(1.0, 2.0);
        let b = PointN::xy(4.0, 6.0);
        assert_eq!(a.dist(&b), 5.0);
        assert_eq!((b - a).norm(), 5.0);
        assert_eq!((a + b).coords(), &[5.0, 8.0]);
        assert_eq!((a * 2.0).coords(), &[2.0, 4.0]);
        assert_eq!(a.lerp(&b, 0.5).coords(), &[2.5, 4.0]);
    }

    #[test]
    fn enclosing_ball_square_corners() {
        let pts = [
            PointN::xy(0.0, 0.0),
            PointN::xy(1.0, 0.0),
            PointN::xy(1.0, 1.0),
            PointN::xy(0.0, 1.0),
        ];
        let b = min_enclosing_ball(&pts).unwrap();
        assert!((b.radius - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(b.center.dist(&PointN::xy(0.5, 0.5)) < 1e-12);
    }

    #[test]
    fn enclosing_ball_collinear() {
        let pts = [PointN::xy(0.0, 0.0), PointN::xy(1.0, 0.0), PointN::xy(5.0, 0.0)];
        let b = min_enclosing_ball(&pts).unwrap();
        assert!((b.radius - 2.5).abs() < 1e-12);
        assert!(b.center.dist(&PointN::xy(2.5, 0.0)) < 1e-12);
    }

    #[test]
    fn enclosing_ball_equilateral_triangle() {
        let s = 2.0;
        let pts = [
            PointN::xy(0.0, 0.0),
            PointN::xy(s, 0.0),
            PointN::xy(s / 2.0, s * 3.0f64.sqrt() / 2.0),
        ];
        let b = min_enclosing_ball(&pts).unwrap();
        assert!((b.radius - s / 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn enclosing_ball_duplicates_and_singleton() {
        let p = PointN::xyz(1.0, -2.0, 3.0);
        let b = min_enclosing_ball(&[p, p, p]).unwrap();
        assert_eq!(b.radius, 0.0);
        assert!(min_enclosing_ball(&[]).is_err());
    }

    #[test]
    fn enclosing_ball_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let dim = if trial % 2 == 0 { 2 } else { 3 };
            let count = rng.random_range(1..=10);
            let mut pts: Vec<PointN> = (0..count).map(|_| random_point(&mut rng, dim)).collect();
            if count > 2 && trial % 5 == 0 {
                let dup = pts[0];
                pts.push(dup);
            }
            let got = min_enclosing_ball(&pts).unwrap();
            let want = meb_oracle(&pts);
            assert!(
                (got.radius - want.radius).abs() <= 1e-9 * (1.0 + want.radius),
                "trial {}: got {} want {}",
                trial,
                got.radius,
                want.radius
            );
            let cover = BallN::new(got.center, got.radius * (1.0 + 1e-9) + 1e-12);
            assert!(pts.iter().all(|p| cover.contains(p)), "trial {}: not covering", trial);
        }
    }

    #[test]
    fn radii_are_lipschitz_under_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..10_000 {
            let dim = if trial % 2 == 0 { 2 } else { 3 };
            let count = rng.random_range(2..=6);
            let base: Vec<PointN> = (0..count).map(|_| random_point(&mut rng, dim)).collect();
            let eps = rng.random_range(0.0..0.1);
            let mut moved = base.clone();
            let mut max_shift = 0.0f64;
            for p in &mut moved {
                let dir = random_point(&mut rng, dim);
                let norm = dir.norm().max(1e-9);
                let shift = rng.random_range(0.0..=eps);
                *p = *p + dir * (shift / norm);
                max_shift = max_shift.max(shift);
            }
            let r0 = min_enclosing_ball(&base).unwrap().radius;
            let r1 = min_enclosing_ball(&moved).unwrap().radius;
            assert!(
                (r0 - r1).abs() <= max_shift + 1e-9,
                "trial {}: |{} - {}| > {}",
                trial,
                r0,
                r1,
                max_shift
            );
        }
    }

    #[test]
    fn interior_radius_is_lipschitz_under_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..10_000 {
            let dim = 2;
            let nb = rng.random_range(3..=6);
            let ni = rng.random_range(1..=3);
            let boundary: Vec<PointN> = (0..nb).map(|_| random_point(&mut rng, dim)).collect();
            let interior: Vec<PointN> = (0..ni).map(|_| random_point(&mut rng, dim)).collect();
            let eps = rng.random_range(0.0..0.05);
            let perturb = |pts: &[PointN], rng: &mut ChaCha8Rng, worst: &mut f64| -> Vec<PointN> {
                pts.iter()
                    .map(|p| {
                        let dir = random_point(rng, dim);
                        let norm = dir.norm().max(1e-9);
                        let shift = rng.random_range(0.0..=eps);
                        *worst = worst.max(shift);
                        *p + dir * (shift / norm)
                    })
                    .collect()
            };
            let mut max_shift = 0.0f64;
            let boundary2 = perturb(&boundary, &mut rng, &mut max_shift);
            let interior2 = perturb(&interior, &mut rng, &mut max_shift);
            let b0 = SampledBody::with_resolution(boundary, interior, 1.0).unwrap();
            let b1 = SampledBody::with_resolution(boundary2, interior2, 1.0).unwrap();
            let r0 = interior_radius(&b0).unwrap();
            let r1 = interior_radius(&b1).unwrap();
            // moving every sample by at most s changes min/max distances by at most 2s
            assert!(
                (r0 - r1).abs() <= 2.0 * max_shift + 1e-9,
                "trial {}: |{} - {}| > {}",
                trial,
                r0,
                r1,
                2.0 * max_shift
            );
        }
    }

    #[test]
    fn sampled_disk_metrics() {
        let ball = BallN::new(PointN::xy(0.3, -0.2), 2.0);
        let body = sample_ball(&ball, 64).unwrap();
        let m = body_metrics(&body).unwrap();
        assert!((m.diameter - 4.0).abs() < body.resolution);
        assert!((m.circumradius - 2.0).abs() < body.resolution);
        assert!((m.inradius - 2.0).abs() < 2.0 * body.resolution);
        assert!((m.dilatation - 1.0).abs() < 0.1);
    }

    #[test]
    fn sampled_sphere_metrics() {
        let ball = BallN::new(PointN::xyz(0.0, 1.0, 0.5), 1.5);
        let body = sample_ball(&ball, 400).unwrap();
        let m = body_metrics(&body).unwrap();
        assert!((m.diameter - 3.0).abs() < 2.0 * body.resolution);
        assert!((m.circumradius - 1.5).abs() < body.resolution);
        assert!((m.inradius - 1.5).abs() < 2.0 * body.resolution);
        assert!((m.dilatation - 1.0).abs() < 0.2);
    }

    #[test]
    fn degenerate_bodies_rejected() {
        assert!(SampledBody::from_samples(vec![], vec![]).is_err());
        let p = PointN::xy(0.0, 0.0);
        let body = SampledBody::with_resolution(vec![p, p], vec![p], 0.1).unwrap();
        assert!(matches!(body_metrics(&body), Err(Error::DegenerateBody(_))));
        let no_interior = SampledBody::from_samples(circle_points(&p, 1.0, 16), vec![]).unwrap();
        assert!(matches!(body_metrics(&no_interior), Err(Error::DegenerateBody(_))));
    }

    #[test]
    fn set_distance_of_cells_in_square() {
        use crate::domains::Domain;
        let sq = Domain::unit_square();
        let cell = |lo: f64, hi: f64| {
            let corners = vec![
                PointN::xy(lo, lo),
                PointN::xy(hi, lo),
                PointN::xy(hi, hi),
                PointN::xy(lo, hi),
            ];
            SampledBody::from_samples(corners, vec![PointN::xy((lo + hi) / 2.0, (lo + hi) / 2.0)])
                .unwrap()
        };
        assert_eq!(set_distance(&cell(0.25, 0.5), &sq).unwrap(), 0.25);
        assert_eq!(set_distance(&cell(3.0 / 8.0, 0.5), &sq).unwrap(), 3.0 / 8.0);
        assert_eq!(set_distance(&cell(0.0, 0.25), &sq).unwrap(), 0.0);
        assert!(matches!(
            set_distance(&cell(-0.25, 0.25), &sq),
            Err(Error::Containment { .. })
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ball = BallN::new(PointN::xyz(0.1, 0.2, -0.3), 0.7);
        let body = sample_ball(&ball, 100).unwrap();
        let mut buf = Vec::new();
        body.write_csv(&mut buf).unwrap();
        let back = SampledBody::read_csv(&buf[..]).unwrap();
        assert_eq!(body.boundary_samples, back.boundary_samples);
        assert_eq!(body.interior_samples, back.interior_samples);
        assert_eq!(body.resolution, back.resolution);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(SampledBody::read_csv("B,1.0".as_bytes()).is_err());
        assert!(SampledBody::read_csv("Q,1.0,2.0".as_bytes()).is_err());
        assert!(SampledBody::read_csv("B,1.0,zzz".as_bytes()).is_err());
        assert!(SampledBody::read_csv("B,1.0,2.0\nB,1.0,2.0,3.0".as_bytes()).is_err());
    }

    #[test]
    fn lattice_covers_box() {
        let lo = PointN::xy(0.0, 0.0);
        let hi = PointN::xy(1.0, 0.5);
        let pts = lattice_points(&lo, &hi, 0.25, |_| true);
        assert_eq!(pts.len(), 8);
        assert!(pts.iter().all(|p| p.x() > 0.0 && p.x() < 1.0 && p.y() > 0.0 && p.y() < 0.5));
    }
}
