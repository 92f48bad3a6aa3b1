//! Catalog of quasiconformal maps with declared distortion, pointwise
//! application to sampled bodies, and the capacity-ratio distortion
//! measurement.
//!
//! Each map knows its declared Q (an upper bound for the capacity ratio),
//! the exact image of a spherical ring when one exists, and an exact global
//! distance scale when it is a similarity.

use std::f64::consts::PI;

use crate::capacity::{
    grid_capacity, ring_capacity_exact, RingSpec, Condenser, SolverConfig,
};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::geometry::{self, BallN, PointN, SampledBody};

#[derive(Clone, Debug)]
pub enum MapKind {
    Identity,
    /// x -> scale * R(angle) x + shift, rotation acting in the xy-plane.
    Similarity { scale: f64, angle: f64, shift: PointN },
    /// x -> center + |x - center|^(a-1) (x - center). Undefined at the
    /// center for a != 1 (the differential degenerates there).
    RadialStretch { center: PointN, exponent: f64 },
    /// x_i -> f_i x_i.
    DiagonalLinear { factors: [f64; 3] },
    /// Identity on the lower half-space, shear (x + c y, y, z) above it;
    /// c is the cotangent of the fold angle.
    Fold { cotangent: f64 },
    Compose { outer: Box<QCMap>, inner: Box<QCMap> },
}

#[derive(Clone, Debug)]
pub struct QCMap {
    name: String,
    dim: usize,
    declared_q: f64,
    kind: MapKind,
    params: Vec<(String, f64)>,
}

/// Inner and outer dilatation of a linear map from its singular values;
/// the declared Q of a linear map is the larger of the two.
fn linear_dilatation(svals: &[f64]) -> f64 {
    let n = svals.len() as i32;
    let mut smin = f64::INFINITY;
    let mut smax = 0.0f64;
    let mut prod = 1.0f64;
    for &s in svals {
        smin = smin.min(s);
        smax = smax.max(s);
        prod *= s;
    }
    let k_outer = smax.powi(n) / prod;
    let k_inner = prod / smin.powi(n);
    k_outer.max(k_inner)
}

fn shear_max_singular_value(c: f64) -> f64 {
    // largest singular value of [[1, c], [0, 1]]
    let t = 2.0 + c * c;
    ((t + (t * t - 4.0).sqrt()) / 2.0).sqrt()
}

impl QCMap {
    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(QCMap {
            name: "identity".into(),
            dim,
            declared_q: 1.0,
            kind: MapKind::Identity,
            params: Vec::new(),
        })
    }

    pub fn similarity(dim: usize, scale: f64, angle: f64, shift: PointN) -> Result<Self> {
        check_dim(dim)?;
        if !(scale > 0.0 && scale.is_finite()) || !angle.is_finite() || !shift.is_finite() {
            return Err(Error::Config(format!(
                "similarity needs a positive finite scale, got scale={scale} angle={angle}"
            )));
        }
        let mut params = vec![("scale".into(), scale), ("angle".into(), angle)];
        for a in 0..dim {
            params.push((format!("shift_{}", AXES[a]), shift.get(a)));
        }
        Ok(QCMap {
            name: "similarity".into(),
            dim,
            declared_q: 1.0,
            kind: MapKind::Similarity { scale, angle, shift },
            params,
        })
    }

    pub fn radial_stretch(dim: usize, center: PointN, exponent: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Config(format!(
                "radial stretch exponent must be positive, got {exponent}"
            )));
        }
        let q = exponent.max(1.0 / exponent).powi(dim as i32 - 1);
        let mut params = vec![("a".into(), exponent)];
        for a in 0..dim {
            params.push((format!("center_{}", AXES[a]), center.get(a)));
        }
        Ok(QCMap {
            name: "radial-stretch".into(),
            dim,
            declared_q: q,
            kind: MapKind::RadialStretch { center, exponent },
            params,
        })
    }

    pub fn diagonal(factors: &[f64]) -> Result<Self> {
        let dim = factors.len();
        check_dim(dim)?;
        if factors.iter().any(|f| *f == 0.0 || !f.is_finite()) {
            return Err(Error::Config("diagonal factors must be nonzero and finite".into()));
        }
        let mut fs = [1.0f64; 3];
        fs[..dim].copy_from_slice(factors);
        let svals: Vec<f64> = factors.iter().map(|f| f.abs()).collect();
        let params = factors
            .iter()
            .enumerate()
            .map(|(i, f)| (format!("d{}", i + 1), *f))
            .collect();
        Ok(QCMap {
            name: "diagonal".into(),
            dim,
            declared_q: linear_dilatation(&svals),
            kind: MapKind::DiagonalLinear { factors: fs },
            params,
        })
    }

    pub fn fold(dim: usize, angle: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(angle > 0.0 && angle < PI) {
            return Err(Error::Config(format!(
                "fold angle must lie strictly between 0 and pi, got {angle}"
            )));
        }
        let c = 1.0 / angle.tan();
        let s1 = shear_max_singular_value(c);
        let mut svals = vec![s1, 1.0 / s1];
        if dim == 3 {
            svals.push(1.0);
        }
        Ok(QCMap {
            name: "fold".into(),
            dim,
            declared_q: linear_dilatation(&svals),
            kind: MapKind::Fold { cotangent: c },
            params: vec![("angle".into(), angle)],
        })
    }

    pub fn compose(outer: QCMap, inner: QCMap) -> Result<Self> {
        if outer.dim != inner.dim {
            return Err(Error::Config(format!(
                "cannot compose maps of dimensions {} and {}",
                outer.dim, inner.dim
            )));
        }
        Ok(QCMap {
            name: format!("compose({},{})", outer.name, inner.name),
            dim: outer.dim,
            declared_q: outer.declared_q * inner.declared_q,
            kind: MapKind::Compose { outer: Box::new(outer), inner: Box::new(inner) },
            params: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound for the capacity distortion, from the construction.
    pub fn declared_q(&self) -> f64 {
        self.declared_q
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn forward(&self, p: &PointN) -> Result<PointN> {
        match &self.kind {
            MapKind::Identity => Ok(*p),
            MapKind::Similarity { scale, angle, shift } => {
                let (s, c) = angle.sin_cos();
                let mut q = *p;
                q.set(0, scale * (c * p.x() - s * p.y()) + shift.get(0));
                q.set(1, scale * (s * p.x() + c * p.y()) + shift.get(1));
                if self.dim == 3 {
                    q.set(2, scale * p.z() + shift.get(2));
                }
                Ok(q)
            }
            MapKind::RadialStretch { center, exponent } => {
                radial_apply(p, center, *exponent)
            }
            MapKind::DiagonalLinear { factors } => {
                let mut q = *p;
                for a in 0..self.dim {
                    q.set(a, factors[a] * p.get(a));
                }
                Ok(q)
            }
            MapKind::Fold { cotangent } => {
                let mut q = *p;
                if p.y() > 0.0 {
                    q.set(0, p.x() + cotangent * p.y());
                }
                Ok(q)
            }
            MapKind::Compose { outer, inner } => outer.forward(&inner.forward(p)?),
        }
    }

    pub fn inverse(&self, q: &PointN) -> Result<PointN> {
        match &self.kind {
            MapKind::Identity => Ok(*q),
            MapKind::Similarity { scale, angle, shift } => {
                let (s, c) = angle.sin_cos();
                let x = (q.get(0) - shift.get(0)) / scale;
                let y = (q.get(1) - shift.get(1)) / scale;
                let mut p = *q;
                p.set(0, c * x + s * y);
                p.set(1, -s * x + c * y);
                if self.dim == 3 {
                    p.set(2, (q.z() - shift.get(2)) / scale);
                }
                Ok(p)
            }
            MapKind::RadialStretch { center, exponent } => {
                radial_apply(q, center, 1.0 / *exponent)
            }
            MapKind::DiagonalLinear { factors } => {
                let mut p = *q;
                for a in 0..self.dim {
                    p.set(a, q.get(a) / factors[a]);
                }
                Ok(p)
            }
            MapKind::Fold { cotangent } => {
                let mut p = *q;
                if q.y() > 0.0 {
                    p.set(0, q.x() - cotangent * q.y());
                }
                Ok(p)
            }
            MapKind::Compose { outer, inner } => inner.inverse(&outer.inverse(q)?),
        }
    }

    /// Points where the map (or its differential) is undefined.
    pub fn singular_points(&self) -> Vec<PointN> {
        match &self.kind {
            MapKind::RadialStretch { center, exponent } if *exponent != 1.0 => vec![*center],
            MapKind::Compose { outer, inner } => {
                let mut pts = inner.singular_points();
                for s in outer.singular_points() {
                    if let Ok(p) = inner.inverse(&s) {
                        pts.push(p);
                    }
                }
                pts
            }
            _ => Vec::new(),
        }
    }

    /// Exact factor by which the map scales every distance, when it has one.
    pub fn distance_scale(&self) -> Option<f64> {
        match &self.kind {
            MapKind::Identity => Some(1.0),
            MapKind::Similarity { scale, .. } => Some(*scale),
            MapKind::DiagonalLinear { factors } => {
                let f = factors[0].abs();
                if (0..self.dim).all(|a| factors[a].abs() == f) {
                    Some(f)
                } else {
                    None
                }
            }
            MapKind::Fold { cotangent } if *cotangent == 0.0 => Some(1.0),
            MapKind::Compose { outer, inner } => {
                Some(outer.distance_scale()? * inner.distance_scale()?)
            }
            _ => None,
        }
    }

    /// Exact image of a spherical ring when the image is again a spherical
    /// ring; None means the capacity must be measured on the grid.
    pub fn ring_image(&self, spec: &RingSpec) -> Option<RingSpec> {
        match &self.kind {
            MapKind::Identity => Some(*spec),
            MapKind::Similarity { scale, .. } => Some(RingSpec {
                center: self.forward(&spec.center).ok()?,
                r: scale * spec.r,
                big_r: scale * spec.big_r,
            }),
            MapKind::RadialStretch { center, exponent } => {
                if spec.center.dist2(center) == 0.0 {
                    Some(RingSpec {
                        center: *center,
                        r: spec.r.powf(*exponent),
                        big_r: spec.big_r.powf(*exponent),
                    })
                } else {
                    None
                }
            }
            MapKind::DiagonalLinear { factors } => {
                let f = factors[0].abs();
                if (0..self.dim).all(|a| factors[a].abs() == f) {
                    Some(RingSpec {
                        center: self.forward(&spec.center).ok()?,
                        r: f * spec.r,
                        big_r: f * spec.big_r,
                    })
                } else {
                    None
                }
            }
            MapKind::Fold { cotangent } if *cotangent == 0.0 => Some(*spec),
            MapKind::Fold { .. } => None,
            MapKind::Compose { outer, inner } => outer.ring_image(&inner.ring_image(spec)?),
        }
    }

    fn radial_center(&self) -> Option<PointN> {
        match &self.kind {
            MapKind::RadialStretch { center, .. } => Some(*center),
            MapKind::Compose { outer, inner } => {
                inner.radial_center().or_else(|| outer.radial_center())
            }
            _ => None,
        }
    }
}

fn radial_apply(p: &PointN, center: &PointN, exponent: f64) -> Result<PointN> {
    let mut v = *p - *center;
    let d = v.norm();
    if d == 0.0 {
        if exponent == 1.0 {
            return Ok(*p);
        }
        return Err(Error::MapUndefined(format!(
            "radial stretch is undefined at its center ({:?})",
            center.coords()
        )));
    }
    let f = d.powf(exponent - 1.0);
    v = v * f;
    Ok(*center + v)
}

const AXES: [&str; 3] = ["x", "y", "z"];

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// Map every sample of a body. The image resolution is the source
/// resolution scaled by the largest observed stretch between nearest
/// boundary-sample pairs.
pub fn apply_map(map: &QCMap, body: &SampledBody) -> Result<SampledBody> {
    if body.dim() != map.dim() {
        return Err(Error::Config(format!(
            "map dimension {} does not match body dimension {}",
            map.dim(),
            body.dim()
        )));
    }
    let boundary: Vec<PointN> =
        body.boundary_samples.iter().map(|p| map.forward(p)).collect::<Result<_>>()?;
    let interior: Vec<PointN> =
        body.interior_samples.iter().map(|p| map.forward(p)).collect::<Result<_>>()?;
    let stretch = if let Some(s) = map.distance_scale() {
        s
    } else {
        max_adjacent_stretch(&body.boundary_samples, &boundary)
    };
    SampledBody::with_resolution(boundary, interior, body.resolution * stretch)
}

/// Largest ratio |f(p)-f(q)| / |p-q| over nearest-neighbour source pairs.
/// Sources with many samples are subsampled deterministically.
fn max_adjacent_stretch(src: &[PointN], img: &[PointN]) -> f64 {
    if src.len() < 2 {
        return 1.0;
    }
    let stride = (src.len() / 2048).max(1);
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < src.len() {
        let mut nearest = usize::MAX;
        let mut best = f64::INFINITY;
        for j in 0..src.len() {
            if j != i {
                let d = src[i].dist2(&src[j]);
                if d < best {
                    best = d;
                    nearest = j;
                }
            }
        }
        if nearest != usize::MAX && best > 0.0 {
            let ratio = img[i].dist(&img[nearest]) / best.sqrt();
            worst = worst.max(ratio);
        }
        i += stride;
    }
    if worst > 0.0 {
        worst
    } else {
        1.0
    }
}

/// Dilatation (circumradius over inradius) of the image of a ball that must
/// sit inside the given domain.
pub fn quasiball_dilatation(map: &QCMap, ball: &BallN, domain: &Domain) -> Result<f64> {
    if !domain.contains_ball(ball) {
        let d = domain.dist_to_complement(&ball.center);
        return Err(Error::Containment {
            x: ball.center.x(),
            y: ball.center.y(),
            z: ball.center.z(),
            depth: ball.radius - d,
        });
    }
    let counts = if map.dim() == 2 { 64 } else { 400 };
    let body = geometry::sample_ball(ball, counts)?;
    let image = apply_map(map, &body)?;
    Ok(geometry::body_metrics(&image)?.dilatation)
}

/// Standard ring suite for distortion measurement: eight rings, centered at
/// the radial center when the map has one (those images stay exact), spread
/// around the origin otherwise.
pub fn standard_ring_suite(map: &QCMap) -> Vec<RingSpec> {
    let dim = map.dim();
    let at = |c: PointN, r: f64, big_r: f64| RingSpec { center: c, r, big_r };
    let shifted = |dx: f64, dy: f64, dz: f64| {
        if dim == 2 {
            PointN::xy(dx, dy)
        } else {
            PointN::xyz(dx, dy, dz)
        }
    };
    if let Some(center) = map.radial_center() {
        let radii = [
            (0.5, 1.0),
            (1.0, 2.0),
            (1.0, std::f64::consts::E),
            (0.75, 1.5),
            (0.6, 1.2),
            (0.8, 1.6),
            (1.2, 2.4),
            (0.5, 2.0),
        ];
        radii.iter().map(|(r, big_r)| at(center, *r, *big_r)).collect()
    } else {
        vec![
            at(shifted(0.0, 0.0, 0.0), 0.5, 1.0),
            at(shifted(0.0, 0.0, 0.0), 1.0, 2.0),
            at(shifted(0.0, 0.0, 0.0), 1.0, std::f64::consts::E),
            at(shifted(0.0, 0.0, 0.0), 0.75, 1.5),
            at(shifted(0.6, -0.45, 0.3), 0.5, 1.0),
            at(shifted(-0.8, 0.5, -0.2), 0.5, 1.25),
            at(shifted(0.3, 0.8, 0.4), 1.0, 1.6),
            at(shifted(-0.5, -0.6, 0.25), 0.6, 1.2),
        ]
    }
}

/// Measured distortion: the worst two-sided conformal-capacity ratio between
/// a ring condenser and its image over the given suite. Ring images that are
/// again rings are evaluated in closed form; everything else goes through
/// the grid solver at the conformal exponent p = n.
pub fn empirical_q(map: &QCMap, rings: &[RingSpec], cfg: &SolverConfig) -> Result<f64> {
    if rings.is_empty() {
        return Err(Error::Config("empirical distortion needs at least one ring".into()));
    }
    let n = map.dim();
    let mut worst = 1.0f64;
    for spec in rings {
        let src = ring_capacity_exact(spec.r, spec.big_r, n)?;
        let img = match map.ring_image(spec) {
            Some(im) => ring_capacity_exact(im.r, im.big_r, n)?,
            None => mapped_ring_capacity(map, spec, cfg)?,
        };
        worst = worst.max(src / img).max(img / src);
    }
    Ok(worst)
}

/// Grid capacity of the image of a ring condenser: both plates are sampled
/// in source coordinates, mapped pointwise, and solved in a bounding box of
/// the image samples. The outer plate fills everything beyond the outer
/// sphere out to the box, so the truncation is capacity-neutral.
fn mapped_ring_capacity(map: &QCMap, spec: &RingSpec, cfg: &SolverConfig) -> Result<f64> {
    let dim = map.dim();
    let spacing = if dim == 2 { cfg.h / 4.0 } else { cfg.h / 2.0 };
    let pad = (0.2 * spec.big_r).max(4.0 * cfg.h);
    let sphere_count = |radius: f64| -> usize {
        if dim == 2 {
            ((2.0 * PI * radius / spacing).ceil() as usize).max(16)
        } else {
            ((16.0 * radius * radius / (spacing * spacing)).ceil() as usize).max(64)
        }
    };
    let offset = |v: f64| {
        let mut p = spec.center;
        for a in 0..dim {
            p.set(a, p.get(a) + v);
        }
        p
    };
    let inner = SampledBody::with_resolution(
        geometry::sphere_points(&spec.center, spec.r, sphere_count(spec.r)),
        geometry::lattice_points(&offset(-spec.r), &offset(spec.r), spacing, |p| {
            p.dist(&spec.center) <= spec.r
        }),
        spacing,
    )?;
    let outer = SampledBody::with_resolution(
        geometry::sphere_points(&spec.center, spec.big_r, sphere_count(spec.big_r)),
        geometry::lattice_points(
            &offset(-(spec.big_r + pad)),
            &offset(spec.big_r + pad),
            spacing,
            |p| p.dist(&spec.center) >= spec.big_r,
        ),
        spacing,
    )?;
    let plate0 = apply_map(map, &inner)?;
    let plate1 = apply_map(map, &outer)?;
    let (mut lo, mut hi) = plate0.bounding_box();
    let (blo, bhi) = plate1.bounding_box();
    for a in 0..dim {
        lo.set(a, lo.get(a).min(blo.get(a)));
        hi.set(a, hi.get(a).max(bhi.get(a)));
    }
    let ambient = Domain::box_domain(lo, hi)?;
    let condenser = Condenser::new(plate0, plate1, ambient)?;
    let solver = SolverConfig { p: dim as f64, ..*cfg };
    Ok(grid_capacity(&condenser, &solver)?.value.as_f64())
}

/// Catalog rows: name, dimension, declared Q with default parameters.
pub fn catalog(dim: usize) -> Vec<(String, usize, f64, String)> {
    let defaults: [(&str, &str); 5] = [
        ("identity", ""),
        ("similarity", "scale=2, angle=0, shift_*=0"),
        ("radial-stretch", "a=2, center_*=0"),
        ("diagonal", "d1=2, d2=1, d3=1"),
        ("fold", "angle=pi/4"),
    ];
    defaults
        .iter()
        .map(|(name, params)| {
            let map = by_name(name, dim, &[]).expect("catalog defaults are valid");
            (name.to_string(), dim, map.declared_q(), params.to_string())
        })
        .collect()
}

/// Construct a catalog map from a name and key=value parameters.
pub fn by_name(name: &str, dim: usize, params: &[(String, f64)]) -> Result<QCMap> {
    let get = |key: &str, default: f64| -> f64 {
        params.iter().find(|(k, _)| k == key).map(|(_, v)| *v).unwrap_or(default)
    };
    let allowed: &[&str] = match name {
        "identity" => &[],
        "similarity" => &["scale", "angle", "shift_x", "shift_y", "shift_z"],
        "radial-stretch" => &["a", "center_x", "center_y", "center_z"],
        "diagonal" => &["d1", "d2", "d3"],
        "fold" => &["angle"],
        other => {
            return Err(Error::Config(format!(
                "unknown map {other:?}; available: identity, similarity, radial-stretch, \
                 diagonal, fold"
            )))
        }
    };
    for (k, _) in params {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!(
                "map {name:?} does not take parameter {k:?} (allowed: {allowed:?})"
            )));
        }
    }
    match name {
        "identity" => QCMap::identity(dim),
        "similarity" => {
            let shift = if dim == 2 {
                PointN::xy(get("shift_x", 0.0), get("shift_y", 0.0))
            } else {
                PointN::xyz(get("shift_x", 0.0), get("shift_y", 0.0), get("shift_z", 0.0))
            };
            QCMap::similarity(dim, get("scale", 2.0), get("angle", 0.0), shift)
        }
        "radial-stretch" => {
            let center = if dim == 2 {
                PointN::xy(get("center_x", 0.0), get("center_y", 0.0))
            } else {
                PointN::xyz(get("center_x", 0.0), get("center_y", 0.0), get("center_z", 0.0))
            };
            QCMap::radial_stretch(dim, center, get("a", 2.0))
        }
        "diagonal" => {
            let mut fs = vec![get("d1", 2.0), get("d2", 1.0)];
            if dim == 3 {
                fs.push(get("d3", 1.0));
            }
            QCMap::diagonal(&fs)
        }
        "fold" => QCMap::fold(dim, get("angle", PI / 4.0)),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_maps() -> Vec<QCMap> {
        vec![
            QCMap::identity(2).unwrap(),
            QCMap::similarity(2, 2.0, 0.7, PointN::xy(0.3, -0.2)).unwrap(),
            QCMap::radial_stretch(2, PointN::xy(0.0, 0.0), 1.5).unwrap(),
            QCMap::diagonal(&[2.0, 1.0]).unwrap(),
            QCMap::fold(2, PI / 4.0).unwrap(),
            QCMap::compose(
                QCMap::similarity(2, 0.5, -0.3, PointN::xy(0.1, 0.4)).unwrap(),
                QCMap::radial_stretch(2, PointN::xy(0.0, 0.0), 2.0).unwrap(),
            )
            .unwrap(),
            QCMap::similarity(3, 1.5, 0.4, PointN::xyz(0.2, -0.1, 0.3)).unwrap(),
            QCMap::diagonal(&[2.0, 1.0, 0.5]).unwrap(),
            QCMap::fold(3, PI / 3.0).unwrap(),
        ]
    }

    #[test]
    fn forward_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for map in sample_maps() {
            for _ in 0..1000 {
                let p = if map.dim() == 2 {
                    PointN::xy(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))
                } else {
                    PointN::xyz(
                        rng.random_range(-3.0..3.0),
                        rng.random_range(-3.0..3.0),
                        rng.random_range(-3.0..3.0),
                    )
                };
                let q = map.forward(&p).unwrap();
                let back = map.inverse(&q).unwrap();
                assert!(
                    back.dist(&p) <= 1e-8,
                    "{}: {:?} -> {:?} -> {:?}",
                    map.name(),
                    p.coords(),
                    q.coords(),
                    back.coords()
                );
            }
        }
    }

    #[test]
    fn declared_distortions() {
        assert_eq!(QCMap::identity(2).unwrap().declared_q(), 1.0);
        assert_eq!(
            QCMap::similarity(2, 3.0, 1.0, PointN::xy(0.0, 0.0)).unwrap().declared_q(),
            1.0
        );
        assert_eq!(
            QCMap::radial_stretch(2, PointN::xy(0.0, 0.0), 2.0).unwrap().declared_q(),
            2.0
        );
        assert_eq!(
            QCMap::radial_stretch(3, PointN::xyz(0.0, 0.0, 0.0), 2.0).unwrap().declared_q(),
            4.0
        );
        assert_eq!(
            QCMap::radial_stretch(2, PointN::xy(0.0, 0.0), 0.5).unwrap().declared_q(),
            2.0
        );
        assert_eq!(QCMap::diagonal(&[2.0, 1.0]).unwrap().declared_q(), 2.0);
        // right-angle fold is the identity
        let flat = QCMap::fold(2, PI / 2.0).unwrap();
        assert!((flat.declared_q() - 1.0).abs() < 1e-12);
        let fold = QCMap::fold(2, PI / 4.0).unwrap();
        let expect = (3.0 + 5.0f64.sqrt()) / 2.0; // square of the top singular value
        assert!((fold.declared_q() - expect).abs() < 1e-12);
        let comp = QCMap::compose(
            QCMap::diagonal(&[2.0, 1.0]).unwrap(),
            QCMap::radial_stretch(2, PointN::xy(0.0, 0.0), 1.5).unwrap(),
        )
        .unwrap();
        assert!((comp.declared_q() - 2.0 * 1.5).abs() < 1e-12);
    }

    #[test]
    fn radial_stretch_shrinks_inner_disk() {
        let map = QCMap::radial_stretch(2, PointN::xy(0.0, 0.0), 2.0).unwrap();
        let ball = BallN::new(PointN::xy(0.2, 0.1), 0.05);
        let body = geometry::sample_ball(&ball, 64).unwrap();
        let image = apply_map(&map, &body).unwrap();
        for p in image.all_samples() {
            let src = map.inverse(p).unwrap();
            assert!((src.norm().powi(2) - p.norm()).abs() < 1e-12);
        }
        // a disk centered at the stretch center maps to the squared-radius disk
        let centered = BallN::new(PointN::xy(0.0, 0.0), 0.5);
        let cb = geometry::sample_ball(&centered, 64).unwrap();
        // the exact center is a singular point of the stretch
        assert!(apply_map(&map, &cb).is_err());
        let ring = map
            .ring_image(&RingSpec { center: PointN::xy(0.0, 0.0), r: 0.5, big_r: 1.0 })
            .unwrap();
        assert_eq!(ring.r, 0.25);
        assert_eq!(ring.big_r, 1.0);
    }

    #[test]
    fn image_interior_stays_in_boundary_hull() {
        let domain = Domain::unit_square();
        for map in sample_maps() {
            if map.dim() != 2 {
                continue;
            }
            let ball = BallN::new(PointN::xy(0.3, 0.4), 0.2);
            assert!(domain.contains_ball(&ball));
            let body = geometry::sample_ball(&ball, 48).unwrap();
            let image = apply_map(&map, &body).unwrap();
            let hull = geometry::min_enclosing_ball(&image.boundary_samples).unwrap();
            for p in &image.interior_samples {
                assert!(
                    hull.center.dist(p) <= hull.radius * (1.0 + 1e-9),
                    "{}: interior sample escaped the boundary hull",
                    map.name()
                );
            }
        }
    }

    #[test]
    fn quasiball_dilatation_of_linear_maps() {
        let domain = Domain::unit_square();
        let ball = BallN::new(PointN::xy(0.5, 0.5), 0.25);
        let id = QCMap::identity(2).unwrap();
        let k = quasiball_dilatation(&id, &ball, &domain).unwrap();
        assert!((k - 1.0).abs() < 1e-9, "identity dilatation {k}");
        let diag = QCMap::diagonal(&[2.0, 1.0]).unwrap();
        let k = quasiball_dilatation(&diag, &ball, &domain).unwrap();
        assert!((k - 2.0).abs() < 0.05, "ellipse dilatation {k}");
        let outside = BallN::new(PointN::xy(0.9, 0.9), 0.25);
        assert!(quasiball_dilatation(&id, &outside, &domain).is_err());
    }

    #[test]
    fn empirical_distortion_exact_paths() {
        let cfg = SolverConfig::default();
        let id = QCMap::identity(2).unwrap();
        let suite = standard_ring_suite(&id);
        assert_eq!(suite.len(), 8);
        let q = empirical_q(&id, &suite, &cfg).unwrap();
        assert!((q - 1.0).abs() <= 1e-12);

        let sim = QCMap::similarity(2, 2.5, 0.3, PointN::xy(1.0, -0.5)).unwrap();
        let q = empirical_q(&sim, &standard_ring_suite(&sim), &cfg).unwrap();
        assert!((q - 1.0).abs() <= 1e-12);

        let radial = QCMap::radial_stretch(2, PointN::xy(0.0, 0.0), 1.5).unwrap();
        let suite = standard_ring_suite(&radial);
        assert!(suite.iter().all(|s| s.center.dist2(&PointN::xy(0.0, 0.0)) == 0.0));
        let q = empirical_q(&radial, &suite, &cfg).unwrap();
        assert!((q - 1.5).abs() <= 1e-9, "radial empirical {q}");

        let radial3 = QCMap::radial_stretch(3, PointN::xyz(0.0, 0.0, 0.0), 2.0).unwrap();
        let q = empirical_q(&radial3, &standard_ring_suite(&radial3), &cfg).unwrap();
        assert!((q - 4.0).abs() <= 1e-9, "radial 3-d empirical {q}");
    }

    #[test]
    fn empirical_distortion_grid_path_stays_below_declared() {
        let cfg = SolverConfig { h: 1.0 / 24.0, ..SolverConfig::default() };
        for map in [QCMap::diagonal(&[2.0, 1.0]).unwrap(), QCMap::fold(2, PI / 4.0).unwrap()] {
            let suite = standard_ring_suite(&map);
            let q = empirical_q(&map, &suite[..2], &cfg).unwrap();
            assert!(
                q <= map.declared_q() * 1.05,
                "{}: empirical {q} vs declared {}",
                map.name(),
                map.declared_q()
            );
            assert!(q >= 1.0);
        }
    }

    #[test]
    fn by_name_rejects_unknown_parameters() {
        assert!(by_name("identity", 2, &[]).is_ok());
        assert!(by_name("fold", 2, &[("angle".into(), 1.0)]).is_ok());
        assert!(by_name("fold", 2, &[("scale".into(), 1.0)]).is_err());
        assert!(by_name("nonsense", 2, &[]).is_err());
        assert!(by_name("diagonal", 2, &[("d1".into(), 0.0)]).is_err());
        let rows = catalog(2);
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().any(|r| r.0 == "radial-stretch" && r.2 == 2.0));
    }
}
