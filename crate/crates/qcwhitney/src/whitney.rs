//! Dyadic Whitney decomposition and family measurement.
//!
//! Cells are accepted by the classical rule diam(Q) <= dist(Q, complement)
//! <= 4 diam(Q), so the constructed family satisfies the two-sided
//! comparability conditions with C = 1/4. Measurement works on arbitrary
//! sampled bodies so mapped families can be checked with the same code.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::geometry::{self, BallN, PointN, SampledBody, MAX_DIM};

/// Fraction of probe points allowed to be uncovered before the coverage
/// clause fails.
pub const PROBE_TOLERANCE: f64 = 1e-3;

/// Dyadic cube: side root_side / 2^level, corner at root_lo + index * side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCell {
    pub level: u32,
    pub index: [i64; MAX_DIM],
}

#[derive(Clone, Debug)]
pub struct WhitneyFamily {
    pub domain: Domain,
    pub cells: Vec<DyadicCell>,
    /// Two-sided comparability constant the construction guarantees.
    pub target_c: f64,
    pub max_level: u32,
    pub root_lo: PointN,
    pub root_side: f64,
    /// Some region near the boundary was still unresolved at max_level
    /// (always true for a bounded domain with nonempty boundary).
    pub truncated: bool,
}

impl WhitneyFamily {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn cell_side(&self, level: u32) -> f64 {
        self.root_side / (1u64 << level) as f64
    }

    pub fn cell_lo(&self, cell: &DyadicCell) -> PointN {
        let side = self.cell_side(cell.level);
        let mut p = self.root_lo;
        for a in 0..self.dim() {
            p.set(a, self.root_lo.get(a) + cell.index[a] as f64 * side);
        }
        p
    }

    pub fn cell_hi(&self, cell: &DyadicCell) -> PointN {
        let side = self.cell_side(cell.level);
        let mut p = self.cell_lo(cell);
        for a in 0..self.dim() {
            p.set(a, p.get(a) + side);
        }
        p
    }

    pub fn cell_center(&self, cell: &DyadicCell) -> PointN {
        let side = self.cell_side(cell.level);
        let mut p = self.cell_lo(cell);
        for a in 0..self.dim() {
            p.set(a, p.get(a) + side / 2.0);
        }
        p
    }

    pub fn cell_diameter(&self, cell: &DyadicCell) -> f64 {
        self.cell_side(cell.level) * (self.dim() as f64).sqrt()
    }

    /// The analytic inscribed ball of the cube.
    pub fn cell_inball(&self, cell: &DyadicCell) -> BallN {
        BallN::new(self.cell_center(cell), self.cell_side(cell.level) / 2.0)
    }

    /// Exact distance from the cell to the domain complement.
    pub fn cell_distance(&self, cell: &DyadicCell) -> f64 {
        let lo = self.cell_lo(cell);
        let hi = self.cell_hi(cell);
        self.domain.cube_clearance(&lo, &hi)
    }

    /// Side of the finest accepted cell (the max_level side when no cell
    /// was accepted).
    pub fn finest_side(&self) -> f64 {
        let level = self.cells.iter().map(|c| c.level).max().unwrap_or(self.max_level);
        self.cell_side(level)
    }
}

/// Classical Whitney decomposition by recursive subdivision of the bounding
/// cube. Cells entirely outside the closed domain are pruned (this changes
/// nothing about the accepted set, only skips dead subtrees).
pub fn whitney_decompose(domain: &Domain, max_level: u32) -> Result<WhitneyFamily> {
    if max_level < 1 {
        return Err(Error::Config("max_level must be at least 1".into()));
    }
    if !domain.is_bounded() {
        return Err(Error::Config(format!(
            "cannot decompose unbounded domain {:?}",
            domain.name()
        )));
    }
    let dim = domain.dim();
    let (root_lo, root_side) = match domain.bounding_box() {
        Some((lo, hi)) => {
            let mut extent = 0.0f64;
            for a in 0..dim {
                extent = extent.max(hi.get(a) - lo.get(a));
            }
            let mut root_lo = lo;
            for a in 0..dim {
                let center = (lo.get(a) + hi.get(a)) / 2.0;
                root_lo.set(a, center - extent / 2.0);
            }
            (root_lo, extent)
        }
        None => (PointN::zero(dim), 1.0),
    };

    let mut family = WhitneyFamily {
        domain: domain.clone(),
        cells: Vec::new(),
        target_c: 0.25,
        max_level,
        root_lo,
        root_side,
        truncated: false,
    };
    if domain.is_empty_set() {
        return Ok(family);
    }

    let sqrt_dim = (dim as f64).sqrt();
    let mut frontier = vec![DyadicCell { level: 0, index: [0; MAX_DIM] }];
    while !frontier.is_empty() {
        let verdicts: Vec<(DyadicCell, u8)> = frontier
            .par_iter()
            .map(|cell| {
                let lo = family.cell_lo(cell);
                let hi = family.cell_hi(cell);
                if domain.box_entirely_outside(&lo, &hi) {
                    return (*cell, 0u8); // prune
                }
                let clearance = domain.cube_clearance(&lo, &hi);
                let diam = family.cell_side(cell.level) * sqrt_dim;
                if clearance >= diam {
                    debug_assert!(
                        cell.level == 0 || clearance <= 4.0 * diam * (1.0 + 1e-12),
                        "accepted cell too far from the complement"
                    );
                    (*cell, 1) // accept
                } else {
                    (*cell, 2) // subdivide
                }
            })
            .collect();
        let mut next = Vec::new();
        for (cell, verdict) in verdicts {
            match verdict {
                1 => family.cells.push(cell),
                2 => {
                    if cell.level == max_level {
                        family.truncated = true;
                    } else {
                        for corner in 0..(1u32 << dim) {
                            let mut child = DyadicCell { level: cell.level + 1, index: [0; MAX_DIM] };
                            for a in 0..dim {
                                child.index[a] = cell.index[a] * 2 + ((corner >> a) & 1) as i64;
                            }
                            next.push(child);
                        }
                    }
                }
                _ => {}
            }
        }
        frontier = next;
    }
    family.cells.sort();
    Ok(family)
}

/// Exact per-cell values for a decomposition: analytic cube diameter and the
/// exact oracle minimum over the cell.
#[derive(Clone, Copy, Debug)]
pub struct CellCheck {
    pub diameter: f64,
    pub distance: f64,
    pub ratio: f64,
}

pub fn exact_cell_checks(family: &WhitneyFamily) -> Vec<CellCheck> {
    family
        .cells
        .par_iter()
        .map(|cell| {
            let diameter = family.cell_diameter(cell);
            let distance = family.cell_distance(cell);
            CellCheck { diameter, distance, ratio: diameter / distance }
        })
        .collect()
}

/// Family-level summary, measured or exact.
#[derive(Clone, Copy, Debug)]
pub struct FamilyMetrics {
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub max_interior_dilatation: Option<f64>,
    pub coverage_fraction: f64,
    pub cell_count: usize,
}

/// Probe lattice for coverage: points of a grid with the given spacing,
/// aligned to the family's root corner, at least `margin` inside the domain.
pub fn interior_probes(family: &WhitneyFamily, spacing: f64, margin: f64) -> Vec<PointN> {
    let dim = family.dim();
    let counts = ((family.root_side / spacing).round() as usize).max(1);
    let mut probes = Vec::new();
    let mut idx = [0usize; MAX_DIM];
    loop {
        let mut cs = [0.0; MAX_DIM];
        for a in 0..dim {
            cs[a] = family.root_lo.get(a) + (idx[a] as f64 + 0.5) * spacing;
        }
        let p = PointN::new(&cs[..dim]);
        if family.domain.dist_to_complement(&p) >= margin {
            probes.push(p);
        }
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < counts {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == dim {
                return probes;
            }
        }
    }
}

/// Default probe parameters: spacing = side at max_level, margin = twice the
/// diameter of a max_level cell. Points that far inside the domain are
/// always covered by the decomposition (an ancestor at some level <= max
/// level is accepted), so coverage below 1 indicates a real gap.
pub fn default_probes(family: &WhitneyFamily) -> Vec<PointN> {
    let spacing = family.cell_side(family.max_level);
    let margin = 2.0 * spacing * (family.dim() as f64).sqrt();
    interior_probes(family, spacing, margin)
}

/// Fraction of probes lying in some accepted cell (dyadic lookup, exact).
pub fn family_coverage(family: &WhitneyFamily, probes: &[PointN]) -> f64 {
    if probes.is_empty() {
        return if family.cells.is_empty() { 0.0 } else { 1.0 };
    }
    let set: HashSet<DyadicCell> = family.cells.iter().copied().collect();
    let mut levels: Vec<u32> = family.cells.iter().map(|c| c.level).collect();
    levels.sort_unstable();
    levels.dedup();
    let dim = family.dim();
    let covered = probes
        .par_iter()
        .filter(|p| {
            for &level in &levels {
                let side = family.cell_side(level);
                let mut cell = DyadicCell { level, index: [0; MAX_DIM] };
                let mut ok = true;
                for a in 0..dim {
                    let i = ((p.get(a) - family.root_lo.get(a)) / side).floor();
                    if i < 0.0 || i >= (1u64 << level) as f64 {
                        ok = false;
                        break;
                    }
                    cell.index[a] = i as i64;
                }
                if ok && set.contains(&cell) {
                    return true;
                }
            }
            false
        })
        .count();
    covered as f64 / probes.len() as f64
}

/// Exact metrics of a decomposition. Cube dilatation is analytic: sqrt(n)
/// for every cube.
pub fn exact_family_metrics(family: &WhitneyFamily) -> FamilyMetrics {
    let checks = exact_cell_checks(family);
    let coverage = family_coverage(family, &default_probes(family));
    let mut min_ratio = None;
    let mut max_ratio = None;
    for c in &checks {
        min_ratio = Some(min_ratio.map_or(c.ratio, |m: f64| m.min(c.ratio)));
        max_ratio = Some(max_ratio.map_or(c.ratio, |m: f64| m.max(c.ratio)));
    }
    FamilyMetrics {
        min_ratio,
        max_ratio,
        max_interior_dilatation: if checks.is_empty() {
            None
        } else {
            Some((family.dim() as f64).sqrt())
        },
        coverage_fraction: coverage,
        cell_count: checks.len(),
    }
}

/// Per-body measurements of an arbitrary family.
#[derive(Clone, Copy, Debug)]
pub struct BodyMeasure {
    pub diameter: f64,
    pub distance: f64,
    pub ratio: f64,
    pub dilatation: f64,
}

#[derive(Clone, Debug)]
pub struct FamilyMeasurement {
    pub metrics: FamilyMetrics,
    pub per_body: Vec<BodyMeasure>,
}

/// Measure a family of bodies against a domain's complement. Coverage uses
/// a probe grid spaced by the finest body resolution, keeping clear of the
/// boundary by twice the smallest diameter; a probe counts as covered when
/// it is within one resolution of some body's samples.
pub fn measure_family(bodies: &[SampledBody], domain: &Domain) -> Result<FamilyMeasurement> {
    let mut min_diam = f64::INFINITY;
    let mut min_res = f64::INFINITY;
    let mut measures = Vec::with_capacity(bodies.len());
    for body in bodies {
        let distance = geometry::set_distance(body, domain)?;
        let diameter = geometry::diameter(body)?;
        let metrics = geometry::body_metrics(body)?;
        min_diam = min_diam.min(diameter);
        min_res = min_res.min(body.resolution);
        measures.push(BodyMeasure {
            diameter,
            distance,
            ratio: diameter / distance,
            dilatation: metrics.dilatation,
        });
    }
    let probes = if bodies.is_empty() {
        Vec::new()
    } else {
        let margin = 2.0 * min_diam;
        match domain.bounding_box() {
            Some((lo, hi)) => geometry::lattice_points(&lo, &hi, min_res, |p| {
                domain.dist_to_complement(p) >= margin
            }),
            None => Vec::new(),
        }
    };
    Ok(assemble_measurement(measures, bodies, &probes))
}

/// Same as measure_family but with an explicit distance oracle and probe
/// set; used for mapped families where the image domain has no closed form.
/// The oracle must return a nonnegative distance for points inside the
/// image domain (and may be an overestimate no larger than the probe gap).
pub fn measure_family_with<F>(
    bodies: &[SampledBody],
    dist_to_complement: F,
    probes: &[PointN],
) -> Result<FamilyMeasurement>
where
    F: Fn(&PointN) -> f64 + Sync,
{
    let mut measures = Vec::with_capacity(bodies.len());
    let computed: Vec<Result<BodyMeasure>> = bodies
        .par_iter()
        .map(|body| {
            let mut distance = f64::INFINITY;
            for p in &body.boundary_samples {
                distance = distance.min(dist_to_complement(p).max(0.0));
            }
            let diameter = geometry::diameter(body)?;
            let metrics = geometry::body_metrics(body)?;
            Ok(BodyMeasure {
                diameter,
                distance,
                ratio: diameter / distance,
                dilatation: metrics.dilatation,
            })
        })
        .collect();
    for m in computed {
        measures.push(m?);
    }
    Ok(assemble_measurement(measures, bodies, probes))
}

fn assemble_measurement(
    measures: Vec<BodyMeasure>,
    bodies: &[SampledBody],
    probes: &[PointN],
) -> FamilyMeasurement {
    let coverage = if probes.is_empty() {
        if bodies.is_empty() {
            0.0
        } else {
            1.0
        }
    } else {
        // bounding boxes inflated by resolution prefilter the probe tests
        let boxes: Vec<(PointN, PointN, f64)> = bodies
            .iter()
            .map(|b| {
                let (lo, hi) = b.bounding_box();
                (lo, hi, b.resolution)
            })
            .collect();
        let covered = probes
            .par_iter()
            .filter(|p| {
                for (bi, (lo, hi, res)) in boxes.iter().enumerate() {
                    let inside = (0..p.dim())
                        .all(|a| p.get(a) >= lo.get(a) - res && p.get(a) <= hi.get(a) + res);
                    if !inside {
                        continue;
                    }
                    let r2 = res * res;
                    if bodies[bi].all_samples().any(|q| q.dist2(p) <= r2) {
                        return true;
                    }
                }
                false
            })
            .count();
        covered as f64 / probes.len() as f64
    };
    let mut min_ratio = None;
    let mut max_ratio = None;
    let mut max_k = None;
    for m in &measures {
        min_ratio = Some(min_ratio.map_or(m.ratio, |v: f64| v.min(m.ratio)));
        max_ratio = Some(max_ratio.map_or(m.ratio, |v: f64| v.max(m.ratio)));
        max_k = Some(max_k.map_or(m.dilatation, |v: f64| v.max(m.dilatation)));
    }
    FamilyMeasurement {
        metrics: FamilyMetrics {
            min_ratio,
            max_ratio,
            max_interior_dilatation: max_k,
            coverage_fraction: coverage,
            cell_count: measures.len(),
        },
        per_body: measures,
    }
}

/// Verdict of the rough-family check with witness body indices per failed
/// clause.
#[derive(Clone, Debug)]
pub struct RoughWhitneyVerdict {
    pub pass: bool,
    pub min_ratio_ok: bool,
    pub max_ratio_ok: bool,
    pub dilatation_ok: bool,
    pub coverage_ok: bool,
    pub witnesses: Vec<(&'static str, usize)>,
}

/// Check the two-sided comparability (with constant C), the dilatation bound
/// and coverage. Ratio clauses hold vacuously for an empty family; coverage
/// then fails.
pub fn check_rough_whitney(
    measurement: &FamilyMeasurement,
    c: f64,
    k_bound: f64,
) -> RoughWhitneyVerdict {
    let m = &measurement.metrics;
    let min_ratio_ok = m.min_ratio.map_or(true, |v| v >= c);
    let max_ratio_ok = m.max_ratio.map_or(true, |v| v <= 1.0 / c);
    let dilatation_ok = m.max_interior_dilatation.map_or(true, |v| v <= k_bound);
    let coverage_ok = m.coverage_fraction >= 1.0 - PROBE_TOLERANCE;
    let mut witnesses = Vec::new();
    if !min_ratio_ok {
        if let Some(i) = argmin(&measurement.per_body, |b| b.ratio) {
            witnesses.push(("min_ratio", i));
        }
    }
    if !max_ratio_ok {
        if let Some(i) = argmax(&measurement.per_body, |b| b.ratio) {
            witnesses.push(("max_ratio", i));
        }
    }
    if !dilatation_ok {
        if let Some(i) = argmax(&measurement.per_body, |b| b.dilatation) {
            witnesses.push(("dilatation", i));
        }
    }
    RoughWhitneyVerdict {
        pass: min_ratio_ok && max_ratio_ok && dilatation_ok && coverage_ok,
        min_ratio_ok,
        max_ratio_ok,
        dilatation_ok,
        coverage_ok,
        witnesses,
    }
}

fn argmin(bodies: &[BodyMeasure], f: impl Fn(&BodyMeasure) -> f64) -> Option<usize> {
    bodies
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| f(a).total_cmp(&f(b)))
        .map(|(i, _)| i)
}

fn argmax(bodies: &[BodyMeasure], f: impl Fn(&BodyMeasure) -> f64) -> Option<usize> {
    bodies
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| f(a).total_cmp(&f(b)))
        .map(|(i, _)| i)
}

/// Sample a cell as a body: boundary lattice on the faces, interior lattice
/// inside, resolution = side / divisions exactly.
pub fn cell_body(family: &WhitneyFamily, cell: &DyadicCell, divisions: usize) -> SampledBody {
    let dim = family.dim();
    let div = divisions.max(2);
    let side = family.cell_side(cell.level);
    let lo = family.cell_lo(cell);
    let step = side / div as f64;
    let mut boundary = Vec::new();
    let mut interior = Vec::new();
    let mut idx = [0usize; MAX_DIM];
    loop {
        let on_face = (0..dim).any(|a| idx[a] == 0 || idx[a] == div);
        let mut cs = [0.0; MAX_DIM];
        for a in 0..dim {
            cs[a] = lo.get(a) + idx[a] as f64 * step;
        }
        let p = PointN::new(&cs[..dim]);
        if on_face {
            boundary.push(p);
        } else {
            interior.push(p);
        }
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] <= div {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == dim {
                return SampledBody::with_resolution(boundary, interior, step)
                    .expect("cell body construction is always valid");
            }
        }
    }
}

/// Ordered outline segments of the cell for plotting: each edge of the
/// square (2-d) or cube (3-d) subdivided into `div` straight pieces.
pub fn cell_outline(family: &WhitneyFamily, cell: &DyadicCell, div: usize) -> Vec<(PointN, PointN)> {
    let dim = family.dim();
    let lo = family.cell_lo(cell);
    let hi = family.cell_hi(cell);
    let div = div.max(1);
    let corner = |mask: usize| {
        let mut cs = [0.0; MAX_DIM];
        for a in 0..dim {
            cs[a] = if (mask >> a) & 1 == 1 { hi.get(a) } else { lo.get(a) };
        }
        PointN::new(&cs[..dim])
    };
    let mut segments = Vec::new();
    let corners = 1usize << dim;
    for mask in 0..corners {
        for a in 0..dim {
            if (mask >> a) & 1 == 0 {
                let from = corner(mask);
                let to = corner(mask | (1 << a));
                for k in 0..div {
                    segments.push((
                        from.lerp(&to, k as f64 / div as f64),
                        from.lerp(&to, (k + 1) as f64 / div as f64),
                    ));
                }
            }
        }
    }
    segments
}
