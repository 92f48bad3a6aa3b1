//! Experiment pipelines behind the command-line interface: decompose a
//! domain, verify a mapped family against the distortion bounds, estimate a
//! condenser capacity. Each run writes deterministic JSON/CSV artifacts
//! into the output directory.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bounds::{self, BoundsInput, BoundsReport};
use crate::capacity::{
    derive_sphere_sobolev_constant, grid_capacity, ring_capacity_exact, ring_condenser,
    CapacityEstimate, CapacityValue, Condenser, RingSpec, SolverConfig,
};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::geometry::{self, sample_ball, PointN, SampledBody};
use crate::output::{fmt_cell, fmt_f64, Json};
use crate::qcmaps::{self, apply_map, QCMap};
use crate::whitney::{
    cell_body, cell_outline, check_rough_whitney, default_probes, exact_family_metrics,
    measure_family_with, whitney_decompose, BodyMeasure, DyadicCell, FamilyMetrics,
    RoughWhitneyVerdict, WhitneyFamily, PROBE_TOLERANCE,
};

/// Relative slack for the per-cell bound comparisons; the measured values
/// carry sampling error far above machine precision, the slack only guards
/// the exact-equality edge cases.
const REL_SLACK: f64 = 1e-9;

/// Circle discretization used to derive the default plane Sobolev constant.
const DEFAULT_CIRCLE_NODES: usize = 4096;

const DEFAULT_MAX_LEVEL: u32 = 6;
const DEFAULT_DIVISIONS: usize = 8;
const DEFAULT_BOUNDARY_PROBES: usize = 512;

/// Flat run configuration. Every field is optional; the runners fill in
/// defaults and reject combinations they cannot interpret. A config file is
/// plain `key=value` lines with `#` comments; command-line flags override
/// file entries.
#[derive(Clone, Debug, Default)]
pub struct ExperimentConfig {
    pub dim: Option<usize>,
    pub domain: Option<String>,
    pub box_spec: Option<Vec<f64>>,
    pub map: Option<String>,
    pub map_params: Vec<(String, f64)>,
    pub max_level: Option<u32>,
    pub divisions: Option<usize>,
    pub p: Option<f64>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<u64>,
    pub cn: Option<f64>,
    pub out: Option<PathBuf>,
    pub ring: Option<Vec<f64>>,
    pub plate0: Option<PathBuf>,
    pub plate1: Option<PathBuf>,
    pub probes: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "config line {}: expected key=value, got '{line}'",
                    lineno + 1
                )));
            };
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Assign one key. Unknown keys are rejected rather than ignored so a
    /// typo cannot silently fall back to a default.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dim" => self.dim = Some(parse_num(key, value)?),
            "domain" => self.domain = Some(value.to_string()),
            "box" => self.box_spec = Some(parse_f64_list(key, value)?),
            "map" => self.map = Some(value.to_string()),
            "map_params" => self.map_params = parse_key_values(value)?,
            "max_level" => self.max_level = Some(parse_num(key, value)?),
            "divisions" => self.divisions = Some(parse_num(key, value)?),
            "p" => self.p = Some(parse_num(key, value)?),
            "h" => self.h = Some(parse_num(key, value)?),
            "tol" => self.tol = Some(parse_num(key, value)?),
            "max_iter" => self.max_iter = Some(parse_num(key, value)?),
            "cn" => self.cn = Some(parse_num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "ring" => self.ring = Some(parse_f64_list(key, value)?),
            "plate0" => self.plate0 = Some(PathBuf::from(value)),
            "plate1" => self.plate1 = Some(PathBuf::from(value)),
            "probes" => self.probes = Some(parse_num(key, value)?),
            other => {
                return Err(Error::Config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    pub fn dim_value(&self) -> Result<usize> {
        let dim = match (&self.box_spec, self.dim) {
            (Some(b), given) => {
                let d = match b.len() {
                    4 => 2,
                    6 => 3,
                    k => {
                        return Err(Error::Config(format!(
                            "box needs 4 numbers (plane) or 6 (space), got {k}"
                        )))
                    }
                };
                if let Some(g) = given {
                    if g != d {
                        return Err(Error::Config(format!(
                            "dim {g} contradicts a box of dimension {d}"
                        )));
                    }
                }
                d
            }
            (None, Some(d)) => d,
            (None, None) => 2,
        };
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(dim)
    }

    pub fn resolve_domain(&self) -> Result<Domain> {
        let dim = self.dim_value()?;
        if let Some(b) = &self.box_spec {
            if self.domain.is_some() {
                return Err(Error::Config(
                    "give either a domain name or a box, not both".into(),
                ));
            }
            let (lo, hi) = if b.len() == 4 {
                (PointN::xy(b[0], b[1]), PointN::xy(b[2], b[3]))
            } else {
                (PointN::xyz(b[0], b[1], b[2]), PointN::xyz(b[3], b[4], b[5]))
            };
            return Domain::box_domain(lo, hi);
        }
        match &self.domain {
            Some(name) => Domain::by_name(name, dim),
            None => Err(Error::Config(
                "a domain name or a box is required".into(),
            )),
        }
    }

    pub fn resolve_map(&self, dim: usize) -> Result<QCMap> {
        let name = self.map.as_deref().unwrap_or("identity");
        qcmaps::by_name(name, dim, &self.map_params)
    }

    pub fn solver(&self, default_p: f64) -> Result<SolverConfig> {
        let d = SolverConfig::default();
        let cfg = SolverConfig {
            p: self.p.unwrap_or(default_p),
            h: self.h.unwrap_or(d.h),
            tol: self.tol.unwrap_or(d.tol),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
        };
        if !(cfg.h > 0.0 && cfg.h.is_finite()) {
            return Err(Error::Config(format!(
                "grid step h must be positive and finite, got {}",
                cfg.h
            )));
        }
        Ok(cfg)
    }

    /// 1/K(n). The plane value is derived from the circle oracle; there is
    /// no built-in value for n = 3, it must be configured.
    pub fn cn_value(&self, n: usize) -> Result<f64> {
        match self.cn {
            Some(v) if v > 0.0 && v.is_finite() => Ok(v),
            Some(v) => Err(Error::Config(format!(
                "cn must be positive and finite, got {v}"
            ))),
            None if n == 2 => Ok(1.0 / derive_sphere_sobolev_constant(2, DEFAULT_CIRCLE_NODES)?),
            None => Err(Error::Config(
                "cn has no built-in value for n = 3; set it explicitly".into(),
            )),
        }
    }

    pub fn max_level_value(&self) -> u32 {
        self.max_level.unwrap_or(DEFAULT_MAX_LEVEL)
    }

    pub fn divisions_value(&self) -> usize {
        self.divisions.unwrap_or(DEFAULT_DIVISIONS)
    }

    pub fn probes_value(&self) -> usize {
        self.probes.unwrap_or(DEFAULT_BOUNDARY_PROBES)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key}='{value}' as a number")))
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_num(key, v.trim()))
        .collect()
}

fn parse_key_values(value: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((k, v)) = part.split_once('=') else {
            return Err(Error::Config(format!(
                "map parameter '{part}' is not of the form name=value"
            )));
        };
        out.push((k.trim().to_string(), parse_num(k.trim(), v.trim())?));
    }
    Ok(out)
}

fn write_text(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn opt_num(v: Option<f64>) -> Json {
    v.map_or(Json::Null, Json::Num)
}

fn metrics_json(m: &FamilyMetrics) -> Json {
    Json::obj(vec![
        ("min_ratio", opt_num(m.min_ratio)),
        ("max_ratio", opt_num(m.max_ratio)),
        ("max_interior_dilatation", opt_num(m.max_interior_dilatation)),
        ("coverage_fraction", Json::Num(m.coverage_fraction)),
        ("cell_count", Json::Int(m.cell_count as i64)),
    ])
}

fn cell_id_json(cell: &DyadicCell, dim: usize) -> Vec<(&'static str, Json)> {
    let index = (0..dim).map(|a| Json::Int(cell.index[a])).collect();
    vec![
        ("level", Json::Int(cell.level as i64)),
        ("index", Json::Arr(index)),
    ]
}

/// Cell list as JSON lines, one `{"level":L,"index":[i,j(,k)]}` per line.
fn family_jsonl(family: &WhitneyFamily) -> String {
    let dim = family.dim();
    let mut out = String::new();
    for cell in &family.cells {
        out.push_str(&Json::obj(cell_id_json(cell, dim)).render_compact());
        out.push('\n');
    }
    out
}

/// Cell outlines as CSV segment lists for plotting, optionally together
/// with their images under a map (segments whose endpoints the map cannot
/// evaluate are dropped).
fn outlines_csv(family: &WhitneyFamily, map: Option<&QCMap>, div: usize) -> String {
    let dim = family.dim();
    let mut out = String::new();
    if dim == 2 {
        out.push_str("stage,level,i,j,segment,x0,y0,x1,y1\n");
    } else {
        out.push_str("stage,level,i,j,k,segment,x0,y0,z0,x1,y1,z1\n");
    }
    let mut row = |stage: &str, cell: &DyadicCell, seg: usize, a: &PointN, b: &PointN| {
        out.push_str(stage);
        out.push_str(&format!(",{}", cell.level));
        for axis in 0..dim {
            out.push_str(&format!(",{}", cell.index[axis]));
        }
        out.push_str(&format!(",{seg}"));
        for p in [a, b] {
            for axis in 0..dim {
                out.push(',');
                out.push_str(&fmt_cell(p.get(axis)));
            }
        }
        out.push('\n');
    };
    for cell in &family.cells {
        let segments = cell_outline(family, cell, div);
        for (seg, (a, b)) in segments.iter().enumerate() {
            row("source", cell, seg, a, b);
        }
        if let Some(m) = map {
            for (seg, (a, b)) in segments.iter().enumerate() {
                if let (Ok(fa), Ok(fb)) = (m.forward(a), m.forward(b)) {
                    row("image", cell, seg, &fa, &fb);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct DecomposeOutcome {
    pub family: WhitneyFamily,
    pub metrics: FamilyMetrics,
    /// Coverage fell below the probe tolerance; the caller should exit with
    /// the warning code.
    pub coverage_low: bool,
}

/// Decompose the configured domain and write `family.jsonl`,
/// `metrics.json` and `cells.csv`.
pub fn run_decompose(cfg: &ExperimentConfig) -> Result<DecomposeOutcome> {
    let domain = cfg.resolve_domain()?;
    if domain.bounding_box().is_none() {
        return Err(Error::Config(format!(
            "domain '{}' has no bounding box to decompose",
            domain.name()
        )));
    }
    let family = whitney_decompose(&domain, cfg.max_level_value())?;
    let metrics = exact_family_metrics(&family);
    let dir = cfg.out_dir();
    write_text(&dir, "family.jsonl", &family_jsonl(&family))?;
    write_text(&dir, "metrics.json", &metrics_json(&metrics).render_pretty())?;
    write_text(&dir, "cells.csv", &outlines_csv(&family, None, 1))?;
    println!(
        "decomposed '{}' to level {}: {} cells, coverage {}",
        domain.name(),
        cfg.max_level_value(),
        metrics.cell_count,
        fmt_f64(metrics.coverage_fraction)
    );
    let coverage_low = metrics.coverage_fraction < 1.0 - PROBE_TOLERANCE;
    if coverage_low {
        eprintln!(
            "warning: coverage {} is below the tolerance {}",
            fmt_f64(metrics.coverage_fraction),
            fmt_f64(1.0 - PROBE_TOLERANCE)
        );
    }
    Ok(DecomposeOutcome { family, metrics, coverage_low })
}

/// Distance to the complement of the image domain. When the map scales all
/// distances by a constant the source oracle transfers exactly through the
/// inverse; otherwise the distance is estimated from mapped boundary
/// probes, refined by bisecting the segment from the query point to the
/// nearest probe for the first exit from the image domain.
struct ImageDistance<'a> {
    map: &'a QCMap,
    domain: &'a Domain,
    scale: Option<f64>,
    probes: Vec<PointN>,
}

impl<'a> ImageDistance<'a> {
    fn new(map: &'a QCMap, domain: &'a Domain, probe_count: usize) -> Result<Self> {
        let scale = map.distance_scale();
        let probes: Vec<PointN> = if scale.is_some() {
            Vec::new()
        } else {
            domain
                .boundary_probes(probe_count)
                .iter()
                .filter_map(|p| map.forward(p).ok())
                .collect()
        };
        if scale.is_none() && probes.is_empty() {
            return Err(Error::InconsistentOracle(
                "no mappable boundary probes for the image domain".into(),
            ));
        }
        Ok(ImageDistance { map, domain, scale, probes })
    }

    fn inside(&self, z: &PointN) -> bool {
        match self.map.inverse(z) {
            Ok(x) => self.domain.dist_to_complement(&x) > 0.0,
            Err(_) => false,
        }
    }

    fn distance(&self, y: &PointN) -> f64 {
        if let Some(scale) = self.scale {
            return match self.map.inverse(y) {
                Ok(x) => scale * self.domain.dist_to_complement(&x).max(0.0),
                Err(_) => 0.0,
            };
        }
        let mut best = f64::INFINITY;
        let mut nearest = None;
        for q in &self.probes {
            let d = q.dist(y);
            if d < best {
                best = d;
                nearest = Some(q);
            }
        }
        let Some(q) = nearest else { return 0.0 };
        self.refine(y, q).unwrap_or(best)
    }

    /// First boundary crossing along the segment y -> q, to absolute
    /// tolerance 1e-6. Returns None when the whole segment stays inside
    /// (the straight-line distance to the probe is then the estimate).
    fn refine(&self, y: &PointN, q: &PointN) -> Option<f64> {
        let seg = y.dist(q);
        if seg == 0.0 {
            return Some(0.0);
        }
        const STEPS: usize = 20;
        let mut lo = 0.0f64;
        let mut hi = None;
        for k in 1..=STEPS {
            let t = k as f64 / STEPS as f64;
            if self.inside(&y.lerp(q, t)) {
                lo = t;
            } else {
                hi = Some(t);
                break;
            }
        }
        let mut hi = hi?;
        let tol = 1e-6 / seg;
        for _ in 0..60 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.inside(&y.lerp(q, mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi) * seg)
    }
}

fn measure_body(body: &SampledBody, dist: impl Fn(&PointN) -> f64) -> Result<BodyMeasure> {
    let mut distance = f64::INFINITY;
    for p in &body.boundary_samples {
        distance = distance.min(dist(p).max(0.0));
    }
    let diameter = geometry::diameter(body)?;
    let metrics = geometry::body_metrics(body)?;
    Ok(BodyMeasure {
        diameter,
        distance,
        ratio: diameter / distance,
        dilatation: metrics.dilatation,
    })
}

/// Everything measured and checked for one cell. `None` fields mean the
/// stage was not reached; `error` says why.
#[derive(Clone, Debug)]
pub struct CellVerification {
    pub cell: DyadicCell,
    pub embedding_coefficient: Option<f64>,
    /// Image of the cell's inscribed ball.
    pub quasiball: Option<BodyMeasure>,
    /// Image of the sampled cell itself.
    pub image_cell: Option<BodyMeasure>,
    /// Cap on the quasiball dilatation.
    pub dilatation_bound: Option<f64>,
    /// Cap on the quasiball diameter/distance ratio, at the measured
    /// dilatation.
    pub ratio_upper_bound: Option<f64>,
    pub c0: Option<f64>,
    /// Floor for the quasiball diameter/distance ratio.
    pub ratio_lower_bound: Option<f64>,
    pub dilatation_ok: bool,
    pub ratio_upper_ok: bool,
    pub ratio_lower_ok: bool,
    pub pass: bool,
    pub error: Option<String>,
}

impl CellVerification {
    fn unreached(cell: DyadicCell) -> Self {
        CellVerification {
            cell,
            embedding_coefficient: None,
            quasiball: None,
            image_cell: None,
            dilatation_bound: None,
            ratio_upper_bound: None,
            c0: None,
            ratio_lower_bound: None,
            dilatation_ok: false,
            ratio_upper_ok: false,
            ratio_lower_ok: false,
            pass: false,
            error: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub domain: String,
    pub dim: usize,
    pub map: String,
    pub declared_q: f64,
    pub cn: f64,
    pub max_level: u32,
    pub divisions: usize,
    pub family: WhitneyFamily,
    pub source_metrics: FamilyMetrics,
    pub image_metrics: FamilyMetrics,
    /// Comparability constant the image family is checked against,
    /// combined from the per-cell bounds.
    pub family_comparability: f64,
    pub family_dilatation_bound: f64,
    pub family_verdict: RoughWhitneyVerdict,
    pub cells: Vec<CellVerification>,
    pub cells_failed: usize,
    /// True exactly when every per-cell clause passed.
    pub overall_pass: bool,
}

fn verify_cell(
    family: &WhitneyFamily,
    domain: &Domain,
    map: &QCMap,
    oracle: &ImageDistance,
    cell: &DyadicCell,
    divisions: usize,
    q: f64,
    cn: f64,
    ball_samples: usize,
) -> (CellVerification, Option<SampledBody>) {
    let mut rec = CellVerification::unreached(*cell);
    let mut mapped_body = None;
    let n = domain.dim();
    let outcome = (|| -> Result<()> {
        let inball = family.cell_inball(cell);
        let c_r = domain.embedding_coefficient(&inball)?;
        rec.embedding_coefficient = Some(c_r);
        let input = BoundsInput::new(q, c_r, n, cn)?;
        let k_upper = bounds::prop3_bound(&input)?;
        let (c0, c3) = bounds::prop5_constant(&input)?;
        rec.dilatation_bound = Some(k_upper);
        rec.c0 = Some(c0);
        rec.ratio_lower_bound = Some(c3);

        let body = cell_body(family, cell, divisions);
        let image = apply_map(map, &body)?;
        rec.image_cell = Some(measure_body(&image, |p| oracle.distance(p))?);
        mapped_body = Some(image);

        let ball = sample_ball(&inball, ball_samples)?;
        let image_ball = apply_map(map, &ball)?;
        let qb = measure_body(&image_ball, |p| oracle.distance(p))?;
        // Sampling can report a dilatation a hair under 1; the bound is
        // only defined from 1 up.
        let ratio_upper = bounds::prop4_factor(qb.dilatation.max(1.0), &input)?;
        rec.ratio_upper_bound = Some(ratio_upper);
        rec.dilatation_ok = qb.dilatation <= k_upper * (1.0 + REL_SLACK);
        rec.ratio_upper_ok = qb.ratio <= ratio_upper * (1.0 + REL_SLACK);
        rec.ratio_lower_ok = qb.ratio >= c3 * (1.0 - REL_SLACK);
        rec.quasiball = Some(qb);
        rec.pass = rec.dilatation_ok && rec.ratio_upper_ok && rec.ratio_lower_ok;
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(e.to_string());
        rec.pass = false;
    }
    (rec, mapped_body)
}

/// Decompose the domain, push every cell and its inscribed ball through
/// the map, measure the images against the image-domain complement, and
/// check each cell against the distortion bounds evaluated at its own
/// embedding coefficient.
pub fn verify_family(
    domain: &Domain,
    map: &QCMap,
    max_level: u32,
    divisions: usize,
    cn: f64,
    probe_count: usize,
) -> Result<VerificationReport> {
    if map.dim() != domain.dim() {
        return Err(Error::Config(format!(
            "map dimension {} does not match domain dimension {}",
            map.dim(),
            domain.dim()
        )));
    }
    let n = domain.dim();
    let family = whitney_decompose(domain, max_level)?;
    let source_metrics = exact_family_metrics(&family);
    let oracle = ImageDistance::new(map, domain, probe_count)?;
    let q = map.declared_q().max(1.0);
    let ball_samples = if n == 2 { 128 } else { 400 };

    let per_cell: Vec<(CellVerification, Option<SampledBody>)> = family
        .cells
        .par_iter()
        .map(|cell| {
            verify_cell(&family, domain, map, &oracle, cell, divisions, q, cn, ball_samples)
        })
        .collect();
    let mut cells = Vec::with_capacity(per_cell.len());
    let mut mapped = Vec::new();
    for (rec, body) in per_cell {
        cells.push(rec);
        if let Some(b) = body {
            mapped.push(b);
        }
    }

    let probes: Vec<PointN> = default_probes(&family)
        .iter()
        .filter_map(|p| map.forward(p).ok())
        .collect();
    let image_measurement = measure_family_with(&mapped, |p| oracle.distance(p), &probes)?;

    let mut c_fam = f64::INFINITY;
    let mut k_fam = 1.0f64;
    for rec in &cells {
        if let Some(c3) = rec.ratio_lower_bound {
            c_fam = c_fam.min(c3);
        }
        if let Some(up) = rec.ratio_upper_bound {
            if up > 0.0 {
                c_fam = c_fam.min(1.0 / up);
            }
        }
        if let Some(k) = rec.dilatation_bound {
            k_fam = k_fam.max(k);
        }
    }
    if !c_fam.is_finite() {
        c_fam = 1.0;
    }
    // The ratio floor underflows to zero for wide cells; the comparability
    // check must still be evaluable.
    if c_fam <= 0.0 {
        c_fam = f64::MIN_POSITIVE;
    }
    let family_verdict = check_rough_whitney(&image_measurement, c_fam, k_fam);
    let cells_failed = cells.iter().filter(|c| !c.pass).count();
    let overall_pass = cells_failed == 0;

    Ok(VerificationReport {
        domain: domain.name().to_string(),
        dim: n,
        map: map.name().to_string(),
        declared_q: map.declared_q(),
        cn,
        max_level,
        divisions,
        family,
        source_metrics,
        image_metrics: image_measurement.metrics,
        family_comparability: c_fam,
        family_dilatation_bound: k_fam,
        family_verdict,
        cells,
        cells_failed,
        overall_pass,
    })
}

fn measure_json(m: &BodyMeasure) -> Json {
    Json::obj(vec![
        ("delta", Json::Num(m.diameter)),
        ("dist", Json::Num(m.distance)),
        ("ratio", Json::Num(m.ratio)),
        ("dilatation", Json::Num(m.dilatation)),
    ])
}

fn cell_verification_json(rec: &CellVerification, dim: usize) -> Json {
    let mut pairs = cell_id_json(&rec.cell, dim);
    pairs.push(("embedding_coefficient", opt_num(rec.embedding_coefficient)));
    pairs.push((
        "quasiball",
        rec.quasiball.as_ref().map_or(Json::Null, measure_json),
    ));
    pairs.push((
        "image_cell",
        rec.image_cell.as_ref().map_or(Json::Null, measure_json),
    ));
    pairs.push(("dilatation_bound", opt_num(rec.dilatation_bound)));
    pairs.push(("ratio_upper_bound", opt_num(rec.ratio_upper_bound)));
    pairs.push(("ratio_lower_bound", opt_num(rec.ratio_lower_bound)));
    pairs.push(("c0", opt_num(rec.c0)));
    pairs.push((
        "clauses",
        Json::obj(vec![
            ("dilatation", Json::Bool(rec.dilatation_ok)),
            ("ratio_upper", Json::Bool(rec.ratio_upper_ok)),
            ("ratio_lower", Json::Bool(rec.ratio_lower_ok)),
        ]),
    ));
    pairs.push(("pass", Json::Bool(rec.pass)));
    pairs.push((
        "error",
        rec.error.as_deref().map_or(Json::Null, Json::str),
    ));
    Json::obj(pairs)
}

fn verdict_json(v: &RoughWhitneyVerdict, c: f64, k_bound: f64) -> Json {
    Json::obj(vec![
        ("comparability_constant", Json::Num(c)),
        ("dilatation_bound", Json::Num(k_bound)),
        ("pass", Json::Bool(v.pass)),
        ("min_ratio_ok", Json::Bool(v.min_ratio_ok)),
        ("max_ratio_ok", Json::Bool(v.max_ratio_ok)),
        ("dilatation_ok", Json::Bool(v.dilatation_ok)),
        ("coverage_ok", Json::Bool(v.coverage_ok)),
    ])
}

fn report_json(r: &VerificationReport) -> Json {
    Json::obj(vec![
        ("domain", Json::str(r.domain.as_str())),
        ("dim", Json::Int(r.dim as i64)),
        ("max_level", Json::Int(r.max_level as i64)),
        ("divisions", Json::Int(r.divisions as i64)),
        ("map", Json::str(r.map.as_str())),
        ("declared_q", Json::Num(r.declared_q)),
        ("cn", Json::Num(r.cn)),
        ("cell_count", Json::Int(r.cells.len() as i64)),
        ("cells_failed", Json::Int(r.cells_failed as i64)),
        ("overall_pass", Json::Bool(r.overall_pass)),
        ("source_metrics", metrics_json(&r.source_metrics)),
        ("image_metrics", metrics_json(&r.image_metrics)),
        (
            "family_check",
            verdict_json(&r.family_verdict, r.family_comparability, r.family_dilatation_bound),
        ),
        (
            "cells",
            Json::Arr(r.cells.iter().map(|c| cell_verification_json(c, r.dim)).collect()),
        ),
    ])
}

/// Run the full verification pipeline and write `report.json` and
/// `cells.csv` (source and image outlines).
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let domain = cfg.resolve_domain()?;
    if domain.bounding_box().is_none() {
        return Err(Error::Config(format!(
            "domain '{}' has no bounding box to decompose",
            domain.name()
        )));
    }
    let n = domain.dim();
    let map = cfg.resolve_map(n)?;
    let cn = cfg.cn_value(n)?;
    let report = verify_family(
        &domain,
        &map,
        cfg.max_level_value(),
        cfg.divisions_value(),
        cn,
        cfg.probes_value(),
    )?;
    let dir = cfg.out_dir();
    write_text(&dir, "report.json", &report_json(&report).render_pretty())?;
    write_text(
        &dir,
        "cells.csv",
        &outlines_csv(&report.family, Some(&map), cfg.divisions_value()),
    )?;
    println!(
        "verified map '{}' on '{}': {} cells, {} failed",
        report.map,
        report.domain,
        report.cells.len(),
        report.cells_failed
    );
    println!(
        "family check: {}",
        if report.family_verdict.pass { "pass" } else { "fail" }
    );
    println!("overall: {}", if report.overall_pass { "PASS" } else { "FAIL" });
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct CapacityOutcome {
    pub estimate: CapacityEstimate,
    pub exact: Option<f64>,
    pub relative_gap: Option<f64>,
}

fn capacity_json(
    kind: &str,
    ring: Option<&RingSpec>,
    solver: &SolverConfig,
    est: &CapacityEstimate,
    exact: Option<f64>,
    gap: Option<f64>,
    converged: bool,
) -> Json {
    let mut pairs = vec![
        ("kind", Json::str(kind)),
        ("p", Json::Num(solver.p)),
        ("h", Json::Num(solver.h)),
        ("tol", Json::Num(solver.tol)),
        ("max_iter", Json::Int(solver.max_iter as i64)),
    ];
    if let Some(spec) = ring {
        pairs.push(("r", Json::Num(spec.r)));
        pairs.push(("big_r", Json::Num(spec.big_r)));
        let center = (0..spec.center.dim())
            .map(|a| Json::Num(spec.center.get(a)))
            .collect();
        pairs.push(("center", Json::Arr(center)));
    }
    pairs.push(("value", Json::Num(est.value.as_f64())));
    pairs.push(("iterations", Json::Int(est.iterations as i64)));
    pairs.push(("residual", Json::Num(est.residual)));
    pairs.push(("converged", Json::Bool(converged)));
    if let Some(ex) = exact {
        pairs.push(("exact_value", Json::Num(ex)));
        pairs.push(("relative_gap", opt_num(gap)));
    }
    Json::obj(pairs)
}

fn read_body(path: &Path) -> Result<SampledBody> {
    let file = fs::File::open(path)?;
    SampledBody::read_csv(BufReader::new(file))
}

/// Estimate the configured condenser capacity and write `capacity.json`.
/// A centered ring is also compared against the closed form when p equals
/// the dimension. Non-convergence still writes the partial estimate, then
/// surfaces the error so the process exits with the solver code.
pub fn run_capacity(cfg: &ExperimentConfig) -> Result<CapacityOutcome> {
    let dir = cfg.out_dir();
    let (condenser, kind, ring) = if let Some(vals) = &cfg.ring {
        if cfg.plate0.is_some() || cfg.plate1.is_some() {
            return Err(Error::Config(
                "give a ring or two plate files, not both".into(),
            ));
        }
        if cfg.domain.is_some() || cfg.box_spec.is_some() {
            return Err(Error::Config(
                "a ring condenser builds its own ambient box; drop the domain/box".into(),
            ));
        }
        let (center, r, big_r) = match vals.len() {
            2 => (PointN::zero(cfg.dim_value()?), vals[0], vals[1]),
            4 => (PointN::xy(vals[2], vals[3]), vals[0], vals[1]),
            5 => (PointN::xyz(vals[2], vals[3], vals[4]), vals[0], vals[1]),
            k => {
                return Err(Error::Config(format!(
                    "ring needs r,R[,cx,cy[,cz]] (2, 4 or 5 numbers), got {k}"
                )))
            }
        };
        if let Some(d) = cfg.dim {
            if d != center.dim() {
                return Err(Error::Config(format!(
                    "dim {d} contradicts a ring center of dimension {}",
                    center.dim()
                )));
            }
        }
        let spec = RingSpec::new(center, r, big_r)?;
        let solver = cfg.solver(center.dim() as f64)?;
        let pad = (0.25 * big_r).max(4.0 * solver.h);
        let cond = ring_condenser(&spec.center, spec.r, spec.big_r, pad, solver.h / 2.0)?;
        (cond, "ring", Some(spec))
    } else if let (Some(p0), Some(p1)) = (&cfg.plate0, &cfg.plate1) {
        let b0 = read_body(p0)?;
        let b1 = read_body(p1)?;
        let ambient = if cfg.domain.is_some() || cfg.box_spec.is_some() {
            cfg.resolve_domain()?
        } else {
            Domain::whole_space(b0.dim())?
        };
        (Condenser::new(b0, b1, ambient)?, "plates", None)
    } else {
        return Err(Error::Config(
            "capacity needs ring=r,R[,cx,cy[,cz]] or plate0/plate1 sample files".into(),
        ));
    };

    let n = condenser.dim();
    let solver = cfg.solver(n as f64)?;
    let exact = match &ring {
        Some(spec) if (solver.p - n as f64).abs() < 1e-12 => {
            Some(ring_capacity_exact(spec.r, spec.big_r, n)?)
        }
        _ => None,
    };
    let finish = |est: &CapacityEstimate, converged: bool| -> Result<Option<f64>> {
        let gap = match (exact, &est.value) {
            (Some(ex), CapacityValue::Finite(v)) => Some((v - ex).abs() / ex),
            _ => None,
        };
        write_text(
            &dir,
            "capacity.json",
            &capacity_json(kind, ring.as_ref(), &solver, est, exact, gap, converged)
                .render_pretty(),
        )?;
        println!(
            "capacity ({kind}, p = {}): {}{}",
            fmt_f64(solver.p),
            fmt_f64(est.value.as_f64()),
            if converged { "" } else { " (not converged)" }
        );
        if let (Some(ex), Some(g)) = (exact, gap) {
            println!("exact {} relative gap {}", fmt_f64(ex), fmt_f64(g));
        }
        Ok(gap)
    };
    match grid_capacity(&condenser, &solver) {
        Ok(est) => {
            let gap = finish(&est, true)?;
            Ok(CapacityOutcome { estimate: est, exact, relative_gap: gap })
        }
        Err(Error::NonConvergence { estimate }) => {
            finish(&estimate, false)?;
            eprintln!(
                "solver stopped at max_iter {} with residual {}",
                solver.max_iter,
                fmt_f64(estimate.residual)
            );
            Err(Error::NonConvergence { estimate })
        }
        Err(e) => Err(e),
    }
}

/// JSON form of a bounds report, for the CLI.
pub fn bounds_json(report: &BoundsReport) -> Json {
    Json::obj(vec![
        ("q", Json::Num(report.input.q)),
        ("c_r", Json::Num(report.input.c_r)),
        ("n", Json::Int(report.input.n as i64)),
        ("cn", Json::Num(report.input.cn)),
        ("k_r_bound", Json::Num(report.k_r_bound)),
        ("delta_upper_factor", Json::Num(report.delta_upper_factor)),
        ("c0", Json::Num(report.c0)),
        ("c3", Json::Num(report.c3)),
        (
            "notes",
            Json::Arr(report.notes.iter().map(|n| Json::str(*n)).collect()),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, text: &str) -> PathBuf {
        let path = dir.join("run.cfg");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        path
    }

    #[test]
    fn config_file_parses_and_flags_override() {
        let tmp = tempfile::tempdir().unwrap();
        let path = write_config(
            tmp.path(),
            "# comment\ndomain = square\nmax_level = 4 # inline\nh = 0.125\nmap_params = a=1.5\n",
        );
        let mut cfg = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!(cfg.domain.as_deref(), Some("square"));
        assert_eq!(cfg.max_level, Some(4));
        assert_eq!(cfg.h, Some(0.125));
        assert_eq!(cfg.map_params, vec![("a".to_string(), 1.5)]);
        cfg.set("max_level", "5").unwrap();
        assert_eq!(cfg.max_level_value(), 5);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.set("levels", "4").is_err());
        assert!(cfg.set("max_level", "four").is_err());
        assert!(cfg.set("box", "0,0,1").is_ok());
        assert!(cfg.dim_value().is_err(), "a 3-number box has no dimension");
        let tmp = tempfile::tempdir().unwrap();
        let path = write_config(tmp.path(), "domain square\n");
        assert!(ExperimentConfig::from_file(&path).is_err());
    }

    #[test]
    fn box_and_domain_resolution() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("box", "0,0,2,1").unwrap();
        let d = cfg.resolve_domain().unwrap();
        assert_eq!(d.dim(), 2);
        assert!(d.is_bounded());
        cfg.domain = Some("square".into());
        assert!(cfg.resolve_domain().is_err(), "both box and domain given");

        let mut named = ExperimentConfig::default();
        named.domain = Some("disk".into());
        assert_eq!(named.resolve_domain().unwrap().name(), "disk");
        assert!(ExperimentConfig::default().resolve_domain().is_err());
    }

    #[test]
    fn decompose_writes_the_three_files() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.domain = Some("square".into());
        cfg.max_level = Some(4);
        cfg.out = Some(tmp.path().join("run"));
        let outcome = run_decompose(&cfg).unwrap();
        assert!(!outcome.coverage_low);
        assert!(outcome.metrics.cell_count > 0);

        let jsonl = fs::read_to_string(tmp.path().join("run/family.jsonl")).unwrap();
        let first = jsonl.lines().next().unwrap();
        assert!(first.starts_with("{\"level\":") && first.contains("\"index\":["));
        assert_eq!(jsonl.lines().count(), outcome.metrics.cell_count);

        let metrics = fs::read_to_string(tmp.path().join("run/metrics.json")).unwrap();
        assert!(metrics.contains("\"coverage_fraction\""));
        let csv = fs::read_to_string(tmp.path().join("run/cells.csv")).unwrap();
        assert!(csv.starts_with("stage,level,i,j,segment,x0,y0,x1,y1"));
        assert!(csv.contains("source,"));
    }

    #[test]
    fn decompose_rejects_domains_without_a_bounding_box() {
        let mut cfg = ExperimentConfig::default();
        cfg.domain = Some("empty".into());
        assert!(matches!(run_decompose(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn verify_identity_matches_source_metrics() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.domain = Some("square".into());
        cfg.max_level = Some(4);
        cfg.divisions = Some(4);
        cfg.out = Some(tmp.path().to_path_buf());
        let report = run_verify(&cfg).unwrap();
        assert!(report.overall_pass);
        assert!(report.family_verdict.pass);
        assert_eq!(report.cells_failed, 0);
        let src = &report.source_metrics;
        let img = &report.image_metrics;
        assert!((src.min_ratio.unwrap() - img.min_ratio.unwrap()).abs() < 1e-9);
        assert!((src.max_ratio.unwrap() - img.max_ratio.unwrap()).abs() < 1e-9);
        assert!(
            (img.max_interior_dilatation.unwrap() - 2.0f64.sqrt()).abs() < 1e-9,
            "identity images of squares stay squares"
        );
        assert_eq!(img.cell_count, src.cell_count);
        assert!(img.coverage_fraction >= 1.0 - PROBE_TOLERANCE);

        let text = fs::read_to_string(tmp.path().join("report.json")).unwrap();
        assert!(text.contains("\"overall_pass\": true"));
        let csv = fs::read_to_string(tmp.path().join("cells.csv")).unwrap();
        assert!(csv.contains("image,"));
    }

    #[test]
    fn verify_records_cells_the_map_cannot_evaluate() {
        // A stretch centered at a dyadic corner inside the domain: the
        // sample lattice hits the singular point exactly for some cells.
        let domain = Domain::unit_square();
        let map = qcmaps::by_name(
            "radial-stretch",
            2,
            &[("a".to_string(), 2.0), ("center_x".to_string(), 0.5), ("center_y".to_string(), 0.5)],
        )
        .unwrap();
        let report = verify_family(&domain, &map, 3, 4, 2.0 / std::f64::consts::PI, 128).unwrap();
        assert!(!report.overall_pass);
        assert!(report.cells_failed > 0);
        let failed = report.cells.iter().find(|c| c.error.is_some()).unwrap();
        assert!(failed.error.as_deref().unwrap().contains("undefined"));
    }

    #[test]
    fn capacity_ring_reports_exact_and_gap() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.ring = Some(vec![1.0, 2.0]);
        cfg.h = Some(1.0 / 24.0);
        cfg.out = Some(tmp.path().to_path_buf());
        let outcome = run_capacity(&cfg).unwrap();
        let exact = outcome.exact.unwrap();
        assert!((exact - ring_capacity_exact(1.0, 2.0, 2).unwrap()).abs() < 1e-15);
        assert!(outcome.relative_gap.unwrap() < 0.15);
        let text = fs::read_to_string(tmp.path().join("capacity.json")).unwrap();
        assert!(text.contains("\"kind\": \"ring\""));
        assert!(text.contains("\"converged\": true"));
        assert!(text.contains("\"exact_value\""));
    }

    #[test]
    fn capacity_nonconvergence_still_writes_partial_estimate() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.ring = Some(vec![1.0, 2.0]);
        cfg.h = Some(1.0 / 16.0);
        cfg.max_iter = Some(2);
        cfg.out = Some(tmp.path().to_path_buf());
        let err = run_capacity(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let text = fs::read_to_string(tmp.path().join("capacity.json")).unwrap();
        assert!(text.contains("\"converged\": false"));
    }

    #[test]
    fn capacity_requires_a_condenser_spec() {
        let cfg = ExperimentConfig::default();
        assert!(matches!(run_capacity(&cfg), Err(Error::Config(_))));
        let mut both = ExperimentConfig::default();
        both.ring = Some(vec![1.0, 2.0]);
        both.plate0 = Some(PathBuf::from("x.csv"));
        both.plate1 = Some(PathBuf::from("y.csv"));
        assert!(matches!(run_capacity(&both), Err(Error::Config(_))));
    }

    #[test]
    fn image_distance_refinement_matches_exact_scale_path() {
        // diag(2, 2) is a similarity in disguise; force the probe path and
        // compare against the exact transfer.
        let domain = Domain::unit_square();
        let diag = qcmaps::by_name("diagonal", 2, &[("d1".into(), 2.0), ("d2".into(), 2.0)]).unwrap();
        let oracle = ImageDistance::new(&diag, &domain, 4096).unwrap();
        assert!(oracle.scale.is_some(), "uniform diagonal scales distances");
        let forced = ImageDistance {
            map: &diag,
            domain: &domain,
            scale: None,
            probes: domain
                .boundary_probes(4096)
                .iter()
                .map(|p| diag.forward(p).unwrap())
                .collect(),
        };
        for (x, y) in [(0.5, 0.5), (0.25, 0.125), (0.8, 0.55)] {
            let q = PointN::xy(2.0 * x, 2.0 * y);
            let exact = 2.0 * domain.dist_to_complement(&PointN::xy(x, y));
            let probed = forced.distance(&q);
            assert!(
                (probed - exact).abs() < 5e-3,
                "probe path {probed} vs exact {exact}"
            );
            assert!(probed >= exact - 1e-6, "ray estimates cannot undershoot");
        }
    }

    #[test]
    fn bounds_json_round_trip_fields() {
        let input = BoundsInput::new(1.0, 2.0, 2, 2.0 / std::f64::consts::PI).unwrap();
        let report = bounds::bounds_report(&input).unwrap();
        let text = bounds_json(&report).render_pretty();
        assert!(text.contains("\"k_r_bound\""));
        assert!(text.contains("\"delta_upper_factor\""));
        assert!(text.contains("\"c3\""));
    }
}
