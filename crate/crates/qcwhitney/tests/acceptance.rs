use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, PI};

use qcwhitney::bounds::{prop3_bound, BoundsInput};
use qcwhitney::capacity::{
    derive_sphere_sobolev_constant, grid_capacity, ring_capacity_exact, ring_condenser, Condenser,
    SolverConfig,
};
use qcwhitney::domains::Domain;
use qcwhitney::geometry::{PointN, SampledBody};
use qcwhitney::pipeline::verify_family;
use qcwhitney::qcmaps::{by_name, empirical_q, standard_ring_suite};
use qcwhitney::whitney::{default_probes, family_coverage, whitney_decompose};

fn verdict(index: usize, name: &str, ok: bool, detail: &str) {
    println!("{index} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{index} {name} failed ({detail})");
}

#[test]
fn exact_ring_capacity_matches_closed_form() {
    // independent rederivation: w_1 = 2 pi, w_2 = 4 pi
    let cases = [(1.0, E, 2usize), (1.0, E, 3), (1.0, 2.0, 2), (2.0, 2.0 * E, 3)];
    let mut worst = 0.0f64;
    for (r, big_r, n) in cases {
        let w = if n == 2 { 2.0 * PI } else { 4.0 * PI };
        let expected = w * (big_r / r).ln().powi(1 - n as i32);
        let got = ring_capacity_exact(r, big_r, n).unwrap();
        worst = worst.max((got - expected).abs() / expected.abs());
    }
    verdict(1, "exact ring capacity", worst <= 1e-12, &format!("max rel err {worst:.2e}, tol 1e-12"));
}

#[test]
fn grid_solver_converges_on_the_ring() {
    let exact = 2.0 * PI / 2.0f64.ln();
    let solve = |h: f64| -> f64 {
        let pad = 0.5f64.max(4.0 * h);
        let cond = ring_condenser(&PointN::xy(0.0, 0.0), 1.0, 2.0, pad, h / 2.0).unwrap();
        let cfg = SolverConfig { h, ..SolverConfig::default() };
        grid_capacity(&cond, &cfg).unwrap().value.as_f64()
    };
    let err_fine = (solve(1.0 / 128.0) - exact).abs();
    let err_coarse = (solve(1.0 / 64.0) - exact).abs();
    let rel = err_fine / exact;
    let ratio = err_coarse / err_fine;
    verdict(
        2,
        "grid solver convergence",
        rel <= 0.02 && ratio >= 1.8,
        &format!("rel err at h=1/128 {rel:.4} (tol 0.02), h-refinement error ratio {ratio:.2} (min 1.8)"),
    );
}

#[test]
fn joined_continua_capacity_stays_above_the_sobolev_bound() {
    let k2 = derive_sphere_sobolev_constant(2, 4096).unwrap();
    let oracle_err = (k2 - FRAC_PI_2).abs() / FRAC_PI_2;
    // both plates join the circles of radii 1 and e, so the capacity is at
    // least ln(e/1) / K(2)
    let bound = 1.0 / k2;
    let h = 1.0 / 32.0;
    let res = h / 2.0;
    let curve = |n: usize, f: &dyn Fn(f64) -> (f64, f64)| -> SampledBody {
        let pts = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let (r, th) = f(t);
                PointN::xy(r * th.cos(), r * th.sin())
            })
            .collect();
        SampledBody::with_resolution(pts, Vec::new(), res).unwrap()
    };
    let seg = |angle: f64| curve(220, &move |t| (1.0 + t * (E - 1.0), angle));
    let spiral = curve(500, &|t| (t.exp(), FRAC_PI_2 * (1.0 + t)));
    let zigzag = curve(1200, &|t| (1.0 + t * (E - 1.0), PI + 0.25 * (6.0 * PI * t).sin()));
    let pairs = vec![
        (seg(0.0), seg(PI)),
        (seg(0.0), seg(FRAC_PI_2)),
        (seg(0.0), spiral),
        (seg(0.0), zigzag),
        (seg(0.0), seg(FRAC_PI_4)),
    ];
    let ambient = Domain::box_domain(PointN::xy(-3.3, -3.3), PointN::xy(3.3, 3.3)).unwrap();
    let cfg = SolverConfig { h, ..SolverConfig::default() };
    let mut min_est = f64::INFINITY;
    for (p0, p1) in pairs {
        let cond = Condenser::new(p0, p1, ambient.clone()).unwrap();
        let est = grid_capacity(&cond, &cfg).unwrap().value.as_f64();
        min_est = min_est.min(est);
    }
    verdict(
        3,
        "joined continua capacity bound",
        oracle_err <= 1e-3 && min_est >= bound,
        &format!(
            "circle oracle K(2) rel err {oracle_err:.2e} (tol 1e-3); min of 5 estimates {min_est:.4} >= {bound:.4}"
        ),
    );
}

#[test]
fn level_eight_square_family_obeys_the_two_sided_rule() {
    let domain = Domain::unit_square();
    let family = whitney_decompose(&domain, 8).unwrap();
    let mut violations = 0usize;
    for cell in &family.cells {
        let s = family.cell_side(cell.level);
        let lo = family.cell_lo(cell);
        let hi = family.cell_hi(cell);
        let mut dist = f64::INFINITY;
        for a in 0..2 {
            dist = dist.min(lo.get(a)).min(1.0 - hi.get(a));
        }
        // diam <= dist <= 4 diam, compared through exact dyadic squares
        let d2 = dist * dist;
        let diam2 = 2.0 * s * s;
        if !(dist > 0.0 && d2 >= diam2 && d2 <= 16.0 * diam2) {
            violations += 1;
        }
    }
    let coverage = family_coverage(&family, &default_probes(&family));
    verdict(
        4,
        "two-sided rule at level 8",
        violations == 0 && coverage >= 0.999,
        &format!(
            "{} cells, {violations} violations (exact comparison), coverage {coverage:.6} (min 0.999)",
            family.cells.len()
        ),
    );
}

#[test]
fn catalog_maps_keep_image_families_within_bounds() {
    let domain = Domain::box_domain(PointN::xy(0.25, 0.25), PointN::xy(1.25, 1.25)).unwrap();
    let cn = 2.0 / PI;
    let maps = vec![
        by_name("identity", 2, &[]).unwrap(),
        by_name(
            "similarity",
            2,
            &[
                ("scale".into(), 2.0),
                ("angle".into(), 0.7),
                ("shift_x".into(), 0.3),
                ("shift_y".into(), -0.2),
            ],
        )
        .unwrap(),
        by_name("radial-stretch", 2, &[("a".into(), 1.5)]).unwrap(),
        by_name("radial-stretch", 2, &[("a".into(), 2.0)]).unwrap(),
        by_name("diagonal", 2, &[("d1".into(), 2.0), ("d2".into(), 1.0)]).unwrap(),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for map in &maps {
        let report = verify_family(&domain, map, 6, 8, cn, 512).unwrap();
        let this = report.overall_pass
            && report.cells_failed == 0
            && report.family_verdict.pass
            && report.family_comparability > 0.0
            && report.family_comparability.is_finite()
            && report.family_dilatation_bound.is_finite();
        ok &= this;
        if !detail.is_empty() {
            detail.push_str(", ");
        }
        detail.push_str(&format!(
            "{} {}/{} cells",
            map.name(),
            report.cells.len() - report.cells_failed,
            report.cells.len()
        ));
    }
    verdict(5, "image families within bounds", ok, &format!("level 6, all clauses per cell: {detail}"));
}

#[test]
fn ring_distortion_matches_declared_q() {
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for map in [
        by_name("identity", 2, &[]).unwrap(),
        by_name("similarity", 2, &[("scale".into(), 2.0), ("angle".into(), 0.3)]).unwrap(),
    ] {
        let q = empirical_q(&map, &standard_ring_suite(&map), &cfg).unwrap();
        worst = worst.max((q - 1.0).abs());
    }
    for a in [1.5, 2.0] {
        let map = by_name("radial-stretch", 2, &[("a".into(), a)]).unwrap();
        let q = empirical_q(&map, &standard_ring_suite(&map), &cfg).unwrap();
        worst = worst.max((q - a).abs());
    }
    verdict(
        6,
        "empirical ring distortion",
        worst <= 1e-9,
        &format!("conformal maps give 1, radial stretch gives a (n=2); max abs err {worst:.2e}, tol 1e-9"),
    );
}

#[test]
fn degenerate_inputs_are_handled() {
    // plates are far apart at sample scale but collide in grid cells
    let cluster = |cx: f64| {
        let pts: Vec<PointN> = (0..4).map(|i| PointN::xy(cx + 1e-4 * i as f64, 0.0)).collect();
        SampledBody::with_resolution(pts, Vec::new(), 1e-4).unwrap()
    };
    let ambient = Domain::box_domain(PointN::xy(-1.0, -1.0), PointN::xy(1.0, 1.0)).unwrap();
    let cond = Condenser::new(cluster(0.0), cluster(1e-2), ambient).unwrap();
    let est = grid_capacity(&cond, &SolverConfig { h: 0.5, ..SolverConfig::default() }).unwrap();
    let infinite_ok = est.value.is_infinite() && est.iterations == 0;

    let blown = prop3_bound(&BoundsInput::new(1.0, 1.0 + 1e-12, 2, 2.0 / PI).unwrap()).unwrap();
    let finite = prop3_bound(&BoundsInput::new(1.0, 1.5, 2, 2.0 / PI).unwrap()).unwrap();
    let bound_ok = blown.is_infinite() && finite.is_finite();

    let family = whitney_decompose(&Domain::by_name("empty", 2).unwrap(), 6).unwrap();
    let empty_ok = family.cells.is_empty();

    verdict(
        7,
        "degenerate inputs",
        infinite_ok && bound_ok && empty_ok,
        &format!(
            "colliding plates give infinity in {} iterations; dilatation bound at vanishing margin {blown}; empty domain gives {} cells",
            est.iterations,
            family.cells.len()
        ),
    );
}
