//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them).
//!
//! The criteria pin every tolerance in code; nothing is deferred to later
//! calibration.

use std::time::Instant;

use rayon::prelude::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polycarve::boxing::min_volume_box;
use polycarve::generate::{generate, Generator, Instance};
use polycarve::hull::{convex_hull, sphere_points};
use polycarve::oracle;
use polycarve::plan::{build_plan, replay, CutPlan};
use polycarve::planfile::plan_to_string;
use polycarve::separation::d_separation;
use polycarve::{
    supporting_margin, Ball, CutKind, Plane, Region, SourceFeature, TolerancePolicy, Vec3,
};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn report(criterion: u32, ok: bool, detail: &str) {
    println!(
        "criterion {criterion:>2} {}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion}: {detail}");
}

/// The shared mixed instance family ("all test instances" for the coverage,
/// safety and cap criteria).
fn instance_family() -> Vec<(Instance, u64)> {
    let mut family = Vec::new();
    for (g, seed) in [
        (Generator::Tetrahedron, 101u64),
        (Generator::Cube, 102),
        (Generator::Octahedron, 103),
        (Generator::Icosahedron, 104),
    ] {
        family.push((generate(&g, &tol()).unwrap(), seed));
    }
    for &n in &[8usize, 16, 32, 64, 128] {
        for seed in [1u64, 2] {
            let g = Generator::RandomHull { n, seed };
            family.push((generate(&g, &tol()).unwrap(), seed));
        }
    }
    for &n in &[16usize, 32, 64] {
        for seed in [3u64, 4] {
            let g = Generator::RandomCornered { n, seed };
            family.push((generate(&g, &tol()).unwrap(), seed));
        }
    }
    family
}

fn family_plans() -> Vec<(Instance, CutPlan)> {
    instance_family()
        .into_par_iter()
        .map(|(inst, seed)| {
            let plan = build_plan(&inst.poly, &inst.ball, seed, &tol()).unwrap();
            (inst, plan)
        })
        .collect()
}

#[test]
fn criterion_01_analytic_cost_anchor() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let radius: f64 = rng.random_range(0.1..10.0);
        let d: f64 = rng.random_range(0.0..radius * 0.999);
        let center = Vec3::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        let n = loop {
            let v = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if let Some(u) = v.normalized() {
                break u;
            }
        };
        let region = Region::new(Ball::new(center, radius));
        let plane = Plane::new(n, n.dot(center) + d);
        let cost = region.cut_cost(&plane);
        let expect = std::f64::consts::PI * (radius * radius - d * d);
        worst = worst.max((cost - expect).abs() / expect);
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        1,
        worst <= 1e-9 && secs < 1.0,
        &format!("1000 fresh-ball cuts match pi(R^2-d^2); worst rel err {worst:.2e}, {secs:.2} s (< 1 s)"),
    );
}

#[test]
fn criterion_02_d_separation_against_sampling_oracle() {
    let t0 = Instant::now();
    let cases: Vec<u64> = (0..100).collect();
    let results: Vec<(f64, f64, bool)> = cases
        .par_iter()
        .map(|&k| {
            let n = 10 + (k as usize * 7) % 41; // 10..50
            let inst = generate(&Generator::RandomCornered { n, seed: 500 + k }, &tol()).unwrap();
            let ball = inst.ball;
            let plane = d_separation(&inst.poly, &ball, &tol()).unwrap();

            let sampled = oracle::sampled_closest_point(&inst.poly, ball.center, 0.02);
            let n_hat = (sampled - ball.center).normalized().unwrap();
            let oracle_plane = Plane::new(n_hat, n_hat.dot(sampled));
            let angle = plane
                .unit_normal
                .dot(oracle_plane.unit_normal)
                .clamp(-1.0, 1.0)
                .acos();
            let offset_err = (plane.offset - oracle_plane.offset).abs();

            // Single-cut optimality: no sampled separating supporting plane
            // is cheaper on the fresh ball.
            let d_star = plane.signed_distance(ball.center).abs();
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + k);
            let mut optimal = true;
            let mut tested = 0;
            while tested < 1000 {
                let v = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                let Some(u) = v.normalized() else { continue };
                tested += 1;
                // Supporting plane with inward normal u: P on the >= side.
                let support = inst
                    .poly
                    .vertices()
                    .iter()
                    .map(|&p| u.dot(p))
                    .fold(f64::INFINITY, f64::min);
                let d = support - u.dot(ball.center);
                if d <= 0.0 {
                    continue; // does not separate the center
                }
                // Cheaper single cut would mean a larger center distance.
                if d > d_star * (1.0 + 1e-9) {
                    optimal = false;
                }
            }
            (angle, offset_err, optimal)
        })
        .collect();
    let worst_angle = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let worst_off = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let all_optimal = results.iter().all(|r| r.2);
    let secs = t0.elapsed().as_secs_f64();
    report(
        2,
        worst_angle <= 1e-6 && worst_off <= 1e-6 && all_optimal && secs < 30.0,
        &format!(
            "100 cornered hulls: worst normal angle {worst_angle:.2e} rad, offset {worst_off:.2e}, optimality {}, {secs:.1} s (< 30 s)",
            if all_optimal { "holds" } else { "violated" }
        ),
    );
}

#[test]
fn criterion_03_balanced_face_rounds() {
    let t0 = Instant::now();
    // 50 hulls, face counts up to 2000 (n up to 1002 gives F = 2n - 4).
    let sizes: Vec<usize> = (0..50).map(|i| 8 + i * (1002 - 8) / 49).collect();
    let failures: Vec<String> = sizes
        .par_iter()
        .enumerate()
        .filter_map(|(i, &n)| {
            let seed = 700 + i as u64;
            let poly = convex_hull(&sphere_points(n, 0.5, seed)).unwrap();
            let faces = poly.faces().len();
            let plan = build_plan(&poly, &Ball::unit(), seed, &tol()).unwrap();
            for fr in &plan.round_log.face_rounds {
                for split in &fr.splits {
                    let l = split.parent.faces.len();
                    let a = split.visible_child.faces.len();
                    let b = split.invisible_child.faces.len();
                    if a < l / 2 || b < l / 2 {
                        return Some(format!(
                            "n={n}: face set of {l} split {a}/{b} at round {}",
                            fr.round
                        ));
                    }
                }
            }
            let rounds = plan.round_log.face_rounds.len();
            let limit = (faces as f64).log2().ceil() as usize + 1;
            (rounds > limit).then(|| format!("n={n}: {rounds} face rounds > {limit}"))
        })
        .collect();
    let secs = t0.elapsed().as_secs_f64();
    report(
        3,
        failures.is_empty() && secs < 60.0,
        &format!(
            "50 hulls up to 2000 faces: every split >= floor(l/2), rounds <= ceil(log2 F)+1; {secs:.1} s (< 60 s){}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; first failure: {}", failures[0])
            }
        ),
    );
}

#[test]
fn criterion_04_edge_coverage_and_safety() {
    let plans = family_plans();
    let mut worst_margin = f64::INFINITY;
    let mut coverage_ok = true;
    for (inst, plan) in &plans {
        let mut seen = vec![0usize; inst.poly.edges().len()];
        for cut in &plan.cuts {
            worst_margin = worst_margin.min(supporting_margin(&cut.plane, &inst.poly));
            if let (CutKind::Edge, Some(SourceFeature::Edge(e))) = (cut.kind, cut.source) {
                seen[e] += 1;
            }
        }
        if !seen.iter().all(|&c| c == 1) {
            coverage_ok = false;
        }
    }
    let margin_ok = worst_margin >= -1e-9; // scale: unit stock ball
    report(
        4,
        coverage_ok && margin_ok,
        &format!(
            "{} instances: every edge exactly one edge cut ({}), worst supporting margin {worst_margin:.2e} >= -1e-9",
            plans.len(),
            if coverage_ok { "yes" } else { "no" }
        ),
    );
}

#[test]
fn criterion_05_cap_exactness() {
    // Every cap cut must cost exactly the face area. The one legitimate
    // exception: a part whose face plane coincides with an earlier cut (the
    // cube is its own bounding box) has no residual cap there, and the cost
    // model prices a re-traced plane at exactly zero.
    let plans = family_plans();
    let mut worst = 0.0f64;
    let mut coincident = 0usize;
    let mut bad = None;
    for (inst, plan) in &plans {
        for fc in &plan.round_log.face_cuts {
            let area = inst.poly.face_area(fc.face);
            let cap_plane = plan.cuts[fc.cut_index].plane;
            let earlier_coincident = plan.cuts[..fc.cut_index]
                .iter()
                .any(|c| c.plane.approx_eq_oriented(&cap_plane, 1e-12, 1e-12));
            if earlier_coincident {
                coincident += 1;
                if fc.cost != 0.0 {
                    bad = Some(format!(
                        "{}: face {} re-traces an earlier cut but cost {} != 0",
                        inst.name, fc.face, fc.cost
                    ));
                }
            } else {
                worst = worst.max((fc.cost - area).abs() / area);
            }
        }
    }
    report(
        5,
        worst <= 1e-6 && bad.is_none(),
        &format!(
            "{} instances: cap cuts equal face areas (worst rel err {worst:.2e} <= 1e-6; {coincident} box-coincident faces cost exactly 0){}",
            plans.len(),
            bad.unwrap_or_default()
        ),
    );
}

#[test]
fn criterion_06_box_phase_surface_majorization() {
    // 50 instances, half centered and half cornered.
    let jobs: Vec<(bool, usize, u64)> = (0..50)
        .map(|i| (i % 2 == 0, 8 + (i * 120) / 49, 800 + i as u64))
        .collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(cornered, n, seed)| {
            let g = if cornered {
                Generator::RandomCornered { n, seed }
            } else {
                Generator::RandomHull { n, seed }
            };
            let inst = generate(&g, &tol()).unwrap();
            let plan = build_plan(&inst.poly, &inst.ball, seed, &tol()).unwrap();
            let six = plan.box_stats.six_cut_total;
            let entry = plan.box_stats.entry_surface_area;
            if six > entry * 1.02 {
                return Some(format!("n={n} seed={seed}: six cuts {six} > surface {entry}"));
            }
            let r = inst.ball.radius;
            let cap = match (plan.cornered, plan.bounds.cornered_bound) {
                (true, Some(pi_r2)) => 3.0 * pi_r2,
                _ => 4.0 * std::f64::consts::PI * r * r,
            };
            (six > cap * 1.02)
                .then(|| format!("n={n} seed={seed}: six cuts {six} > phase cap {cap}"))
        })
        .collect();
    report(
        6,
        failures.is_empty(),
        &format!(
            "50 instances: six box cuts <= entry surface area and <= 3*pi*r^2 / 4*pi*R^2 (2% tolerance){}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; first failure: {}", failures[0])
            }
        ),
    );
}

#[test]
fn criterion_07_end_to_end_volume_and_faces() {
    let sizes: Vec<usize> = (0..50).map(|i| 8 + i * (500 - 8) / 49).collect();
    let failures: Vec<String> = sizes
        .par_iter()
        .enumerate()
        .filter_map(|(i, &n)| {
            let seed = 900 + i as u64;
            let g = if i % 3 == 0 {
                Generator::RandomCornered { n, seed }
            } else {
                Generator::RandomHull { n, seed }
            };
            let inst = generate(&g, &tol()).unwrap();
            let plan = build_plan(&inst.poly, &inst.ball, seed, &tol()).unwrap();

            let mut region = Region::new(inst.ball);
            for cut in &plan.cuts {
                region = region
                    .apply_cut(&cut.plane, inst.poly.centroid(), &tol())
                    .unwrap()
                    .0;
            }
            let want = inst.poly.volume();
            let est = oracle::mc_region_volume(&region, 200_000, seed ^ 0x7777);
            let lim = (3.0 * est.std_error).max(1e-3 * want);
            if (est.value - want).abs() > lim {
                return Some(format!(
                    "n={n}: volume {} vs {} (limit {lim})",
                    est.value, want
                ));
            }
            // Every face of the part on the final boundary.
            let cert = replay(&plan, &inst.poly, &inst.ball, &tol());
            (!cert.certified()).then(|| format!("n={n}: replay failed\n{cert}"))
        })
        .collect();
    report(
        7,
        failures.is_empty(),
        &format!(
            "50 instances up to n=500: final region volume within max(1e-3, 3 sigma) and all faces exposed{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; first failure: {}", failures[0])
            }
        ),
    );
}

#[test]
fn criterion_08_ratio_boundedness() {
    let t0 = Instant::now();
    let cfg = polycarve::bench::BenchConfig::default(); // 8..1024, 5 seeds
    let rows = polycarve::bench::run(&cfg).unwrap();
    let csv = polycarve::bench::to_csv(&rows);
    let out = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance_bench.csv");
    std::fs::write(&out, &csv).unwrap();

    let ratio_ok = rows.iter().all(|r| r.ratio >= 1.0);
    let mut per_n: Vec<f64> = cfg
        .sizes
        .iter()
        .map(|&n| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.ratio_normalized)
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect();
    let max = per_n.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    per_n.sort_by(f64::total_cmp);
    let median = 0.5 * (per_n[per_n.len() / 2 - 1] + per_n[per_n.len() / 2]);
    let secs = t0.elapsed().as_secs_f64();
    report(
        8,
        ratio_ok && max <= 2.0 * median && secs < 600.0,
        &format!(
            "ratio >= 1 on all {} rows; ratio_normalized max {max:.4} <= 2 x median {median:.4}; CSV at {}; {secs:.1} s (< 600 s)",
            rows.len(),
            out.display()
        ),
    );
}

#[test]
fn criterion_09_bounding_box_quality() {
    let jobs: Vec<(usize, u64)> = (0..20).map(|i| (10 + (i * 40) / 19, 40 + i as u64)).collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(n, seed)| {
            let poly = convex_hull(&sphere_points(n, 0.5, seed)).unwrap();
            let mine = min_volume_box(&poly, &tol()).unwrap();
            let grid = oracle::grid_min_box(&poly, 2.0);
            let slack = oracle::grid_slack(&grid, poly.circumradius(), 2.0);
            let limit = grid.volume() * (1.0 + 1e-6) + slack;
            (mine.volume() > limit).then(|| {
                format!(
                    "n={n} seed={seed}: box {} > grid {} + slack {slack}",
                    mine.volume(),
                    grid.volume()
                )
            })
        })
        .collect();
    report(
        9,
        failures.is_empty(),
        &format!(
            "20 hulls (n <= 50): min_volume_box <= 2-degree grid minimum x (1+1e-6) + resolution slack{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; first failure: {}", failures[0])
            }
        ),
    );
}

#[test]
fn criterion_10_determinism_and_scale_equivariance() {
    let inst = generate(&Generator::RandomHull { n: 48, seed: 31 }, &tol()).unwrap();
    let a = build_plan(&inst.poly, &inst.ball, 31, &tol()).unwrap();
    let b = build_plan(&inst.poly, &inst.ball, 31, &tol()).unwrap();
    let identical = plan_to_string(&a, &inst.poly) == plan_to_string(&b, &inst.poly);

    let s = 3.7;
    let scaled_poly = inst.poly.map_vertices(|v| v * s).unwrap();
    let scaled_ball = Ball::new(inst.ball.center * s, inst.ball.radius * s);
    let scaled = build_plan(&scaled_poly, &scaled_ball, 31, &tol()).unwrap();
    let rel = (scaled.totals.total - a.totals.total * s * s).abs() / (a.totals.total * s * s);
    report(
        10,
        identical && rel <= 1e-9,
        &format!(
            "byte-identical plan file on rebuild: {identical}; scaling by {s} multiplies cost by s^2 (rel err {rel:.2e} <= 1e-9)"
        ),
    );
}

#[test]
fn criterion_11_performance_n1000() {
    let poly = convex_hull(&sphere_points(1000, 0.5, 1234)).unwrap();
    let t0 = Instant::now();
    let plan = build_plan(&poly, &Ball::unit(), 1234, &tol()).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    report(
        11,
        secs < 10.0 && plan.ratio >= 1.0,
        &format!(
            "n=1000 plan ({} cuts) built in {secs:.2} s (< 10 s)",
            plan.cuts.len()
        ),
    );
}
