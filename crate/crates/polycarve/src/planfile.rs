//! Versioned structured-text plan documents and region snapshots.
//!
//! The document embeds the instance mesh so a plan file is self-contained:
//! import recomputes the instance hash and replay certifies against it.
//! Numbers carry 17 significant digits for bit-faithful round trips.

use std::path::{Path, PathBuf};

use crate::cut::{Cut, CutKind, SourceFeature};
use crate::error::{Error, Result};
use crate::off;
use crate::plan::{BoxPhaseStats, CutPlan, RoundSummaryRow, Totals};
use crate::plane::Plane;
use crate::polyhedron::ConvexPolyhedron;
use crate::region::{Ball, Region};
use crate::textfmt::{fmt17, parse_f64};
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

const SCHEMA: &str = "polycarve-plan 1";

fn opt17(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_else(|| "-".into())
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn source_token(s: Option<SourceFeature>) -> String {
    match s {
        None => "-".into(),
        Some(SourceFeature::BoxFace(i)) => format!("b{i}"),
        Some(SourceFeature::Edge(i)) => format!("e{i}"),
        Some(SourceFeature::Face(i)) => format!("f{i}"),
    }
}

/// Serialize a plan (with its instance) to the versioned text document.
pub fn plan_to_string(plan: &CutPlan, poly: &ConvexPolyhedron) -> String {
    let mut s = String::new();
    s.push_str(SCHEMA);
    s.push('\n');
    s.push_str(&format!("hash {}\n", plan.mesh_hash));
    s.push_str(&format!("seed {}\n", plan.seed));
    s.push_str(&format!("cornered {}\n", u8::from(plan.cornered)));
    s.push_str(&format!(
        "ball {} {} {} {}\n",
        fmt17(plan.ball.center.x),
        fmt17(plan.ball.center.y),
        fmt17(plan.ball.center.z),
        fmt17(plan.ball.radius)
    ));
    s.push_str(&format!(
        "mesh {} {}\n",
        poly.vertices().len(),
        poly.faces().len()
    ));
    for v in poly.vertices() {
        s.push_str(&format!("v {} {} {}\n", fmt17(v.x), fmt17(v.y), fmt17(v.z)));
    }
    for f in poly.faces() {
        s.push('f');
        s.push(' ');
        s.push_str(&f.len().to_string());
        for &i in f {
            s.push(' ');
            s.push_str(&i.to_string());
        }
        s.push('\n');
    }
    s.push_str(&format!(
        "bounds {} {} {} {}\n",
        opt17(plan.bounds.cornered_bound),
        opt17(plan.bounds.centered_bound),
        fmt17(plan.bounds.box_bound),
        fmt17(plan.bounds.combined)
    ));
    s.push_str(&format!(
        "totals {} {} {} {}\n",
        fmt17(plan.totals.box_phase),
        fmt17(plan.totals.carve_phase),
        fmt17(plan.totals.face_cuts),
        fmt17(plan.totals.total)
    ));
    s.push_str(&format!(
        "ratio {} {}\n",
        fmt17(plan.ratio),
        fmt17(plan.ratio_normalized)
    ));
    s.push_str(&format!(
        "boxstats {} {} {}\n",
        fmt17(plan.box_stats.entry_surface_area),
        fmt17(plan.box_stats.six_cut_total),
        opt17(plan.box_stats.dsep_cost)
    ));
    s.push_str(&format!("cuts {}\n", plan.cuts.len()));
    for (i, c) in plan.cuts.iter().enumerate() {
        s.push_str(&format!(
            "c {} {} {} {} {} {} {} {} {} {}\n",
            i,
            c.kind.label(),
            fmt17(c.plane.unit_normal.x),
            fmt17(c.plane.unit_normal.y),
            fmt17(c.plane.unit_normal.z),
            fmt17(c.plane.offset),
            opt_usize(c.face_round),
            opt_usize(c.edge_round),
            source_token(c.source),
            fmt17(c.cost)
        ));
    }
    s.push_str(&format!("rounds {}\n", plan.round_summary.len()));
    for r in &plan.round_summary {
        s.push_str(&format!(
            "r {} {} {} {} {} {}\n",
            r.face_round,
            r.set_id,
            r.chain,
            r.edge_round,
            r.cuts,
            fmt17(r.cost)
        ));
    }
    s.push_str("end\n");
    s
}

pub fn save_plan(plan: &CutPlan, poly: &ConvexPolyhedron, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, plan_to_string(plan, poly))?;
    Ok(())
}

struct LineReader<'a> {
    label: &'a str,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> LineReader<'a> {
    fn err(&self, line: usize, msg: String) -> Error {
        Error::Parse {
            path: self.label.to_string(),
            line,
            msg,
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, l) in self.lines.by_ref() {
            self.last_line = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Ok((i + 1, t));
            }
        }
        Err(Error::Parse {
            path: self.label.to_string(),
            line: self.last_line,
            msg: "unexpected end of document".into(),
        })
    }

    /// Next line, which must start with `key`; returns the payload tokens.
    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, l) = self.next()?;
        let mut toks = l.split_whitespace();
        let head = toks.next().unwrap_or("");
        if head != key {
            return Err(self.err(line, format!("expected '{key} ...', got '{l}'")));
        }
        Ok((line, toks.collect()))
    }
}

fn tok_f64(r: &LineReader, line: usize, tok: &str) -> Result<f64> {
    parse_f64(tok).ok_or_else(|| r.err(line, format!("bad number '{tok}'")))
}

fn tok_opt_f64(r: &LineReader, line: usize, tok: &str) -> Result<Option<f64>> {
    if tok == "-" {
        Ok(None)
    } else {
        tok_f64(r, line, tok).map(Some)
    }
}

fn tok_usize(r: &LineReader, line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| r.err(line, format!("bad integer '{tok}'")))
}

fn tok_opt_usize(r: &LineReader, line: usize, tok: &str) -> Result<Option<usize>> {
    if tok == "-" {
        Ok(None)
    } else {
        tok_usize(r, line, tok).map(Some)
    }
}

/// Parse a plan document; returns the plan and its embedded instance and
/// verifies the hash binding. The full carving trace is not serialized, so
/// `round_log` comes back empty (the summary rows survive).
pub fn plan_from_str(text: &str, label: &str, _tol: &TolerancePolicy) -> Result<(CutPlan, ConvexPolyhedron)> {
    let mut r = LineReader {
        label,
        lines: text.lines().enumerate(),
        last_line: 0,
    };

    let (line, head) = r.next()?;
    if head != SCHEMA {
        return Err(r.err(line, format!("unsupported schema '{head}' (expected '{SCHEMA}')")));
    }
    let (line, t) = r.expect("hash")?;
    let mesh_hash = (*t.first().ok_or_else(|| r.err(line, "missing hash".into()))?).to_string();
    let (line, t) = r.expect("seed")?;
    let seed: u64 = t
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| r.err(line, "bad seed".into()))?;
    let (line, t) = r.expect("cornered")?;
    let cornered = match t.first() {
        Some(&"0") => false,
        Some(&"1") => true,
        _ => return Err(r.err(line, "bad cornered flag".into())),
    };
    let (line, t) = r.expect("ball")?;
    if t.len() != 4 {
        return Err(r.err(line, "ball needs 4 numbers".into()));
    }
    let ball = Ball::new(
        Vec3::new(
            tok_f64(&r, line, t[0])?,
            tok_f64(&r, line, t[1])?,
            tok_f64(&r, line, t[2])?,
        ),
        tok_f64(&r, line, t[3])?,
    );

    let (line, t) = r.expect("mesh")?;
    if t.len() != 2 {
        return Err(r.err(line, "mesh needs vertex and face counts".into()));
    }
    let nv = tok_usize(&r, line, t[0])?;
    let nf = tok_usize(&r, line, t[1])?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, t) = r.expect("v")?;
        if t.len() != 3 {
            return Err(r.err(line, "vertex needs 3 coordinates".into()));
        }
        vertices.push(Vec3::new(
            tok_f64(&r, line, t[0])?,
            tok_f64(&r, line, t[1])?,
            tok_f64(&r, line, t[2])?,
        ));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, t) = r.expect("f")?;
        let cnt = tok_usize(&r, line, t[0])?;
        if t.len() != cnt + 1 {
            return Err(r.err(line, format!("face lists {cnt} vertices, got {}", t.len() - 1)));
        }
        let mut cycle = Vec::with_capacity(cnt);
        for tok in &t[1..] {
            cycle.push(tok_usize(&r, line, tok)?);
        }
        faces.push(cycle);
    }
    let poly = ConvexPolyhedron::from_parts(vertices, faces)?;

    let (line, t) = r.expect("bounds")?;
    if t.len() != 4 {
        return Err(r.err(line, "bounds needs 4 fields".into()));
    }
    let bounds = crate::boxing::LowerBounds {
        cornered_bound: tok_opt_f64(&r, line, t[0])?,
        centered_bound: tok_opt_f64(&r, line, t[1])?,
        box_bound: tok_f64(&r, line, t[2])?,
        combined: tok_f64(&r, line, t[3])?,
    };
    let (line, t) = r.expect("totals")?;
    if t.len() != 4 {
        return Err(r.err(line, "totals needs 4 fields".into()));
    }
    let totals = Totals {
        box_phase: tok_f64(&r, line, t[0])?,
        carve_phase: tok_f64(&r, line, t[1])?,
        face_cuts: tok_f64(&r, line, t[2])?,
        total: tok_f64(&r, line, t[3])?,
    };
    let (line, t) = r.expect("ratio")?;
    if t.len() != 2 {
        return Err(r.err(line, "ratio needs 2 fields".into()));
    }
    let ratio = tok_f64(&r, line, t[0])?;
    let ratio_normalized = tok_f64(&r, line, t[1])?;
    let (line, t) = r.expect("boxstats")?;
    if t.len() != 3 {
        return Err(r.err(line, "boxstats needs 3 fields".into()));
    }
    let box_stats = BoxPhaseStats {
        entry_surface_area: tok_f64(&r, line, t[0])?,
        six_cut_total: tok_f64(&r, line, t[1])?,
        dsep_cost: tok_opt_f64(&r, line, t[2])?,
    };

    let (line, t) = r.expect("cuts")?;
    let ncuts = tok_usize(&r, line, t[0])?;
    let mut cuts = Vec::with_capacity(ncuts);
    for want in 0..ncuts {
        let (line, t) = r.expect("c")?;
        if t.len() != 10 {
            return Err(r.err(line, "cut record needs 10 fields".into()));
        }
        let idx = tok_usize(&r, line, t[0])?;
        if idx != want {
            return Err(r.err(line, format!("cut index {idx}, expected {want}")));
        }
        let kind = match t[1] {
            "dsep" => CutKind::DSeparation,
            "box" => CutKind::Box,
            "edge" => CutKind::Edge,
            "face" => CutKind::Face,
            other => return Err(r.err(line, format!("unknown cut kind '{other}'"))),
        };
        let n = Vec3::new(
            tok_f64(&r, line, t[2])?,
            tok_f64(&r, line, t[3])?,
            tok_f64(&r, line, t[4])?,
        );
        let plane = Plane::new(n, tok_f64(&r, line, t[5])?);
        let source = match t[8] {
            "-" => None,
            s => {
                let idx = s
                    .get(1..)
                    .and_then(|n| n.parse::<usize>().ok())
                    .ok_or_else(|| r.err(line, format!("bad source '{s}'")))?;
                Some(match s.as_bytes()[0] {
                    b'b' => SourceFeature::BoxFace(idx),
                    b'e' => SourceFeature::Edge(idx),
                    b'f' => SourceFeature::Face(idx),
                    _ => return Err(r.err(line, format!("bad source '{s}'"))),
                })
            }
        };
        cuts.push(Cut {
            plane,
            kind,
            face_round: tok_opt_usize(&r, line, t[6])?,
            edge_round: tok_opt_usize(&r, line, t[7])?,
            source,
            cost: tok_f64(&r, line, t[9])?,
        });
    }

    let (line, t) = r.expect("rounds")?;
    let nrounds = tok_usize(&r, line, t[0])?;
    let mut round_summary = Vec::with_capacity(nrounds);
    for _ in 0..nrounds {
        let (line, t) = r.expect("r")?;
        if t.len() != 6 {
            return Err(r.err(line, "round record needs 6 fields".into()));
        }
        round_summary.push(RoundSummaryRow {
            face_round: tok_usize(&r, line, t[0])?,
            set_id: tok_usize(&r, line, t[1])?,
            chain: tok_usize(&r, line, t[2])?,
            edge_round: tok_usize(&r, line, t[3])?,
            cuts: tok_usize(&r, line, t[4])?,
            cost: tok_f64(&r, line, t[5])?,
        });
    }
    r.expect("end")?;

    let plan = CutPlan {
        mesh_hash,
        ball,
        n_vertices: poly.vertices().len(),
        seed,
        cornered,
        cuts,
        totals,
        bounds,
        ratio,
        ratio_normalized,
        box_stats,
        round_log: Default::default(),
        round_summary,
    };

    let expect = crate::plan::instance_hash(&poly, &ball);
    if expect != plan.mesh_hash {
        return Err(Error::Certification(format!(
            "plan hash {} does not match the embedded instance ({})",
            &plan.mesh_hash[..12.min(plan.mesh_hash.len())],
            &expect[..12]
        )));
    }
    Ok((plan, poly))
}

pub fn load_plan(path: impl AsRef<Path>, tol: &TolerancePolicy) -> Result<(CutPlan, ConvexPolyhedron)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    plan_from_str(&text, &path.display().to_string(), tol)
}

/// Replay the plan and write OFF meshes of the region boundary after every
/// k-th cut (and after the last). Spherical patches are triangulated at 2
/// degrees; the meshes are for display only.
pub fn export_snapshots(
    plan: &CutPlan,
    poly: &ConvexPolyhedron,
    every_k: usize,
    dir: impl AsRef<Path>,
    tol: &TolerancePolicy,
) -> Result<Vec<PathBuf>> {
    assert!(every_k > 0, "snapshot stride must be positive");
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let keep = poly.centroid();
    let mut region = Region::new(plan.ball);
    let mut out = Vec::new();
    let mut write = |region: &Region, index: usize| -> Result<()> {
        let (verts, faces) = region.boundary_mesh(2.0);
        let path = dir.join(format!("snapshot_{index:04}.off"));
        std::fs::write(&path, off::off_string(&verts, &faces))?;
        out.push(path);
        Ok(())
    };
    for (i, cut) in plan.cuts.iter().enumerate() {
        let (next, _) = region.apply_cut(&cut.plane, keep, tol)?;
        region = next;
        let applied = i + 1;
        if applied % every_k == 0 || applied == plan.cuts.len() {
            write(&region, applied)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::{build_plan, replay};
    use crate::shapes;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn document_round_trip_certifies() {
        let t = shapes::regular_tetrahedron(0.3);
        let ball = Ball::unit();
        let plan = build_plan(&t, &ball, 3, &tol()).unwrap();
        let text = plan_to_string(&plan, &t);
        let (back, mesh) = plan_from_str(&text, "tetra.plan", &tol()).unwrap();
        assert_eq!(back.cuts.len(), plan.cuts.len());
        assert_eq!(back.mesh_hash, plan.mesh_hash);
        for (a, b) in plan.cuts.iter().zip(&back.cuts) {
            assert_eq!(a.plane.offset.to_bits(), b.plane.offset.to_bits());
            assert_eq!(a.cost.to_bits(), b.cost.to_bits());
        }
        let report = replay(&back, &mesh, &back.ball, &tol());
        assert!(report.certified(), "{report}");
    }

    #[test]
    fn export_is_deterministic() {
        let p = crate::hull::convex_hull(&crate::hull::sphere_points(24, 0.5, 5)).unwrap();
        let ball = Ball::unit();
        let a = plan_to_string(&build_plan(&p, &ball, 11, &tol()).unwrap(), &p);
        let b = plan_to_string(&build_plan(&p, &ball, 11, &tol()).unwrap(), &p);
        assert_eq!(a, b);
    }

    #[test]
    fn tampered_document_is_rejected() {
        let t = shapes::regular_tetrahedron(0.3);
        let ball = Ball::unit();
        let plan = build_plan(&t, &ball, 3, &tol()).unwrap();
        let text = plan_to_string(&plan, &t);
        // Flip a digit inside the first vertex line.
        let tampered = text.replacen("v 2.99", "v 2.89", 1);
        assert_ne!(text, tampered, "tamper target not found");
        assert!(matches!(
            plan_from_str(&tampered, "tampered.plan", &tol()),
            Err(Error::Certification(_))
        ));
    }

    #[test]
    fn snapshots_written_at_stride() {
        let t = shapes::regular_tetrahedron(0.3);
        let ball = Ball::unit();
        let plan = build_plan(&t, &ball, 3, &tol()).unwrap();
        let dir = std::env::temp_dir().join(format!("polycarve_snap_{}", std::process::id()));
        let files = export_snapshots(&plan, &t, 5, &dir, &tol()).unwrap();
        // 16 cuts at stride 5: after cuts 5, 10, 15 and the final 16.
        assert_eq!(files.len(), 4);
        for f in &files {
            let text = std::fs::read_to_string(f).unwrap();
            assert!(text.starts_with("OFF\n"));
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn final_snapshot_matches_part_vertices() {
        let t = shapes::regular_tetrahedron(0.3);
        let ball = Ball::unit();
        let plan = build_plan(&t, &ball, 3, &tol()).unwrap();
        let dir = std::env::temp_dir().join(format!("polycarve_snap2_{}", std::process::id()));
        let files = export_snapshots(&plan, &t, 1000, &dir, &tol()).unwrap();
        let text = std::fs::read_to_string(files.last().unwrap()).unwrap();
        // Every snapshot vertex must lie on (or inside) the part within 1e-6.
        let mut lines = text.lines();
        lines.next();
        let counts: Vec<usize> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        let mut snap_verts = Vec::new();
        let mut worst: f64 = 0.0;
        for _ in 0..counts[0] {
            let l = lines.next().unwrap();
            let c: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            let p = Vec3::new(c[0], c[1], c[2]);
            snap_verts.push(p);
            for f in 0..t.faces().len() {
                worst = worst.max(t.face_plane(f).signed_distance(p));
            }
        }
        assert!(worst <= 1e-6, "snapshot vertex {worst} outside the part");
        // Every part vertex appears in the final snapshot.
        for &v in t.vertices() {
            let nearest = snap_verts
                .iter()
                .map(|p| p.distance(v))
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= 1e-6, "part vertex {v:?} missing (nearest {nearest})");
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
