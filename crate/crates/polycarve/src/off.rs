//! ASCII OFF mesh reading and writing.

use std::path::Path;

use crate::error::{Error, Result};
use crate::polyhedron::ConvexPolyhedron;
use crate::textfmt::{fmt17, parse_f64};
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

/// OFF text for an arbitrary (not necessarily closed) polygon soup; used for
/// both parts and region-boundary snapshots.
pub fn off_string(vertices: &[Vec3], faces: &[Vec<usize>]) -> String {
    let edge_estimate = faces.iter().map(|f| f.len()).sum::<usize>() / 2;
    let mut s = String::new();
    s.push_str("OFF\n");
    s.push_str(&format!("{} {} {}\n", vertices.len(), faces.len(), edge_estimate));
    for v in vertices {
        s.push_str(&format!("{} {} {}\n", fmt17(v.x), fmt17(v.y), fmt17(v.z)));
    }
    for f in faces {
        s.push_str(&f.len().to_string());
        for &i in f {
            s.push(' ');
            s.push_str(&i.to_string());
        }
        s.push('\n');
    }
    s
}

pub fn save_off(poly: &ConvexPolyhedron, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, off_string(poly.vertices(), poly.faces()))?;
    Ok(())
}

/// Parse an ASCII OFF document into a validated convex polyhedron.
///
/// Faces are re-oriented outward; non-manifold topology and convexity
/// violations are errors ([`Error::InvalidMesh`] / [`Error::NotConvex`]).
pub fn parse_off(text: &str, label: &str, tol: &TolerancePolicy) -> Result<ConvexPolyhedron> {
    let err = |line: usize, msg: String| Error::Parse {
        path: label.to_string(),
        line,
        msg,
    };

    // (line number, payload) with comments and blanks dropped.
    let total_lines = text.lines().count();
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = rows.next().ok_or_else(|| err(1, "empty file".into()))?;
    let mut counts: Vec<&str>;
    if header == "OFF" {
        let (cline, c) = rows
            .next()
            .ok_or_else(|| err(hline, "missing counts line".into()))?;
        counts = c.split_whitespace().collect();
        if counts.len() < 2 {
            return Err(err(cline, format!("expected counts, got '{c}'")));
        }
    } else if let Some(rest) = header.strip_prefix("OFF") {
        counts = rest.split_whitespace().collect();
        if counts.len() < 2 {
            return Err(err(hline, format!("expected 'OFF', got '{header}'")));
        }
    } else {
        return Err(err(hline, format!("expected 'OFF' header, got '{header}'")));
    }
    counts.truncate(3);
    let nv: usize = counts[0]
        .parse()
        .map_err(|_| err(hline, format!("bad vertex count '{}'", counts[0])))?;
    let nf: usize = counts[1]
        .parse()
        .map_err(|_| err(hline, format!("bad face count '{}'", counts[1])))?;

    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (line, l) = rows
            .next()
            .ok_or_else(|| err(total_lines, format!("truncated: expected {nv} vertices, got {k}")))?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() < 3 {
            return Err(err(line, format!("expected 3 coordinates, got '{l}'")));
        }
        let coord = |s: &str| parse_f64(s).ok_or_else(|| err(line, format!("bad number '{s}'")));
        vertices.push(Vec3::new(coord(parts[0])?, coord(parts[1])?, coord(parts[2])?));
    }

    let mut faces = Vec::with_capacity(nf);
    for k in 0..nf {
        let (line, l) = rows
            .next()
            .ok_or_else(|| err(total_lines, format!("truncated: expected {nf} faces, got {k}")))?;
        let mut parts = l.split_whitespace();
        let cnt: usize = parts
            .next()
            .unwrap()
            .parse()
            .map_err(|_| err(line, format!("bad face vertex count in '{l}'")))?;
        let mut cycle = Vec::with_capacity(cnt);
        for _ in 0..cnt {
            let tok = parts
                .next()
                .ok_or_else(|| err(line, format!("face lists {cnt} vertices but line is short")))?;
            let idx: usize = tok
                .parse()
                .map_err(|_| err(line, format!("bad vertex index '{tok}'")))?;
            if idx >= nv {
                return Err(err(line, format!("vertex index {idx} out of range (V={nv})")));
            }
            cycle.push(idx);
        }
        faces.push(cycle);
    }

    let poly = ConvexPolyhedron::from_parts(vertices, faces)?;
    let report = poly.validate(tol);
    if !report.convexity_violations.is_empty() {
        let worst = report
            .convexity_violations
            .iter()
            .map(|&(_, _, d)| d)
            .fold(0.0f64, f64::max);
        return Err(Error::NotConvex {
            violations: report.convexity_violations.len(),
            worst,
        });
    }
    if !report.is_valid() {
        return Err(Error::InvalidMesh(format!(
            "Euler characteristic {} (expected 2), {} non-manifold edges",
            report.euler_characteristic(),
            report.non_manifold_edges.len()
        )));
    }
    Ok(poly)
}

pub fn load_off(path: impl AsRef<Path>, tol: &TolerancePolicy) -> Result<ConvexPolyhedron> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_off(&text, &path.display().to_string(), tol)
}
