//! Carving phase: split the face set recursively with balanced Gauss-sphere
//! directions, cut every silhouette chain edge in a binary schedule of edge
//! rounds, then take one cap cut per face.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cut::{Cut, CutKind, SourceFeature};
use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::polyhedron::ConvexPolyhedron;
use crate::region::Region;
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

/// A set of faces under recursion.
#[derive(Debug, Clone)]
pub struct FaceSet {
    /// Identifier linking the set to its boundary-area attribution in logs.
    pub id: usize,
    /// Face round at which the set was created.
    pub depth: usize,
    /// Sorted face indices.
    pub faces: Vec<usize>,
}

/// The silhouette edges internal to a face set, ordered into one
/// vertex-connected chain; a closed cycle at the first face round.
#[derive(Debug, Clone)]
pub struct SeparatingChain {
    pub edges: Vec<usize>,
    pub zone_direction: Vec3,
    pub closed: bool,
}

/// Result of splitting one face set.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub chains: Vec<SeparatingChain>,
    pub visible: Vec<usize>,
    pub invisible: Vec<usize>,
}

/// Per-chain edge-round cost record. Cut indices refer to the cut list of
/// the carve call (the plan assembler re-bases them).
#[derive(Debug, Clone)]
pub struct EdgeRoundLog {
    pub round: usize,
    pub cut_indices: Vec<usize>,
    pub total_cost: f64,
}

#[derive(Debug, Clone)]
pub struct ChainLog {
    pub edges: Vec<usize>,
    pub closed: bool,
    pub edge_rounds: Vec<EdgeRoundLog>,
}

#[derive(Debug, Clone)]
pub struct SplitLog {
    pub parent: FaceSet,
    pub zone_direction: Vec3,
    pub visible_child: FaceSet,
    pub invisible_child: FaceSet,
    pub chains: Vec<ChainLog>,
}

#[derive(Debug, Clone)]
pub struct FaceRoundLog {
    pub round: usize,
    pub splits: Vec<SplitLog>,
}

#[derive(Debug, Clone, Copy)]
pub struct FaceCutLog {
    pub face: usize,
    pub cut_index: usize,
    pub cost: f64,
}

/// Full carving trace: per-round splits and costs, final cap cuts, and any
/// structural warnings (e.g. a split without qualifying edges).
#[derive(Debug, Clone, Default)]
pub struct RoundLog {
    pub face_rounds: Vec<FaceRoundLog>,
    pub face_cuts: Vec<FaceCutLog>,
    pub warnings: Vec<String>,
}

/// Everything the carving phase produced.
#[derive(Debug, Clone)]
pub struct CarveOutcome {
    pub region: Region,
    pub cuts: Vec<Cut>,
    pub log: RoundLog,
}

fn wrap_2pi(x: f64) -> f64 {
    x.rem_euclid(2.0 * PI)
}

/// A projection direction whose Gauss-sphere great circle splits the face
/// set's normal points into visible/invisible groups of at least
/// `floor(l/2)` each, and which is non-degenerate for *every* face of the
/// part (so the silhouette is well defined).
pub fn balanced_direction(face_set: &[usize], poly: &ConvexPolyhedron, seed: u64) -> Result<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    balanced_direction_with(face_set, poly, &mut rng)
}

/// Pole axes and the frame reference are seeded combinations of the part's
/// own normal points, so the construction commutes with rigid rotations of
/// the instance.
pub(crate) fn balanced_direction_with(
    face_set: &[usize],
    poly: &ConvexPolyhedron,
    rng: &mut ChaCha8Rng,
) -> Result<Vec3> {
    let l = face_set.len();
    if l < 2 {
        return Err(Error::FaceSetTooSmall { len: l });
    }
    let normals: Vec<Vec3> = (0..poly.faces().len()).map(|f| poly.normal(f)).collect();
    let want = l / 2;

    'attempt: for _ in 0..64 {
        let mut axis_raw = Vec3::ZERO;
        let mut ref_raw = Vec3::ZERO;
        for n in &normals {
            axis_raw += *n * rng.random_range(-1.0f64..1.0);
            ref_raw += *n * rng.random_range(-1.0f64..1.0);
        }
        let Some(axis) = axis_raw.normalized() else {
            continue;
        };
        // Poles must avoid every normal point so longitudes are defined and
        // meridians can be non-degenerate.
        let min_rho = 1e-6;
        if normals.iter().any(|n| {
            let c = n.dot(axis);
            1.0 - c * c < min_rho * min_rho
        }) {
            continue;
        }
        let Some(e1) = (ref_raw - axis * axis.dot(ref_raw)).normalized() else {
            continue;
        };
        let e2 = axis.cross(e1);

        let lon_all: Vec<f64> = normals
            .iter()
            .map(|n| wrap_2pi(f64::atan2(n.dot(e2), n.dot(e1))))
            .collect();
        let phis: Vec<f64> = face_set.iter().map(|&f| lon_all[f]).collect();

        // Sweep a meridian: face f is visible at meridian angle psi iff
        // sin(phi_f - psi) > 0. Crossing phi_f turns it invisible, crossing
        // phi_f + pi turns it visible again.
        let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * l);
        for &phi in &phis {
            events.push((phi, -1));
            events.push((wrap_2pi(phi + PI), 1));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));

        // Count at a point just before the first event.
        let start_gap_hi = events[0].0;
        let start_gap_lo = events[events.len() - 1].0 - 2.0 * PI;
        let psi0 = 0.5 * (start_gap_lo + start_gap_hi);
        let mut v: i64 = phis
            .iter()
            .filter(|&&phi| (phi - psi0).rem_euclid(2.0 * PI) < PI && (phi - psi0).rem_euclid(2.0 * PI) > 0.0)
            .count() as i64;

        for g in 0..events.len() {
            v += events[g].1;
            let lo = events[g].0;
            let hi = if g + 1 < events.len() {
                events[g + 1].0
            } else {
                events[0].0 + 2.0 * PI
            };
            if hi - lo <= 1e-12 {
                continue;
            }
            if v >= want as i64 && (l as i64 - v) >= want as i64 {
                // Balanced gap; place psi inside it, as far as possible from
                // any meridian through a normal point of the whole part.
                let Some(psi) = pick_clear_value(lo, hi, &lon_all) else {
                    continue;
                };
                let dir = e2 * psi.cos() - e1 * psi.sin();
                // Exact recount and degeneracy margin check.
                let vis = face_set
                    .iter()
                    .filter(|&&f| normals[f].dot(dir) > 0.0)
                    .count();
                if vis < want || l - vis < want {
                    continue 'attempt;
                }
                if normals.iter().any(|n| n.dot(dir).abs() <= 1e-12) {
                    continue 'attempt;
                }
                return Ok(dir.normalized().expect("unit by construction"));
            }
        }
    }
    Err(Error::DegenerateGeometry(
        "no balanced non-degenerate direction found".into(),
    ))
}

/// Midpoint of the largest sub-interval of `(lo, hi)` clear of all values
/// congruent to a longitude mod pi.
fn pick_clear_value(lo: f64, hi: f64, longitudes: &[f64]) -> Option<f64> {
    let mut marks = vec![lo, hi];
    for &phi in longitudes {
        let base = phi.rem_euclid(PI);
        let mut k = ((lo - base) / PI).ceil();
        loop {
            let x = base + k * PI;
            if x >= hi {
                break;
            }
            if x > lo {
                marks.push(x);
            }
            k += 1.0;
        }
    }
    marks.sort_by(f64::total_cmp);
    let mut best = (0.0, lo);
    for w in marks.windows(2) {
        if w[1] - w[0] > best.0 {
            best = (w[1] - w[0], 0.5 * (w[0] + w[1]));
        }
    }
    (best.0 > 1e-12).then_some(best.1)
}

/// Qualifying edges (both adjacent faces in the set, one visible and one
/// invisible) ordered into maximal vertex-connected chains, plus the two
/// child face sets.
pub fn separating_chain(
    face_set: &[usize],
    poly: &ConvexPolyhedron,
    dir: Vec3,
    tol: &TolerancePolicy,
) -> Result<SplitOutcome> {
    let sil = poly.silhouette_classify(dir, tol)?;
    let mut member = vec![false; poly.faces().len()];
    for &f in face_set {
        member[f] = true;
    }

    let qualifying: Vec<usize> = poly
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            member[e.faces[0]]
                && member[e.faces[1]]
                && sil.visible[e.faces[0]] != sil.visible[e.faces[1]]
        })
        .map(|(i, _)| i)
        .collect();

    // Vertex incidence among qualifying edges. They are a subset of the
    // global silhouette cycle, so degrees stay at most two.
    let mut incident: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &ei in &qualifying {
        let e = poly.edges()[ei];
        incident.entry(e.v[0]).or_default().push(ei);
        incident.entry(e.v[1]).or_default().push(ei);
    }
    if incident.values().any(|v| v.len() > 2) {
        return Err(Error::DegenerateGeometry(
            "silhouette edges do not form simple chains".into(),
        ));
    }

    let mut used = vec![false; poly.edges().len()];
    let mut chains = Vec::new();
    let walk = |start_edge: usize, start_vertex: usize, used: &mut Vec<bool>| {
        let mut edges = Vec::new();
        let mut at = start_vertex;
        let mut cur = start_edge;
        loop {
            used[cur] = true;
            edges.push(cur);
            let e = poly.edges()[cur];
            at = if e.v[0] == at { e.v[1] } else { e.v[0] };
            match incident[&at].iter().find(|&&n| !used[n]) {
                Some(&n) => cur = n,
                None => break,
            }
        }
        edges
    };

    // Open chains first, from degree-1 endpoints in deterministic order.
    let endpoints: Vec<usize> = incident
        .iter()
        .filter(|(_, es)| es.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    for v in endpoints {
        let ei = incident[&v][0];
        if used[ei] {
            continue;
        }
        let edges = walk(ei, v, &mut used);
        chains.push(SeparatingChain {
            edges,
            zone_direction: dir,
            closed: false,
        });
    }
    // Remaining qualifying edges form cycles.
    for &ei in &qualifying {
        if used[ei] {
            continue;
        }
        let start_vertex = poly.edges()[ei].v[0];
        let edges = walk(ei, start_vertex, &mut used);
        chains.push(SeparatingChain {
            edges,
            zone_direction: dir,
            closed: true,
        });
    }

    let mut visible: Vec<usize> = face_set
        .iter()
        .copied()
        .filter(|&f| sil.visible[f])
        .collect();
    let mut invisible: Vec<usize> = face_set
        .iter()
        .copied()
        .filter(|&f| !sil.visible[f])
        .collect();
    visible.sort_unstable();
    invisible.sort_unstable();

    Ok(SplitOutcome {
        chains,
        visible,
        invisible,
    })
}

/// The supporting plane through an edge, parallel to the zone direction,
/// oriented with the part on the kept (non-positive) side.
pub fn edge_cut_plane(
    poly: &ConvexPolyhedron,
    edge_index: usize,
    zone_dir: Vec3,
    tol: &TolerancePolicy,
) -> Result<Plane> {
    let e = poly.edges()[edge_index];
    let a = poly.vertex(e.v[0]);
    let b = poly.vertex(e.v[1]);
    let ev = b - a;
    let cross = ev.cross(zone_dir);
    if cross.norm() <= tol.len_eps(1.0) * ev.norm() * zone_dir.norm() {
        return Err(Error::DegenerateCross { edge: edge_index });
    }
    let n = cross.normalized().expect("checked above");
    let mid = (a + b) * 0.5;
    let plane = Plane::new(n, n.dot(mid));

    let eps = tol.len_eps(poly.circumradius());
    let max_sd = poly
        .vertices()
        .iter()
        .map(|&v| plane.signed_distance(v))
        .fold(f64::NEG_INFINITY, f64::max);
    if max_sd <= eps {
        return Ok(plane);
    }
    let flipped = plane.flipped();
    let max_sd_f = poly
        .vertices()
        .iter()
        .map(|&v| flipped.signed_distance(v))
        .fold(f64::NEG_INFINITY, f64::max);
    if max_sd_f <= eps {
        return Ok(flipped);
    }
    Err(Error::DegenerateGeometry(format!(
        "edge {edge_index} cut plane is not supporting (not a silhouette edge for this direction?)"
    )))
}

/// Apply one chain's zone of cuts in the binary edge-round schedule: round 0
/// cuts the middle edge (1-based index `ceil(k/2)`), each later round cuts
/// the middles of all current sub-chains, until every edge is cut.
pub fn edge_rounds(
    region: &Region,
    chain: &SeparatingChain,
    poly: &ConvexPolyhedron,
    face_round: usize,
    tol: &TolerancePolicy,
) -> Result<(Region, Vec<Cut>, Vec<EdgeRoundLog>)> {
    let keep = poly.centroid();
    let mut current = region.clone();
    let mut cuts = Vec::with_capacity(chain.edges.len());
    let mut logs = Vec::new();

    let mut ranges: Vec<(usize, usize)> = vec![(0, chain.edges.len())];
    let mut round = 0usize;
    while !ranges.is_empty() {
        let mut mids = Vec::with_capacity(ranges.len());
        let mut next = Vec::with_capacity(2 * ranges.len());
        for (lo, hi) in ranges {
            if hi <= lo {
                continue;
            }
            let mid = lo + (hi - lo - 1) / 2;
            mids.push(mid);
            if mid > lo {
                next.push((lo, mid));
            }
            if mid + 1 < hi {
                next.push((mid + 1, hi));
            }
        }
        if mids.is_empty() {
            break;
        }
        let mut log = EdgeRoundLog {
            round,
            cut_indices: Vec::with_capacity(mids.len()),
            total_cost: 0.0,
        };
        for mid in mids {
            let edge = chain.edges[mid];
            let plane = edge_cut_plane(poly, edge, chain.zone_direction, tol)?;
            let (next_region, cost) = current.apply_cut(&plane, keep, tol)?;
            current = next_region;
            log.cut_indices.push(cuts.len());
            log.total_cost += cost;
            cuts.push(Cut {
                plane: *current.halfspaces().last().expect("appended"),
                kind: CutKind::Edge,
                face_round: Some(face_round),
                edge_round: Some(round),
                source: Some(SourceFeature::Edge(edge)),
                cost,
            });
        }
        logs.push(log);
        ranges = next;
        round += 1;
    }
    Ok((current, cuts, logs))
}

/// Run the whole carving phase on a region that already had the box cut out:
/// face rounds down to singleton face sets, then one cap cut per face in
/// index order. The final region is exactly the part.
pub fn carve(
    region: &Region,
    poly: &ConvexPolyhedron,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<CarveOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keep = poly.centroid();
    let mut current = region.clone();
    let mut cuts: Vec<Cut> = Vec::new();
    let mut log = RoundLog::default();

    let mut sets = vec![FaceSet {
        id: 0,
        depth: 0,
        faces: (0..poly.faces().len()).collect(),
    }];
    let mut next_id = 1usize;
    let mut depth = 0usize;

    while sets.iter().any(|s| s.faces.len() >= 2) {
        let mut round_log = FaceRoundLog {
            round: depth,
            splits: Vec::new(),
        };
        let mut next_sets = Vec::new();
        for set in sets {
            if set.faces.len() < 2 {
                continue;
            }
            let dir = balanced_direction_with(&set.faces, poly, &mut rng)?;
            let outcome = separating_chain(&set.faces, poly, dir, tol)?;
            if outcome.chains.is_empty() {
                log.warnings
                    .push(format!("face set {} split without qualifying edges", set.id));
            }
            let visible_child = FaceSet {
                id: next_id,
                depth: depth + 1,
                faces: outcome.visible.clone(),
            };
            let invisible_child = FaceSet {
                id: next_id + 1,
                depth: depth + 1,
                faces: outcome.invisible.clone(),
            };
            next_id += 2;

            let mut split_log = SplitLog {
                parent: set,
                zone_direction: dir,
                visible_child: visible_child.clone(),
                invisible_child: invisible_child.clone(),
                chains: Vec::new(),
            };
            for chain in &outcome.chains {
                let (next_region, chain_cuts, mut er_logs) =
                    edge_rounds(&current, chain, poly, depth, tol)?;
                current = next_region;
                let base = cuts.len();
                for l in &mut er_logs {
                    for idx in &mut l.cut_indices {
                        *idx += base;
                    }
                }
                cuts.extend(chain_cuts);
                split_log.chains.push(ChainLog {
                    edges: chain.edges.clone(),
                    closed: chain.closed,
                    edge_rounds: er_logs,
                });
            }
            round_log.splits.push(split_log);
            next_sets.push(visible_child);
            next_sets.push(invisible_child);
        }
        log.face_rounds.push(round_log);
        sets = next_sets;
        depth += 1;
    }

    // Cap cuts, one per face in index order: with all incident edge cuts in
    // place each one costs exactly the face area.
    for f in 0..poly.faces().len() {
        let plane = poly.face_plane(f);
        let (next_region, cost) = current.apply_cut(&plane, keep, tol)?;
        current = next_region;
        log.face_cuts.push(FaceCutLog {
            face: f,
            cut_index: cuts.len(),
            cost,
        });
        cuts.push(Cut {
            plane: *current.halfspaces().last().expect("appended"),
            kind: CutKind::Face,
            face_round: None,
            edge_round: None,
            source: Some(SourceFeature::Face(f)),
            cost,
        });
    }

    Ok(CarveOutcome {
        region: current,
        cuts,
        log,
    })
}
