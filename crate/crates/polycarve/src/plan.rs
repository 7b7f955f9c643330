//! Plan assembly and certification: run both phases, collect the cut ledger,
//! lower bounds and ratio, and replay plans against their instance.

use sha2::{Digest, Sha256};

use crate::boxing::{box_cut_phase, lower_bounds, min_volume_box, LowerBounds};
use crate::carving::{carve, RoundLog};
use crate::cut::{Cut, CutKind, SourceFeature};
use crate::error::Result;
use crate::polyhedron::{supporting_margin, ConvexPolyhedron};
use crate::region::{Ball, Region};
use crate::separation::classify;
use crate::tol::TolerancePolicy;

/// Cost totals per phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    /// D-separation (if any) plus the six box cuts.
    pub box_phase: f64,
    /// All edge cuts.
    pub carve_phase: f64,
    /// Final per-face cap cuts.
    pub face_cuts: f64,
    pub total: f64,
}

/// Numbers the box-phase cost argument is checked against.
#[derive(Debug, Clone, Copy)]
pub struct BoxPhaseStats {
    pub entry_surface_area: f64,
    pub six_cut_total: f64,
    pub dsep_cost: Option<f64>,
}

/// One row of the serialized per-round cost summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSummaryRow {
    pub face_round: usize,
    pub set_id: usize,
    pub chain: usize,
    pub edge_round: usize,
    pub cuts: usize,
    pub cost: f64,
}

/// A complete, certified-replayable cutting plan.
#[derive(Debug, Clone)]
pub struct CutPlan {
    /// Binds the plan to the exact instance (vertices, faces, ball).
    pub mesh_hash: String,
    pub ball: Ball,
    pub n_vertices: usize,
    pub seed: u64,
    pub cornered: bool,
    pub cuts: Vec<Cut>,
    pub totals: Totals,
    pub bounds: LowerBounds,
    /// `total / bounds.combined`.
    pub ratio: f64,
    /// `ratio / (log2(n_vertices) + 1)^2`: the desk-scale rendering of the
    /// polylogarithmic guarantee.
    pub ratio_normalized: f64,
    pub box_stats: BoxPhaseStats,
    /// Full carving trace (in-memory only; the plan document carries
    /// `round_summary`).
    pub round_log: RoundLog,
    pub round_summary: Vec<RoundSummaryRow>,
}

/// Full-precision content hash of the instance.
pub fn instance_hash(poly: &ConvexPolyhedron, ball: &Ball) -> String {
    let mut h = Sha256::new();
    h.update(b"polycarve-instance-v1");
    h.update((poly.vertices().len() as u64).to_le_bytes());
    for v in poly.vertices() {
        h.update(v.x.to_le_bytes());
        h.update(v.y.to_le_bytes());
        h.update(v.z.to_le_bytes());
    }
    h.update((poly.faces().len() as u64).to_le_bytes());
    for f in poly.faces() {
        h.update((f.len() as u64).to_le_bytes());
        for &i in f {
            h.update((i as u64).to_le_bytes());
        }
    }
    h.update(ball.center.x.to_le_bytes());
    h.update(ball.center.y.to_le_bytes());
    h.update(ball.center.z.to_le_bytes());
    h.update(ball.radius.to_le_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Build the full plan: classify, d-separate if cornered, box, carve.
/// Deterministic: the same `(poly, ball, seed)` always yields the same plan.
pub fn build_plan(
    poly: &ConvexPolyhedron,
    ball: &Ball,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<CutPlan> {
    let placement = classify(poly, ball, tol)?;
    let bbox = min_volume_box(poly, tol)?;
    let boxed = box_cut_phase(&Region::new(*ball), poly, &bbox, &placement, tol)?;
    let carved = carve(&boxed.region, poly, seed, tol)?;

    let base = boxed.cuts.len();
    let mut round_log = carved.log;
    for fr in &mut round_log.face_rounds {
        for split in &mut fr.splits {
            for chain in &mut split.chains {
                for er in &mut chain.edge_rounds {
                    for idx in &mut er.cut_indices {
                        *idx += base;
                    }
                }
            }
        }
    }
    for fc in &mut round_log.face_cuts {
        fc.cut_index += base;
    }

    let mut cuts = boxed.cuts;
    cuts.extend(carved.cuts);

    let box_phase: f64 = cuts
        .iter()
        .filter(|c| matches!(c.kind, CutKind::DSeparation | CutKind::Box))
        .map(|c| c.cost)
        .sum();
    let carve_phase: f64 = cuts
        .iter()
        .filter(|c| c.kind == CutKind::Edge)
        .map(|c| c.cost)
        .sum();
    let face_cuts: f64 = cuts
        .iter()
        .filter(|c| c.kind == CutKind::Face)
        .map(|c| c.cost)
        .sum();
    let total = box_phase + carve_phase + face_cuts;

    let bounds = lower_bounds(ball, &bbox, &placement);
    let ratio = total / bounds.combined;
    let n = poly.vertices().len() as f64;
    let ratio_normalized = ratio / (n.log2() + 1.0).powi(2);

    let mut round_summary = Vec::new();
    for fr in &round_log.face_rounds {
        for split in &fr.splits {
            for (ci, chain) in split.chains.iter().enumerate() {
                for er in &chain.edge_rounds {
                    round_summary.push(RoundSummaryRow {
                        face_round: fr.round,
                        set_id: split.parent.id,
                        chain: ci,
                        edge_round: er.round,
                        cuts: er.cut_indices.len(),
                        cost: er.total_cost,
                    });
                }
            }
        }
    }

    Ok(CutPlan {
        mesh_hash: instance_hash(poly, ball),
        ball: *ball,
        n_vertices: poly.vertices().len(),
        seed,
        cornered: placement.is_cornered(),
        cuts,
        totals: Totals {
            box_phase,
            carve_phase,
            face_cuts,
            total,
        },
        bounds,
        ratio,
        ratio_normalized,
        box_stats: BoxPhaseStats {
            entry_surface_area: boxed.entry_surface_area,
            six_cut_total: boxed.six_cut_total,
            dsep_cost: boxed.dsep_cost,
        },
        round_log,
        round_summary,
    })
}

/// One certification check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Replay outcome: all checks with pass/fail and diffs.
#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub checks: Vec<Check>,
}

impl CertificationReport {
    pub fn certified(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl std::fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<18} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Re-execute a plan on a fresh region and verify it against its instance:
/// hash binding, cost reproduction (1e-9 relative), supporting-plane safety,
/// edge coverage, final region equal to the part, and ledger consistency.
pub fn replay(
    plan: &CutPlan,
    poly: &ConvexPolyhedron,
    ball: &Ball,
    tol: &TolerancePolicy,
) -> CertificationReport {
    let mut checks = Vec::new();
    let scale = ball.radius;

    let hash = instance_hash(poly, ball);
    checks.push(Check {
        name: "instance-hash",
        pass: hash == plan.mesh_hash,
        detail: if hash == plan.mesh_hash {
            "plan bound to this instance".into()
        } else {
            format!("plan hash {} != instance {}", &plan.mesh_hash[..12], &hash[..12])
        },
    });

    // Cost reproduction.
    let keep = poly.centroid();
    let mut region = Region::new(*ball);
    let mut worst_cost_err: f64 = 0.0;
    let mut cost_fail = None;
    for (i, cut) in plan.cuts.iter().enumerate() {
        match region.apply_cut(&cut.plane, keep, tol) {
            Ok((next, cost)) => {
                let err = (cost - cut.cost).abs();
                let lim = 1e-9 * cut.cost.abs().max(1e-9 * scale * scale);
                if err > lim && cost_fail.is_none() {
                    cost_fail = Some((i, cost, cut.cost));
                }
                worst_cost_err = worst_cost_err.max(err);
                region = next;
            }
            Err(e) => {
                cost_fail.get_or_insert((i, f64::NAN, cut.cost));
                checks.push(Check {
                    name: "replay-apply",
                    pass: false,
                    detail: format!("cut {i} failed to apply: {e}"),
                });
                break;
            }
        }
    }
    checks.push(Check {
        name: "cost-reproduction",
        pass: cost_fail.is_none(),
        detail: match cost_fail {
            None => format!("max per-cut deviation {worst_cost_err:.3e}"),
            Some((i, got, want)) => format!("cut {i}: recomputed {got} vs recorded {want}"),
        },
    });

    // Supporting-plane safety with margin.
    let mut worst_margin = f64::INFINITY;
    let mut margin_fail = None;
    for (i, cut) in plan.cuts.iter().enumerate() {
        let m = supporting_margin(&cut.plane, poly);
        if m < worst_margin {
            worst_margin = m;
            if m < -1e-9 * scale {
                margin_fail.get_or_insert(i);
            }
        }
    }
    checks.push(Check {
        name: "supporting-planes",
        pass: margin_fail.is_none(),
        detail: match margin_fail {
            None => format!("worst margin {worst_margin:.3e}"),
            Some(i) => format!("cut {i} intrudes into the part (margin {worst_margin:.3e})"),
        },
    });

    // Edge coverage: every mesh edge exactly one edge cut.
    let mut seen = vec![0usize; poly.edges().len()];
    for cut in &plan.cuts {
        if let (CutKind::Edge, Some(SourceFeature::Edge(e))) = (cut.kind, cut.source) {
            if e < seen.len() {
                seen[e] += 1;
            }
        }
    }
    let missing = seen.iter().filter(|&&c| c == 0).count();
    let duplicated = seen.iter().filter(|&&c| c > 1).count();
    checks.push(Check {
        name: "edge-coverage",
        pass: missing == 0 && duplicated == 0,
        detail: format!(
            "{} edges, {missing} uncovered, {duplicated} cut more than once",
            seen.len()
        ),
    });

    // Final region equals the part: every face plane must appear among the
    // half-spaces (which forces region = intersection of face half-spaces).
    let mut missing_faces = 0usize;
    for f in 0..poly.faces().len() {
        let fp = poly.face_plane(f);
        if !region
            .halfspaces()
            .iter()
            .any(|h| h.approx_eq_oriented(&fp, 1e-9, 1e-9 * scale))
        {
            missing_faces += 1;
        }
    }
    checks.push(Check {
        name: "final-region",
        pass: missing_faces == 0,
        detail: format!(
            "{} of {} face planes on the final boundary",
            poly.faces().len() - missing_faces,
            poly.faces().len()
        ),
    });

    // Ledger consistency.
    let total: f64 = plan.cuts.iter().map(|c| c.cost).sum();
    let sums_ok = (total - plan.totals.total).abs() <= 1e-9 * plan.totals.total.abs()
        && (plan.totals.box_phase + plan.totals.carve_phase + plan.totals.face_cuts
            - plan.totals.total)
            .abs()
            <= 1e-9 * plan.totals.total.abs();
    let ratio_ok = plan.ratio >= 1.0 - 1e-12
        && (plan.ratio * plan.bounds.combined - plan.totals.total).abs()
            <= 1e-9 * plan.totals.total.abs();
    checks.push(Check {
        name: "totals",
        pass: sums_ok,
        detail: format!("cut sum {total}, recorded {}", plan.totals.total),
    });
    checks.push(Check {
        name: "ratio",
        pass: ratio_ok,
        detail: format!("ratio {} (lower bound {})", plan.ratio, plan.bounds.combined),
    });

    CertificationReport { checks }
}
