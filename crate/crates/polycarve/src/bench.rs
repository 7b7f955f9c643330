//! Instance-family sweeps emitting the ratio table as CSV.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generate::{generate, Generator};
use crate::oracle::mc_region_volume;
use crate::plan::{build_plan, replay};
use crate::region::Region;
use crate::tol::TolerancePolicy;

#[derive(Debug, Clone, Copy)]
pub struct BenchRow {
    pub n: usize,
    pub seed: u64,
    pub cornered: bool,
    pub lower_bound: f64,
    pub cost: f64,
    pub ratio: f64,
    pub ratio_normalized: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub seeds_per_size: u64,
    pub base_seed: u64,
    pub cornered: bool,
    /// Re-certify each plan and cross-check the final region volume against
    /// the part with the Monte Carlo oracle.
    pub verify: bool,
    pub tol: TolerancePolicy,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![8, 16, 32, 64, 128, 256, 512, 1024],
            seeds_per_size: 5,
            base_seed: 1,
            cornered: false,
            verify: false,
            tol: TolerancePolicy::default(),
        }
    }
}

/// Run the sweep; instances are independent and processed in a parallel
/// worker pool with per-instance seeds. Rows come back sorted by `(n, seed)`.
pub fn run(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let jobs: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.seeds_per_size).map(move |k| (n, cfg.base_seed + k)))
        .collect();

    let mut rows = jobs
        .par_iter()
        .map(|&(n, seed)| run_one(cfg, n, seed))
        .collect::<Result<Vec<BenchRow>>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

fn run_one(cfg: &BenchConfig, n: usize, seed: u64) -> Result<BenchRow> {
    let gen = if cfg.cornered {
        Generator::RandomCornered { n, seed }
    } else {
        Generator::RandomHull { n, seed }
    };
    let inst = generate(&gen, &cfg.tol)?;
    let t0 = Instant::now();
    let plan = build_plan(&inst.poly, &inst.ball, seed, &cfg.tol)?;
    let wall_ms = t0.elapsed().as_secs_f64() * 1e3;

    if cfg.verify {
        let report = replay(&plan, &inst.poly, &inst.ball, &cfg.tol);
        if !report.certified() {
            return Err(Error::Certification(format!(
                "n={n} seed={seed}:\n{report}"
            )));
        }
        let mut region = Region::new(inst.ball);
        for cut in &plan.cuts {
            let (next, _) = region.apply_cut(&cut.plane, inst.poly.centroid(), &cfg.tol)?;
            region = next;
        }
        let est = mc_region_volume(&region, 200_000, seed ^ 0x51ab);
        let want = inst.poly.volume();
        let lim = (3.0 * est.std_error).max(1e-3 * want);
        if (est.value - want).abs() > lim {
            return Err(Error::Certification(format!(
                "n={n} seed={seed}: final region volume {} vs part volume {want} (limit {lim})",
                est.value
            )));
        }
    }

    Ok(BenchRow {
        n,
        seed,
        cornered: plan.cornered,
        lower_bound: plan.bounds.combined,
        cost: plan.totals.total,
        ratio: plan.ratio,
        ratio_normalized: plan.ratio_normalized,
        wall_ms,
    })
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("n,seed,cornered,lb,cost,ratio,ratio_normalized,wall_ms\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{:.3}\n",
            r.n, r.seed, r.cornered, r.lower_bound, r.cost, r.ratio, r.ratio_normalized, r.wall_ms
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_produces_sane_rows() {
        let cfg = BenchConfig {
            sizes: vec![8, 16],
            seeds_per_size: 2,
            base_seed: 3,
            cornered: false,
            verify: true,
            tol: TolerancePolicy::default(),
        };
        let rows = run(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.ratio >= 1.0, "ratio {}", r.ratio);
            assert!(!r.cornered);
            assert!(r.lower_bound > 0.0);
        }
        let csv = to_csv(&rows);
        assert!(csv.starts_with("n,seed,cornered,"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn cornered_sweep_flags_rows() {
        let cfg = BenchConfig {
            sizes: vec![12],
            seeds_per_size: 2,
            base_seed: 9,
            cornered: true,
            verify: false,
            tol: TolerancePolicy::default(),
        };
        let rows = run(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.cornered));
    }
}
