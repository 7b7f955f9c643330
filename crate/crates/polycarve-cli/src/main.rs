//! `polycarve`: plan, certify and benchmark guillotine cut sequences that
//! carve a convex polyhedron out of a sphere.
//!
//! Exit codes: 0 success, 1 certification failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polycarve::generate::{generate, Generator};
use polycarve::plan::{build_plan, replay};
use polycarve::{bench, off, planfile, Ball, ConvexPolyhedron, TolerancePolicy, Vec3};

#[derive(Parser)]
#[command(
    name = "polycarve",
    about = "Plan guillotine cuts that carve a convex polyhedron out of a sphere",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// OFF mesh to cut (alternative to --generator).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Instance generator: tetrahedron | cube | octahedron | icosahedron |
    /// random_hull | random_cornered.
    #[arg(long)]
    generator: Option<String>,
    /// Point count for the random generators.
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Seed for generators and for the planner's direction choices.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stock ball radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Stock ball center as "x,y,z".
    #[arg(long, default_value = "0,0,0", value_parser = parse_center)]
    center: Vec3Arg,
    /// Absolute tolerance of the geometric comparisons.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Clone, Copy)]
struct Vec3Arg(Vec3);

fn parse_center(s: &str) -> Result<Vec3Arg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z got '{s}'"));
    }
    let mut c = [0.0f64; 3];
    for (slot, tok) in c.iter_mut().zip(&parts) {
        *slot = tok
            .trim()
            .parse()
            .map_err(|_| format!("bad coordinate '{tok}'"))?;
    }
    Ok(Vec3Arg(Vec3::new(c[0], c[1], c[2])))
}

#[derive(Subcommand)]
enum Command {
    /// Build a plan, certify it by replay, and export the plan document.
    Plan {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Output plan file.
        #[arg(long, default_value = "plan.txt")]
        output: PathBuf,
        /// Also write region-boundary OFF snapshots after every k-th cut.
        #[arg(long)]
        snapshots_every: Option<usize>,
        /// Directory for the snapshots (default: <output>.snapshots).
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
    /// Import a plan document and certify it against its embedded instance.
    Replay {
        /// Plan file produced by `plan`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Sweep an instance family and emit the ratio table as CSV.
    Bench {
        /// Comma-separated instance sizes, e.g. "8,16,32,64".
        #[arg(long, default_value = "8,16,32,64,128,256,512,1024")]
        n: String,
        /// Seeds per size (seed, seed+1, ...).
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Base seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use cornered instances instead of centered ones.
        #[arg(long)]
        cornered: bool,
        /// Re-certify each plan and Monte Carlo check the final region.
        #[arg(long)]
        verify: bool,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Generate an instance and write it as an OFF mesh.
    Gen {
        /// Generator name (see `plan --generator`).
        #[arg(long, default_value = "random_hull")]
        generator: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output OFF path.
        #[arg(long, default_value = "instance.off")]
        output: PathBuf,
    },
}

fn tolerance_policy(abs: Option<f64>) -> TolerancePolicy {
    match abs {
        Some(a) => TolerancePolicy::new(a, 1e-12),
        None => TolerancePolicy::default(),
    }
}

fn resolve_instance(args: &InstanceArgs) -> polycarve::Result<(ConvexPolyhedron, Ball, u64)> {
    let tol = tolerance_policy(args.tolerance);
    if let Some(path) = &args.input {
        let poly = off::load_off(path, &tol)?;
        let ball = Ball::new(args.center.0, args.radius);
        return Ok((poly, ball, args.seed));
    }
    let name = args.generator.as_deref().unwrap_or("random_hull");
    let gen = Generator::parse(name, args.n, args.seed)?;
    let inst = generate(&gen, &tol)?;
    Ok((inst.poly, inst.ball, args.seed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e.downcast_ref::<polycarve::Error>() {
                Some(polycarve::Error::Certification(_)) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Plan {
            instance,
            output,
            snapshots_every,
            snapshot_dir,
        } => {
            let tol = tolerance_policy(instance.tolerance);
            let (poly, ball, seed) = resolve_instance(&instance)?;
            let plan = build_plan(&poly, &ball, seed, &tol)?;
            let report = replay(&plan, &poly, &ball, &tol);
            print!("{report}");
            println!(
                "cuts {}  cost {:.6}  lower bound {:.6}  ratio {:.4}  ratio/log^2 {:.4}",
                plan.cuts.len(),
                plan.totals.total,
                plan.bounds.combined,
                plan.ratio,
                plan.ratio_normalized
            );
            if !report.certified() {
                eprintln!("error: plan failed certification; not exporting");
                return Ok(ExitCode::from(1));
            }
            planfile::save_plan(&plan, &poly, &output)?;
            println!("plan written to {}", output.display());
            if let Some(k) = snapshots_every {
                let dir = snapshot_dir.unwrap_or_else(|| {
                    let mut d = output.clone();
                    d.set_extension("snapshots");
                    d
                });
                let files = planfile::export_snapshots(&plan, &poly, k, &dir, &tol)?;
                println!("{} snapshots in {}", files.len(), dir.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { input, tolerance } => {
            let tol = tolerance_policy(tolerance);
            let (plan, poly) = planfile::load_plan(&input, &tol)?;
            let report = replay(&plan, &poly, &plan.ball, &tol);
            print!("{report}");
            if report.certified() {
                println!("plan certifies: cost {:.6} ratio {:.4}", plan.totals.total, plan.ratio);
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("error: plan failed certification");
                Ok(ExitCode::from(1))
            }
        }
        Command::Bench {
            n,
            seeds,
            seed,
            cornered,
            verify,
            output,
            tolerance,
        } => {
            let sizes: Vec<usize> = n
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow::anyhow!("bad --n list '{n}': {e}"))?;
            let cfg = bench::BenchConfig {
                sizes,
                seeds_per_size: seeds,
                base_seed: seed,
                cornered,
                verify,
                tol: tolerance_policy(tolerance),
            };
            let rows = bench::run(&cfg)?;
            let csv = bench::to_csv(&rows);
            match output {
                Some(path) => {
                    std::fs::write(&path, csv)?;
                    println!("{} rows written to {}", rows.len(), path.display());
                }
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            generator,
            n,
            seed,
            output,
        } => {
            let tol = TolerancePolicy::default();
            let gen = Generator::parse(&generator, n, seed)?;
            let inst = generate(&gen, &tol)?;
            off::save_off(&inst.poly, &output)?;
            println!(
                "{}: {} vertices, {} faces -> {}",
                inst.name,
                inst.poly.vertices().len(),
                inst.poly.faces().len(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
