use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use oraclebench::bench::{self, BenchPlan, BenchSet};
use oraclebench::io;
use oraclebench_core::frankwolfe::{default_start, fw_minimize, FwConfig, StepRule};
use oraclebench_core::lmo::lmo;
use oraclebench_core::numerics::{norm_linf, norm_p};
use oraclebench_core::proj_direct::{
    proj_l1, proj_l2, proj_linf, proj_nuclear, proj_permutahedron, proj_simplex,
    ProjectionReport,
};
use oraclebench_core::proj_iterative::{
    project_birkhoff, project_lp_ball, DouglasRachfordConfig, HaugazeauConfig,
};
use oraclebench_core::sets::PermutahedronWeights;
use oraclebench_core::{Point, SetSpec};

/// Inputs to iterative lp projections must stay at moderate scale; the
/// level-set values are evaluated with direct powers.
const LP_INPUT_SCALE_LIMIT: f64 = 1e3;

#[derive(Parser)]
#[command(
    name = "oraclebench",
    about = "Linear minimization oracles and Euclidean projections on classic convex sets, \
             with a Frank-Wolfe driver and an LMO-vs-projection timing harness."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StepRuleArg {
    Harmonic,
    Linesearch,
}

#[derive(Subcommand)]
enum Command {
    /// Solve argmin <x, y> over the chosen set for the input y.
    Lmo {
        /// Set name: simplex | l1 | l2 | linf | lp | nuclear | flow |
        /// birkhoff | permutahedron.
        #[arg(long)]
        set: String,
        /// Exponent for --set lp.
        #[arg(long)]
        p: Option<f64>,
        /// Weight vector file for --set permutahedron.
        #[arg(long)]
        w: Option<PathBuf>,
        /// DAG file for --set flow.
        #[arg(long)]
        dag: Option<PathBuf>,
        /// Input point file (vector, or matrix for nuclear/birkhoff).
        #[arg(long)]
        input: PathBuf,
        /// Where the minimizer is written.
        #[arg(long)]
        output: PathBuf,
    },
    /// Project the input onto the chosen set.
    Project {
        #[arg(long)]
        set: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        w: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Stopping tolerance for the iterative projections (lp, birkhoff).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Optional CSV (t,residual) of per-iteration feasibility residuals
        /// for the iterative projections.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Minimize f(x) = 0.5 ||x - y||^2 over the chosen set with Frank-Wolfe
    /// and emit a CSV trace (t, f, gap).
    FwDemo {
        #[arg(long)]
        set: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        w: Option<PathBuf>,
        #[arg(long)]
        dag: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        /// Number of Frank-Wolfe steps.
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = StepRuleArg::Harmonic)]
        step_rule: StepRuleArg,
        /// Trace destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time LMO vs projection on random inputs and emit one CSV row per
    /// measurement.
    Bench {
        /// Comma-separated set names (flow has no projection and is not
        /// supported here).
        #[arg(long, default_value = "l1,nuclear")]
        sets: String,
        /// Size grid: comma list (64,128,256) or lo:hi:log.
        #[arg(long, default_value = "1e3:1e5:log")]
        sizes: String,
        #[arg(long, default_value_t = 5)]
        trials: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Tolerance for the iterative tasks.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Exponent for the lp set.
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate a bench CSV into mean times and projection/LMO ratios.
    Summarize {
        /// Bench CSV produced by the bench subcommand.
        file: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Lmo {
            set,
            p,
            w,
            dag,
            input,
            output,
        } => cmd_lmo(&set, p, w.as_deref(), dag.as_deref(), &input, &output),
        Command::Project {
            set,
            p,
            w,
            input,
            output,
            tol,
            max_iter,
            trace,
        } => cmd_project(&set, p, w.as_deref(), &input, &output, tol, max_iter, trace.as_deref()),
        Command::FwDemo {
            set,
            p,
            w,
            dag,
            input,
            steps,
            step_rule,
            out,
        } => cmd_fw_demo(
            &set,
            p,
            w.as_deref(),
            dag.as_deref(),
            &input,
            steps,
            step_rule,
            out.as_deref(),
        ),
        Command::Bench {
            sets,
            sizes,
            trials,
            seed,
            tol,
            max_iter,
            p,
            out,
        } => cmd_bench(&sets, &sizes, trials, seed, tol, max_iter, p, out.as_deref()),
        Command::Summarize { file } => cmd_summarize(&file),
    }
}

/// Reads the input point with the shape the set family expects.
fn read_input(set: &str, input: &Path) -> Result<Point> {
    Ok(match set {
        "nuclear" | "birkhoff" => Point::Matrix(io::read_matrix(input)?),
        _ => Point::Vector(io::read_vector(input)?),
    })
}

/// Builds the set descriptor for a named family around a concrete input.
fn build_spec(
    set: &str,
    p: Option<f64>,
    w: Option<&Path>,
    dag: Option<&Path>,
    input: &Point,
) -> Result<SetSpec> {
    let spec = match set {
        "simplex" => SetSpec::Simplex {
            n: input.len(),
        },
        "l1" => SetSpec::L1Ball { n: input.len() },
        "l2" => SetSpec::L2Ball { n: input.len() },
        "linf" => SetSpec::LInfBall { n: input.len() },
        "lp" => {
            let p = p.context("--set lp requires --p")?;
            SetSpec::lp_ball(input.len(), p)?
        }
        "nuclear" => {
            let m = input.matrix().context("nuclear input must be a matrix file")?;
            SetSpec::NuclearBall {
                rows: m.rows(),
                cols: m.cols(),
            }
        }
        "flow" => {
            let dag = dag.context("--set flow requires --dag")?;
            SetSpec::FlowPolytope(io::read_dag(dag)?)
        }
        "birkhoff" => {
            let m = input.matrix().context("birkhoff input must be a matrix file")?;
            if m.rows() != m.cols() {
                bail!("birkhoff input must be square, got {}x{}", m.rows(), m.cols());
            }
            SetSpec::Birkhoff { n: m.rows() }
        }
        "permutahedron" => {
            let w = w.context("--set permutahedron requires --w")?;
            SetSpec::permutahedron(io::read_vector(w)?)?
        }
        other => bail!(
            "unknown set {other:?}; expected simplex, l1, l2, linf, lp, nuclear, flow, \
             birkhoff or permutahedron"
        ),
    };
    spec.check_shape(input)
        .with_context(|| format!("input does not match the {set} set"))?;
    Ok(spec)
}

fn cmd_lmo(
    set: &str,
    p: Option<f64>,
    w: Option<&Path>,
    dag: Option<&Path>,
    input: &Path,
    output: &Path,
) -> Result<()> {
    let y = read_input(set, input)?;
    let spec = build_spec(set, p, w, dag, &y)?;
    let result = lmo(&spec, &y)?;
    io::write_point(output, &result.point)?;
    println!(
        "lmo set={set} n={} objective={} is_vertex={}",
        y.len(),
        result.objective,
        result.is_vertex
    );
    Ok(())
}

fn write_trace(path: &Path, residuals: &[f64]) -> Result<()> {
    let mut text = String::from("t,residual\n");
    for (t, r) in residuals.iter().enumerate() {
        text.push_str(&format!("{t},{r}\n"));
    }
    fs::write(path, text).with_context(|| format!("writing trace {}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_project(
    set: &str,
    p: Option<f64>,
    w: Option<&Path>,
    input: &Path,
    output: &Path,
    tol: f64,
    max_iter: usize,
    trace: Option<&Path>,
) -> Result<()> {
    let y = read_input(set, input)?;
    let report: ProjectionReport = match set {
        "simplex" => proj_simplex(y.vector().unwrap())?,
        "l1" => proj_l1(y.vector().unwrap())?,
        "l2" => proj_l2(y.vector().unwrap())?,
        "linf" => proj_linf(y.vector().unwrap())?,
        "lp" => {
            let p = p.context("--set lp requires --p")?;
            let yv = y.vector().unwrap();
            if norm_linf(yv) > LP_INPUT_SCALE_LIMIT {
                bail!(
                    "lp projection inputs must satisfy max|y_i| <= {LP_INPUT_SCALE_LIMIT}; \
                     rescale the input first"
                );
            }
            let cfg = HaugazeauConfig {
                max_iter,
                tol,
                record_iterates: trace.is_some(),
            };
            let run = project_lp_ball(yv, p, &cfg)?;
            if let (Some(path), Some(iterates)) = (trace, run.iterates.as_ref()) {
                let residuals: Vec<f64> = iterates
                    .iter()
                    .map(|x| (norm_p(x, p).expect("finite iterate") - 1.0).max(0.0))
                    .collect();
                write_trace(path, &residuals)?;
            }
            ProjectionReport {
                point: Point::Vector(run.point),
                iterations: run.iterations,
                residual: run.residual,
                method: "lp-haugazeau",
                converged: run.converged,
            }
        }
        "nuclear" => proj_nuclear(y.matrix().unwrap())?,
        "birkhoff" => {
            let cfg = DouglasRachfordConfig {
                max_iter,
                tol,
                record_average_trace: trace.is_some(),
            };
            let run = project_birkhoff(y.matrix().unwrap(), &cfg)?;
            if let (Some(path), Some(snaps)) = (trace, run.average_trace.as_ref()) {
                let residuals: Vec<f64> = snaps
                    .iter()
                    .map(|x| x.iter().fold(0.0f64, |acc, &v| acc.max(-v)))
                    .collect();
                write_trace(path, &residuals)?;
            }
            run.into_projection_report()
        }
        "permutahedron" => {
            let w = w.context("--set permutahedron requires --w")?;
            let weights = PermutahedronWeights::new(io::read_vector(w)?)?;
            proj_permutahedron(&weights, y.vector().unwrap())?
        }
        "flow" => bail!("projection onto the flow polytope is not supported"),
        other => bail!("unknown set {other:?}"),
    };
    io::write_point(output, &report.point)?;
    println!(
        "project set={set} n={} method={} iterations={} residual={:e} converged={}",
        y.len(),
        report.method,
        report.iterations,
        report.residual,
        report.converged
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_fw_demo(
    set: &str,
    p: Option<f64>,
    w: Option<&Path>,
    dag: Option<&Path>,
    input: &Path,
    steps: usize,
    step_rule: StepRuleArg,
    out: Option<&Path>,
) -> Result<()> {
    let y = read_input(set, input)?;
    let spec = build_spec(set, p, w, dag, &y)?;
    let (f, grad) = oraclebench_core::frankwolfe::quadratic_objective(&y);
    let cfg = FwConfig {
        step_rule: match step_rule {
            StepRuleArg::Harmonic => StepRule::Harmonic,
            StepRuleArg::Linesearch => StepRule::QuadraticLineSearch,
        },
        max_iter: steps,
        gap_tol: 0.0,
    };
    let x0 = default_start(&spec)?;
    let trace = fw_minimize(&f, &grad, &spec, x0, &cfg)?;

    let mut text = String::from("t,f,gap\n");
    for (t, (obj, gap)) in trace.objectives.iter().zip(&trace.gaps).enumerate() {
        text.push_str(&format!("{t},{obj},{gap}\n"));
    }
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing trace {}", path.display()))?
        }
        None => print!("{text}"),
    }
    eprintln!(
        "fw-demo set={set} steps={} final_f={} final_gap={} distinct_vertices={}",
        trace.iterations,
        trace.objectives.last().unwrap(),
        trace.gaps.last().unwrap(),
        trace.distinct_vertices
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    sets: &str,
    sizes: &str,
    trials: u32,
    seed: u64,
    tol: f64,
    max_iter: usize,
    p: f64,
    out: Option<&Path>,
) -> Result<()> {
    let sets = sets
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| BenchSet::parse(s.trim()))
        .collect::<Result<Vec<_>>>()?;
    let plan = BenchPlan {
        sets,
        sizes: bench::parse_sizes(sizes)?,
        trials,
        seed,
        tol,
        max_iter,
        p,
    };
    match out {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            bench::run_bench(&plan, file)?;
        }
        None => {
            let stdout = std::io::stdout();
            bench::run_bench(&plan, stdout.lock())?;
        }
    }
    Ok(())
}

fn cmd_summarize(file: &Path) -> Result<()> {
    let reader =
        fs::File::open(file).with_context(|| format!("opening {}", file.display()))?;
    let rows = bench::summarize(reader)?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(bench::format_summary(&rows).as_bytes())?;
    Ok(())
}
