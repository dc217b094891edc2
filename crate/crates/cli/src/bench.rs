//! Timing harness comparing linear minimizations against projections on the
//! same inputs, plus the summary table derived from the emitted CSV.
//!
//! Protocol: inputs are regenerated per trial from a derived seed, every
//! measurement is a single warm call (one untimed warm-up call precedes it),
//! all measurements run sequentially on one thread, and raw rows are
//! streamed to CSV; aggregation happens in `summarize`, not here.

use std::io::{Read, Write};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use oraclebench_core::lmo::{self, NUCLEAR_LMO_MAX_ITER, NUCLEAR_LMO_SEED};
use oraclebench_core::numerics::SeededRng;
use oraclebench_core::proj_direct;
use oraclebench_core::proj_iterative::{
    project_birkhoff, project_lp_ball, DouglasRachfordConfig, HaugazeauConfig,
};
use oraclebench_core::sets::PermutahedronWeights;
use oraclebench_core::svd::top_singular_pair;
use oraclebench_core::Matrix;

pub const CSV_HEADER: [&str; 9] = [
    "set",
    "task",
    "n",
    "m",
    "trial",
    "seed",
    "time_ns",
    "iterations",
    "converged",
];

/// One timing measurement row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRecord {
    pub set: String,
    pub task: String,
    pub n: usize,
    pub m: Option<usize>,
    pub trial: u32,
    pub seed: u64,
    pub time_ns: u64,
    pub iterations: u64,
    pub converged: bool,
}

/// Sets the harness can time. The flow polytope is absent: it has no
/// supported projection, so there is nothing to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchSet {
    Simplex,
    L1,
    L2,
    LInf,
    Lp,
    Nuclear,
    Birkhoff,
    Permutahedron,
}

impl BenchSet {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "simplex" => BenchSet::Simplex,
            "l1" => BenchSet::L1,
            "l2" => BenchSet::L2,
            "linf" => BenchSet::LInf,
            "lp" => BenchSet::Lp,
            "nuclear" => BenchSet::Nuclear,
            "birkhoff" => BenchSet::Birkhoff,
            "permutahedron" => BenchSet::Permutahedron,
            "flow" => bail!("the flow polytope has no supported projection to time"),
            other => bail!("unknown set {other:?}"),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BenchSet::Simplex => "simplex",
            BenchSet::L1 => "l1",
            BenchSet::L2 => "l2",
            BenchSet::LInf => "linf",
            BenchSet::Lp => "lp",
            BenchSet::Nuclear => "nuclear",
            BenchSet::Birkhoff => "birkhoff",
            BenchSet::Permutahedron => "permutahedron",
        }
    }

    fn is_matrix(self) -> bool {
        matches!(self, BenchSet::Nuclear | BenchSet::Birkhoff)
    }
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub sets: Vec<BenchSet>,
    pub sizes: Vec<usize>,
    pub trials: u32,
    pub seed: u64,
    /// Tolerance handed to the iterative tasks (lp and Birkhoff
    /// projections, nuclear linear minimization).
    pub tol: f64,
    pub max_iter: usize,
    /// Exponent for the lp set.
    pub p: f64,
}

impl Default for BenchPlan {
    fn default() -> Self {
        Self {
            sets: vec![BenchSet::L1, BenchSet::Nuclear],
            sizes: vec![1_000, 10_000, 100_000],
            trials: 5,
            seed: 42,
            tol: 1e-6,
            max_iter: 100_000,
            p: 3.0,
        }
    }
}

impl BenchPlan {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least one");
        }
        let mut prev = 0usize;
        for &s in &self.sizes {
            if s == 0 {
                bail!("sizes must be positive");
            }
            if s <= prev {
                bail!("sizes must be strictly increasing");
            }
            prev = s;
        }
        Ok(())
    }
}

/// Parses a size grid: either a comma list (`64,128,256`) or a
/// `lo:hi:log` range that multiplies by ten from `lo` up to `hi`.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let to_size = |tok: &str| -> Result<usize> {
        let val: f64 = tok
            .trim()
            .parse()
            .with_context(|| format!("invalid size {tok:?}"))?;
        if !(val.is_finite() && val >= 1.0 && val <= 1e12) {
            bail!("size {tok:?} out of range");
        }
        Ok(val.round() as usize)
    };
    if let Some((lo, rest)) = text.split_once(':') {
        let Some((hi, kind)) = rest.split_once(':') else {
            bail!("range must be lo:hi:log");
        };
        if kind != "log" {
            bail!("only log-spaced ranges are supported, got {kind:?}");
        }
        let lo = to_size(lo)?;
        let hi = to_size(hi)?;
        if hi < lo {
            bail!("range upper bound below lower bound");
        }
        let mut out = Vec::new();
        let mut cur = lo;
        while cur <= hi {
            out.push(cur);
            match cur.checked_mul(10) {
                Some(next) => cur = next,
                None => break,
            }
        }
        Ok(out)
    } else {
        text.split(',').map(to_size).collect()
    }
}

/// splitmix64; derives per-measurement seeds from the plan seed.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn trial_seed(plan_seed: u64, set: BenchSet, size: usize, trial: u32) -> u64 {
    let tag = set.name().bytes().fold(0u64, |acc, b| acc.wrapping_mul(31).wrapping_add(b as u64));
    mix(plan_seed ^ mix(tag) ^ mix(size as u64) ^ mix(trial as u64))
}

struct Measurement {
    time_ns: u64,
    iterations: u64,
    converged: bool,
}

fn time_call<F: FnMut() -> (u64, bool)>(mut call: F) -> Measurement {
    // Warm-up call, excluded from the measurement.
    let _ = call();
    let start = Instant::now();
    let (iterations, converged) = call();
    let time_ns = start.elapsed().as_nanos().min(u64::MAX as u128) as u64;
    Measurement {
        time_ns,
        iterations,
        converged,
    }
}

fn measure_vector_set(
    set: BenchSet,
    y: &[f64],
    weights: Option<&PermutahedronWeights>,
    plan: &BenchPlan,
) -> Result<(Measurement, Measurement)> {
    let lmo_m = match set {
        BenchSet::Simplex => time_call(|| {
            lmo::lmo_simplex(y).expect("finite input");
            (0, true)
        }),
        BenchSet::L1 => time_call(|| {
            lmo::lmo_l1(y).expect("finite input");
            (0, true)
        }),
        BenchSet::L2 => time_call(|| {
            lmo::lmo_l2(y).expect("finite input");
            (0, true)
        }),
        BenchSet::LInf => time_call(|| {
            lmo::lmo_linf(y).expect("finite input");
            (0, true)
        }),
        BenchSet::Lp => time_call(|| {
            lmo::lmo_lp(y, plan.p).expect("finite input");
            (0, true)
        }),
        BenchSet::Permutahedron => {
            let w = weights.expect("weights prepared");
            time_call(|| {
                lmo::lmo_permutahedron(w, y).expect("finite input");
                (0, true)
            })
        }
        _ => unreachable!("matrix sets handled separately"),
    };
    let proj_m = match set {
        BenchSet::Simplex => time_call(|| {
            proj_direct::proj_simplex(y).expect("finite input");
            (0, true)
        }),
        BenchSet::L1 => time_call(|| {
            proj_direct::proj_l1(y).expect("finite input");
            (0, true)
        }),
        BenchSet::L2 => time_call(|| {
            proj_direct::proj_l2(y).expect("finite input");
            (0, true)
        }),
        BenchSet::LInf => time_call(|| {
            proj_direct::proj_linf(y).expect("finite input");
            (0, true)
        }),
        BenchSet::Lp => {
            let cfg = HaugazeauConfig {
                max_iter: plan.max_iter,
                tol: plan.tol,
                record_iterates: false,
            };
            time_call(|| {
                let r = project_lp_ball(y, plan.p, &cfg).expect("finite input");
                (r.iterations as u64, r.converged)
            })
        }
        BenchSet::Permutahedron => {
            let w = weights.expect("weights prepared");
            time_call(|| {
                proj_direct::proj_permutahedron(w, y).expect("finite input");
                (0, true)
            })
        }
        _ => unreachable!("matrix sets handled separately"),
    };
    Ok((lmo_m, proj_m))
}

fn measure_matrix_set(
    set: BenchSet,
    y: &Matrix,
    plan: &BenchPlan,
) -> Result<(Measurement, Measurement)> {
    let lmo_m = match set {
        BenchSet::Nuclear => {
            let mut m = time_call(|| {
                lmo::lmo_nuclear(y, plan.tol).expect("finite input");
                (0, true)
            });
            // Iteration count for the record, recomputed outside the timing
            // with the oracle's own parameters.
            let neg = Matrix::new(
                y.rows(),
                y.cols(),
                y.data().iter().map(|v| -v).collect(),
            )?;
            let pair =
                top_singular_pair(&neg, plan.tol, NUCLEAR_LMO_MAX_ITER, NUCLEAR_LMO_SEED)?;
            m.iterations = pair.iterations as u64;
            m.converged = pair.converged;
            Ok::<_, anyhow::Error>(m)
        }
        BenchSet::Birkhoff => Ok(time_call(|| {
            lmo::lmo_birkhoff(y).expect("finite input");
            (0, true)
        })),
        _ => unreachable!("vector sets handled separately"),
    }?;
    let proj_m = match set {
        BenchSet::Nuclear => time_call(|| {
            proj_direct::proj_nuclear(y).expect("finite input");
            (0, true)
        }),
        BenchSet::Birkhoff => {
            let cfg = DouglasRachfordConfig {
                max_iter: plan.max_iter,
                tol: plan.tol,
                record_average_trace: false,
            };
            time_call(|| {
                let r = project_birkhoff(y, &cfg).expect("finite input");
                (r.iterations as u64, r.converged)
            })
        }
        _ => unreachable!("vector sets handled separately"),
    };
    Ok((lmo_m, proj_m))
}

/// Runs the plan and streams one CSV row per measurement to `out`. The LMO
/// and the projection are timed on the identical input; measurements are
/// strictly sequential.
pub fn run_bench<W: Write>(plan: &BenchPlan, out: W) -> Result<()> {
    plan.validate()?;
    std::env::set_var("ORACLEBENCH_THREADS", "1");

    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    wtr.write_record(CSV_HEADER)?;

    for &set in &plan.sets {
        for &size in &plan.sizes {
            let weights = (set == BenchSet::Permutahedron).then(|| {
                // Canonical weights 1..=n; any fixed choice works, the cost
                // is driven by the sort.
                PermutahedronWeights::new((1..=size).map(|i| i as f64).collect())
                    .expect("nonempty finite weights")
            });
            for trial in 0..plan.trials {
                let seed = trial_seed(plan.seed, set, size, trial);
                let mut rng = SeededRng::new(seed);
                let (lmo_m, proj_m, m_col) = if set.is_matrix() {
                    let y = Matrix::new(size, size, rng.normal_vec(size * size))?;
                    let (a, b) = measure_matrix_set(set, &y, plan)?;
                    (a, b, Some(size))
                } else {
                    let y = rng.normal_vec(size);
                    let (a, b) = measure_vector_set(set, &y, weights.as_ref(), plan)?;
                    (a, b, None)
                };
                for (task, m) in [("lmo", lmo_m), ("projection", proj_m)] {
                    wtr.serialize(BenchRecord {
                        set: set.name().to_string(),
                        task: task.to_string(),
                        n: size,
                        m: m_col,
                        trial,
                        seed,
                        time_ns: m.time_ns.max(1),
                        iterations: m.iterations,
                        converged: m.converged,
                    })?;
                }
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Mean times and the projection/LMO ratio for one (set, size) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub set: String,
    pub n: usize,
    pub m: Option<usize>,
    pub lmo_mean_ns: f64,
    pub projection_mean_ns: f64,
    pub ratio: f64,
}

/// Aggregates a bench CSV: mean per task over trials and the
/// projection-to-LMO ratio, per (set, size), sorted.
pub fn summarize<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    use std::collections::BTreeMap;
    type Key = (String, usize, Option<usize>);
    let mut cells: BTreeMap<Key, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for row in rdr.deserialize::<BenchRecord>() {
        let record = row.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line().to_string())
                .unwrap_or_else(|| "?".to_string());
            anyhow::anyhow!("malformed bench row at line {line}: {e}")
        })?;
        let cell = cells
            .entry((record.set.clone(), record.n, record.m))
            .or_default();
        match record.task.as_str() {
            "lmo" => cell.0.push(record.time_ns),
            "projection" => cell.1.push(record.time_ns),
            other => bail!("unknown task {other:?} for set {} at n={}", record.set, record.n),
        }
    }
    let mut rows = Vec::with_capacity(cells.len());
    for ((set, n, m), (lmo_times, proj_times)) in cells {
        if lmo_times.is_empty() {
            bail!("missing lmo rows for set {set} at n={n}");
        }
        if proj_times.is_empty() {
            bail!("missing projection rows for set {set} at n={n}");
        }
        let lmo_mean = lmo_times.iter().sum::<u64>() as f64 / lmo_times.len() as f64;
        let proj_mean = proj_times.iter().sum::<u64>() as f64 / proj_times.len() as f64;
        rows.push(SummaryRow {
            set,
            n,
            m,
            lmo_mean_ns: lmo_mean,
            projection_mean_ns: proj_mean,
            ratio: proj_mean / lmo_mean,
        });
    }
    Ok(rows)
}

/// Fixed-format table for the summary rows.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "set            n          m          lmo_mean_ns     projection_mean_ns  ratio\n",
    );
    for r in rows {
        let m = r.m.map(|v| v.to_string()).unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{:<14} {:<10} {:<10} {:<15.1} {:<19.1} {:.3}\n",
            r.set, r.n, m, r.lmo_mean_ns, r.projection_mean_ns, r.ratio
        ));
    }
    out
}
