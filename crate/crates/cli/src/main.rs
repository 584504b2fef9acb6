//! `degcov`: degree-based topological indices on `G(n, p)`.

mod output;

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use degcov::moments::{self, SeriesControl};
use degcov::montecarlo::{self, MCConfig, SweepRow};
use degcov::oracle::{self, EnumerationBudget};
use degcov::{graph, Error, ModelParams, MomentReport, VertexFunction};
use serde::{Deserialize, Serialize};

use output::{manifest_path, to_csv, RunManifest};

const ORACLE_REL_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "degcov", version, about = "Degree-based topological indices on G(n,p) random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate T_X and T_1 on an edge-list file
    Index {
        /// Edge-list file (`n=<int>` header, then `u v` lines)
        graph: PathBuf,
        #[arg(long, short)]
        f: String,
    },
    /// Closed-form moments of T_X and T_1
    Exact {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short)]
        f: String,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Exhaustive enumeration (n <= 7) next to the closed forms
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short)]
        f: String,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Monte Carlo at one (n, alpha) or (n, p), CSV output
    Simulate(SimArgs),
    /// Monte Carlo over the grid n x alpha, CSV output
    Sweep(SimArgs),
    /// Re-run a simulate/sweep manifest
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// d_f(k) at finite n against its Poisson limit
    Dfk {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short)]
        f: String,
        #[arg(long, short, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Shift f by d_f(1) and compare covariances before and after
    Decorrelate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short)]
        f: String,
    },
    /// Asymptotic zero-covariance test and its power-series coefficients
    Cov0 {
        #[arg(long)]
        alpha: f64,
        #[arg(long, short)]
        f: String,
        #[arg(long, default_value_t = 20)]
        jmax: usize,
        #[command(flatten)]
        series: SeriesArgs,
    },
}

#[derive(Args, Clone)]
#[command(group(ArgGroup::new("prob").required(true).args(["alpha", "p"])))]
struct ModelArgs {
    #[arg(long, short)]
    n: usize,
    /// Edge probability is alpha / n
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        match (self.alpha, self.p) {
            (Some(alpha), None) => ModelParams::from_alpha(self.n, alpha),
            (None, Some(p)) => ModelParams::from_p(self.n, p),
            _ => Err(Error::Param("give exactly one of --alpha and --p".into())),
        }
    }
}

#[derive(Args, Clone, Copy, Debug, Serialize, Deserialize)]
struct SeriesArgs {
    /// Absolute tail tolerance of the Poisson series
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Term cap; required for functions growing faster than d
    #[arg(long)]
    max_terms: Option<usize>,
}

impl SeriesArgs {
    fn control(&self) -> Result<SeriesControl, Error> {
        SeriesControl::new(self.tol, self.max_terms)
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SimArgs {
    /// Vertex counts (comma separated for sweep)
    #[arg(long, short, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Values of alpha (comma separated for sweep)
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    /// Edge probability (simulate only, instead of --alpha)
    #[arg(long, conflicts_with = "alpha")]
    p: Option<f64>,
    #[arg(long, short)]
    f: String,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    series: SeriesArgs,
    /// CSV destination; the manifest goes to `<out>.manifest.json`
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }

    fn runtime(msg: impl Into<String>) -> Self {
        Self { code: 1, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Truncation { .. } => Failure::runtime(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::runtime(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::runtime(format!("{e:#}"))
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Index { graph, f } => cmd_index(&graph, &f),
        Command::Exact { model, f, series } => cmd_exact(&model, &f, &series),
        Command::Oracle { model, f, workers } => cmd_oracle(&model, &f, workers),
        Command::Simulate(args) => cmd_simulate("simulate", &args),
        Command::Sweep(args) => cmd_simulate("sweep", &args),
        Command::Replay { manifest, out } => cmd_replay(&manifest, out),
        Command::Dfk { model, f, k, series } => cmd_dfk(&model, &f, k, &series),
        Command::Decorrelate { model, f } => cmd_decorrelate(&model, &f),
        Command::Cov0 { alpha, f, jmax, series } => cmd_cov0(alpha, &f, jmax, &series),
    }
}

fn parse_f(spec: &str) -> Result<VertexFunction, Failure> {
    Ok(spec.parse::<VertexFunction>()?)
}

fn cmd_index(path: &PathBuf, spec: &str) -> CmdResult {
    let f = parse_f(spec)?;
    let file = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let g = graph::read_edge_list(BufReader::new(file))
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let t = degcov::topo_index(&g, &f);

    let mut out = io::stdout().lock();
    writeln!(out, "f\t{f}")?;
    writeln!(out, "n\t{}", g.n())?;
    writeln!(out, "T_X\t{}", t.value)?;
    writeln!(out, "T_1\t{}", t.edge_count)?;
    writeln!(out, "degree\tcount")?;
    for (d, count) in g.degree_histogram() {
        writeln!(out, "{d}\t{count}")?;
    }
    Ok(())
}

fn cmd_exact(model: &ModelArgs, spec: &str, series: &SeriesArgs) -> CmdResult {
    let f = parse_f(spec)?;
    let params = model.params()?;
    let r = MomentReport::compute(&f, &params, &series.control()?)?;

    let mut out = io::stdout().lock();
    writeln!(out, "f\t{f}")?;
    writeln!(out, "n\t{}", params.n())?;
    writeln!(out, "p\t{}", params.p())?;
    writeln!(out, "alpha\t{}", params.alpha())?;
    writeln!(out, "d1\t{}", r.d1)?;
    match r.d2 {
        Some(d2) => writeln!(out, "d2\t{d2}")?,
        None => writeln!(out, "d2\tundefined (n = 2)")?,
    }
    writeln!(out, "d1_poisson\t{}", r.d1_poisson)?;
    writeln!(out, "d2_poisson\t{}", r.d2_poisson)?;
    writeln!(out, "expected_edges\t{}", r.expected_edges)?;
    writeln!(out, "e_tx\t{}", r.e_tx)?;
    writeln!(out, "e_txt1\t{}", r.e_txt1)?;
    writeln!(out, "cov_exact\t{}", r.cov_exact)?;
    match r.cov_asymptotic_coeff {
        moments::AsymptoticCoeff::Value(v) => writeln!(out, "cov_asymptotic_coeff\t{v}")?,
        moments::AsymptoticCoeff::ZeroBranch => writeln!(out, "cov_asymptotic_coeff\t0 (d1 = 0 branch)")?,
    }
    Ok(())
}

struct OracleRow {
    quantity: &'static str,
    oracle: f64,
    closed: f64,
}

impl OracleRow {
    fn delta(&self) -> f64 {
        (self.oracle - self.closed).abs() / self.closed.abs().max(1.0)
    }
}

fn cmd_oracle(model: &ModelArgs, spec: &str, workers: Option<usize>) -> CmdResult {
    let f = parse_f(spec)?;
    let params = model.params()?;
    let budget = EnumerationBudget::new(params.n(), params.p())?;
    if params.n() < 2 {
        return Err(Failure::input("oracle needs n >= 2"));
    }
    let pool = worker_pool(workers)?;

    let rows = pool.install(|| -> Result<Vec<OracleRow>, Error> {
        let m = oracle::oracle_moments(&budget, &f);
        let mut rows = vec![
            OracleRow { quantity: "mass", oracle: oracle::total_mass(&budget), closed: 1.0 },
            OracleRow { quantity: "E[T_1]", oracle: m.e_t1, closed: params.expected_edges() },
            OracleRow { quantity: "E[T_X]", oracle: m.e_tx, closed: moments::expected_index(&f, &params)? },
            OracleRow {
                quantity: "E[T_X T_1]",
                oracle: m.e_txt1,
                closed: moments::expected_product(&f, &params)?,
            },
            OracleRow { quantity: "Cov", oracle: m.cov, closed: moments::covariance_exact(&f, &params)? },
            OracleRow {
                quantity: "d_f(1)",
                oracle: oracle::oracle_dfk(&budget, &f, 1)?,
                closed: moments::dfk_exact(&f, &params, 1)?,
            },
        ];
        if params.n() >= 3 {
            rows.push(OracleRow {
                quantity: "d_f(2)",
                oracle: oracle::oracle_dfk(&budget, &f, 2)?,
                closed: moments::dfk_exact(&f, &params, 2)?,
            });
        }
        if params.n() <= oracle::MAX_INDEPENDENCE_N {
            rows.push(OracleRow {
                quantity: "independence",
                oracle: oracle::independence_check(&budget)?,
                closed: 0.0,
            });
        }
        Ok(rows)
    })?;

    let mut out = io::stdout().lock();
    writeln!(out, "{:<14}{:>24}{:>24}{:>12}", "quantity", "oracle", "closed_form", "delta")?;
    let mut failed = false;
    for row in &rows {
        let delta = row.delta();
        failed |= delta.is_nan() || delta >= ORACLE_REL_TOL;
        writeln!(
            out,
            "{:<14}{:>24}{:>24}{:>12.3e}",
            row.quantity, row.oracle, row.closed, delta
        )?;
    }
    if failed {
        return Err(Failure {
            code: 3,
            msg: format!("oracle and closed form differ by more than {ORACLE_REL_TOL:e} (relative)"),
        });
    }
    Ok(())
}

fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    if workers == Some(0) {
        return Err(Failure::input("--workers must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Failure::runtime(e.to_string()))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_sim(subcommand: &str, args: &SimArgs) -> Result<Vec<SweepRow>, Failure> {
    let f = parse_f(&args.f)?;
    let ctl = args.series.control()?;
    let workers = args.workers.unwrap_or_else(default_workers);

    if subcommand == "simulate" {
        let [n] = args.n[..] else {
            return Err(Failure::input("simulate takes a single --n"));
        };
        let params = match (&args.alpha[..], args.p) {
            ([alpha], None) => ModelParams::from_alpha(n, *alpha)?,
            ([], Some(p)) => ModelParams::from_p(n, p)?,
            _ => return Err(Failure::input("simulate takes exactly one of --alpha <a> or --p <p>")),
        };
        let cfg = MCConfig {
            params,
            f: f.clone(),
            samples: args.samples,
            seed: args.seed,
            workers,
        };
        cfg.validate()?;
        let moments = MomentReport::compute(&f, &params, &ctl)?;
        let mc = montecarlo::run(&cfg)?;
        return Ok(vec![SweepRow {
            params,
            cell_seed: args.seed,
            moments,
            mc,
        }]);
    }

    if args.p.is_some() {
        return Err(Failure::input("sweep takes a grid of --alpha values, not --p"));
    }
    if args.alpha.is_empty() {
        return Err(Failure::input("sweep needs at least one --alpha"));
    }
    if args.samples < 2 {
        return Err(Failure::input(format!(
            "need at least 2 samples for a covariance, got {}",
            args.samples
        )));
    }
    let grid: Vec<(usize, f64)> = args
        .n
        .iter()
        .flat_map(|&n| args.alpha.iter().map(move |&a| (n, a)))
        .collect();
    Ok(montecarlo::sweep(&grid, &f, args.samples, args.seed, workers, &ctl)?)
}

fn cmd_simulate(subcommand: &str, args: &SimArgs) -> CmdResult {
    let rows = run_sim(subcommand, args)?;
    let csv = to_csv(&rows)?;
    let manifest = serde_json::to_string_pretty(&RunManifest::new(subcommand, args))
        .map_err(|e| Failure::runtime(e.to_string()))?;
    match &args.out {
        Some(path) => {
            fs::write(path, &csv)?;
            fs::write(manifest_path(path), manifest + "\n")?;
        }
        None => {
            io::stdout().lock().write_all(&csv)?;
            eprintln!("{manifest}");
        }
    }
    Ok(())
}

fn cmd_replay(path: &PathBuf, out: Option<PathBuf>) -> CmdResult {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if manifest.subcommand != "simulate" && manifest.subcommand != "sweep" {
        return Err(Failure::input(format!("cannot replay subcommand `{}`", manifest.subcommand)));
    }
    let mut args = manifest.args;
    args.out = out;
    cmd_simulate(&manifest.subcommand, &args)
}

fn cmd_dfk(model: &ModelArgs, spec: &str, k: usize, series: &SeriesArgs) -> CmdResult {
    let f = parse_f(spec)?;
    let params = model.params()?;
    let exact = moments::dfk_exact(&f, &params, k)?;
    let limit = moments::dfk_poisson(&f, params.alpha(), k, &series.control()?)?;

    let mut out = io::stdout().lock();
    writeln!(out, "f\t{f}")?;
    writeln!(out, "k\t{k}")?;
    writeln!(out, "dfk_exact\t{exact}")?;
    writeln!(out, "dfk_poisson\t{limit}")?;
    writeln!(out, "gap\t{}", (exact - limit).abs())?;
    Ok(())
}

fn cmd_decorrelate(model: &ModelArgs, spec: &str) -> CmdResult {
    let f = parse_f(spec)?;
    let params = model.params()?;
    let d1 = moments::dfk_exact(&f, &params, 1)?;
    let shifted = if d1 == 0.0 { f.clone() } else { f.shift(d1) };
    let before = moments::covariance_exact(&f, &params)?;
    let after = moments::covariance_exact(&shifted, &params)?;

    let mut out = io::stdout().lock();
    writeln!(out, "f\t{f}")?;
    writeln!(out, "d1\t{d1}")?;
    writeln!(out, "shifted\t{shifted}")?;
    writeln!(out, "cov_before\t{before}")?;
    writeln!(out, "cov_after\t{after}")?;
    Ok(())
}

fn cmd_cov0(alpha: f64, spec: &str, jmax: usize, series: &SeriesArgs) -> CmdResult {
    let f = parse_f(spec)?;
    let witness = moments::zero_cov_test(&f, alpha, &series.control()?)?;
    let coeffs = moments::cov0_coefficients(&f, jmax);

    let mut out = io::stdout().lock();
    writeln!(out, "f\t{f}")?;
    writeln!(out, "alpha\t{alpha}")?;
    writeln!(out, "zero_covariance\t{}", witness.zero)?;
    writeln!(out, "d1_poisson\t{}", witness.d1)?;
    writeln!(out, "j\tc_j")?;
    for (j, c) in coeffs.iter().enumerate() {
        writeln!(out, "{j}\t{c}")?;
    }
    Ok(())
}
