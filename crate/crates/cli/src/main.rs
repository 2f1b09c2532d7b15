//! `oneround`: evaluate one-round coloring algorithms and maintain a ledger of
//! certified bounds on the best achievable monochromatic-edge probability.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 certificate rejected,
//! 3 internal consistency failure (including a broken ledger sandwich).
//! `ONEROUND_WORKERS` sets the worker thread count.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use oneround::algofile::resolve_algorithm;
use oneround::certify::{pentagon_bound, read_certificate, sdp_lower_bound, verify_certificate, Rejection, TrianglePolicy};
use oneround::debruijn::{normal2_optimal_coloring, distinct5_optimal_coloring, write_coloring, DeBruijnSpec, Variant};
use oneround::evaluate::{p_bracket_monotone_with, p_exact, p_monte_carlo, BracketOptions};
use oneround::figures::{caption, write_graph_csv, write_region_mesh};
use oneround::ledger::{replay_entry, Ledger};
use oneround::model::{Algorithm, GridAlgorithm, Oracle};
use oneround::optimize::{
    certify_upper, exhaustive_min, grid_upper_bound, local_search, monotone_search, tune_parameters,
    MajorityDiagonalFamily, RegionFamily, SearchConfig, TuneBudget,
};
use oneround::scalar::{fmt_ratio, ratio_to_f64};
use oneround::simulate::{pentagon_experiment, run_cycle, SimConfig};
use oneround::Error;

/// Environment variable holding the worker thread count.
const WORKERS_ENV: &str = "ONEROUND_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "oneround", version, about = "Certified bounds for one-round 2-coloring of directed cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate p(f) for an algorithm file or built-in name; prints CSV.
    Eval {
        /// Algorithm file, `f1`, `f2`, `f3`, `constant` or `constant0`.
        algorithm: String,
        #[arg(long, value_enum, default_value_t = EvalMethod::Exact)]
        method: EvalMethod,
        /// Monte Carlo samples.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Required for Monte Carlo.
        #[arg(long)]
        seed: Option<u64>,
        /// Bracket resolution.
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bound pipeline and append its record to the ledger.
    Bound {
        #[arg(value_enum)]
        direction: Direction,
        #[arg(long)]
        n: usize,
        /// Defaults to normal for upper and distinct for lower bounds.
        #[arg(long)]
        variant: Option<String>,
        /// upper: exhaustive, local, monotone, tune; lower: pentagon, sdp.
        #[arg(long)]
        method: Option<String>,
        /// Required for the stochastic upper-bound searches.
        #[arg(long)]
        seed: Option<u64>,
        /// Search configuration (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory receiving witness files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Ledger file; defaults to `ledger.tsv` inside `--out`.
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Triangle policy of the SDP.
        #[arg(long, default_value = "edges")]
        triangles: String,
        /// SDP duality-gap tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Simulate an algorithm on random directed cycles; prints CSV.
    Simulate {
        algorithm: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Also require every trial to have a monochromatic edge (odd `n = 5` only).
        #[arg(long)]
        pentagon: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a certificate file, or replay every entry of a ledger.
    Verify {
        /// Certificate file.
        certificate: Option<PathBuf>,
        #[arg(long, conflicts_with = "certificate")]
        ledger: Option<PathBuf>,
    },
    /// Emit CSV point sets for plotting.
    ExportFigure {
        #[arg(value_enum)]
        figure: Figure,
        /// Region algorithm for `region`; defaults to the tuned cone family.
        #[arg(long)]
        algorithm: Option<String>,
        /// Mesh resolution for `region`.
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalMethod {
    Exact,
    Mc,
    Bracket,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Figure {
    Normal2,
    Distinct5,
    Region,
}

/// A usage problem detected after argument parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn require_seed(seed: Option<u64>, what: &str) -> anyhow::Result<u64> {
    seed.ok_or_else(|| usage(format!("{what} is stochastic: pass --seed")))
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn configure_workers() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = raw.trim().parse().ok().filter(|&w| w > 0).ok_or_else(|| usage(format!("{WORKERS_ENV}={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    Ok(())
}

fn params_of(f: &Algorithm) -> String {
    match f {
        Algorithm::Region(r) => r.params.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";"),
        _ => String::new(),
    }
}

const EVAL_HEADER: &str = "family,params,method,value_num,value_den,mean,half_width,samples,seed,lo,hi";

fn eval(algorithm: &str, method: EvalMethod, trials: u64, seed: Option<u64>, n: usize, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let f = resolve_algorithm(algorithm)?;
    let (family, params) = (f.family(), params_of(&f));
    let row = match method {
        EvalMethod::Exact => {
            let p = p_exact(&f)?;
            format!("{family},{params},exact,{},{},,,,,,", p.numer(), p.denom())
        }
        EvalMethod::Mc => {
            let seed = require_seed(seed, "Monte Carlo evaluation")?;
            let est = p_monte_carlo(&f, trials, seed, 0.9999)?;
            format!("{family},{params},mc,,,{:.9},{:.9},{},{},,", est.mean, est.half_width, est.samples, est.seed)
        }
        EvalMethod::Bracket => {
            let Algorithm::Region(region) = &f else {
                return Err(usage(format!("bracket evaluation needs a region algorithm with declared directions, got a {family} algorithm")));
            };
            let br = p_bracket_monotone_with(region, n, &BracketOptions::default())?;
            format!("{family},{params},bracket,,,,,,,{},{}", fmt_ratio(&br.lo), fmt_ratio(&br.hi))
        }
    };
    let mut w = output(out)?;
    writeln!(w, "{EVAL_HEADER}\n{row}")?;
    w.flush()?;
    Ok(())
}

/// The command line that reproduces a bound, recorded in the ledger.
fn replay_command(direction: &str, n: usize, variant: Variant, method: &str, seed: Option<u64>, extra: &str) -> String {
    let seed = seed.map_or_else(String::new, |s| format!(" --seed {s}"));
    format!("oneround bound {direction} --n {n} --variant {variant} --method {method}{seed}{extra}")
}

#[allow(clippy::too_many_arguments)]
fn bound(
    direction: Direction,
    n: usize,
    variant: Option<String>,
    method: Option<String>,
    seed: Option<u64>,
    config: Option<PathBuf>,
    out: PathBuf,
    ledger: Option<PathBuf>,
    triangles: String,
    tol: f64,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let ledger_path = ledger.unwrap_or_else(|| out.join("ledger.tsv"));
    let mut ledger = Ledger::open(&ledger_path)?;
    let variant: Variant = match (&variant, direction) {
        (Some(v), _) => v.parse()?,
        (None, Direction::Upper) => Variant::Normal,
        (None, Direction::Lower) => Variant::Distinct,
    };
    let (record, replay) = match direction {
        Direction::Upper => {
            if variant != Variant::Normal {
                return Err(usage("upper bounds come from colorings of the normal De Bruijn graph (--variant normal)"));
            }
            if n < 2 {
                return Err(usage("normal De Bruijn graphs need n >= 2"));
            }
            let method = method.unwrap_or_else(|| if n <= 2 { "exhaustive".into() } else { "local".into() });
            let mut cfg = match &config {
                Some(p) => SearchConfig::parse(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
                None => SearchConfig::default(),
            };
            let (coloring, mut record) = match method.as_str() {
                "exhaustive" => {
                    let (c, _) = exhaustive_min(&DeBruijnSpec::new(variant, n)?)?;
                    let r = certify_upper(&c)?;
                    (c, r)
                }
                "local" => {
                    cfg.seed = require_seed(seed, "local search")?;
                    let r = local_search(&DeBruijnSpec::new(variant, n)?, &cfg)?;
                    let rec = certify_upper(&r.coloring)?;
                    (r.coloring, rec)
                }
                "monotone" => {
                    cfg.seed = require_seed(seed, "monotone search")?;
                    cfg.monotone_only = true;
                    let r = monotone_search(n, &cfg)?;
                    grid_upper_bound(&r.grid, "monotone", Some(cfg.seed))?
                }
                "tune" => {
                    let t = tune_parameters(&MajorityDiagonalFamily, &TuneBudget { resolution: n, ..Default::default() })?;
                    eprintln!("tuned {:?}: p in [{:.6}, {:.6}]", t.params, ratio_to_f64(&t.bracket.lo), ratio_to_f64(&t.bracket.hi));
                    grid_upper_bound(&GridAlgorithm::sample(&t.algorithm, n, [0.5; 3]), "tune", None)?
                }
                other => return Err(usage(format!("unknown upper-bound method {other:?} (exhaustive, local, monotone, tune)"))),
            };
            record.method = method.clone();
            record.seed = if method == "local" || method == "monotone" { seed } else { None };
            let path = out.join(format!("upper_{variant}_{n}_{method}.coloring"));
            let mut w = BufWriter::new(File::create(&path)?);
            write_coloring(&coloring, &mut w)?;
            w.flush()?;
            record.witness_path = Some(path.display().to_string());
            let extra = config.as_ref().map_or_else(String::new, |p| format!(" --config {}", p.display()));
            let replay = replay_command("upper", n, variant, &method, record.seed, &extra);
            (record, replay)
        }
        Direction::Lower => {
            if variant != Variant::Distinct {
                return Err(usage("lower bounds come from the distinct De Bruijn graph (--variant distinct)"));
            }
            let method = method.unwrap_or_else(|| if n == 5 { "pentagon".into() } else { "sdp".into() });
            match method.as_str() {
                "pentagon" => {
                    if n != 5 {
                        return Err(usage("the pentagon bound lives on n = 5"));
                    }
                    (pentagon_bound()?, replay_command("lower", n, variant, "pentagon", None, ""))
                }
                "sdp" => {
                    let policy: TrianglePolicy = triangles.parse()?;
                    let (cert, mut record) = sdp_lower_bound(n, policy, tol)?;
                    let path = out.join(format!("lower_distinct_{n}_sdp.cert"));
                    let mut w = BufWriter::new(File::create(&path)?);
                    cert.write(&mut w)?;
                    w.flush()?;
                    record.witness_path = Some(path.display().to_string());
                    let extra = format!(" --triangles {triangles} --tol {tol}");
                    (record, replay_command("lower", n, variant, "sdp", None, &extra))
                }
                other => return Err(usage(format!("unknown lower-bound method {other:?} (pentagon, sdp)"))),
            }
        }
    };
    let entry = ledger.append(record, replay)?;
    println!("{}", entry.record);
    println!("{}", entry.record.to_line());
    if let Some((lo, hi)) = ledger.sandwich() {
        println!("ledger: {} <= p* <= {} (~{:.6} .. {:.6})", fmt_ratio(&lo), fmt_ratio(&hi), ratio_to_f64(&lo), ratio_to_f64(&hi));
    }
    Ok(())
}

fn simulate(algorithm: &str, n: usize, trials: u64, seed: Option<u64>, pentagon: bool, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let seed = require_seed(seed, "simulation")?;
    let f = resolve_algorithm(algorithm)?;
    let result = if pentagon {
        if n != 5 {
            return Err(usage("--pentagon simulates 5-cycles; pass --n 5"));
        }
        pentagon_experiment(&f, trials, seed)?.check()?.result
    } else {
        run_cycle(&f, &SimConfig::new(n, trials, seed))?
    };
    let mut w = output(out)?;
    result.write_csv(&mut w)?;
    w.flush()?;
    eprintln!("mean {:.6} +- {:.6} over {} trials of n = {n}", result.mean(), result.radius, result.trials());
    Ok(())
}

fn verify(certificate: Option<PathBuf>, ledger: Option<PathBuf>) -> anyhow::Result<()> {
    if let Some(path) = ledger {
        let ledger = Ledger::open(&path)?;
        for entry in ledger.entries() {
            replay_entry(entry).with_context(|| format!("replaying {}", entry.record.to_line()))?;
            println!("ok: {}", entry.record);
        }
        println!("{} entries replayed", ledger.entries().len());
        return Ok(());
    }
    let path = certificate.ok_or_else(|| usage("pass a certificate file or --ledger"))?;
    let cert = read_certificate(BufReader::new(File::open(&path).with_context(|| format!("opening {}", path.display()))?))?;
    let verified = verify_certificate(&cert)?;
    println!("verified: bound {} (~{:.9}) via {}", fmt_ratio(&verified.bound), ratio_to_f64(&verified.bound), verified.psd_method);
    Ok(())
}

fn export_figure(figure: Figure, algorithm: Option<String>, n: usize, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let mut w = output(out)?;
    match figure {
        Figure::Normal2 | Figure::Distinct5 => {
            let coloring = match figure {
                Figure::Normal2 => normal2_optimal_coloring(),
                _ => distinct5_optimal_coloring(),
            };
            write_graph_csv(&coloring, &mut w)?;
            eprintln!("{}", caption(&coloring));
        }
        Figure::Region => {
            let f: Box<dyn Oracle> = match algorithm {
                Some(a) => Box::new(resolve_algorithm(&a)?),
                None => Box::new(MajorityDiagonalFamily.instantiate(&MajorityDiagonalFamily.initial())),
            };
            write_region_mesh(f.as_ref(), n, &mut w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_workers()?;
    match cli.command {
        Command::Eval { algorithm, method, trials, seed, n, out } => eval(&algorithm, method, trials, seed, n, &out),
        Command::Bound { direction, n, variant, method, seed, config, out, ledger, triangles, tol } => {
            bound(direction, n, variant, method, seed, config, out, ledger, triangles, tol)
        }
        Command::Simulate { algorithm, n, trials, seed, pentagon, out } => simulate(&algorithm, n, trials, seed, pentagon, &out),
        Command::Verify { certificate, ledger } => verify(certificate, ledger),
        Command::ExportFigure { figure, algorithm, n, out } => export_figure(figure, algorithm, n, &out),
    }
}

/// Map an error to the documented exit code.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Rejection>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Consistency(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
