//! The `turan` command line.
//!
//! Every subcommand writes one JSON report, `<subcommand>.json`, into the
//! output directory and prints a short summary. Exit status is 0 when the
//! check passes, 1 when it runs but fails, and 2 on bad input.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use turan::candidate::{candidate_gap, candidate_value, turan_candidate};
use turan::geometry::distance_lemma_residual;
use turan::radial::{ball_turan_check, chain_check, DEFAULT_ANGLES};
use turan::solver::{refine_study, solve_turan, verify_solution, SolveStatus, TuranProblem};
use turan::tiling::{lattice_tiling_check, spectral_pair_check, support_condition_check, SpectralOptions, Verdict};
use turan::torus::{format_sig, min_spectrum, rasterize, GridFunction, TorusGrid};
use turan::{ConvexBody, Lattice};

use crate::config::ConfigError;
use crate::report::{to_value, Report};

/// Fraction of samples covered exactly once needed for `tiling` to pass.
pub const TILING_FRACTION: f64 = 0.95;
/// Trials run by `lemma-check`.
pub const LEMMA_TRIALS: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "turan", version, about = "Positive definite functions on symmetric convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the grid extremal problem for a body.
    Solve(Opts),
    /// Build the autocorrelation candidate and compare it with 2^-d |Ω|.
    Candidate(Opts),
    /// Check that a body tiles space with a lattice.
    Tiling(Opts),
    /// Check that a lattice is a spectrum of a body.
    Spectrum(Opts),
    /// Check the dual lattice against 2Ω.
    Support(Opts),
    /// Rotation averaging, the autocorrelation chain, and the unit disk.
    RadialDemo(Opts),
    /// Solve one body on a sequence of grids.
    Study(Opts),
    /// Grid distance between αΩ and the complement of βΩ.
    LemmaCheck(Opts),
}

#[derive(Debug, Args)]
struct Opts {
    /// Body file.
    #[arg(long)]
    body: Option<PathBuf>,
    /// Lattice file.
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// Torus period; `study` takes a comma-separated list.
    #[arg(long = "L", value_delimiter = ',')]
    l: Vec<f64>,
    /// Nodes per axis; `study` takes a comma-separated list.
    #[arg(long = "N", value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    tol_pd: Option<f64>,
    #[arg(long)]
    tol_lp: Option<f64>,
    #[arg(long)]
    max_cuts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the report and dumps (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write grid functions as CSV.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerics(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<turan::Error> for Failure {
    fn from(e: turan::Error) -> Self {
        match e {
            turan::Error::Lp(_) => Failure::Numerics(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Outcome {
    report: Report,
    summary: Vec<String>,
    files: Vec<(String, Vec<u8>)>,
}

/// Runs one command line and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    type Handler = fn(&Opts) -> Result<Outcome, Failure>;
    let (name, opts, handler): (&str, &Opts, Handler) = match &cli.command {
        Command::Solve(o) => ("solve", o, solve),
        Command::Candidate(o) => ("candidate", o, candidate),
        Command::Tiling(o) => ("tiling", o, tiling),
        Command::Spectrum(o) => ("spectrum", o, spectrum),
        Command::Support(o) => ("support", o, support),
        Command::RadialDemo(o) => ("radial-demo", o, radial_demo),
        Command::Study(o) => ("study", o, study),
        Command::LemmaCheck(o) => ("lemma-check", o, lemma_check),
    };
    let outcome = match handler(opts) {
        Ok(o) => o,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(Failure::Numerics(msg)) => {
            eprintln!("numerical failure: {msg}");
            return 1;
        }
    };
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = write_outputs(&dir, name, &outcome) {
        eprintln!("error: {}: {e}", dir.display());
        return 2;
    }
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("{name}: {}", if outcome.report.passed { "pass" } else { "FAIL" });
    if outcome.report.passed {
        0
    } else {
        1
    }
}

fn write_outputs(dir: &Path, name: &str, outcome: &Outcome) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{name}.json")), outcome.report.render())?;
    for (file, bytes) in &outcome.files {
        fs::write(dir.join(file), bytes)?;
    }
    Ok(())
}

fn body(o: &Opts) -> Result<ConvexBody, Failure> {
    let path = o.body.as_ref().ok_or_else(|| Failure::Input("--body is required".into()))?;
    Ok(config::load_body(path)?)
}

fn lattice(o: &Opts) -> Result<Lattice, Failure> {
    let path = o.lattice.as_ref().ok_or_else(|| Failure::Input("--lattice is required".into()))?;
    Ok(config::load_lattice(path)?)
}

fn single<T: Copy>(values: &[T], flag: &str, default: Option<T>) -> Result<T, Failure> {
    match (values, default) {
        ([v], _) => Ok(*v),
        ([], Some(d)) => Ok(d),
        ([], None) => Err(Failure::Input(format!("{flag} is required"))),
        _ => Err(Failure::Input(format!("{flag} takes one value here"))),
    }
}

fn grid(o: &Opts, dim: usize, default_l: Option<f64>, default_n: Option<usize>) -> Result<TorusGrid, Failure> {
    let l = single(&o.l, "--L", default_l)?;
    let n = single(&o.n, "--N", default_n)?;
    Ok(TorusGrid::new(dim, n, l)?)
}

fn grid_inputs(grid: &TorusGrid) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("L".into(), json!(grid.period()));
    m.insert("N".into(), json!(grid.n()));
    m.insert("d".into(), json!(grid.dim()));
    m
}

fn lattice_value(lat: &Lattice) -> Value {
    to_value(&(0..lat.dim()).map(|j| lat.column(j)).collect::<Vec<_>>())
}

fn csv(f: &GridFunction) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    f.write_csv(&mut buf)?;
    Ok(buf)
}

fn solve(o: &Opts) -> Result<Outcome, Failure> {
    let body = body(o)?;
    let grid = grid(o, body.dim(), None, None)?;
    let mut p = TuranProblem::new(body.clone(), grid)?;
    if let Some(t) = o.tol_pd {
        p.tol_pd = t;
    }
    if let Some(t) = o.tol_lp {
        p.tol_lp = t;
    }
    if let Some(m) = o.max_cuts {
        p.max_cuts = m;
    }
    p.validate()?;
    let start = Instant::now();
    let s = solve_turan(&p)?;
    let seconds = start.elapsed().as_secs_f64();
    let v = verify_solution(&s, &p);
    let mut inputs = grid_inputs(&grid);
    inputs.insert("body".into(), to_value(&body));
    inputs.insert("tol_pd".into(), json!(p.tol_pd));
    inputs.insert("tol_lp".into(), json!(p.tol_lp));
    inputs.insert("max_cuts".into(), json!(p.max_cuts));
    let passed = s.status == SolveStatus::Certified && v.all();
    let mut files = Vec::new();
    let mut bin = Vec::new();
    s.f.write_binary(&mut bin)?;
    files.push(("solution.bin".to_string(), bin));
    if o.csv {
        files.push(("solution.csv".to_string(), csv(&s.f)?));
    }
    let summary = vec![
        format!(
            "value {}  ratio {}  target {}",
            format_sig(s.value),
            format_sig(s.ratio),
            format_sig(s.candidate_value)
        ),
        format!(
            "status {:?}  rounds {}  cuts {}  min spectrum {}  gap {}",
            s.status,
            s.rounds,
            s.active_frequencies.len(),
            format_sig(s.min_spectrum),
            format_sig(s.duality_gap)
        ),
        format!("verification {}  ({:.2} s)", if v.all() { "ok" } else { "failed" }, seconds),
    ];
    Ok(Outcome {
        report: Report {
            command: "solve",
            seed: o.seed,
            inputs,
            result: json!({ "solution": to_value(&s), "verification": to_value(&v) }),
            passed,
        },
        summary,
        files,
    })
}

fn candidate(o: &Opts) -> Result<Outcome, Failure> {
    let body = body(o)?;
    let grid = grid(o, body.dim(), None, None)?;
    let f = turan_candidate(&body, &grid)?;
    let target = candidate_value(&body, Some(&grid))?;
    let gap = candidate_gap(&body, &grid)?;
    let ms = min_spectrum(&f)?;
    let integral = f.integral();
    let passed = f.at_origin() == 1.0 && ms.value >= -1e-9;
    let mut inputs = grid_inputs(&grid);
    inputs.insert("body".into(), to_value(&body));
    let mut files = Vec::new();
    if o.csv {
        files.push(("candidate.csv".to_string(), csv(&f)?));
    }
    Ok(Outcome {
        report: Report {
            command: "candidate",
            seed: o.seed,
            inputs,
            result: json!({
                "integral": to_value(&integral),
                "target": to_value(&target),
                "gap": to_value(&gap),
                "relative_gap": to_value(&(gap / target.value)),
                "min_spectrum": to_value(&ms),
            }),
            passed,
        },
        summary: vec![
            format!("integral {}  target {}  gap {}", format_sig(integral), format_sig(target.value), format_sig(gap)),
            format!("min spectrum {} at {:?}", format_sig(ms.value), ms.index),
        ],
        files,
    })
}

fn tiling(o: &Opts) -> Result<Outcome, Failure> {
    let body = body(o)?;
    let lat = lattice(o)?;
    let grid = grid(o, body.dim(), Some(1.0), None)?;
    let r = lattice_tiling_check(&body, &lat, &grid)?;
    let mut inputs = Map::new();
    inputs.insert("N".into(), json!(grid.n()));
    inputs.insert("body".into(), to_value(&body));
    inputs.insert("lattice".into(), lattice_value(&lat));
    inputs.insert("min_fraction".into(), json!(TILING_FRACTION));
    Ok(Outcome {
        report: Report {
            command: "tiling",
            seed: o.seed,
            inputs,
            result: to_value(&r),
            passed: r.tiles(TILING_FRACTION),
        },
        summary: vec![format!(
            "covered exactly once: {}  multiplicity {}..{}  samples {}",
            format_sig(r.fraction_exactly_one),
            r.min_multiplicity,
            r.max_multiplicity,
            r.samples
        )],
        files: Vec::new(),
    })
}

fn spectrum(o: &Opts) -> Result<Outcome, Failure> {
    let body = body(o)?;
    let lat = lattice(o)?;
    let mut opts = SpectralOptions { seed: o.seed, ..SpectralOptions::default() };
    let mut inputs = Map::new();
    if !o.l.is_empty() || !o.n.is_empty() {
        let g = grid(o, body.dim(), None, None)?;
        inputs.extend(grid_inputs(&g));
        opts.grid = Some(g);
    }
    inputs.insert("body".into(), to_value(&body));
    inputs.insert("spectrum".into(), lattice_value(&lat));
    inputs.insert("radius".into(), json!(opts.radius));
    inputs.insert("samples".into(), json!(opts.samples));
    let r = spectral_pair_check(&body, &lat, &opts)?;
    Ok(Outcome {
        report: Report {
            command: "spectrum",
            seed: o.seed,
            inputs,
            result: to_value(&r),
            passed: r.verdict == Verdict::Pass,
        },
        summary: vec![
            format!("orthogonality {}  over {} pairs", format_sig(r.max_offdiagonal), r.pairs_tested),
            format!(
                "level error {} (raw {}, tail {})  verdict {:?}",
                format_sig(r.parseval_level_error),
                format_sig(r.raw_level_error),
                format_sig(r.tail_estimate),
                r.verdict
            ),
        ],
        files: Vec::new(),
    })
}

fn support(o: &Opts) -> Result<Outcome, Failure> {
    let body = body(o)?;
    let lat = lattice(o)?;
    let r = support_condition_check(&body, &lat)?;
    let mut inputs = Map::new();
    inputs.insert("body".into(), to_value(&body));
    inputs.insert("spectrum".into(), lattice_value(&lat));
    let witness = match &r.witness {
        Some(w) => format!("witness {w:?}"),
        None => "no witness".to_string(),
    };
    Ok(Outcome {
        report: Report { command: "support", seed: o.seed, inputs, result: to_value(&r), passed: r.holds() },
        summary: vec![format!("verdict {:?}  {witness}  dual points checked {}", r.verdict, r.dual_points_checked)],
        files: Vec::new(),
    })
}

fn radial_demo(o: &Opts) -> Result<Outcome, Failure> {
    let grid = grid(o, 2, Some(6.0), Some(64))?;
    let disk = ConvexBody::ball(2, 1.0)?;
    let g = rasterize(&ConvexBody::ball(2, 0.5)?, &grid)?;
    let chain = chain_check(&g, &disk)?;
    let ball = ball_turan_check(grid.period(), grid.n(), DEFAULT_ANGLES)?;
    let passed = chain.holds && ball.status == SolveStatus::Certified && ball.radial_pd_ok && ball.radial_support_ok;
    let mut inputs = grid_inputs(&grid);
    inputs.insert("n_angles".into(), json!(DEFAULT_ANGLES));
    let mut files = Vec::new();
    if o.csv {
        files.push(("optimum.csv".to_string(), csv(&ball.optimum)?));
        files.push(("radialized.csv".to_string(), csv(&ball.radial)?));
    }
    Ok(Outcome {
        report: Report {
            command: "radial-demo",
            seed: o.seed,
            inputs,
            result: json!({ "chain": to_value(&chain), "ball": to_value(&ball) }),
            passed,
        },
        summary: vec![
            format!(
                "chain: A {}  B {}  C {}  holds {}",
                format_sig(chain.a),
                format_sig(chain.b),
                format_sig(chain.c),
                chain.holds
            ),
            format!(
                "disk: value {}  ratio {}  status {:?}",
                format_sig(ball.value),
                format_sig(ball.ratio),
                ball.status
            ),
            format!(
                "radialized: value change {}  min spectrum {}  support ok {}  candidate fixed point {}",
                format_sig(ball.radial_value_change),
                format_sig(ball.radial_min_spectrum),
                ball.radial_support_ok,
                format_sig(ball.candidate_fixed_point_error)
            ),
        ],
        files,
    })
}

fn study(o: &Opts) -> Result<Outcome, Failure> {
    let body = body(o)?;
    if o.n.is_empty() {
        return Err(Failure::Input("--N is required".into()));
    }
    let periods = match o.l.len() {
        1 => vec![o.l[0]; o.n.len()],
        k if k == o.n.len() => o.l.clone(),
        0 => return Err(Failure::Input("--L is required".into())),
        k => return Err(Failure::Input(format!("--L has {k} values for {} values of --N", o.n.len()))),
    };
    let grids: Vec<(f64, usize)> = periods.into_iter().zip(o.n.iter().copied()).collect();
    let s = refine_study(&body, &grids);
    let passed = s.rows.iter().all(|r| r.error.is_none());
    let mut inputs = Map::new();
    inputs.insert("body".into(), to_value(&body));
    inputs.insert("grids".into(), to_value(&grids));
    let summary = s
        .rows
        .iter()
        .map(|r| match (r.ratio, &r.error) {
            (Some(ratio), _) => format!("L {}  N {}  ratio {}  ({:.2} s)", r.period, r.n, format_sig(ratio), r.seconds),
            (None, Some(e)) => format!("L {}  N {}  error: {e}", r.period, r.n),
            (None, None) => format!("L {}  N {}", r.period, r.n),
        })
        .chain(std::iter::once(format!("approaches one: {}", s.approaches_one)))
        .collect();
    Ok(Outcome {
        report: Report { command: "study", seed: o.seed, inputs, result: to_value(&s), passed },
        summary,
        files: Vec::new(),
    })
}

fn lemma_check(o: &Opts) -> Result<Outcome, Failure> {
    let fixed = match &o.body {
        Some(_) => Some(body(o)?),
        None => None,
    };
    let dim = fixed.as_ref().map_or(2, |b| b.dim());
    let grid = grid(o, dim, None, None)?;
    let bound = 2.0 * (dim as f64).sqrt() * grid.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut rows = Vec::with_capacity(LEMMA_TRIALS);
    let mut worst: f64 = 0.0;
    for _ in 0..LEMMA_TRIALS {
        let body = match &fixed {
            Some(b) => b.clone(),
            None => {
                let pairs = rng.gen_range(2..=5);
                ConvexBody::random_symmetric_polygon(&mut rng, pairs)?
            }
        };
        let reach = body.extent().iter().fold(0.0f64, |a, e| a.max(*e));
        let beta_max = (0.999 * grid.period() / 2.0 / reach).min(2.0);
        if beta_max <= 0.05 {
            return Err(Failure::Input(format!("the body does not fit in the period cube L = {}", grid.period())));
        }
        let beta = rng.gen_range(0.05..beta_max);
        let alpha = rng.gen_range(0.0..beta);
        let r = distance_lemma_residual(&body, alpha, beta, &grid)?;
        worst = worst.max(r.residual);
        rows.push(json!({
            "alpha": to_value(&alpha),
            "beta": to_value(&beta),
            "inradius": to_value(&body.inradius()),
            "lemma": to_value(&r),
        }));
    }
    let passed = worst <= bound;
    let mut inputs = grid_inputs(&grid);
    inputs.insert("trials".into(), json!(LEMMA_TRIALS));
    inputs.insert("random_bodies".into(), json!(fixed.is_none()));
    if let Some(b) = &fixed {
        inputs.insert("body".into(), to_value(b));
    }
    Ok(Outcome {
        report: Report {
            command: "lemma-check",
            seed: o.seed,
            inputs,
            result: json!({ "bound": to_value(&bound), "worst_residual": to_value(&worst), "trials": rows }),
            passed,
        },
        summary: vec![format!(
            "{LEMMA_TRIALS} trials: worst residual {}  bound 2·sqrt(d)·h = {}",
            format_sig(worst),
            format_sig(bound)
        )],
        files: Vec::new(),
    })
}
