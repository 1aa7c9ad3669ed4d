//! The `sep` command line.
//!
//! Exit codes: 0 success, 1 `verify` found an unseparated pair, 2 bad input
//! (unreadable file, parse error, bad flag), 3 a precondition does not hold
//! (including lines that fail to separate in `partition`), 4 an internal
//! verification failed.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sepline_core::experiments::random_points;
use sepline_core::partition2d::{
    build_partition_with, perturbed_grid, random_lines_in_box, stabbing_stats, Partition, PartitionConfig,
};
use sepline_core::rng::{rng_from_seed, trial_seed};
use sepline_core::sepsys::{find_unseparated_pair, properize};
use sepline_core::solvers::{
    exact_separability, face_lower_bound, greedy_hitting_set, grid_separator, grid_size_for, halving_separator,
    reweight_approx, SolverConfig,
};
use sepline_core::{CanonicalLine, Point, PointSet, SeparationMode};

use crate::formats::{format_fraction, format_lines, format_points, point_set_text, read_lines, read_points, ParseError};
use crate::study::{self, csv_string};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSEPARATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sep", version, about = "Separate planar point sets by lines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute separating lines for a point file and print them as a line file.
    Solve(SolveArgs),
    /// Check that a line file separates a point file.
    Verify(VerifyArgs),
    /// Monte-Carlo studies on random inputs.
    #[command(subcommand)]
    Study(StudyCommand),
    /// Build a simplicial partition from a separating line file.
    Partition(PartitionArgs),
    /// Write sample inputs.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Exact,
    Greedy,
    Reweight,
    Halving,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Strict,
    Relaxed,
}

impl From<Mode> for SeparationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => SeparationMode::Strict,
            Mode::Relaxed => SeparationMode::Relaxed,
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Reweight)]
    algo: Algo,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print a JSON summary (with the lines) instead of the line file.
    #[arg(long)]
    json: bool,
    /// Also write the line file here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report wall time in the JSON summary.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    lines: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    mode: Mode,
}

#[derive(Debug, Args)]
struct StudyCommon {
    /// Comma-separated sizes.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<u64>,
    #[arg(long, default_value_t = 5)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-trial table here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StudyCommand {
    /// Grid separators of random points.
    Scaling {
        #[command(flatten)]
        common: StudyCommon,
        /// Random lines per instance for the active-cells-per-line statistic.
        #[arg(long, default_value_t = 1000)]
        test_lines: usize,
        /// Record per-trial wall time (makes the table non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Balls into bins: heavy balls and colliding pairs.
    BallsBins {
        #[command(flatten)]
        common: StudyCommon,
        /// Number of bins; defaults to ceil(n^(4/3)).
        #[arg(long)]
        bins: Option<u64>,
    },
    /// n balls into ceil(c n^2) bins: bins with two or more balls.
    Birthday {
        #[command(flatten)]
        common: StudyCommon,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Lines leaving at most t random points in every face.
    Trelax {
        #[command(flatten)]
        common: StudyCommon,
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
}

#[derive(Debug, Args)]
struct PartitionArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    lines: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the partition JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 16)]
    attempts: usize,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    mode: Mode,
    /// Random lines for the stabbing statistics.
    #[arg(long, default_value_t = 1000)]
    test_lines: usize,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Uniform random points on the 2^-40 grid of the unit square.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A jittered k x k grid of points and its 2(k-1) separating lines.
    Grid {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the grid lines here.
        #[arg(long)]
        lines: Option<PathBuf>,
    },
}

/// A failed command: exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<sepline_core::Error> for Failure {
    fn from(e: sepline_core::Error) -> Self {
        let code = match e {
            sepline_core::Error::Verification(_) => EXIT_VERIFICATION,
            _ => EXIT_PRECONDITION,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Run `sep` with `args` (program name first) and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(&a, out),
        Command::Verify(a) => verify_cmd(&a, out),
        Command::Study(s) => study_cmd(s, out),
        Command::Partition(a) => partition_cmd(&a, out),
        Command::Gen(g) => gen_cmd(g, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "sep: {}", f.message);
            f.code
        }
    }
}

fn load_points(path: &Path) -> Result<PointSet, Failure> {
    Ok(PointSet::new(read_points(path)?)?)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("summaries serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct SolveSummary {
    algo: &'static str,
    mode: &'static str,
    seed: u64,
    n: usize,
    size: usize,
    /// The optimum, when the exact solver ran.
    sigma: Option<usize>,
    /// Fewest lines whose arrangement has `n` cells.
    sigma_lower_bound: usize,
    rounds: Option<usize>,
    verified: bool,
    wall_time_ms: Option<u64>,
    lines: Vec<[String; 3]>,
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::Exact => "exact",
        Algo::Greedy => "greedy",
        Algo::Reweight => "reweight",
        Algo::Halving => "halving",
        Algo::Grid => "grid",
    }
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    let ps = load_points(&a.input)?;
    let mode = SeparationMode::from(a.mode);
    let start = Instant::now();
    let mut sigma = None;
    let mut rounds = None;
    let lines = match a.algo {
        Algo::Exact => {
            let (k, lines) = exact_separability(&ps, mode)?;
            sigma = Some(k);
            lines
        }
        Algo::Greedy => greedy_hitting_set(&ps, mode)?,
        Algo::Reweight => {
            let cfg = SolverConfig { rng_seed: a.seed, ..SolverConfig::default() };
            let res = reweight_approx(&ps, &cfg)?;
            rounds = Some(res.rounds_used);
            match mode {
                SeparationMode::Relaxed => res.lines,
                SeparationMode::Strict => properize(&res.lines, &ps)?,
            }
        }
        Algo::Halving => halving_separator(&ps)?,
        Algo::Grid => grid_separator(&ps, grid_size_for(ps.len()))?,
    };
    let elapsed = start.elapsed();
    if let Some(p) = find_unseparated_pair(&ps, &lines, mode) {
        return Err(Failure {
            code: EXIT_VERIFICATION,
            message: format!("solver output leaves points {} and {} unseparated", p.i, p.j),
        });
    }
    let text = format_lines(&lines);
    if let Some(p) = &a.output {
        emit(out, Some(p), &text)?;
    }
    if a.json {
        let summary = SolveSummary {
            algo: algo_name(a.algo),
            mode: mode_name(mode),
            seed: a.seed,
            n: ps.len(),
            size: lines.len(),
            sigma,
            sigma_lower_bound: face_lower_bound(ps.len(), mode),
            rounds,
            verified: true,
            wall_time_ms: a.timing.then(|| elapsed.as_millis() as u64),
            lines: lines.iter().map(|l| [l.a().to_string(), l.b().to_string(), l.c().to_string()]).collect(),
        };
        emit(out, None, &to_json(&summary))?;
    } else {
        emit(out, None, &text)?;
    }
    Ok(EXIT_OK)
}

fn mode_name(m: SeparationMode) -> &'static str {
    match m {
        SeparationMode::Strict => "strict",
        SeparationMode::Relaxed => "relaxed",
    }
}

fn verify_cmd(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let ps = load_points(&a.points)?;
    let lines = read_lines(&a.lines)?;
    let mode = SeparationMode::from(a.mode);
    match find_unseparated_pair(&ps, &lines, mode) {
        None => {
            writeln!(out, "separated: {} points, {} lines ({})", ps.len(), lines.len(), mode_name(mode))?;
            Ok(EXIT_OK)
        }
        Some(p) => {
            writeln!(out, "unseparated pair: {} {}", p.i, p.j)?;
            Ok(EXIT_UNSEPARATED)
        }
    }
}

fn study_pool() -> Result<rayon::ThreadPool, Failure> {
    let threads = study::thread_count().map_err(Failure::input)?;
    Ok(study::pool(threads))
}

fn check_sizes(ns: &[u64]) -> Result<(), Failure> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure { code: EXIT_PRECONDITION, message: "sizes passed to --n must be strictly increasing".into() });
    }
    Ok(())
}

fn study_cmd(cmd: StudyCommand, out: &mut dyn Write) -> CmdResult {
    let pool = study_pool()?;
    let (csv, json, path) = match cmd {
        StudyCommand::Scaling { common: c, test_lines, timing } => {
            check_sizes(&c.n)?;
            let st = study::scaling_study(&pool, &c.n, c.trials, c.seed, test_lines, timing)?;
            (csv_string(&st.csv_rows()), to_json(&st.summary), c.csv)
        }
        StudyCommand::BallsBins { common: c, bins } => {
            check_sizes(&c.n)?;
            if bins == Some(0) {
                return Err(Failure { code: EXIT_PRECONDITION, message: "--bins must be at least 1".into() });
            }
            let st = study::balls_study(&pool, &c.n, bins, c.trials, c.seed);
            (csv_string(&st.rows), to_json(&st.summary), c.csv)
        }
        StudyCommand::Birthday { common: c, c: factor } => {
            check_sizes(&c.n)?;
            if !(factor > 0.0 && factor.is_finite()) {
                return Err(Failure { code: EXIT_PRECONDITION, message: format!("--c must be positive, got {factor}") });
            }
            let st = study::birthday_study(&pool, &c.n, factor, c.trials, c.seed);
            (csv_string(&st.rows), to_json(&st.summary), c.csv)
        }
        StudyCommand::Trelax { common: c, t } => {
            check_sizes(&c.n)?;
            let st = study::trelax_study(&pool, &c.n, t, c.trials, c.seed)?;
            (csv_string(&st.rows), to_json(&st.summary), c.csv)
        }
    };
    if let Some(p) = path {
        emit(out, Some(&p), &csv)?;
    }
    emit(out, None, &json)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TriangleJson {
    vertices: [[String; 2]; 3],
    points: Vec<usize>,
}

#[derive(Serialize)]
struct StabbingJson {
    test_lines: usize,
    max: usize,
    mean: f64,
}

#[derive(Serialize)]
struct PartitionJson {
    n: usize,
    r: usize,
    seed: u64,
    alpha: f64,
    source_sample_size: usize,
    sample: Vec<usize>,
    attempts: usize,
    conforming: bool,
    max_load: usize,
    bbox: [[String; 2]; 2],
    vertices: usize,
    edges: usize,
    faces: usize,
    euler_characteristic: i64,
    boundary_points: Vec<usize>,
    stabbing: StabbingJson,
    triangles: Vec<TriangleJson>,
}

fn point_json(p: &Point) -> [String; 2] {
    [format_fraction(&p.x), format_fraction(&p.y)]
}

/// Random test lines for the stabbing statistics of a partition built with
/// `seed`.
pub fn stabbing_lines(part: &Partition, seed: u64, count: usize) -> Vec<CanonicalLine> {
    let mut rng = rng_from_seed(trial_seed(seed, u64::MAX));
    random_lines_in_box(&part.bbox, count, &mut rng)
}

fn partition_cmd(a: &PartitionArgs, out: &mut dyn Write) -> CmdResult {
    let ps = load_points(&a.points)?;
    let lines = read_lines(&a.lines)?;
    if !(a.alpha > 0.0 && a.alpha.is_finite()) {
        return Err(Failure { code: EXIT_PRECONDITION, message: format!("--alpha must be positive, got {}", a.alpha) });
    }
    let cfg = PartitionConfig { alpha: a.alpha, max_attempts: a.attempts, mode: a.mode.into(), ..PartitionConfig::default() };
    let part = build_partition_with(&ps, &lines, a.r, a.seed, &cfg)?;
    let tests = stabbing_lines(&part, a.seed, a.test_lines);
    let (max, mean) = stabbing_stats(&part, &tests);
    let json = PartitionJson {
        n: ps.len(),
        r: a.r,
        seed: a.seed,
        alpha: a.alpha,
        source_sample_size: part.source_sample_size,
        sample: part.sample.clone(),
        attempts: part.attempts,
        conforming: part.conforming,
        max_load: part.max_load,
        bbox: [point_json(&part.bbox.min), point_json(&part.bbox.max)],
        vertices: part.vertices,
        edges: part.edges,
        faces: part.faces,
        euler_characteristic: part.euler_characteristic(),
        boundary_points: part.boundary_points.clone(),
        stabbing: StabbingJson { test_lines: tests.len(), max, mean },
        triangles: part
            .triangles
            .iter()
            .map(|t| TriangleJson {
                vertices: [point_json(&t.vertices[0]), point_json(&t.vertices[1]), point_json(&t.vertices[2])],
                points: t.points.clone(),
            })
            .collect(),
    };
    emit(out, a.out.as_deref(), &to_json(&json))?;
    Ok(EXIT_OK)
}

fn gen_cmd(cmd: GenCommand, out: &mut dyn Write) -> CmdResult {
    match cmd {
        GenCommand::Random { n, seed, out: path } => {
            emit(out, path.as_deref(), &point_set_text(&random_points(n, seed)))?;
        }
        GenCommand::Grid { k, seed, out: path, lines } => {
            if k == 0 {
                return Err(Failure { code: EXIT_PRECONDITION, message: "--k must be at least 1".into() });
            }
            let (ps, grid_lines) = perturbed_grid(k, seed);
            if let Some(l) = lines {
                emit(out, Some(&l), &format_lines(&grid_lines))?;
            }
            emit(out, path.as_deref(), &format_points(&ps.points()))?;
        }
    }
    Ok(EXIT_OK)
}
