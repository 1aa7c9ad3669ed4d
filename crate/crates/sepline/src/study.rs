//! Parallel trial driver, CSV tables and JSON summaries for the studies.
//!
//! Every trial is a pure function of `(seed, n, trial)`, so trials run on a
//! rayon pool in any order and the rows are collected back in job order.
//! Tables start with a `# schema=1` comment line followed by a CSV header.

use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sepline_core::experiments::{
    birthday_report, ceil_pow_ratio, ci99, fit_loglog, heavy_ball_report, log_over_loglog,
    mean_sd, scaling_trial, study_seed, summarize_scaling, throw_balls, trelax_trial, BallsBinsStats, HeavyBallReport,
    StudyRow, TRelaxRow,
};
use sepline_core::Result;

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_VAR: &str = "SEP_THREADS";

/// Worker threads requested through `SEP_THREADS`; 0 (or unset) means one
/// per core.
pub fn thread_count() -> std::result::Result<usize, String> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(format!("{THREADS_VAR}: {e}")),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_VAR} must be a non-negative integer, got {v:?}")),
    }
}

/// A pool of `threads` workers (0 = automatic).
pub fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// `f` over all jobs on `pool`, results in job order.
pub fn run_jobs<J, R, F>(pool: &rayon::ThreadPool, jobs: &[J], f: F) -> Vec<R>
where
    J: Sync,
    R: Send,
    F: Fn(&J) -> R + Sync + Send,
{
    pool.install(|| jobs.par_iter().map(&f).collect())
}

fn grid_jobs(ns: &[u64], trials: u64) -> Vec<(u64, u64)> {
    ns.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect()
}

/// Write `rows` as a versioned CSV table.
pub fn write_csv<W: Write, T: Serialize>(mut out: W, rows: &[T]) -> io::Result<()> {
    writeln!(out, "# schema={SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(io::Error::other)?;
    }
    w.flush()
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingCsvRow {
    pub n: u64,
    pub trial: u64,
    pub seed: u64,
    pub separator_size: u64,
    pub grid_n: u64,
    pub colliding_pairs: u64,
    pub active_cells: u64,
    pub max_active_per_line: u64,
    pub wall_time_ms: Option<u64>,
}

impl From<&StudyRow> for ScalingCsvRow {
    fn from(r: &StudyRow) -> Self {
        ScalingCsvRow {
            n: r.n,
            trial: r.trial,
            seed: r.seed,
            separator_size: r.separator_size,
            grid_n: r.grid_n,
            colliding_pairs: r.colliding_pairs,
            active_cells: r.active_cells,
            max_active_per_line: r.max_active_per_line,
            wall_time_ms: r.wall_time_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingPointJson {
    pub n: u64,
    pub trials: usize,
    pub grid_n: u64,
    pub mean_size: f64,
    pub sd_size: f64,
    pub ci99_size: [f64; 2],
    pub expected_size: f64,
    pub relative_error: f64,
    pub mean_colliding_pairs: f64,
    pub ci99_colliding_pairs: [f64; 2],
    pub expected_colliding_pairs: f64,
    pub mean_active_cells: f64,
    pub max_active_per_line: u64,
    /// `max_active_per_line / (ln n / ln ln n)`.
    pub active_per_line_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSummaryJson {
    pub study: &'static str,
    pub schema: u32,
    pub seed: u64,
    pub trials: u64,
    pub test_lines: usize,
    pub points: Vec<ScalingPointJson>,
    /// Log-log slope of mean separator size; null for a single `n`.
    pub exponent: Option<f64>,
}

pub struct ScalingStudy {
    pub rows: Vec<StudyRow>,
    pub summary: ScalingSummaryJson,
}

impl ScalingStudy {
    pub fn csv_rows(&self) -> Vec<ScalingCsvRow> {
        self.rows.iter().map(ScalingCsvRow::from).collect()
    }
}

fn ci_pair(xs: &[f64]) -> [f64; 2] {
    let (lo, hi) = ci99(xs);
    [lo, hi]
}

/// Grid separators of random points for every `n` in `ns`.
pub fn scaling_study(
    pool: &rayon::ThreadPool,
    ns: &[u64],
    trials: u64,
    seed: u64,
    test_lines: usize,
    timing: bool,
) -> Result<ScalingStudy> {
    let jobs = grid_jobs(ns, trials);
    let rows: Vec<StudyRow> = run_jobs(pool, &jobs, |&(n, t)| {
        let start = Instant::now();
        let mut row = scaling_trial(n, t, seed, test_lines)?;
        if timing {
            row.wall_time_ms = Some(start.elapsed().as_millis() as u64);
        }
        Ok(row)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let core = summarize_scaling(&rows);
    let points = core
        .points
        .iter()
        .map(|p| {
            let of_n = |g: fn(&StudyRow) -> u64| -> Vec<f64> {
                rows.iter().filter(|r| r.n == p.n).map(|r| g(r) as f64).collect()
            };
            ScalingPointJson {
                n: p.n,
                trials: p.trials,
                grid_n: p.grid_n,
                mean_size: p.mean_size,
                sd_size: p.sd_size,
                ci99_size: ci_pair(&of_n(|r| r.separator_size)),
                expected_size: p.expected_size,
                relative_error: p.relative_error,
                mean_colliding_pairs: p.mean_colliding_pairs,
                ci99_colliding_pairs: ci_pair(&of_n(|r| r.colliding_pairs)),
                expected_colliding_pairs: p.expected_colliding_pairs,
                mean_active_cells: p.mean_active_cells,
                max_active_per_line: p.max_active_per_line,
                active_per_line_ratio: log_over_loglog(p.n as f64).map(|s| p.max_active_per_line as f64 / s),
            }
        })
        .collect();
    let summary =
        ScalingSummaryJson { study: "scaling", schema: SCHEMA_VERSION, seed, trials, test_lines, points, exponent: core.exponent };
    Ok(ScalingStudy { rows, summary })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallsCsvRow {
    pub n_balls: u64,
    pub n_bins: u64,
    pub trial: u64,
    pub seed: u64,
    pub l2: u64,
    pub l3: u64,
    pub l4: u64,
    pub bins_ge2: u64,
    pub colliding_pairs: u64,
    pub max_occupancy: u64,
}

impl BallsCsvRow {
    fn new(trial: u64, seed: u64, s: &BallsBinsStats) -> BallsCsvRow {
        BallsCsvRow {
            n_balls: s.n_balls,
            n_bins: s.n_bins,
            trial,
            seed,
            l2: s.l(2),
            l3: s.l(3),
            l4: s.l(4),
            bins_ge2: s.bins_ge2,
            colliding_pairs: s.colliding_pairs,
            max_occupancy: s.max_occupancy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeavyJson {
    pub i: usize,
    pub f_i: f64,
    pub mean: f64,
    pub ci99: [f64; 2],
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub within_bounds: Option<bool>,
}

impl From<&HeavyBallReport> for HeavyJson {
    fn from(r: &HeavyBallReport) -> Self {
        HeavyJson {
            i: r.i,
            f_i: r.f_i,
            mean: r.mean,
            ci99: [r.ci_low, r.ci_high],
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            within_bounds: r.verdict,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallsPointJson {
    pub n_balls: u64,
    pub n_bins: u64,
    pub trials: usize,
    pub mean_colliding_pairs: f64,
    pub ci99_colliding_pairs: [f64; 2],
    /// `C(n, 2) / b`.
    pub expected_colliding_pairs: f64,
    pub mean_bins_ge2: f64,
    pub max_occupancy: u64,
    /// Heavy-ball brackets for `i = 2, 3, 4`; empty when there are fewer than
    /// three bins per ball.
    pub heavy: Vec<HeavyJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallsSummaryJson {
    pub study: &'static str,
    pub schema: u32,
    pub seed: u64,
    pub trials: u64,
    pub points: Vec<BallsPointJson>,
}

pub struct BallsStudy {
    pub rows: Vec<BallsCsvRow>,
    pub summary: BallsSummaryJson,
}

/// Bins for `n` balls: `bins` if given, else `ceil(n^(4/3))`.
pub fn default_bins(n: u64, bins: Option<u64>) -> u64 {
    bins.unwrap_or_else(|| ceil_pow_ratio(n, 4, 3)).max(1)
}

fn throw_all(pool: &rayon::ThreadPool, jobs: &[(u64, u64)], bins: &(dyn Fn(u64) -> u64 + Sync), seed: u64) -> Vec<BallsCsvRow> {
    run_jobs(pool, jobs, |&(n, t)| {
        let s = study_seed(seed, n, t);
        BallsCsvRow::new(t, s, &throw_balls(n, bins(n), s))
    })
}

/// Balls-into-bins occupancy for every `n` in `ns`.
pub fn balls_study(pool: &rayon::ThreadPool, ns: &[u64], bins: Option<u64>, trials: u64, seed: u64) -> BallsStudy {
    let jobs = grid_jobs(ns, trials);
    let rows = throw_all(pool, &jobs, &|n| default_bins(n, bins), seed);
    let points = ns
        .iter()
        .map(|&n| {
            let b = default_bins(n, bins);
            let group: Vec<&BallsCsvRow> = rows.iter().filter(|r| r.n_balls == n).collect();
            let col = |g: fn(&BallsCsvRow) -> u64| -> Vec<u64> { group.iter().map(|r| g(r)).collect() };
            let as_f64 = |v: Vec<u64>| -> Vec<f64> { v.into_iter().map(|x| x as f64).collect() };
            let heavy = (2..=4)
                .zip([col(|r| r.l2), col(|r| r.l3), col(|r| r.l4)])
                .filter_map(|(i, xs)| heavy_ball_report(n, b, i, &xs).ok())
                .map(|r| HeavyJson::from(&r))
                .collect();
            BallsPointJson {
                n_balls: n,
                n_bins: b,
                trials: group.len(),
                mean_colliding_pairs: mean_sd(&as_f64(col(|r| r.colliding_pairs))).0,
                ci99_colliding_pairs: ci_pair(&as_f64(col(|r| r.colliding_pairs))),
                expected_colliding_pairs: n as f64 * (n as f64 - 1.0) / 2.0 / b as f64,
                mean_bins_ge2: mean_sd(&as_f64(col(|r| r.bins_ge2))).0,
                max_occupancy: col(|r| r.max_occupancy).into_iter().max().unwrap_or(0),
                heavy,
            }
        })
        .collect();
    BallsStudy { rows, summary: BallsSummaryJson { study: "balls-bins", schema: SCHEMA_VERSION, seed, trials, points } }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirthdayPointJson {
    pub n_balls: u64,
    pub n_bins: u64,
    pub trials: usize,
    pub max_bins_ge2: u64,
    pub mean_bins_ge2: f64,
    pub max_colliding_pairs: u64,
    pub mean_colliding_pairs: f64,
    /// `ln n / ln ln n`.
    pub scale: Option<f64>,
    /// `max_bins_ge2 / scale`.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirthdaySummaryJson {
    pub study: &'static str,
    pub schema: u32,
    pub seed: u64,
    pub trials: u64,
    pub c: f64,
    pub points: Vec<BirthdayPointJson>,
}

pub struct BirthdayStudy {
    pub rows: Vec<BallsCsvRow>,
    pub summary: BirthdaySummaryJson,
}

/// `n` balls into `ceil(c n^2)` bins for every `n` in `ns`.
pub fn birthday_study(pool: &rayon::ThreadPool, ns: &[u64], c: f64, trials: u64, seed: u64) -> BirthdayStudy {
    let jobs = grid_jobs(ns, trials);
    let bins = |n: u64| sepline_core::experiments::birthday_bins(n, c);
    let rows = throw_all(pool, &jobs, &bins, seed);
    let points = ns
        .iter()
        .map(|&n| {
            let stats: Vec<BallsBinsStats> = rows
                .iter()
                .filter(|r| r.n_balls == n)
                .map(|r| BallsBinsStats {
                    n_balls: r.n_balls,
                    n_bins: r.n_bins,
                    heavy: [r.l2, r.l3, r.l4],
                    bins_ge2: r.bins_ge2,
                    colliding_pairs: r.colliding_pairs,
                    max_occupancy: r.max_occupancy,
                })
                .collect();
            let rep = birthday_report(n, bins(n), &stats);
            BirthdayPointJson {
                n_balls: rep.n_balls,
                n_bins: rep.n_bins,
                trials: rep.trials,
                max_bins_ge2: rep.max_bins_ge2,
                mean_bins_ge2: rep.mean_bins_ge2,
                max_colliding_pairs: rep.max_colliding_pairs,
                mean_colliding_pairs: rep.mean_colliding_pairs,
                scale: rep.scale,
                ratio: rep.ratio,
            }
        })
        .collect();
    BirthdayStudy {
        rows,
        summary: BirthdaySummaryJson { study: "birthday", schema: SCHEMA_VERSION, seed, trials, c, points },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TRelaxCsvRow {
    pub n: u64,
    pub t: u64,
    pub trial: u64,
    pub seed: u64,
    pub lines: u64,
    pub grid_n: u64,
    pub split_lines: u64,
    pub overfull_cells: u64,
    pub max_face_load: u64,
}

impl From<&TRelaxRow> for TRelaxCsvRow {
    fn from(r: &TRelaxRow) -> Self {
        TRelaxCsvRow {
            n: r.n,
            t: r.t,
            trial: r.trial,
            seed: r.seed,
            lines: r.lines,
            grid_n: r.grid_n,
            split_lines: r.split_lines,
            overfull_cells: r.overfull_cells,
            max_face_load: r.max_face_load,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TRelaxPointJson {
    pub n: u64,
    pub trials: usize,
    pub grid_n: u64,
    pub mean_lines: f64,
    pub ci99_lines: [f64; 2],
    pub mean_split_lines: f64,
    pub max_face_load: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TRelaxSummaryJson {
    pub study: &'static str,
    pub schema: u32,
    pub seed: u64,
    pub trials: u64,
    pub t: u64,
    pub points: Vec<TRelaxPointJson>,
    /// Log-log slope of the mean line count; null for a single `n`.
    pub exponent: Option<f64>,
    /// Every face of every output holds at most `t` points.
    pub all_faces_within_t: bool,
}

pub struct TRelaxStudy {
    pub rows: Vec<TRelaxCsvRow>,
    pub summary: TRelaxSummaryJson,
}

/// t-relaxed separators of random points for every `n` in `ns`.
pub fn trelax_study(pool: &rayon::ThreadPool, ns: &[u64], t: usize, trials: u64, seed: u64) -> Result<TRelaxStudy> {
    let jobs = grid_jobs(ns, trials);
    let rows: Vec<TRelaxCsvRow> = run_jobs(pool, &jobs, |&(n, k)| trelax_trial(n, t, k, seed).map(|r| TRelaxCsvRow::from(&r)))
        .into_iter()
        .collect::<Result<_>>()?;
    let points: Vec<TRelaxPointJson> = ns
        .iter()
        .map(|&n| {
            let group: Vec<&TRelaxCsvRow> = rows.iter().filter(|r| r.n == n).collect();
            let lines: Vec<f64> = group.iter().map(|r| r.lines as f64).collect();
            let split: Vec<f64> = group.iter().map(|r| r.split_lines as f64).collect();
            TRelaxPointJson {
                n,
                trials: group.len(),
                grid_n: group.first().map_or(0, |r| r.grid_n),
                mean_lines: mean_sd(&lines).0,
                ci99_lines: ci_pair(&lines),
                mean_split_lines: mean_sd(&split).0,
                max_face_load: group.iter().map(|r| r.max_face_load).max().unwrap_or(0),
            }
        })
        .collect();
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean_lines)).collect();
    let summary = TRelaxSummaryJson {
        study: "trelax",
        schema: SCHEMA_VERSION,
        seed,
        trials,
        t: t as u64,
        exponent: fit_loglog(&xy),
        all_faces_within_t: rows.iter().all(|r| r.max_face_load <= t as u64),
        points,
    };
    Ok(TRelaxStudy { rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jobs_keep_order_under_any_pool() {
        let jobs: Vec<u64> = (0..500).collect();
        let one = run_jobs(&pool(1), &jobs, |&j| j * j);
        let many = run_jobs(&pool(4), &jobs, |&j| j * j);
        assert_eq!(one, many);
        assert_eq!(one[17], 289);
    }

    #[test]
    fn csv_has_schema_line_and_header() {
        let rows = vec![ScalingCsvRow {
            n: 4,
            trial: 0,
            seed: 9,
            separator_size: 5,
            grid_n: 3,
            colliding_pairs: 1,
            active_cells: 1,
            max_active_per_line: 1,
            wall_time_ms: None,
        }];
        let text = csv_string(&rows);
        let mut it = text.lines();
        assert_eq!(it.next(), Some("# schema=1"));
        assert_eq!(
            it.next(),
            Some("n,trial,seed,separator_size,grid_n,colliding_pairs,active_cells,max_active_per_line,wall_time_ms")
        );
        assert_eq!(it.next(), Some("4,0,9,5,3,1,1,1,"));
    }

    #[test]
    fn studies_do_not_depend_on_thread_count() {
        let a = balls_study(&pool(1), &[50, 200], None, 6, 3);
        let b = balls_study(&pool(3), &[50, 200], None, 6, 3);
        assert_eq!(csv_string(&a.rows), csv_string(&b.rows));
        assert_eq!(a.summary, b.summary);
        let s1 = scaling_study(&pool(1), &[64, 128], 2, 5, 20, false).unwrap();
        let s2 = scaling_study(&pool(4), &[64, 128], 2, 5, 20, false).unwrap();
        assert_eq!(s1.rows, s2.rows);
        assert_eq!(s1.summary, s2.summary);
    }

    #[test]
    fn balls_summary_matches_rows() {
        let st = balls_study(&pool(2), &[100], Some(1_000_000), 40, 1);
        let p = &st.summary.points[0];
        assert_eq!(p.n_bins, 1_000_000);
        assert!((p.expected_colliding_pairs - 4950.0 / 1e6).abs() < 1e-15);
        let sum: u64 = st.rows.iter().map(|r| r.colliding_pairs).sum();
        assert!((p.mean_colliding_pairs - sum as f64 / 40.0).abs() < 1e-12);
        assert_eq!(p.heavy.len(), 3);
        // Fewer than three bins per ball: no heavy-ball brackets.
        assert!(balls_study(&pool(1), &[10], Some(20), 2, 1).summary.points[0].heavy.is_empty());
    }

    #[test]
    fn default_bins_is_four_thirds_power() {
        assert_eq!(default_bins(10_000, None), 215_444);
        assert_eq!(default_bins(8, None), 16);
        assert_eq!(default_bins(8, Some(5)), 5);
    }
}
