//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Pass criterion numbers as arguments to run a subset.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::Rng;
use sepline::study::{self, run_jobs};
use sepline_core::cellsample::{build_index, count_vertices, random_instance, sample_vertex, ConvexCell};
use sepline_core::experiments::{
    ceil_pow_ratio, ci99, collision_trial, fit_loglog, heavy_bound_factor, mean_sd, random_points, study_seed,
    throw_balls, trelax_trial,
};
use sepline_core::geom::{line_through, orient, ratio, side};
use sepline_core::partition2d::{build_partition, perturbed_grid, random_lines_in_box, stabbing_stats};
use sepline_core::rng::{rng_from_seed, trial_seed};
use sepline_core::solvers::{
    exact_separability, greedy_hitting_set, grid_size_for, halving_separator, reweight_approx, verify, SolverConfig,
};
use sepline_core::{CanonicalLine, Point, PointSet, SeparationMode, Sign};

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Ctx {
    pool: rayon::ThreadPool,
}

type Criterion = (u32, &'static str, fn(&Ctx) -> Outcome);

fn main() {
    let only: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let threads = study::thread_count().expect("SEP_THREADS");
    let ctx = Ctx { pool: study::pool(threads) };
    let criteria: [Criterion; 13] = [
        (1, "cell vertex count vs brute force", c01_cell_counting),
        (2, "vertex sampler uniformity", c02_sampler_uniformity),
        (3, "exact solver fixtures", c03_exact_fixtures),
        (4, "reweighting quality", c04_reweighting),
        (5, "halving construction", c05_halving),
        (6, "collision expectation", c06_collisions),
        (7, "heavy-ball bounds", c07_heavy_balls),
        (8, "birthday bound", c08_birthday),
        (9, "scaling exponent", c09_scaling),
        (10, "active cells per line", c10_active_per_line),
        (11, "partition conformance", c11_partition),
        (12, "t-relaxed scaling", c12_trelax),
        (13, "CLI determinism", c13_determinism),
    ];
    let mut failed = Vec::new();
    for (k, name, f) in criteria {
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let o = f(&ctx);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {verdict} {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(k);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

/// Interior intersections by checking every pair of lines.
fn brute_vertices(cell: &ConvexCell, lines: &[CanonicalLine]) -> Vec<(usize, usize)> {
    let v = cell.vertices();
    let k = v.len();
    let edges: Vec<CanonicalLine> = (0..k).map(|e| line_through(&v[e], &v[(e + 1) % k]).unwrap()).collect();
    let centroid = Point::new(
        v.iter().fold(ratio(0, 1), |s, p| s + &p.x) / ratio(k as i64, 1),
        v.iter().fold(ratio(0, 1), |s, p| s + &p.y) / ratio(k as i64, 1),
    );
    let inside: Vec<i32> = edges.iter().map(|e| if e.eval(&centroid) > ratio(0, 1) { 1 } else { -1 }).collect();
    let small = |l: &CanonicalLine| Some([l.a().to_i128()?, l.b().to_i128()?, l.c().to_i128()?]);
    let edge_coef: Option<Vec<[i128; 3]>> = edges.iter().map(small).collect();
    let line_coef: Vec<Option<[i128; 3]>> = lines.iter().map(small).collect();
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let fast = match (&edge_coef, line_coef[i], line_coef[j]) {
                (Some(ec), Some(p), Some(q)) => interior_i128(ec, &inside, p, q),
                _ => None,
            };
            let hit = fast.unwrap_or_else(|| match lines[i].intersection(&lines[j]) {
                Some(p) => (0..k).all(|e| orient(&v[e], &v[(e + 1) % k], &p) == Sign::Positive),
                None => false,
            });
            if hit {
                out.push((i, j));
            }
        }
    }
    out
}

/// Whether `p` and `q` meet strictly inside the cell, in checked integer
/// arithmetic; `None` on overflow.
fn interior_i128(edges: &[[i128; 3]], inside: &[i32], p: [i128; 3], q: [i128; 3]) -> Option<bool> {
    let d = p[0].checked_mul(q[1])?.checked_sub(q[0].checked_mul(p[1])?)?;
    if d == 0 {
        return Some(false);
    }
    let x = p[1].checked_mul(q[2])?.checked_sub(q[1].checked_mul(p[2])?)?;
    let y = p[2].checked_mul(q[0])?.checked_sub(q[2].checked_mul(p[0])?)?;
    for (e, &want) in edges.iter().zip(inside) {
        let val = e[0].checked_mul(x)?.checked_add(e[1].checked_mul(y)?)?.checked_add(e[2].checked_mul(d)?)?;
        if val == 0 || (val.signum() * d.signum()) as i32 != want {
            return Some(false);
        }
    }
    Some(true)
}

fn c01_cell_counting(ctx: &Ctx) -> Outcome {
    let start = Instant::now();
    let jobs: Vec<u64> = (0..1000).collect();
    let results = run_jobs(&ctx.pool, &jobs, |&k| {
        let mut rng = rng_from_seed(trial_seed(SEED ^ 0x0101, k));
        let sides = if k % 2 == 0 { 4 } else { 6 };
        let m = rng.gen_range(2..=128);
        let (cell, lines) = random_instance(&mut rng, sides, m);
        let expect = brute_vertices(&cell, &lines).len() as u64;
        match build_index(&cell, &lines) {
            Ok(idx) => (count_vertices(&idx) == expect, expect),
            Err(_) => (false, expect),
        }
    });
    let agree = results.iter().filter(|r| r.0).count();
    let total: u64 = results.iter().map(|r| r.1).sum();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        agree == 1000 && secs < 60.0,
        format!("{agree}/1000 instances agree ({total} vertices in all), {secs:.1}s of 60s"),
    )
}

fn c02_sampler_uniformity(ctx: &Ctx) -> Outcome {
    const DRAWS: usize = 50_000;
    let jobs: Vec<u64> = (0..20).collect();
    let results = run_jobs(&ctx.pool, &jobs, |&k| {
        let mut rng = rng_from_seed(trial_seed(SEED ^ 0x0202, k));
        let (cell, lines, verts) = loop {
            let sides = if rng.gen_bool(0.5) { 4 } else { 6 };
            let m = rng.gen_range(10..=40);
            let (cell, lines) = random_instance(&mut rng, sides, m);
            let verts = brute_vertices(&cell, &lines);
            if (30..=200).contains(&verts.len()) {
                break (cell, lines, verts);
            }
        };
        let idx = build_index(&cell, &lines).expect("index");
        let mut counts: BTreeMap<(usize, usize), usize> = verts.iter().map(|&v| (v, 0)).collect();
        let mut stray = 0;
        for _ in 0..DRAWS {
            match sample_vertex(&idx, &mut rng).ok().and_then(|v| counts.get_mut(&v)) {
                Some(c) => *c += 1,
                None => stray += 1,
            }
        }
        let u = 1.0 / verts.len() as f64;
        let tvd = 0.5 * (counts.values().map(|&c| (c as f64 / DRAWS as f64 - u).abs()).sum::<f64>() + stray as f64 / DRAWS as f64);
        (verts.len(), tvd)
    });
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let (lo, hi) = (results.iter().map(|r| r.0).min().unwrap(), results.iter().map(|r| r.0).max().unwrap());
    outcome(worst <= 0.05, format!("20 instances with {lo}..{hi} vertices, max TVD {worst:.4} (limit 0.05)"))
}

/// Bipartitions `(mask, complement)` of a general-position set cut out by
/// lines missing every point, as masks not containing point 0.
fn dichotomies(ps: &PointSet) -> Vec<u32> {
    let n = ps.len();
    let full = (1u32 << n) - 1;
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let base: u32 = (0..n).filter(|&k| ps.orient_idx(i, j, k) == Sign::Positive).map(|k| 1 << k).sum();
            for (ai, aj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let mut m = base | (ai << i) | (aj << j);
                if m & 1 == 1 {
                    m = full & !m;
                }
                if m != 0 {
                    out.insert(m);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Whether some `k` of the bipartitions give every point its own sign vector.
fn some_k_separate(masks: &[u32], n: usize, k: usize) -> bool {
    assert!(k <= 6);
    fn go(masks: &[u32], from: usize, left: usize, chosen: &mut Vec<u32>, n: usize) -> bool {
        if left == 0 {
            // At most six bipartitions, so sign vectors index a 64-bit set.
            let mut seen = 0u64;
            return (0..n).all(|p| {
                let sig = chosen.iter().fold(0u32, |acc, m| (acc << 1) | ((m >> p) & 1));
                let fresh = seen >> sig & 1 == 0;
                seen |= 1 << sig;
                fresh
            });
        }
        for t in from..masks.len() {
            chosen.push(masks[t]);
            let hit = go(masks, t + 1, left - 1, chosen, n);
            chosen.pop();
            if hit {
                return true;
            }
        }
        false
    }
    go(masks, 0, k, &mut Vec::new(), n)
}

/// Strict separation checked point pair by point pair with the plain side test.
fn strictly_separates(points: &[Point], lines: &[CanonicalLine]) -> bool {
    (0..points.len()).all(|i| {
        (i + 1..points.len())
            .all(|j| lines.iter().any(|l| side(l, &points[i]).mul(side(l, &points[j])) == Sign::Negative))
    })
}

/// Exact optimum checked both ways: the witness separates, and (when the
/// search is small enough) no `sigma - 1` lines do.
fn check_sigma(ps: &PointSet, lower_oracle: bool) -> Result<(usize, bool), String> {
    let (sigma, lines) = exact_separability(ps, SeparationMode::Strict).map_err(|e| e.to_string())?;
    if lines.len() != sigma || !strictly_separates(&ps.points(), &lines) {
        return Err(format!("witness of size {} does not separate", lines.len()));
    }
    if lower_oracle && sigma > 0 && ps.general_position() {
        if some_k_separate(&dichotomies(ps), ps.len(), sigma - 1) {
            return Err(format!("{} lines suffice but the solver returned {sigma}", sigma - 1));
        }
        return Ok((sigma, true));
    }
    Ok((sigma, false))
}

fn convex_polygon(n: usize) -> PointSet {
    // Points on the parabola y = x^2 are in convex position.
    PointSet::new((0..n as i64).map(|i| Point::new(ratio(i, 16), ratio(i * i, 256))).collect()).unwrap()
}

fn c03_exact_fixtures(_: &Ctx) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut expect = |what: String, ps: &PointSet, lo: usize, hi: usize, oracle: bool| match check_sigma(ps, oracle) {
        Ok((s, checked)) => {
            let good = lo <= s && s <= hi;
            ok &= good;
            if !good || lo != hi {
                notes.push(format!("{what}={s}{}", if checked { "*" } else { "" }));
            } else if !checked && oracle {
                notes.push(format!("{what}: no lower-bound oracle"));
            }
        }
        Err(e) => {
            ok = false;
            notes.push(format!("{what}: {e}"));
        }
    };
    expect("2 points".into(), &PointSet::new(vec![Point::from_ints(0, 0), Point::from_ints(3, 1)]).unwrap(), 1, 1, true);
    let square = PointSet::new(vec![Point::from_ints(0, 0), Point::from_ints(1, 0), Point::from_ints(1, 1), Point::from_ints(0, 1)]).unwrap();
    expect("square".into(), &square, 2, 2, true);
    let mut rng = rng_from_seed(SEED ^ 0x0303);
    for t in 0..10 {
        let ps = loop {
            let pts: Vec<Point> = (0..5).map(|_| Point::from_ints(rng.gen_range(0..1000), rng.gen_range(0..1000))).collect();
            if let Ok(ps) = PointSet::new(pts) {
                if ps.general_position() {
                    break ps;
                }
            }
        };
        expect(format!("5 points #{t}"), &ps, 3, 3, true);
    }
    for s in 0..3 {
        expect(format!("3x3 grid #{s}"), &perturbed_grid(3, SEED + s).0, 4, 4, true);
    }
    for n in 4..=12 {
        expect(format!("{n}-gon"), &convex_polygon(n), (n - 1).div_ceil(2), n.div_ceil(2), n <= 10);
    }
    outcome(ok, format!("all fixtures in range; n-gon values {} (* = k-1 ruled out by exhaustive oracle)", notes.join(", ")))
}

fn c04_reweighting(ctx: &Ctx) -> Outcome {
    let start = Instant::now();
    let mode = SeparationMode::Relaxed;
    let jobs: Vec<u64> = (0..200).collect();
    let small = run_jobs(&ctx.pool, &jobs, |&k| {
        let mut rng = rng_from_seed(trial_seed(SEED ^ 0x0404, k));
        let n = rng.gen_range(6..=12);
        let ps = random_points(n, rng.gen());
        let (sigma, _) = exact_separability(&ps, mode).expect("exact");
        let bound = 4.0 * sigma as f64 * (sigma as f64 + 2.0).ln();
        let mut worst = 0.0f64;
        let mut good = true;
        for s in 0..5 {
            let cfg = SolverConfig { epsilon_constant: 4.0, rng_seed: trial_seed(k, s), ..SolverConfig::default() };
            match reweight_approx(&ps, &cfg) {
                Ok(res) => {
                    good &= verify(&ps, &res.lines, mode) && res.lines.len() as f64 <= bound;
                    worst = worst.max(res.lines.len() as f64 / sigma as f64);
                }
                Err(_) => good = false,
            }
        }
        (good, worst)
    });
    let small_ok = small.iter().filter(|r| r.0).count();
    let worst_ratio = small.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut detail = format!("{small_ok}/200 small instances within 4 sigma ln(sigma+2) over 5 seeds (max size/sigma {worst_ratio:.2})");
    let mut ok = small_ok == 200;
    for n in [256usize, 1024] {
        let ps = random_points(n, study_seed(SEED, n as u64, 0));
        let greedy = greedy_hitting_set(&ps, mode).expect("greedy");
        let res = reweight_approx(&ps, &SolverConfig { rng_seed: SEED, ..SolverConfig::default() });
        match res {
            Ok(r) => {
                let good = verify(&ps, &r.lines, mode) && r.lines.len() <= 3 * greedy.len();
                ok &= good;
                detail += &format!("; n={n}: reweight {} vs greedy {}", r.lines.len(), greedy.len());
            }
            Err(e) => {
                ok = false;
                detail += &format!("; n={n}: {e}");
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 600.0, format!("{detail}; {secs:.0}s of 600s"))
}

fn c05_halving(ctx: &Ctx) -> Outcome {
    let jobs: Vec<u64> = (0..50).collect();
    let results = run_jobs(&ctx.pool, &jobs, |&k| {
        let mut rng = rng_from_seed(trial_seed(SEED ^ 0x0505, k));
        let n = rng.gen_range(2..=40);
        let ps = loop {
            let ps = random_points(n, rng.gen());
            if ps.general_position() {
                break ps;
            }
        };
        match halving_separator(&ps) {
            Ok(lines) => lines.len() == n.div_ceil(2) && strictly_separates(&ps.points(), &lines),
            Err(_) => false,
        }
    });
    let good = results.iter().filter(|&&g| g).count();
    outcome(good == 50, format!("{good}/50 instances give ceil(n/2) strictly separating lines"))
}

fn c06_collisions(ctx: &Ctx) -> Outcome {
    let n = 100_000u64;
    let grid = grid_size_for(n as usize) as f64;
    let jobs: Vec<u64> = (0..50).collect();
    let pairs: Vec<f64> = run_jobs(&ctx.pool, &jobs, |&t| collision_trial(n, t, SEED).expect("trial").0 as f64);
    let (mean, _) = mean_sd(&pairs);
    let expect = (n * (n - 1) / 2) as f64 / (grid * grid);
    let n23 = (n as f64).powf(2.0 / 3.0);
    let (lo, hi) = (n23 / 3.0, n23 / 2.0);
    let within = (mean - expect).abs() <= 0.05 * expect;
    let bracket = lo <= mean && mean <= hi;
    outcome(
        within && bracket && grid == 2155.0,
        format!("N={grid}, mean {mean:.1} vs expectation {expect:.1} (within 5%: {within}); bracket [{lo:.1}, {hi:.1}] contains mean: {bracket}"),
    )
}

fn c07_heavy_balls(ctx: &Ctx) -> Outcome {
    let n = 10_000u64;
    let bins = ceil_pow_ratio(n, 4, 3);
    let jobs: Vec<u64> = (0..200).collect();
    let stats = run_jobs(&ctx.pool, &jobs, |&t| throw_balls(n, bins, study_seed(SEED, n, t)));
    let f = |i: usize| n as f64 * (n as f64 / (i as f64 * bins as f64)).powi(i as i32 - 1);
    let l2: Vec<f64> = stats.iter().map(|s| s.l(2) as f64).collect();
    let l3: Vec<f64> = stats.iter().map(|s| s.l(3) as f64).collect();
    let (lo2, hi2) = ci99(&l2);
    let (b2lo, b2hi) = ((-2.0f64).exp() * f(2), 6.0 * 1f64.exp() * f(2));
    let m3 = mean_sd(&l3).0;
    let (b3lo, b3hi) = ((-2.0f64).exp() * f(3), heavy_bound_factor(3) * f(3));
    let ok2 = b2lo <= lo2 && hi2 <= b2hi;
    let ok3 = b3lo <= m3 && m3 <= b3hi;
    outcome(
        ok2 && ok3,
        format!(
            "b={bins}; L2 99% CI [{lo2:.1}, {hi2:.1}] in [{b2lo:.1}, {b2hi:.1}]: {ok2}; mean L3 {m3:.3} in [{b3lo:.3}, {b3hi:.3}]: {ok3}"
        ),
    )
}

fn c08_birthday(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1_000u64, 10_000, 100_000] {
        let jobs: Vec<u64> = (0..1000).collect();
        let maxes = run_jobs(&ctx.pool, &jobs, |&t| throw_balls(n, n * n, study_seed(SEED, n, t)).bins_ge2);
        let max = *maxes.iter().max().unwrap();
        let scale = (n as f64).ln() / (n as f64).ln().ln();
        ok &= max as f64 <= 3.0 * scale;
        parts.push(format!("n={n}: max {max} <= {:.2} (ratio {:.2})", 3.0 * scale, max as f64 / scale));
    }
    outcome(ok, parts.join("; "))
}

fn c09_scaling(ctx: &Ctx) -> Outcome {
    let start = Instant::now();
    let ns: Vec<u64> = (10..=17).map(|k| 1u64 << k).collect();
    let st = study::scaling_study(&ctx.pool, &ns, 5, SEED, 0, false).expect("scaling study");
    let slope = st.summary.exponent.unwrap_or(f64::NAN);
    let worst = st.summary.points.iter().map(|p| p.relative_error.abs()).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    let ok = (0.617..=0.717).contains(&slope) && worst <= 0.05 && secs < 300.0;
    outcome(ok, format!("slope {slope:.4} (need [0.617, 0.717]); worst per-n deviation {:.2}%; {secs:.0}s of 300s", 100.0 * worst))
}

fn c10_active_per_line(ctx: &Ctx) -> Outcome {
    let n = 1u64 << 16;
    let st = study::scaling_study(&ctx.pool, &[n], 10, SEED, 1000, false).expect("study");
    let max = st.rows.iter().map(|r| r.max_active_per_line).max().unwrap();
    let bound = 4.0 * (n as f64).ln() / (n as f64).ln().ln();
    outcome(max as f64 <= bound, format!("max {max} active cells on one of 1000 lines x 10 instances, bound {bound:.2}"))
}

fn c11_partition(_: &Ctx) -> Outcome {
    let (ps, lines) = perturbed_grid(32, SEED);
    if lines.len() != 62 || !verify(&ps, &lines, SeparationMode::Strict) {
        return outcome(false, "fixture is not a separated 32x32 grid".into());
    }
    let r = 16usize;
    let part = match build_partition(&ps, &lines, r, SEED) {
        Ok(p) => p,
        Err(e) => return outcome(false, e.to_string()),
    };
    // Recount from scratch: every point lies in the triangle it was given.
    let mut seen = vec![0usize; ps.len()];
    let mut inside = true;
    for t in &part.triangles {
        for &k in &t.points {
            seen[k] += 1;
            let p = ps.point(k);
            let [a, b, c] = &t.vertices;
            inside &= [orient(a, b, &p), orient(b, c, &p), orient(c, a, &p)].iter().all(|&s| s != Sign::Negative);
        }
    }
    let conserved = seen.iter().all(|&c| c == 1);
    let loads = part.triangles.iter().map(|t| t.points.len()).max().unwrap_or(0);
    let mut rng = rng_from_seed(trial_seed(SEED, 11));
    let tests = random_lines_in_box(&part.bbox, 1000, &mut rng);
    let (max_stab, mean_stab) = stabbing_stats(&part, &tests);
    let bound = 8.0 * (r as f64).sqrt() * ((r + 2) as f64).ln().powi(2);
    let euler = part.euler_characteristic() == 2;
    let ok = loads * r <= ps.len() && conserved && inside && euler && max_stab as f64 <= bound;
    outcome(
        ok,
        format!(
            "{} triangles from {} sampled lines ({} attempts), max load {loads} (limit 64); stabbing max {max_stab} mean {mean_stab:.1} (bound {bound:.1}); conservation {conserved}, containment {inside}, Euler {euler}",
            part.triangles.len(),
            part.source_sample_size,
            part.attempts
        ),
    )
}

fn c12_trelax(ctx: &Ctx) -> Outcome {
    const TRIALS: u64 = 3;
    let ns: Vec<u64> = (12..=16).map(|k| 1u64 << k).collect();
    let jobs: Vec<(u64, u64)> = ns.iter().flat_map(|&n| (0..TRIALS).map(move |t| (n, t))).collect();
    let rows = run_jobs(&ctx.pool, &jobs, |&(n, t)| trelax_trial(n, 2, t, SEED).expect("trial"));
    let within = rows.iter().all(|r| r.max_face_load <= 2);
    let means: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let xs: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.lines as f64).collect();
            (n as f64, mean_sd(&xs).0)
        })
        .collect();
    let slope = fit_loglog(&means).unwrap_or(f64::NAN);
    let max_load = rows.iter().map(|r| r.max_face_load).max().unwrap_or(0);
    outcome(
        (0.55..=0.65).contains(&slope) && within,
        format!("slope {slope:.4} (need [0.55, 0.65]); max points per face {max_load} (t = 2) over {} outputs", rows.len()),
    )
}

fn run_sep(args: &[&str]) -> (i32, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_sep")).args(args).output().expect("run sep");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn c13_determinism(_: &Ctx) -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (p12, p300, grid, grid_lines) = (d("pts12"), d("pts300"), d("grid"), d("grid.lines"));
    let setup = [
        vec!["gen", "random", "--n", "12", "--seed", "3", "--out", &p12],
        vec!["gen", "random", "--n", "300", "--seed", "3", "--out", &p300],
        vec!["gen", "grid", "--k", "16", "--seed", "3", "--out", &grid, "--lines", &grid_lines],
    ];
    for args in &setup {
        if run_sep(args).0 != 0 {
            return outcome(false, format!("setup failed: {args:?}"));
        }
    }
    let mut commands: Vec<(Vec<String>, Option<String>)> = Vec::new();
    let mut add = |args: &[&str], file: Option<&str>| {
        commands.push((args.iter().map(|s| s.to_string()).collect(), file.map(str::to_string)));
    };
    add(&["gen", "random", "--n", "50", "--seed", "8"], None);
    add(&["gen", "grid", "--k", "5", "--seed", "8"], None);
    for algo in ["exact", "greedy", "reweight", "halving", "grid"] {
        add(&["solve", "--input", &p12, "--algo", algo, "--seed", "5", "--json"], None);
        add(&["solve", "--input", &p12, "--algo", algo, "--seed", "5", "--mode", "relaxed"], None);
    }
    add(&["solve", "--input", &p300, "--algo", "reweight", "--seed", "5", "--json"], None);
    add(&["verify", "--points", &grid, "--lines", &grid_lines], None);
    let csv = d("study.csv");
    add(&["study", "scaling", "--n", "1024,2048", "--trials", "2", "--seed", "5", "--test-lines", "100", "--csv", &csv], Some(&csv));
    add(&["study", "balls-bins", "--n", "1000,10000", "--trials", "20", "--seed", "5", "--csv", &csv], Some(&csv));
    add(&["study", "birthday", "--n", "1000,10000", "--trials", "20", "--seed", "5", "--csv", &csv], Some(&csv));
    add(&["study", "trelax", "--n", "1024,2048", "--t", "2", "--trials", "2", "--seed", "5", "--csv", &csv], Some(&csv));
    let part = d("part.json");
    add(&["partition", "--points", &grid, "--lines", &grid_lines, "--r", "4", "--seed", "5", "--out", &part, "--test-lines", "200"], Some(&part));
    let mut mismatched = Vec::new();
    for (args, file) in &commands {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let mut runs = Vec::new();
        for _ in 0..2 {
            let (code, stdout) = run_sep(&argv);
            let bytes = file.as_ref().map(|f| std::fs::read(Path::new(f)).unwrap_or_default());
            runs.push((code, stdout, bytes));
        }
        if runs[0] != runs[1] || runs[0].0 != 0 {
            mismatched.push(format!("{} {} (exit {})", argv[0], argv.get(1).unwrap_or(&""), runs[0].0));
        }
    }
    let detail = if mismatched.is_empty() {
        format!("{} commands byte-identical on re-run", commands.len())
    } else {
        format!("differences or failures: {}", mismatched.join(", "))
    };
    outcome(mismatched.is_empty(), detail)
}
