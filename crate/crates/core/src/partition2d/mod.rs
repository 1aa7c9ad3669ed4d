//! From a separating set of lines to a simplicial partition.
//!
//! A random sample of the separating lines is drawn, its arrangement is
//! clipped to a box around the points, every face is triangulated so that a
//! line crosses few of its triangles, and each point goes to the triangle
//! containing it.

mod arrangement;

pub use arrangement::{
    area2, build_arrangement, interior_point, BoundingBox, ClippedArrangement, Face, HalfEdge, ARRANGEMENT_CAP,
};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::geom::{line_through, orient, ratio, side, CanonicalLine, Point, Rational, Sign};
use crate::rng::{rng_from_seed, trial_seed};
use crate::sepsys::{find_unseparated_pair, PointSet, SeparationMode};
use crate::{Error, Result};

/// Triangulate a convex cycle by halving rounds: cut off the ears at every
/// odd position, keep the even positions (always including the first), and
/// repeat. A cycle of `t >= 3` vertices gives `t - 2` triangles.
pub fn triangulate_face<T: Clone>(cycle: &[T]) -> Vec<[T; 3]> {
    let mut out = Vec::with_capacity(cycle.len().saturating_sub(2));
    let mut cur: Vec<T> = cycle.to_vec();
    while cur.len() >= 3 {
        let t = cur.len();
        for odd in (1..t).step_by(2) {
            out.push([cur[odd - 1].clone(), cur[odd].clone(), cur[(odd + 1) % t].clone()]);
        }
        if t == 3 {
            break;
        }
        cur = cur.into_iter().step_by(2).collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    /// Counterclockwise.
    pub vertices: [Point; 3],
    pub points: Vec<usize>,
}

impl Triangle {
    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        let [a, b, c] = &self.vertices;
        orient(a, b, p) != Sign::Negative && orient(b, c, p) != Sign::Negative && orient(c, a, p) != Sign::Negative
    }

    pub fn on_boundary(&self, p: &Point) -> bool {
        let [a, b, c] = &self.vertices;
        self.contains(p) && [orient(a, b, p), orient(b, c, p), orient(c, a, p)].contains(&Sign::Zero)
    }

    /// Whether `line` meets the interior.
    pub fn stabbed_by(&self, line: &CanonicalLine) -> bool {
        let s: Vec<Sign> = self.vertices.iter().map(|v| side(line, v)).collect();
        s.contains(&Sign::Positive) && s.contains(&Sign::Negative)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionConfig {
    /// Sample `ceil(a ln(a + 2))` lines with `a = alpha sqrt(r)`.
    pub alpha: f64,
    pub max_attempts: usize,
    /// Separation the input lines must provide.
    pub mode: SeparationMode,
    /// Box margin on each side, as a fraction of the points' extent.
    pub margin: Rational,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { alpha: 2.0, max_attempts: 16, mode: SeparationMode::Strict, margin: ratio(1, 20) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub triangles: Vec<Triangle>,
    pub source_sample_size: usize,
    /// Indices into the input lines of the sampled lines.
    pub sample: Vec<usize>,
    pub attempts: usize,
    /// Every triangle holds at most `n / r` points.
    pub conforming: bool,
    pub max_load: usize,
    pub r: usize,
    /// Points on the boundary of the triangle they were assigned to.
    pub boundary_points: Vec<usize>,
    pub vertices: usize,
    pub edges: usize,
    /// Including the unbounded face.
    pub faces: usize,
    pub bbox: BoundingBox,
}

impl Partition {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }

    pub fn assigned_points(&self) -> usize {
        self.triangles.iter().map(|t| t.points.len()).sum()
    }
}

/// `ceil(a ln(a + 2))` with `a = alpha sqrt(r)`, at least 1.
pub fn sample_size(r: usize, alpha: f64) -> usize {
    let a = alpha * libm::sqrt(r as f64);
    (libm::ceil(a * libm::log(a + 2.0)) as usize).max(1)
}

pub fn build_partition(ps: &PointSet, lines: &[CanonicalLine], r: usize, seed: u64) -> Result<Partition> {
    build_partition_with(ps, lines, r, seed, &PartitionConfig::default())
}

/// Sample lines, triangulate their arrangement and assign the points.
/// Samples are redrawn while some triangle holds more than `n / r` points;
/// after `max_attempts` the best attempt is returned with `conforming` unset.
pub fn build_partition_with(
    ps: &PointSet,
    lines: &[CanonicalLine],
    r: usize,
    seed: u64,
    cfg: &PartitionConfig,
) -> Result<Partition> {
    if r == 0 {
        return Err(Error::Precondition("r must be at least 1".into()));
    }
    if ps.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if let Some(p) = find_unseparated_pair(ps, lines, cfg.mode) {
        return Err(Error::NotSeparating(p.i, p.j));
    }
    let points = ps.points();
    let bbox = BoundingBox::around(&points, &cfg.margin)?;
    let s = sample_size(r, cfg.alpha).min(lines.len());
    let mut best: Option<Partition> = None;
    for attempt in 0..cfg.max_attempts.max(1) {
        let mut rng = rng_from_seed(trial_seed(seed, attempt as u64));
        let mut idx: Vec<usize> = (0..lines.len()).collect();
        let mut sample: Vec<usize> = idx.partial_shuffle(&mut rng, s).0.to_vec();
        sample.sort_unstable();
        let mut part = partition_for_sample(ps, &points, lines, &sample, &bbox, r)?;
        part.attempts = attempt + 1;
        let better = best.as_ref().map_or(true, |b| part.max_load < b.max_load);
        let done = part.conforming;
        if better {
            best = Some(part);
        }
        if done {
            break;
        }
    }
    let mut best = best.expect("at least one attempt");
    best.attempts = best.attempts.max(1);
    if !best.conforming {
        log::warn!("no conforming sample in {} attempts; max load {}", cfg.max_attempts, best.max_load);
    }
    Ok(best)
}

fn partition_for_sample(
    ps: &PointSet,
    points: &[Point],
    lines: &[CanonicalLine],
    sample: &[usize],
    bbox: &BoundingBox,
    r: usize,
) -> Result<Partition> {
    let chosen: Vec<CanonicalLine> = sample.iter().map(|&i| lines[i].clone()).collect();
    let arr = build_arrangement(&chosen, bbox)?;
    if arr.euler_characteristic() != 2 {
        return Err(Error::Verification(format!("Euler characteristic {}", arr.euler_characteristic())));
    }
    let mut triangles = Vec::new();
    let mut by_face: BTreeMap<Vec<Sign>, (usize, usize)> = BTreeMap::new();
    for f in arr.bounded_faces() {
        let poly = arr.face_polygon(f);
        let inside = interior_point(&poly);
        let key: Vec<Sign> = chosen.iter().map(|l| side(l, &inside)).collect();
        let start = triangles.len();
        for [a, b, c] in triangulate_face(&poly) {
            triangles.push(Triangle { vertices: [a, b, c], points: Vec::new() });
        }
        by_face.insert(key, (start, triangles.len()));
    }
    let prepared: Vec<_> = chosen.iter().map(|l| ps.prepare(l)).collect();
    let mut boundary_points = Vec::new();
    for (k, p) in points.iter().enumerate() {
        let key: Vec<Sign> = prepared.iter().map(|l| ps.side_frame(l, k)).collect();
        let range = by_face.get(&key).map_or(0..triangles.len(), |&(a, b)| a..b);
        let t = range
            .clone()
            .find(|&t| triangles[t].contains(p))
            .or_else(|| (0..triangles.len()).find(|&t| triangles[t].contains(p)))
            .ok_or_else(|| Error::Verification(format!("point {k} lies in no triangle")))?;
        if triangles[t].on_boundary(p) {
            boundary_points.push(k);
        }
        triangles[t].points.push(k);
    }
    let max_load = triangles.iter().map(|t| t.points.len()).max().unwrap_or(0);
    Ok(Partition {
        conforming: max_load * r <= ps.len(),
        triangles,
        source_sample_size: sample.len(),
        sample: sample.to_vec(),
        attempts: 0,
        max_load,
        r,
        boundary_points,
        vertices: arr.vertex_count(),
        edges: arr.edge_count(),
        faces: arr.face_count(),
        bbox: bbox.clone(),
    })
}

/// Largest and mean number of triangles whose interior each line meets.
pub fn stabbing_stats(partition: &Partition, test_lines: &[CanonicalLine]) -> (usize, f64) {
    let counts: Vec<usize> =
        test_lines.iter().map(|l| partition.triangles.iter().filter(|t| t.stabbed_by(l)).count()).collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    let mean = if counts.is_empty() { 0.0 } else { counts.iter().sum::<usize>() as f64 / counts.len() as f64 };
    (max, mean)
}

/// Lines through two independent uniform points of the box, on a `2^-20`
/// lattice of it.
pub fn random_lines_in_box<R: Rng + ?Sized>(bbox: &BoundingBox, count: usize, rng: &mut R) -> Vec<CanonicalLine> {
    const STEPS: i64 = 1 << 20;
    let (w, h) = (&bbox.max.x - &bbox.min.x, &bbox.max.y - &bbox.min.y);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut p = || {
            Point::new(
                &bbox.min.x + &w * ratio(rng.gen_range(0..=STEPS), STEPS),
                &bbox.min.y + &h * ratio(rng.gen_range(0..=STEPS), STEPS),
            )
        };
        if let Ok(l) = line_through(&p(), &p()) {
            out.push(l);
        }
    }
    out
}

/// A `k x k` grid of points, one per cell of the `1/k` grid of the unit
/// square, each moved randomly by less than a quarter cell, with the
/// `2 (k - 1)` inner grid lines separating them.
pub fn perturbed_grid(k: usize, seed: u64) -> (PointSet, Vec<CanonicalLine>) {
    const DEN: i64 = 1 << 20;
    let mut rng = rng_from_seed(seed);
    let k64 = k as i64;
    let mut coords = Vec::with_capacity(k * k);
    for i in 0..k64 {
        for j in 0..k64 {
            // Cell centre (2i + 1) / (2k) plus a jitter below 1 / (4k).
            let jitter = |rng: &mut crate::rng::SepRng| rng.gen_range(-(DEN / 4) + 1..DEN / 4);
            let x = (2 * i + 1) * DEN / 2 + jitter(&mut rng);
            let y = (2 * j + 1) * DEN / 2 + jitter(&mut rng);
            coords.push([x, y]);
        }
    }
    let ps = PointSet::from_scaled(k64 * DEN, coords).expect("grid points are distinct");
    let mut lines = Vec::with_capacity(2 * k.saturating_sub(1));
    for t in 1..k64 {
        lines.push(CanonicalLine::vertical(&ratio(t, k64)));
        lines.push(CanonicalLine::horizontal(&ratio(t, k64)));
    }
    (ps, lines)
}
