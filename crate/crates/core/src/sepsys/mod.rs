//! The hitting-set view of separation: candidate lines, the hit relation
//! and separation checks.

mod cuts;
pub(crate) mod perturb;
mod pointset;
pub(crate) mod refine;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

pub use cuts::{Cut, CutSet};
pub(crate) use pointset::ParallelForm;
pub use pointset::{FrameLine, PointSet, GENERAL_POSITION_CHECK_LIMIT};

use crate::geom::{CanonicalLine, Sign};
use crate::{Error, Result};
use refine::Refinement;

/// An unordered pair of point indices, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairId {
    pub i: usize,
    pub j: usize,
}

impl PairId {
    pub fn new(a: usize, b: usize) -> PairId {
        assert_ne!(a, b, "a pair needs two distinct indices");
        PairId { i: a.min(b), j: a.max(b) }
    }

    /// Position in the lexicographic list of all pairs of `n` points.
    pub fn index(&self, n: usize) -> usize {
        self.i * n - self.i * (self.i + 1) / 2 + (self.j - self.i - 1)
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeparationMode {
    /// Separated iff the two points lie strictly on opposite sides.
    Strict,
    /// Separated iff the two points get different signs (a point on the
    /// line counts as its own side).
    Relaxed,
}

impl SeparationMode {
    #[inline]
    pub fn separates(self, a: Sign, b: Sign) -> bool {
        match self {
            SeparationMode::Strict => a.mul(b) == Sign::Negative,
            SeparationMode::Relaxed => a != b,
        }
    }
}

pub fn hits(line: &CanonicalLine, ps: &PointSet, pair: PairId, mode: SeparationMode) -> bool {
    let fl = ps.prepare(line);
    mode.separates(ps.side_frame(&fl, pair.i), ps.side_frame(&fl, pair.j))
}

/// All distinct lines through two points of a set, each with the pairs lying
/// on it.
///
/// Lines are stored by a defining pair and materialized on demand. Their
/// order is the sorted order of their normalized frame coefficients.
#[derive(Clone, Debug)]
pub struct CandidateLines {
    n: usize,
    defining: Vec<[u32; 2]>,
    offsets: Vec<u32>,
    incident: Vec<PairId>,
}

impl CandidateLines {
    pub fn len(&self) -> usize {
        self.defining.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defining.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn defining_pair(&self, l: usize) -> (usize, usize) {
        let [a, b] = self.defining[l];
        (a as usize, b as usize)
    }

    pub fn incident_pairs(&self, l: usize) -> &[PairId] {
        &self.incident[self.offsets[l] as usize..self.offsets[l + 1] as usize]
    }

    /// `true` iff some line carries three or more points.
    pub fn has_collinear(&self) -> bool {
        self.incident.len() != self.defining.len()
    }

    pub fn line(&self, ps: &PointSet, l: usize) -> CanonicalLine {
        ps.unprepare(&self.frame_line(ps, l))
    }

    pub fn lines(&self, ps: &PointSet) -> Vec<CanonicalLine> {
        (0..self.len()).map(|l| self.line(ps, l)).collect()
    }

    pub(crate) fn frame_line(&self, ps: &PointSet, l: usize) -> FrameLine {
        let (a, b) = self.defining_pair(l);
        ps.raw_line_through(a, b)
    }

    /// Sign of point `k` with respect to line `l`, consistently oriented.
    #[inline]
    pub fn side(&self, ps: &PointSet, l: usize, k: usize) -> Sign {
        let (a, b) = self.defining_pair(l);
        ps.orient_idx(a, b, k)
    }

    #[inline]
    pub fn hits(&self, ps: &PointSet, l: usize, pair: PairId, mode: SeparationMode) -> bool {
        mode.separates(self.side(ps, l, pair.i), self.side(ps, l, pair.j))
    }

    /// Points lying on line `l`, sorted along its direction.
    pub fn on_line_points(&self, ps: &PointSet, l: usize) -> Vec<usize> {
        let mut pts: Vec<usize> = self.incident_pairs(l).iter().flat_map(|p| [p.i, p.j]).collect();
        pts.sort_unstable();
        pts.dedup();
        let (a, b) = self.defining_pair(l);
        let (xa, ya) = ps.frame_big(a);
        let (xb, yb) = ps.frame_big(b);
        let (dx, dy) = (xb - xa, yb - ya);
        let mut keyed: Vec<(BigInt, usize)> = pts
            .into_iter()
            .map(|k| {
                let (x, y) = ps.frame_big(k);
                (&dx * x + &dy * y, k)
            })
            .collect();
        keyed.sort();
        keyed.into_iter().map(|(_, k)| k).collect()
    }
}

/// Candidate lines of `ps`: every line through two of its points, once.
pub fn candidate_lines(ps: &PointSet) -> Result<CandidateLines> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mut keyed: Vec<(FrameKey, PairId)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            keyed.push((FrameKey::of(&ps.raw_line_through(i, j)), PairId { i, j }));
        }
    }
    keyed.sort_unstable();
    let mut defining = Vec::new();
    let mut offsets = alloc::vec![0u32];
    let mut incident = Vec::with_capacity(keyed.len());
    for t in 0..keyed.len() {
        if t > 0 && keyed[t].0 != keyed[t - 1].0 {
            offsets.push(incident.len() as u32);
        }
        if t == 0 || keyed[t].0 != keyed[t - 1].0 {
            defining.push([keyed[t].1.i as u32, keyed[t].1.j as u32]);
        }
        incident.push(keyed[t].1);
    }
    offsets.push(incident.len() as u32);
    Ok(CandidateLines { n, defining, offsets, incident })
}

/// Normalized frame coefficients, used to deduplicate and order lines.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum FrameKey {
    Small([i128; 3]),
    Big([BigInt; 3]),
}

impl FrameKey {
    fn of(line: &FrameLine) -> FrameKey {
        match *line {
            FrameLine::Small { a, b, c } => {
                let g = a.gcd(&b).gcd(&c);
                let s = if a < 0 || (a == 0 && b < 0) { -g } else { g };
                FrameKey::Small([a / s, b / s, c / s])
            }
            FrameLine::Big { ref a, ref b, ref c } => {
                let g = a.gcd(b).gcd(c);
                let g = if a.is_negative() || (a.sign() == num_bigint::Sign::NoSign && b.is_negative()) { -g } else { g };
                FrameKey::Big([a / &g, b / &g, c / &g])
            }
        }
    }
}

fn sign_key(s: Sign) -> u64 {
    (s.as_i8() + 1) as u64
}

/// Refine classes of `ps` by the signs of `lines`, batching parallel lines.
fn refine_all(ps: &PointSet, lines: &[FrameLine], refinement: &mut Refinement) {
    let mut batches: BTreeMap<(i128, i128), Vec<(i128, bool)>> = BTreeMap::new();
    let mut singles: Vec<&FrameLine> = Vec::new();
    match ps.small_coords() {
        Some(_) => {
            for l in lines {
                match l.parallel_form() {
                    Some(f) => batches.entry(f.normal).or_default().push((f.threshold, f.exact)),
                    None => singles.push(l),
                }
            }
        }
        None => singles.extend(lines.iter()),
    }
    for l in singles {
        if refinement.is_done() {
            return;
        }
        refinement.split_by(|k| sign_key(ps.side_frame(l, k)));
    }
    let coords = ps.small_coords();
    for (normal, mut thresholds) in batches {
        if refinement.is_done() {
            return;
        }
        let coords = coords.expect("batches only on the small path");
        thresholds.sort_unstable();
        thresholds.dedup();
        let form = ParallelForm { normal, threshold: 0, exact: false };
        refinement.split_by(|k| {
            let u = form.project(coords[k]);
            let below = thresholds.partition_point(|&(t, _)| t < u);
            let on = thresholds[below..].iter().take_while(|&&(t, _)| t == u).any(|&(_, e)| e);
            2 * below as u64 + on as u64
        });
    }
}

/// Points lying on at least one of `lines`.
fn points_on_lines(ps: &PointSet, lines: &[FrameLine]) -> Vec<usize> {
    let n = ps.len();
    let mut on = alloc::vec![false; n];
    let mut batches: BTreeMap<(i128, i128), Vec<i128>> = BTreeMap::new();
    for l in lines {
        match (ps.small_coords(), l.parallel_form()) {
            (Some(_), Some(f)) => {
                if f.exact {
                    batches.entry(f.normal).or_default().push(f.threshold);
                }
            }
            _ => (0..n).for_each(|k| on[k] |= ps.side_frame(l, k).is_zero()),
        }
    }
    if let Some(coords) = ps.small_coords() {
        for (normal, mut ts) in batches {
            ts.sort_unstable();
            let form = ParallelForm { normal, threshold: 0, exact: true };
            for (k, c) in coords.iter().enumerate() {
                on[k] |= ts.binary_search(&form.project(*c)).is_ok();
            }
        }
    }
    (0..n).filter(|&k| on[k]).collect()
}

pub(crate) fn find_unseparated_prepared(
    ps: &PointSet,
    lines: &[FrameLine],
    mode: SeparationMode,
) -> Option<PairId> {
    let n = ps.len();
    let mut r = Refinement::new(n);
    refine_all(ps, lines, &mut r);
    if let Some(p) = r.first_pair() {
        return Some(p);
    }
    if mode == SeparationMode::Relaxed {
        return None;
    }
    // Distinct sign vectors, but a point on a line still needs some other
    // line with strictly opposite signs.
    let zeros = points_on_lines(ps, lines);
    if zeros.is_empty() {
        return None;
    }
    let words = n.div_ceil(64);
    let mut reached = alloc::vec![0u64; words * zeros.len()];
    let mut pos = alloc::vec![0u64; words];
    let mut neg = alloc::vec![0u64; words];
    let mut signs = alloc::vec![Sign::Zero; n];
    for l in lines {
        pos.iter_mut().for_each(|w| *w = 0);
        neg.iter_mut().for_each(|w| *w = 0);
        for (k, s) in signs.iter_mut().enumerate() {
            *s = ps.side_frame(l, k);
            match *s {
                Sign::Positive => pos[k / 64] |= 1 << (k % 64),
                Sign::Negative => neg[k / 64] |= 1 << (k % 64),
                Sign::Zero => {}
            }
        }
        for (zi, &z) in zeros.iter().enumerate() {
            let other = match signs[z] {
                Sign::Positive => &neg,
                Sign::Negative => &pos,
                Sign::Zero => continue,
            };
            for (w, o) in reached[zi * words..(zi + 1) * words].iter_mut().zip(other) {
                *w |= o;
            }
        }
    }
    let mut best: Option<PairId> = None;
    for (zi, &z) in zeros.iter().enumerate() {
        let bits = &reached[zi * words..(zi + 1) * words];
        if let Some(w) = (0..n).find(|&w| w != z && bits[w / 64] >> (w % 64) & 1 == 0) {
            let p = PairId::new(z, w);
            best = Some(best.map_or(p, |b| b.min(p)));
        }
    }
    best
}

/// Some pair of `ps` that no line of `lines` hits under `mode`, or `None`
/// if the lines separate the set.
pub fn find_unseparated_pair(ps: &PointSet, lines: &[CanonicalLine], mode: SeparationMode) -> Option<PairId> {
    let prepared: Vec<FrameLine> = lines.iter().map(|l| ps.prepare(l)).collect();
    find_unseparated_prepared(ps, &prepared, mode)
}

/// Turn a relaxed separating set into a strict one at most three times as
/// large.
///
/// A line through one or two points is replaced by two parallel copies
/// shifted off the points, and a line through two points also gets a line
/// splitting that pair.
pub fn properize(lines: &[CanonicalLine], ps: &PointSet) -> Result<Vec<CanonicalLine>> {
    let mut out = Vec::with_capacity(lines.len());
    for (li, line) in lines.iter().enumerate() {
        let fl = ps.prepare(line);
        let on: Vec<usize> = (0..ps.len()).filter(|&k| ps.side_frame(&fl, k).is_zero()).collect();
        if on.len() >= 3 {
            return Err(Error::TooManyOnLine { line: li, count: on.len() });
        }
        if on.is_empty() {
            out.push(line.clone());
            continue;
        }
        let delta = perturb::min_nonzero_distance(ps, &fl);
        for side in [Sign::Negative, Sign::Positive] {
            out.push(ps.unprepare(&perturb::translate(&fl, side, &delta)));
        }
        if let [i, j] = on[..] {
            out.push(ps.unprepare(&perturb::split_pair(ps, i, j)));
        }
    }
    Ok(out)
}

/// A line strictly separating points `i` and `j` of `ps` and avoiding every
/// point.
pub fn split_pair(ps: &PointSet, i: usize, j: usize) -> CanonicalLine {
    ps.unprepare(&perturb::split_pair(ps, i, j))
}
