//! Counting and sampling arrangement vertices inside a convex cell.
//!
//! Each line crossing the cell meets its boundary twice. Listing those
//! crossings counterclockwise turns every line into an interval of event
//! ranks, and two lines meet inside the cell exactly when their intervals
//! interleave. A sweep over the events with a persistent order-statistics
//! tree counts, for every line, the lines it meets at its second event and
//! keeps a snapshot from which a uniform partner can be selected.

mod wbtree;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use crate::geom::{line_through, orient, CanonicalLine, Point, Rational, Sign};
use crate::{Error, Result};
use wbtree::{Arena, NIL};

/// Largest number of vertices a cell may have.
pub const MAX_CELL_VERTICES: usize = 16;

/// A strictly convex polygon, vertices listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexCell {
    vertices: Vec<Point>,
}

impl ConvexCell {
    pub fn new(vertices: Vec<Point>) -> Result<ConvexCell> {
        let k = vertices.len();
        if !(3..=MAX_CELL_VERTICES).contains(&k) {
            return Err(Error::InvalidCell(format!("{k} vertices, need 3 to {MAX_CELL_VERTICES}")));
        }
        for i in 0..k {
            for j in i + 1..k {
                if vertices[i] == vertices[j] {
                    return Err(Error::InvalidCell(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        for i in 0..k {
            let (a, b, c) = (&vertices[i], &vertices[(i + 1) % k], &vertices[(i + 2) % k]);
            if orient(a, b, c) != Sign::Positive {
                return Err(Error::InvalidCell(format!("turn at vertex {} is not a strict left turn", (i + 1) % k)));
            }
        }
        if !Self::winds_once(&vertices) {
            return Err(Error::InvalidCell("polygon is not simple".into()));
        }
        Ok(ConvexCell { vertices })
    }

    fn winds_once(v: &[Point]) -> bool {
        // Every vertex must lie strictly left of every edge it is not on.
        let k = v.len();
        (0..k).all(|e| {
            let (a, b) = (&v[e], &v[(e + 1) % k]);
            (0..k).filter(|&j| j != e && j != (e + 1) % k).all(|j| orient(a, b, &v[j]) == Sign::Positive)
        })
    }

    /// The axis-parallel square `[x0, x0 + s] x [y0, y0 + s]`.
    pub fn square(x0: Rational, y0: Rational, s: Rational) -> ConvexCell {
        let x1 = &x0 + &s;
        let y1 = &y0 + &s;
        ConvexCell::new(vec![
            Point::new(x0.clone(), y0.clone()),
            Point::new(x1.clone(), y0),
            Point::new(x1, y1.clone()),
            Point::new(x0, y1),
        ])
        .expect("a square with positive side is convex")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn edge(&self, e: usize) -> (&Point, &Point) {
        (&self.vertices[e], &self.vertices[(e + 1) % self.vertices.len()])
    }

    pub fn contains_strictly(&self, p: &Point) -> bool {
        (0..self.len()).all(|e| {
            let (a, b) = self.edge(e);
            orient(a, b, p) == Sign::Positive
        })
    }
}

/// Position on the cell boundary: edge `edge` at parameter `t` in `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoundaryPosition {
    pub edge: usize,
    pub t: Rational,
}

impl BoundaryPosition {
    pub fn point(&self, cell: &ConvexCell) -> Point {
        let (a, b) = cell.edge(self.edge);
        a.lerp(b, &self.t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingEvent {
    pub position: BoundaryPosition,
    pub line: usize,
}

/// Boundary crossings of all lines, counterclockwise from vertex 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingSequence {
    pub events: Vec<CrossingEvent>,
}

impl CrossingSequence {
    pub fn new(cell: &ConvexCell, lines: &[CanonicalLine]) -> Result<CrossingSequence> {
        let mut events = Vec::new();
        for (id, line) in lines.iter().enumerate() {
            events.extend(line_events(cell, id, line)?);
        }
        events.sort_by(|a, b| a.position.cmp(&b.position));
        if let Some(w) = events.windows(2).find(|w| w[0].position == w[1].position) {
            return Err(Error::CellDegeneracy(format!(
                "lines {} and {} cross the boundary at the same point",
                w[0].line, w[1].line
            )));
        }
        Ok(CrossingSequence { events })
    }
}

fn line_events(cell: &ConvexCell, id: usize, line: &CanonicalLine) -> Result<Vec<CrossingEvent>> {
    let k = cell.len();
    let vals: Vec<Rational> = cell.vertices.iter().map(|v| line.eval(v)).collect();
    if let Some(v) = vals.iter().position(|f| f.is_zero()) {
        return Err(Error::CellDegeneracy(format!("line {id} passes through cell vertex {v}")));
    }
    let mut events = Vec::new();
    for e in 0..k {
        let (f0, f1) = (&vals[e], &vals[(e + 1) % k]);
        if (f0 > &Rational::zero()) != (f1 > &Rational::zero()) {
            let t = f0 / (f0 - f1);
            events.push(CrossingEvent { position: BoundaryPosition { edge: e, t }, line: id });
        }
    }
    Ok(events)
}

/// Vertex counting and uniform vertex sampling for one cell.
#[derive(Clone, Debug)]
pub struct CellIntersectionIndex {
    crossings: CrossingSequence,
    interval: Vec<Option<(u32, u32)>>,
    pair_count: Vec<u64>,
    snapshot: Vec<u32>,
    line_at_rank: Vec<u32>,
    cumulative: Vec<(u64, u32)>,
    arena: Arena,
    total: u64,
}

/// Build the index of `lines` inside `cell`.
pub fn build_index(cell: &ConvexCell, lines: &[CanonicalLine]) -> Result<CellIntersectionIndex> {
    let crossings = CrossingSequence::new(cell, lines)?;
    let m = lines.len();
    let mut interval: Vec<Option<(u32, u32)>> = vec![None; m];
    let mut line_at_rank = Vec::with_capacity(crossings.events.len());
    for (r, ev) in crossings.events.iter().enumerate() {
        line_at_rank.push(ev.line as u32);
        let slot = &mut interval[ev.line];
        *slot = Some(match *slot {
            None => (r as u32, u32::MAX),
            Some((i, _)) => (i, r as u32),
        });
    }
    let mut arena = Arena::new();
    let mut root = NIL;
    let mut pair_count = vec![0u64; m];
    let mut snapshot = vec![NIL; m];
    for (r, ev) in crossings.events.iter().enumerate() {
        let (i, j) = interval[ev.line].expect("line has events");
        if r as u32 == i {
            root = arena.insert(root, i as u64, 0.0);
        } else {
            debug_assert_eq!(r as u32, j);
            pair_count[ev.line] = arena.rank(root, j as u64) - arena.rank(root, i as u64 + 1);
            snapshot[ev.line] = root;
            root = arena.remove(root, i as u64);
        }
    }
    let mut cumulative = Vec::new();
    let mut total = 0u64;
    for (l, &c) in pair_count.iter().enumerate() {
        if c > 0 {
            total += c;
            cumulative.push((total, l as u32));
        }
    }
    Ok(CellIntersectionIndex { crossings, interval, pair_count, snapshot, line_at_rank, cumulative, arena, total })
}

pub fn count_vertices(index: &CellIntersectionIndex) -> u64 {
    index.total
}

/// A uniformly random pair of lines meeting inside the cell, smaller id first.
pub fn sample_vertex<R: Rng + ?Sized>(index: &CellIntersectionIndex, rng: &mut R) -> Result<(usize, usize)> {
    let l = index.pick_line(rng)?;
    let r = rng.gen_range(0..index.pair_count[l]);
    let other = index.partner(l, r);
    Ok((l.min(other), l.max(other)))
}

impl CellIntersectionIndex {
    pub fn crossings(&self) -> &CrossingSequence {
        &self.crossings
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Event ranks of the two crossings of `line`, if it crosses the cell.
    pub fn interval(&self, line: usize) -> Option<(usize, usize)> {
        self.interval[line].map(|(i, j)| (i as usize, j as usize))
    }

    /// Number of lines met by `line` inside the cell that were still stored
    /// at its second event.
    pub fn pair_count(&self, line: usize) -> u64 {
        self.pair_count[line]
    }

    /// A line drawn with probability `pair_count / total`.
    pub fn pick_line<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.total == 0 {
            return Err(Error::Empty);
        }
        let x = rng.gen_range(0..self.total);
        let k = self.cumulative.partition_point(|&(c, _)| c <= x);
        Ok(self.cumulative[k].1 as usize)
    }

    /// The `r`-th line (by first-event rank) stored strictly inside the
    /// interval of `line` in its snapshot. Requires `r < pair_count(line)`.
    pub fn partner(&self, line: usize, r: u64) -> usize {
        assert!(r < self.pair_count[line], "partner rank out of range");
        let (i, _) = self.interval[line].expect("line crosses the cell");
        let snap = self.snapshot[line];
        let key = self.arena.select(snap, self.arena.rank(snap, i as u64 + 1) + r).expect("rank within snapshot");
        self.line_at_rank[key as usize] as usize
    }

    /// First-event ranks stored in the snapshot taken at the second event of
    /// `line`, in increasing order.
    pub fn snapshot_keys(&self, line: usize) -> Vec<usize> {
        let snap = self.snapshot.get(line).copied().unwrap_or(NIL);
        let mut out = Vec::new();
        self.arena.keys(snap, &mut out);
        out.into_iter().map(|(k, _)| k as usize).collect()
    }

    /// `(rank of key, selected key)` answers of a snapshot, for persistence checks.
    pub fn snapshot_rank(&self, line: usize, key: usize) -> usize {
        self.arena.rank(self.snapshot[line], key as u64) as usize
    }

    pub fn snapshot_select(&self, line: usize, i: usize) -> Option<usize> {
        self.arena.select(self.snapshot[line], i as u64).map(|k| k as usize)
    }

    /// Tree nodes allocated over all snapshots.
    pub fn tree_nodes(&self) -> usize {
        self.arena.allocated()
    }

    /// All pairs meeting inside the cell, listed from the snapshots.
    pub fn vertices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.total as usize);
        for l in 0..self.pair_count.len() {
            for r in 0..self.pair_count[l] {
                let o = self.partner(l, r);
                out.push((l.min(o), l.max(o)));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Cells weighted by `support * 2^depth`, sampled by a root-to-leaf descent.
#[derive(Clone, Debug, Default)]
pub struct MassTree {
    arena: Arena,
    root: u32,
    cells: BTreeMap<u64, (u64, u32)>,
}

impl MassTree {
    pub fn new() -> MassTree {
        MassTree { arena: Arena::new(), root: NIL, cells: BTreeMap::new() }
    }

    pub fn mass_of(support: u64, depth: u32) -> f64 {
        libm::ldexp(support as f64, depth as i32)
    }

    /// Insert a cell, or replace its support and depth.
    pub fn insert(&mut self, cell: u64, support: u64, depth: u32) {
        self.root = self.arena.insert(self.root, cell, Self::mass_of(support, depth));
        self.cells.insert(cell, (support, depth));
        self.compact();
    }

    pub fn update(&mut self, cell: u64, support: u64, depth: u32) -> Result<()> {
        if !self.cells.contains_key(&cell) {
            return Err(Error::Precondition(format!("cell {cell} is not in the tree")));
        }
        self.insert(cell, support, depth);
        Ok(())
    }

    pub fn remove(&mut self, cell: u64) -> bool {
        if self.cells.remove(&cell).is_none() {
            return false;
        }
        self.root = self.arena.remove(self.root, cell);
        self.compact();
        true
    }

    pub fn get(&self, cell: u64) -> Option<(u64, u32)> {
        self.cells.get(&cell).copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn root_mass(&self) -> f64 {
        self.arena.mass(self.root)
    }

    pub fn mass(&self, cell: u64) -> Option<f64> {
        self.arena.find(self.root, cell).map(|n| n.own)
    }

    /// A cell drawn with probability `mass / root_mass`.
    pub fn sample_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        let total = self.root_mass();
        if self.is_empty() || total <= 0.0 {
            return Err(Error::Empty);
        }
        let u = rng.gen::<f64>() * total;
        self.arena.descend(self.root, u).map(|n| n.key).ok_or(Error::Empty)
    }

    // Path copying leaves old nodes behind; rebuild once they dominate.
    fn compact(&mut self) {
        if self.arena.allocated() <= 8 * self.cells.len() + 64 {
            return;
        }
        let mut live = Vec::with_capacity(self.cells.len());
        self.arena.keys(self.root, &mut live);
        let mut fresh = Arena::new();
        let mut root = NIL;
        for (k, own) in live {
            root = fresh.insert(root, k, own);
        }
        self.arena = fresh;
        self.root = root;
    }
}

/// A random convex cell with `sides` vertices inside the unit square and
/// `m` random lines, none of them degenerate with respect to the cell.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, sides: usize, m: usize) -> (ConvexCell, Vec<CanonicalLine>) {
    const DEN: i64 = 1 << 20;
    let q = |v: i64| Rational::new(v.into(), DEN.into());
    let cell = loop {
        let mut angles: Vec<f64> = (0..sides).map(|_| rng.gen::<f64>() * core::f64::consts::TAU).collect();
        angles.sort_by(f64::total_cmp);
        let v: Vec<Point> = angles
            .iter()
            .map(|&a| {
                let x = (0.5 + 0.5 * libm::cos(a)) * DEN as f64;
                let y = (0.5 + 0.5 * libm::sin(a)) * DEN as f64;
                Point::new(q(x as i64), q(y as i64))
            })
            .collect();
        if let Ok(c) = ConvexCell::new(v) {
            break c;
        }
    };
    let mut lines: Vec<CanonicalLine> = Vec::with_capacity(m);
    let mut taken = BTreeSet::new();
    while lines.len() < m {
        let mut p = || Point::new(q(rng.gen_range(-DEN..2 * DEN)), q(rng.gen_range(-DEN..2 * DEN)));
        let (a, b) = (p(), p());
        let Ok(l) = line_through(&a, &b) else { continue };
        if lines.contains(&l) {
            continue;
        }
        let Ok(events) = line_events(&cell, lines.len(), &l) else { continue };
        if events.iter().any(|ev| taken.contains(&ev.position)) {
            continue;
        }
        taken.extend(events.into_iter().map(|ev| ev.position));
        lines.push(l);
    }
    (cell, lines)
}

#[cfg(test)]
mod tests;
