use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::geom::{int, orient, CanonicalLine, Point, Rational, Sign};
use crate::{Error, Result};

/// Most lines an arrangement may hold.
pub const ARRANGEMENT_CAP: usize = 512;

/// A closed axis-parallel rectangle with positive width and height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Result<BoundingBox> {
        if min.x >= max.x || min.y >= max.y {
            return Err(Error::Precondition("bounding box must have positive width and height".into()));
        }
        Ok(BoundingBox { min, max })
    }

    /// The box of `points` grown by `fraction` of its extent on every side.
    /// A zero extent counts as 1.
    pub fn around(points: &[Point], fraction: &Rational) -> Result<BoundingBox> {
        let first = points.first().ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for p in points {
            lo.x = lo.x.clone().min(p.x.clone());
            lo.y = lo.y.clone().min(p.y.clone());
            hi.x = hi.x.clone().max(p.x.clone());
            hi.y = hi.y.clone().max(p.y.clone());
        }
        let grow = |a: &Rational, b: &Rational| {
            let e = b - a;
            if e.is_zero() { fraction.clone() } else { e * fraction }
        };
        let (gx, gy) = (grow(&lo.x, &hi.x), grow(&lo.y, &hi.y));
        BoundingBox::new(Point::new(&lo.x - &gx, &lo.y - &gy), Point::new(&hi.x + gx, &hi.y + gy))
    }

    /// Corners, counterclockwise from the lower left.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min.clone(),
            Point::new(self.max.x.clone(), self.min.y.clone()),
            self.max.clone(),
            Point::new(self.min.x.clone(), self.max.y.clone()),
        ]
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: usize,
    pub twin: usize,
    pub next: usize,
    pub face: usize,
    /// Index into the arrangement's lines; `None` on the box boundary.
    pub line: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub half_edge: usize,
    /// Vertex ids, counterclockwise for bounded faces.
    pub vertices: Vec<usize>,
}

/// Lines clipped to a box, as a doubly-connected edge list. Faces include
/// the unbounded face outside the box.
#[derive(Clone, Debug)]
pub struct ClippedArrangement {
    pub bbox: BoundingBox,
    pub lines: Vec<CanonicalLine>,
    pub vertices: Vec<Point>,
    pub half_edges: Vec<HalfEdge>,
    pub faces: Vec<Face>,
    pub outer_face: usize,
}

fn dot(p: &Point, q: &Point, r: &Point) -> Rational {
    (&r.x - &p.x) * (&q.x - &p.x) + (&r.y - &p.y) * (&q.y - &p.y)
}

/// The part of `line` inside the box, if it is a segment through the
/// interior.
fn clip(bbox: &BoundingBox, line: &CanonicalLine) -> Option<(Point, Point)> {
    let c = bbox.corners();
    let vals: Vec<Rational> = c.iter().map(|p| line.eval(p)).collect();
    let mut pts: Vec<Point> = Vec::new();
    for k in 0..4 {
        let (f0, f1) = (&vals[k], &vals[(k + 1) % 4]);
        if f0.is_zero() {
            if vals[(k + 1) % 4].is_zero() {
                return None;
            }
            pts.push(c[k].clone());
        } else if !f1.is_zero() && f0.is_positive() != f1.is_positive() {
            pts.push(c[k].lerp(&c[(k + 1) % 4], &(f0 / (f0 - f1))));
        }
    }
    pts.sort();
    pts.dedup();
    match pts.len() {
        2 => Some((pts[0].clone(), pts[1].clone())),
        _ => None,
    }
}

fn half_plane(x: &Rational, y: &Rational) -> u8 {
    if y.is_positive() || (y.is_zero() && x.is_positive()) { 0 } else { 1 }
}

fn cmp_direction(a: &(Rational, Rational), b: &(Rational, Rational)) -> Ordering {
    half_plane(&a.0, &a.1).cmp(&half_plane(&b.0, &b.1)).then_with(|| {
        let cross = &a.0 * &b.1 - &a.1 * &b.0;
        if cross.is_positive() {
            Ordering::Less
        } else if cross.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Build the arrangement of `lines` inside `bbox`. Duplicate lines and lines
/// missing the box interior add nothing.
pub fn build_arrangement(lines: &[CanonicalLine], bbox: &BoundingBox) -> Result<ClippedArrangement> {
    if lines.len() > ARRANGEMENT_CAP {
        return Err(Error::ArrangementCap { cap: ARRANGEMENT_CAP, got: lines.len() });
    }
    let mut seen = BTreeSet::new();
    let segs: Vec<(usize, Point, Point)> = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| seen.insert((*l).clone()))
        .filter_map(|(i, l)| clip(bbox, l).map(|(a, b)| (i, a, b)))
        .collect();

    let mut chains: Vec<(Option<usize>, Vec<Point>)> = Vec::new();
    for (s, (i, a, b)) in segs.iter().enumerate() {
        let mut pts = vec![a.clone(), b.clone()];
        for (t, (j, _, _)) in segs.iter().enumerate() {
            if s != t {
                if let Some(p) = lines[*i].intersection(&lines[*j]) {
                    if bbox.contains(&p) {
                        pts.push(p);
                    }
                }
            }
        }
        pts.sort_by_cached_key(|p| dot(a, b, p));
        pts.dedup();
        chains.push((Some(*i), pts));
    }
    let corners = bbox.corners();
    for k in 0..4 {
        let (c0, c1) = (&corners[k], &corners[(k + 1) % 4]);
        let mut pts = vec![c0.clone(), c1.clone()];
        for (_, a, b) in &segs {
            for p in [a, b] {
                if orient(c0, c1, p) == Sign::Zero {
                    pts.push(p.clone());
                }
            }
        }
        pts.sort_by_cached_key(|p| dot(c0, c1, p));
        pts.dedup();
        chains.push((None, pts));
    }

    let mut ids: BTreeMap<Point, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut edges: BTreeMap<(usize, usize), Option<usize>> = BTreeMap::new();
    for (line, pts) in &chains {
        let mut prev = None;
        for p in pts {
            let id = *ids.entry(p.clone()).or_insert_with(|| {
                vertices.push(p.clone());
                vertices.len() - 1
            });
            if let Some(u) = prev {
                edges.entry(if u < id { (u, id) } else { (id, u) }).or_insert(*line);
            }
            prev = Some(id);
        }
    }

    let mut half_edges = Vec::with_capacity(2 * edges.len());
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (&(u, v), &line) in &edges {
        let h = half_edges.len();
        half_edges.push(HalfEdge { origin: u, twin: h + 1, next: usize::MAX, face: usize::MAX, line });
        half_edges.push(HalfEdge { origin: v, twin: h, next: usize::MAX, face: usize::MAX, line });
        outgoing[u].push(h);
        outgoing[v].push(h + 1);
    }
    let dir = |h: usize| {
        let (o, d) = (&vertices[half_edges[h].origin], &vertices[half_edges[half_edges[h].twin].origin]);
        (&d.x - &o.x, &d.y - &o.y)
    };
    let mut position = vec![0usize; half_edges.len()];
    for out in outgoing.iter_mut() {
        let mut keyed: Vec<((Rational, Rational), usize)> = out.iter().map(|&h| (dir(h), h)).collect();
        keyed.sort_by(|a, b| cmp_direction(&a.0, &b.0));
        *out = keyed.into_iter().map(|(_, h)| h).collect();
        for (k, &h) in out.iter().enumerate() {
            position[h] = k;
        }
    }
    for h in 0..half_edges.len() {
        let t = half_edges[h].twin;
        let around = &outgoing[half_edges[t].origin];
        half_edges[h].next = around[(position[t] + around.len() - 1) % around.len()];
    }

    let mut faces = Vec::new();
    let mut outer_face = usize::MAX;
    for start in 0..half_edges.len() {
        if half_edges[start].face != usize::MAX {
            continue;
        }
        let f = faces.len();
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            half_edges[h].face = f;
            cycle.push(half_edges[h].origin);
            h = half_edges[h].next;
            if h == start {
                break;
            }
        }
        let mut area2 = Rational::zero();
        for k in 0..cycle.len() {
            let (p, q) = (&vertices[cycle[k]], &vertices[cycle[(k + 1) % cycle.len()]]);
            area2 += &p.x * &q.y - &q.x * &p.y;
        }
        if !area2.is_positive() {
            if outer_face != usize::MAX {
                return Err(Error::Verification(format!("faces {outer_face} and {f} both have non-positive area")));
            }
            outer_face = f;
        }
        faces.push(Face { half_edge: start, vertices: cycle });
    }
    Ok(ClippedArrangement { bbox: bbox.clone(), lines: lines.to_vec(), vertices, half_edges, faces, outer_face })
}

impl ClippedArrangement {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    /// Faces including the unbounded one.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// `V - E + F`; 2 for a connected plane graph.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Indices of the faces inside the box.
    pub fn bounded_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&f| f != self.outer_face)
    }

    pub fn face_polygon(&self, f: usize) -> Vec<Point> {
        self.faces[f].vertices.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Twice the area of a face.
    pub fn face_area2(&self, f: usize) -> Rational {
        area2(&self.face_polygon(f))
    }
}

/// Twice the signed area of a polygon.
pub fn area2(poly: &[Point]) -> Rational {
    let mut a = Rational::zero();
    for k in 0..poly.len() {
        let (p, q) = (&poly[k], &poly[(k + 1) % poly.len()]);
        a += &p.x * &q.y - &q.x * &p.y;
    }
    a
}

/// A point strictly inside a face: the centroid of its first three vertices.
pub fn interior_point(poly: &[Point]) -> Point {
    let three = int(3);
    Point::new(
        (&poly[0].x + &poly[1].x + &poly[2].x) / &three,
        (&poly[0].y + &poly[1].y + &poly[2].y) / &three,
    )
}
