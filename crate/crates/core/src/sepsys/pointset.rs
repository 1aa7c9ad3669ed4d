use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::race::OnceBox;

use crate::geom::{CanonicalLine, Point, Rational, Sign};
use crate::{Error, Result};

/// Frame coordinates at or above this magnitude use the big-integer path.
const SMALL_COORD: i64 = 1 << 60;
const SMALL_AB: i128 = 1 << 62;
const SMALL_C: i128 = 1 << 125;

/// Sets larger than this are assumed to be in general position.
pub const GENERAL_POSITION_CHECK_LIMIT: usize = 512;

fn fits_i64(coords: &Coords) -> bool {
    match coords {
        Coords::Small(v) => v.iter().all(|c| c[0].abs() < 1 << 30 && c[1].abs() < 1 << 30),
        Coords::Big(_) => false,
    }
}

#[derive(Clone, Debug)]
enum Coords {
    Small(Vec<[i64; 2]>),
    Big(Vec<[BigInt; 2]>),
}

/// An ordered set of distinct points, stored over a common denominator.
///
/// Every point is kept as an integer pair `(X, Y)` with `x = X / D`. When all
/// frame coordinates are below 2^60 in magnitude the predicates run on
/// 128-bit integers without overflow; otherwise they fall back to big
/// integers. Either way the results are exact.
#[derive(Debug)]
pub struct PointSet {
    denom: BigInt,
    coords: Coords,
    small_i64: bool,
    collinear: OnceBox<Option<[usize; 3]>>,
}

impl Clone for PointSet {
    fn clone(&self) -> Self {
        PointSet {
            denom: self.denom.clone(),
            coords: self.coords.clone(),
            small_i64: self.small_i64,
            collinear: OnceBox::new(),
        }
    }
}

/// A line expressed in the frame of a [`PointSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameLine {
    Small { a: i128, b: i128, c: i128 },
    Big { a: BigInt, b: BigInt, c: BigInt },
}

impl FrameLine {
    pub(crate) fn from_big(a: BigInt, b: BigInt, c: BigInt) -> FrameLine {
        if let (Some(sa), Some(sb), Some(sc)) = (a.to_i128(), b.to_i128(), c.to_i128()) {
            if sa.abs() < SMALL_AB && sb.abs() < SMALL_AB && sc.abs() < SMALL_C {
                return FrameLine::Small { a: sa, b: sb, c: sc };
            }
        }
        FrameLine::Big { a, b, c }
    }

    pub(crate) fn big(&self) -> (BigInt, BigInt, BigInt) {
        match self {
            FrameLine::Small { a, b, c } => ((*a).into(), (*b).into(), (*c).into()),
            FrameLine::Big { a, b, c } => (a.clone(), b.clone(), c.clone()),
        }
    }

    /// Parallel-class form of a small line: the primitive normal `(ra, rb)`
    /// and an integer threshold `t` such that, with `u = ra X + rb Y`, the
    /// point is on the line iff `exact && u == t` and otherwise on one side
    /// iff `u > t`. `None` on the big path.
    pub(crate) fn parallel_form(&self) -> Option<ParallelForm> {
        match *self {
            FrameLine::Small { a, b, c } => {
                let g = a.gcd(&b);
                let (mut ra, mut rb, mut c) = (a / g, b / g, c);
                if ra < 0 || (ra == 0 && rb < 0) {
                    ra = -ra;
                    rb = -rb;
                    c = -c;
                }
                // value ~ g u + c, g > 0
                let t = Integer::div_floor(&(-c), &g);
                let exact = Integer::mod_floor(&(-c), &g) == 0;
                Some(ParallelForm { normal: (ra, rb), threshold: t, exact })
            }
            FrameLine::Big { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ParallelForm {
    pub normal: (i128, i128),
    pub threshold: i128,
    pub exact: bool,
}

impl ParallelForm {
    #[inline]
    pub fn project(&self, p: [i64; 2]) -> i128 {
        self.normal.0 * p[0] as i128 + self.normal.1 * p[1] as i128
    }
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<PointSet> {
        let mut denom = BigInt::one();
        for p in &points {
            denom = denom.lcm(p.x.denom()).lcm(p.y.denom());
        }
        let scale = |r: &Rational| r.numer() * (&denom / r.denom());
        let big: Vec<[BigInt; 2]> = points.iter().map(|p| [scale(&p.x), scale(&p.y)]).collect();
        PointSet::from_frame(denom, big)
    }

    /// Points `(X / denom, Y / denom)`.
    pub fn from_scaled(denom: i64, coords: Vec<[i64; 2]>) -> Result<PointSet> {
        assert!(denom > 0, "denominator must be positive");
        let d = BigInt::from(denom);
        let small = coords.iter().all(|c| c[0].abs() < SMALL_COORD && c[1].abs() < SMALL_COORD);
        // Keep the frame in lowest terms so that equal inputs give equal frames.
        let g = coords
            .iter()
            .fold(denom, |g, c| g.gcd(&c[0]).gcd(&c[1]));
        if g > 1 {
            let coords: Vec<[BigInt; 2]> =
                coords.iter().map(|c| [BigInt::from(c[0]), BigInt::from(c[1])]).collect();
            return PointSet::from_frame(d, coords);
        }
        let coords = if small {
            Coords::Small(coords)
        } else {
            Coords::Big(coords.iter().map(|c| [c[0].into(), c[1].into()]).collect())
        };
        let ps = PointSet { denom: d, small_i64: fits_i64(&coords), coords, collinear: OnceBox::new() };
        ps.check_duplicates()?;
        Ok(ps)
    }

    fn from_frame(denom: BigInt, coords: Vec<[BigInt; 2]>) -> Result<PointSet> {
        let mut g = denom.clone();
        for c in &coords {
            g = g.gcd(&c[0]).gcd(&c[1]);
        }
        let (denom, coords) = if g.is_one() {
            (denom, coords)
        } else {
            (
                &denom / &g,
                coords.into_iter().map(|[x, y]| [x / &g, y / &g]).collect(),
            )
        };
        let small: Option<Vec<[i64; 2]>> = coords
            .iter()
            .map(|[x, y]| {
                let x = x.to_i64().filter(|v| v.abs() < SMALL_COORD)?;
                let y = y.to_i64().filter(|v| v.abs() < SMALL_COORD)?;
                Some([x, y])
            })
            .collect();
        let coords = match small {
            Some(s) => Coords::Small(s),
            None => Coords::Big(coords),
        };
        let ps = PointSet { denom, small_i64: fits_i64(&coords), coords, collinear: OnceBox::new() };
        ps.check_duplicates()?;
        Ok(ps)
    }

    fn check_duplicates(&self) -> Result<()> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&i, &j| self.cmp_lex(i, j).then(i.cmp(&j)));
        for w in idx.windows(2) {
            if self.cmp_lex(w[0], w[1]) == Ordering::Equal {
                let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoint(i, j));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match &self.coords {
            Coords::Small(v) => v.len(),
            Coords::Big(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    #[cfg(test)]
    pub(crate) fn is_small(&self) -> bool {
        matches!(self.coords, Coords::Small(_))
    }

    /// `true` iff every frame coordinate is below 2^30 in magnitude, so
    /// orientation determinants fit in `i64`.
    pub(crate) fn fits_i64_orient(&self) -> bool {
        self.small_i64
    }

    pub(crate) fn small_coords(&self) -> Option<&[[i64; 2]]> {
        match &self.coords {
            Coords::Small(v) => Some(v),
            Coords::Big(_) => None,
        }
    }

    pub(crate) fn frame_big(&self, i: usize) -> (BigInt, BigInt) {
        match &self.coords {
            Coords::Small(v) => (v[i][0].into(), v[i][1].into()),
            Coords::Big(v) => (v[i][0].clone(), v[i][1].clone()),
        }
    }

    pub fn point(&self, i: usize) -> Point {
        let (x, y) = self.frame_big(i);
        Point::new(
            Rational::new(x, self.denom.clone()),
            Rational::new(y, self.denom.clone()),
        )
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Approximate coordinates, for statistics and display only.
    pub fn point_f64(&self, i: usize) -> (f64, f64) {
        match &self.coords {
            Coords::Small(v) => {
                let d = self.denom.to_f64().unwrap_or(1.0);
                (v[i][0] as f64 / d, v[i][1] as f64 / d)
            }
            Coords::Big(_) => self.point(i).to_f64(),
        }
    }

    /// Lexicographic `(x, y)` comparison.
    pub fn cmp_lex(&self, i: usize, j: usize) -> Ordering {
        match &self.coords {
            Coords::Small(v) => v[i].cmp(&v[j]),
            Coords::Big(v) => v[i].cmp(&v[j]),
        }
    }

    pub fn orient_idx(&self, i: usize, j: usize, k: usize) -> Sign {
        match &self.coords {
            Coords::Small(v) => {
                let (p, q, r) = (v[i], v[j], v[k]);
                let det = (q[0] - p[0]) as i128 * (r[1] - p[1]) as i128
                    - (q[1] - p[1]) as i128 * (r[0] - p[0]) as i128;
                Sign::of_i128(det)
            }
            Coords::Big(v) => {
                let (p, q, r) = (&v[i], &v[j], &v[k]);
                let det = (&q[0] - &p[0]) * (&r[1] - &p[1]) - (&q[1] - &p[1]) * (&r[0] - &p[0]);
                Sign::of(&det)
            }
        }
    }

    /// Some collinear triple, if one exists. Only searched for sets of at
    /// most [`GENERAL_POSITION_CHECK_LIMIT`] points.
    pub fn collinear_triple(&self) -> Option<[usize; 3]> {
        *self.collinear.get_or_init(|| {
            let n = self.len();
            if n > GENERAL_POSITION_CHECK_LIMIT {
                log::warn!("general position assumed for {n} points (check limit {GENERAL_POSITION_CHECK_LIMIT})");
                return alloc::boxed::Box::new(None);
            }
            alloc::boxed::Box::new(self.find_collinear_triple())
        })
    }

    /// `true` iff no three points are collinear (assumed above the check limit).
    pub fn general_position(&self) -> bool {
        self.collinear_triple().is_none()
    }

    pub fn require_general_position(&self) -> Result<()> {
        match self.collinear_triple() {
            Some([i, j, k]) => Err(Error::GeneralPosition(i, j, k)),
            None => Ok(()),
        }
    }

    fn find_collinear_triple(&self) -> Option<[usize; 3]> {
        let n = self.len();
        for i in 0..n {
            // Directions from i, reduced to lowest terms with a canonical sign.
            let mut dirs: Vec<((BigInt, BigInt), usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let (xi, yi) = self.frame_big(i);
                    let (xj, yj) = self.frame_big(j);
                    let (dx, dy) = (xj - xi, yj - yi);
                    let g = dx.gcd(&dy);
                    let (mut dx, mut dy) = (dx / &g, dy / &g);
                    if dx.is_negative() || (dx.is_zero() && dy.is_negative()) {
                        dx = -dx;
                        dy = -dy;
                    }
                    ((dx, dy), j)
                })
                .collect();
            dirs.sort();
            for w in dirs.windows(2) {
                if w[0].0 == w[1].0 {
                    let mut t = [i, w[0].1, w[1].1];
                    t.sort_unstable();
                    return Some(t);
                }
            }
        }
        None
    }

    /// Express `line` in this set's frame.
    pub fn prepare(&self, line: &CanonicalLine) -> FrameLine {
        let (a, b, c) = line.coefficients();
        let c = c * &self.denom;
        let g = a.gcd(b).gcd(&c);
        FrameLine::from_big(a / &g, b / &g, c / &g)
    }

    /// Convert a frame line back to a canonical line in real coordinates.
    pub fn unprepare(&self, line: &FrameLine) -> CanonicalLine {
        let (a, b, c) = line.big();
        CanonicalLine::new(a * &self.denom, b * &self.denom, c).expect("frame line is non-degenerate")
    }

    /// The frame line through points `i` and `j`, oriented so that its value
    /// at `k` has the sign of `orient_idx(i, j, k)`. Not normalized.
    pub(crate) fn raw_line_through(&self, i: usize, j: usize) -> FrameLine {
        match &self.coords {
            Coords::Small(v) => {
                let (p, q) = (v[i], v[j]);
                let a = p[1] as i128 - q[1] as i128;
                let b = q[0] as i128 - p[0] as i128;
                let c = p[0] as i128 * q[1] as i128 - q[0] as i128 * p[1] as i128;
                FrameLine::Small { a, b, c }
            }
            Coords::Big(v) => {
                let (p, q) = (&v[i], &v[j]);
                FrameLine::Big {
                    a: &p[1] - &q[1],
                    b: &q[0] - &p[0],
                    c: &p[0] * &q[1] - &q[0] * &p[1],
                }
            }
        }
    }

    /// Value of a frame line at point `k`, on the big-integer path.
    pub(crate) fn value_big(&self, line: &FrameLine, k: usize) -> BigInt {
        let (x, y) = self.frame_big(k);
        match line {
            FrameLine::Small { a, b, c } => BigInt::from(*a) * x + BigInt::from(*b) * y + BigInt::from(*c),
            FrameLine::Big { a, b, c } => a * x + b * y + c,
        }
    }

    /// Value of a small frame line at point `k`, when both are small.
    #[inline]
    pub(crate) fn value_small(&self, line: &FrameLine, k: usize) -> Option<i128> {
        match (&self.coords, line) {
            (Coords::Small(v), FrameLine::Small { a, b, c }) => {
                Some(a * v[k][0] as i128 + b * v[k][1] as i128 + c)
            }
            _ => None,
        }
    }

    #[inline]
    pub fn side_frame(&self, line: &FrameLine, k: usize) -> Sign {
        match self.value_small(line, k) {
            Some(v) => Sign::of_i128(v),
            None => Sign::of(&self.value_big(line, k)),
        }
    }

    pub fn side(&self, line: &CanonicalLine, k: usize) -> Sign {
        self.side_frame(&self.prepare(line), k)
    }

    /// Axis-aligned bounding box `(min, max)`; `None` when empty.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        if self.is_empty() {
            return None;
        }
        let mut lo = self.frame_big(0);
        let mut hi = lo.clone();
        for k in 1..self.len() {
            let (x, y) = self.frame_big(k);
            if x < lo.0 {
                lo.0 = x.clone();
            }
            if x > hi.0 {
                hi.0 = x;
            }
            if y < lo.1 {
                lo.1 = y.clone();
            }
            if y > hi.1 {
                hi.1 = y;
            }
        }
        let d = &self.denom;
        Some((
            Point::new(Rational::new(lo.0, d.clone()), Rational::new(lo.1, d.clone())),
            Point::new(Rational::new(hi.0, d.clone()), Rational::new(hi.1, d.clone())),
        ))
    }

    /// The subset with the given indices, in that order.
    pub fn subset(&self, idx: &[usize]) -> PointSet {
        let coords = match &self.coords {
            Coords::Small(v) => Coords::Small(idx.iter().map(|&i| v[i]).collect()),
            Coords::Big(v) => Coords::Big(idx.iter().map(|&i| v[i].clone()).collect()),
        };
        PointSet { denom: self.denom.clone(), small_i64: fits_i64(&coords), coords, collinear: OnceBox::new() }
    }
}
