//! Small exact perturbations of lines: parallel shifts, tilts about a pivot
//! and a few constructions built from them.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::pointset::{FrameLine, PointSet};
use crate::geom::Sign;

/// A frame point `(x / q, y / q)` with `q > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Pivot {
    pub x: BigInt,
    pub y: BigInt,
    pub q: BigInt,
}

impl Pivot {
    /// `(1 - t) * P_i + t * P_j` for `t = num / den`.
    pub fn on_segment(ps: &PointSet, i: usize, j: usize, num: u64, den: u64) -> Pivot {
        let (xi, yi) = ps.frame_big(i);
        let (xj, yj) = ps.frame_big(j);
        let (s, t) = (BigInt::from(den - num), BigInt::from(num));
        Pivot { x: &xi * &s + &xj * &t, y: &yi * &s + &yj * &t, q: BigInt::from(den) }
    }

    pub fn is_point(&self, ps: &PointSet, k: usize) -> bool {
        let (x, y) = ps.frame_big(k);
        x * &self.q == self.x && y * &self.q == self.y
    }
}

/// Fractions `1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...` in lowest terms.
pub(crate) fn interior_fractions() -> impl Iterator<Item = (u64, u64)> {
    (2u64..).flat_map(|den| (1..den).filter(move |&num| num.gcd(&den) == 1).map(move |num| (num, den)))
}

fn big_line(line: &FrameLine) -> (BigInt, BigInt, BigInt) {
    line.big()
}

fn normalized(a: BigInt, b: BigInt, c: BigInt) -> FrameLine {
    let g = a.gcd(&b).gcd(&c);
    if g.is_zero() || g.is_one() {
        FrameLine::from_big(a, b, c)
    } else {
        FrameLine::from_big(a / &g, b / &g, c / &g)
    }
}

/// The parallel line `2 (a X + b Y + c) + side * delta = 0`; points on the
/// original line land on `side`. With `delta` no larger than the smallest
/// nonzero `|value|`, no point changes side and none lies on the result.
pub(crate) fn translate(line: &FrameLine, side: Sign, delta: &BigInt) -> FrameLine {
    let (a, b, c) = big_line(line);
    let two = BigInt::from(2);
    let shift = match side {
        Sign::Positive => delta.clone(),
        Sign::Negative => -delta.clone(),
        Sign::Zero => BigInt::zero(),
    };
    normalized(&a * &two, &b * &two, &c * &two + shift)
}

/// Rotate `line` by a tiny angle about `pivot`, which must lie on it.
///
/// Points off the line keep their side. A point on the line ends on side
/// `sigma` if it lies ahead of the pivot along the direction `(-b, a)` and on
/// `-sigma` if behind. Returns `None` if the pivot is a point of `ps` that
/// lies on the line.
pub(crate) fn tilt(ps: &PointSet, line: &FrameLine, pivot: &Pivot, sigma: Sign) -> Option<FrameLine> {
    debug_assert!(!sigma.is_zero());
    let (a, b, c) = big_line(line);
    debug_assert!((&a * &pivot.x + &b * &pivot.y + &c * &pivot.q).is_zero());
    let (dx, dy) = (-b.clone(), a.clone());
    let off = &dx * &pivot.x + &dy * &pivot.y;
    // W(k) = q (dx X + dy Y) - off; the new line is q 2^s V + sigma W.
    let mut s: u64 = 0;
    for k in 0..ps.len() {
        let (x, y) = ps.frame_big(k);
        let v = &a * &x + &b * &y + &c;
        let w = &pivot.q * (&dx * &x + &dy * &y) - &off;
        if v.is_zero() {
            if w.is_zero() {
                return None;
            }
            continue;
        }
        let qv = &pivot.q * &v;
        let need = (w.bits() + 1).saturating_sub(qv.bits());
        s = s.max(need);
    }
    let scale = &pivot.q << s;
    let sg = BigInt::from(sigma.as_i8());
    Some(normalized(
        &scale * &a + &sg * &pivot.q * &dx,
        &scale * &b + &sg * &pivot.q * &dy,
        &scale * &c - &sg * &off,
    ))
}

/// Exact frame value of `line` at every point.
pub(crate) fn values(ps: &PointSet, line: &FrameLine) -> Vec<BigInt> {
    (0..ps.len()).map(|k| ps.value_big(line, k)).collect()
}

/// Smallest nonzero `|value|` of `line` over the points, or 1 if none.
pub(crate) fn min_nonzero_distance(ps: &PointSet, line: &FrameLine) -> BigInt {
    values(ps, line)
        .into_iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.abs())
        .min()
        .unwrap_or_else(BigInt::one)
}

/// A line avoiding every point of `ps` with `i` on the negative side and `j`
/// on the positive side.
pub(crate) fn split_pair(ps: &PointSet, i: usize, j: usize) -> FrameLine {
    assert_ne!(i, j);
    let (xi, yi) = ps.frame_big(i);
    let (xj, yj) = ps.frame_big(j);
    let (nx, ny) = (&xj - &xi, &yj - &yi);
    for (num, den) in interior_fractions() {
        let pivot = Pivot::on_segment(ps, i, j, num, den);
        let line = normalized(
            &pivot.q * &nx,
            &pivot.q * &ny,
            -(&nx * &pivot.x + &ny * &pivot.y),
        );
        let on: Vec<usize> = (0..ps.len()).filter(|&k| ps.side_frame(&line, k).is_zero()).collect();
        if on.is_empty() {
            return line;
        }
        if on.iter().any(|&k| pivot.is_point(ps, k)) {
            continue;
        }
        if let Some(t) = tilt(ps, &line, &pivot, Sign::Positive) {
            return t;
        }
    }
    unreachable!("interior fractions are unbounded")
}

/// A line through interior points of segments `ab` and `cd`, avoiding every
/// point, with `a`, `b` on opposite sides and `c`, `d` on opposite sides.
pub(crate) fn split_two_pairs(ps: &PointSet, (a, b): (usize, usize), (c, d): (usize, usize)) -> Option<FrameLine> {
    let fr: Vec<(u64, u64)> = interior_fractions().take(7).collect();
    for &(n1, d1) in &fr {
        let m1 = Pivot::on_segment(ps, a, b, n1, d1);
        for &(n2, d2) in &fr {
            let m2 = Pivot::on_segment(ps, c, d, n2, d2);
            let la = &m1.y * &m2.q - &m2.y * &m1.q;
            let lb = &m2.x * &m1.q - &m1.x * &m2.q;
            if la.is_zero() && lb.is_zero() {
                continue;
            }
            let lc = &m1.x * &m2.y - &m2.x * &m1.y;
            let mut line = normalized(la, lb, lc);
            let opposite = |l: &FrameLine, p: usize, q: usize| {
                ps.side_frame(l, p).mul(ps.side_frame(l, q)) == Sign::Negative
            };
            if !opposite(&line, a, b) || !opposite(&line, c, d) {
                continue;
            }
            if (0..ps.len()).any(|k| ps.side_frame(&line, k).is_zero()) {
                match tilt(ps, &line, &m1, Sign::Positive) {
                    Some(t) => line = t,
                    None => continue,
                }
                if !opposite(&line, a, b) || !opposite(&line, c, d) {
                    continue;
                }
            }
            return Some(line);
        }
    }
    None
}

/// A line avoiding every point with every point lexicographically at most
/// `a` on the negative side and every point at least `b` on the positive
/// side, among points whose x lies outside the open interval between the two
/// (requires `a < b` lexicographically).
pub(crate) fn lex_split(ps: &PointSet, a: usize, b: usize) -> FrameLine {
    let (xa, ya) = ps.frame_big(a);
    let (xb, yb) = ps.frame_big(b);
    assert!((&xa, &ya) < (&xb, &yb));
    if xa < xb {
        for (num, den) in interior_fractions() {
            let (s, t) = (BigInt::from(den - num), BigInt::from(num));
            let m = &xa * &s + &xb * &t;
            let q = BigInt::from(den);
            if (0..ps.len()).all(|k| ps.frame_big(k).0 * &q != m) {
                return normalized(q, BigInt::zero(), -m);
            }
        }
        unreachable!()
    }
    let base = FrameLine::from_big(BigInt::one(), BigInt::zero(), -xa);
    for (num, den) in interior_fractions() {
        let pivot = Pivot::on_segment(ps, a, b, num, den);
        if (0..ps.len()).any(|k| pivot.is_point(ps, k)) {
            continue;
        }
        return tilt(ps, &base, &pivot, Sign::Positive).expect("pivot is not a point");
    }
    unreachable!()
}
