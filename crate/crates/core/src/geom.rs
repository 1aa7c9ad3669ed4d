//! Exact planar primitives.
//!
//! Coordinates are arbitrary-precision rationals and line coefficients are
//! arbitrary-precision integers, so every predicate here is exact.

use core::cmp::Ordering;
use core::fmt;
use core::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// Rational from a numerator and a (nonzero) denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Signed>(v: &T) -> Sign {
        if v.is_positive() {
            Sign::Positive
        } else if v.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn of_i128(v: i128) -> Sign {
        match v.cmp(&0) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    /// Product of two signs.
    pub fn mul(self, other: Sign) -> Sign {
        match self.as_i8() * other.as_i8() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Point {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Point {
        Point::new(int(x), int(y))
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let two = int(2);
        Point::new(
            (&self.x + &other.x) / &two,
            (&self.y + &other.y) / &two,
        )
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        Point::new(
            &self.x + t * (&other.x - &self.x),
            &self.y + t * (&other.y - &self.y),
        )
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), rational_to_f64(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Sign of the determinant `|q - p, r - p|`; positive means counterclockwise.
pub fn orient(p: &Point, q: &Point, r: &Point) -> Sign {
    let det = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
    Sign::of(&det)
}

/// The locus `a x + b y + c = 0` with integer coefficients in lowest terms.
///
/// Normal form: `gcd(|a|, |b|, |c|) = 1` and either `a > 0`, or `a = 0` and
/// `b > 0`. Two values are equal exactly when they describe the same line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalLine {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl CanonicalLine {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<CanonicalLine> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::DegenerateLine);
        }
        let g = a.gcd(&b).gcd(&c);
        let (mut a, mut b, mut c) = (a / &g, b / &g, c / &g);
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(CanonicalLine { a, b, c })
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<CanonicalLine> {
        CanonicalLine::new(a.into(), b.into(), c.into())
    }

    /// Line from rational coefficients, cleared of denominators.
    pub fn from_rationals(a: &Rational, b: &Rational, c: &Rational) -> Result<CanonicalLine> {
        let l = a.denom().lcm(b.denom()).lcm(c.denom());
        let scale = |r: &Rational| r.numer() * (&l / r.denom());
        CanonicalLine::new(scale(a), scale(b), scale(c))
    }

    /// The vertical line `x = x0`.
    pub fn vertical(x0: &Rational) -> CanonicalLine {
        CanonicalLine::from_rationals(&Rational::one(), &Rational::zero(), &-x0.clone())
            .expect("a = 1")
    }

    /// The horizontal line `y = y0`.
    pub fn horizontal(y0: &Rational) -> CanonicalLine {
        CanonicalLine::from_rationals(&Rational::zero(), &Rational::one(), &-y0.clone())
            .expect("b = 1")
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn coefficients(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    /// `a x + b y + c` at `p`.
    pub fn eval(&self, p: &Point) -> Rational {
        Rational::from_integer(self.a.clone()) * &p.x
            + Rational::from_integer(self.b.clone()) * &p.y
            + Rational::from_integer(self.c.clone())
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// Intersection point with another line, if the two are not parallel.
    pub fn intersection(&self, other: &CanonicalLine) -> Option<Point> {
        let det = &self.a * &other.b - &self.b * &other.a;
        if det.is_zero() {
            return None;
        }
        let x = &self.b * &other.c - &self.c * &other.b;
        let y = &self.c * &other.a - &self.a * &other.c;
        Some(Point::new(
            Rational::new(x, det.clone()),
            Rational::new(y, det),
        ))
    }
}

impl fmt::Display for CanonicalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.b, self.c)
    }
}

pub fn line_through(p: &Point, q: &Point) -> Result<CanonicalLine> {
    if p == q {
        return Err(Error::DegeneratePair);
    }
    // (y_p - y_q) x + (x_q - x_p) y + (x_p y_q - x_q y_p) = 0
    let a = &p.y - &q.y;
    let b = &q.x - &p.x;
    let c = &p.x * &q.y - &q.x * &p.y;
    CanonicalLine::from_rationals(&a, &b, &c)
}

pub fn side(line: &CanonicalLine, p: &Point) -> Sign {
    Sign::of(&line.eval(p))
}

/// The perpendicular bisector of `p` and `q`; `q` lies on its positive side.
pub fn perpendicular_bisector(p: &Point, q: &Point) -> Result<CanonicalLine> {
    if p == q {
        return Err(Error::DegeneratePair);
    }
    let a = (&q.x - &p.x) * int(2);
    let b = (&q.y - &p.y) * int(2);
    let c = (&p.x * &p.x + &p.y * &p.y) - (&q.x * &q.x + &q.y * &q.y);
    CanonicalLine::from_rationals(&a, &b, &c)
}

/// The line `y = slope * x + intercept`, dual of the point `(slope, -intercept)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualLine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl DualLine {
    /// The primal point this dual line represents.
    pub fn dual_point(&self) -> Point {
        Point::new(self.slope.clone(), -self.intercept.clone())
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.y == &self.slope * &p.x + &self.intercept
    }

    pub fn to_canonical(&self) -> CanonicalLine {
        // slope * x - y + intercept = 0
        CanonicalLine::from_rationals(&self.slope, &-Rational::one(), &self.intercept)
            .expect("b = -1")
    }
}

/// Point `(a, b)` maps to the line `y = a x - b`.
pub fn dualize_point(p: &Point) -> DualLine {
    DualLine {
        slope: p.x.clone(),
        intercept: -p.y.clone(),
    }
}

/// Inverse direction of [`dualize_point`] for non-vertical lines.
pub fn dualize_line(line: &CanonicalLine) -> Result<Point> {
    if line.is_vertical() {
        return Err(Error::VerticalLine);
    }
    // y = -(a/b) x - c/b  is the dual of (-(a/b), c/b)
    let b = Rational::from_integer(line.b.clone());
    let a = Rational::from_integer(line.a.clone());
    let c = Rational::from_integer(line.c.clone());
    Ok(Point::new(-(a / &b), c / b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentCrossing {
    StrictCross,
    TouchesEndpoint,
    NoCross,
}

pub fn segment_crossing(line: &CanonicalLine, p: &Point, q: &Point) -> SegmentCrossing {
    let sp = side(line, p);
    let sq = side(line, q);
    if sp.mul(sq) == Sign::Negative {
        SegmentCrossing::StrictCross
    } else if sp.is_zero() || sq.is_zero() {
        SegmentCrossing::TouchesEndpoint
    } else {
        SegmentCrossing::NoCross
    }
}

/// Does the closed segment `ab` meet the closed segment `cd`?
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1.mul(o2) == Sign::Negative && o3.mul(o4) == Sign::Negative {
        return true;
    }
    let on = |p: &Point, q: &Point, r: &Point| {
        orient(p, q, r).is_zero()
            && r.x >= core::cmp::min(&p.x, &q.x).clone()
            && r.x <= core::cmp::max(&p.x, &q.x).clone()
            && r.y >= core::cmp::min(&p.y, &q.y).clone()
            && r.y <= core::cmp::max(&p.y, &q.y).clone()
    };
    on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b)
}
