use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::geom::{CanonicalLine, Sign};
use crate::sepsys::perturb::{self, interior_fractions, Pivot};
use crate::sepsys::{FrameLine, PointSet, SeparationMode};
use crate::{Error, Result};

/// Exactly `ceil(n/2)` lines strictly separating a set in general position.
pub fn halving_separator(ps: &PointSet) -> Result<Vec<CanonicalLine>> {
    if ps.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: ps.len() });
    }
    ps.require_general_position()?;
    let all: Vec<usize> = (0..ps.len()).collect();
    let lines: Vec<CanonicalLine> = halving_on(ps, &all)?.iter().map(|l| ps.unprepare(l)).collect();
    super::assert_separates(ps, &lines, SeparationMode::Strict)?;
    Ok(lines)
}

fn fail(what: &str) -> Error {
    Error::Verification(alloc::format!("halving: {what}"))
}

/// `ceil(m/2)` lines separating the `m` points of `subset`, none of them
/// passing through any point of `ps`.
pub(crate) fn halving_on(ps: &PointSet, subset: &[usize]) -> Result<Vec<FrameLine>> {
    let mut sorted = subset.to_vec();
    sorted.sort_by(|&a, &b| ps.cmp_lex(a, b));
    if sorted.len() < 2 {
        return Ok(Vec::new());
    }
    let half = sorted.len().div_ceil(2);
    let mut left = sorted[..half].to_vec();
    let mut right = sorted[half..].to_vec();
    let mut lines = alloc::vec![perturb::lex_split(ps, left[half - 1], right[0])];
    loop {
        match (left.len(), right.len()) {
            (0..=1, _) => break,
            (2, 1) => {
                lines.push(perturb::split_pair(ps, left[0], left[1]));
                break;
            }
            (2, 2) => {
                let l = perturb::split_two_pairs(ps, (left[0], left[1]), (right[0], right[1]))
                    .ok_or_else(|| fail("no line splits both pairs"))?;
                lines.push(l);
                break;
            }
            (3, 2) => {
                let l = perturb::split_two_pairs(ps, (left[0], left[1]), (right[0], right[1]))
                    .ok_or_else(|| fail("no line splits both pairs"))?;
                let mate = if ps.side_frame(&l, left[2]) == ps.side_frame(&l, left[0]) { left[0] } else { left[1] };
                lines.push(l);
                lines.push(perturb::split_pair(ps, left[2], mate));
                break;
            }
            _ => {
                let (h, cut_left, cut_right) =
                    simultaneous_cut(ps, &left, &right).ok_or_else(|| fail("no simultaneous 2-2 cut"))?;
                let pair = perturb::split_two_pairs(ps, (cut_left[0], cut_left[1]), (cut_right[0], cut_right[1]))
                    .ok_or_else(|| fail("no line splits both pairs"))?;
                lines.push(h);
                lines.push(pair);
                left.retain(|p| !cut_left.contains(p));
                right.retain(|p| !cut_right.contains(p));
            }
        }
    }
    Ok(lines)
}

/// A line with exactly two points of `left` and two of `right` on one side.
/// Lines through two points of `left ∪ right` are tried, each pushed off its
/// two points in all four ways.
fn simultaneous_cut(ps: &PointSet, left: &[usize], right: &[usize]) -> Option<(FrameLine, [usize; 2], [usize; 2])> {
    let all: Vec<(usize, bool)> = left.iter().map(|&p| (p, true)).chain(right.iter().map(|&p| (p, false))).collect();
    let mut sides = alloc::vec![Sign::Zero; all.len()];
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            let (u, v) = (all[a].0, all[b].0);
            let mut degenerate = false;
            for (t, &(k, _)) in all.iter().enumerate() {
                sides[t] = ps.orient_idx(u, v, k);
                if sides[t].is_zero() && t != a && t != b {
                    degenerate = true;
                }
            }
            if degenerate {
                continue;
            }
            for su in [Sign::Negative, Sign::Positive] {
                for sv in [Sign::Negative, Sign::Positive] {
                    sides[a] = su;
                    sides[b] = sv;
                    for side in [Sign::Positive, Sign::Negative] {
                        let on = |want_left: bool| {
                            all.iter().zip(&sides).filter(move |&(&(_, l), &s)| l == want_left && s == side).map(|(&(k, _), _)| k)
                        };
                        if on(true).count() == 2 && on(false).count() == 2 {
                            let cl: Vec<usize> = on(true).collect();
                            let cr: Vec<usize> = on(false).collect();
                            let line = realize(ps, u, v, su, sv)?;
                            return Some((line, [cl[0], cl[1]], [cr[0], cr[1]]));
                        }
                    }
                }
            }
        }
    }
    None
}

/// A line near the one through `u` and `v`, avoiding every point, with `u`
/// on side `su`, `v` on side `sv` and every other point keeping its side.
fn realize(ps: &PointSet, u: usize, v: usize, su: Sign, sv: Sign) -> Option<FrameLine> {
    let base = ps.raw_line_through(u, v);
    if su == sv {
        return Some(perturb::translate(&base, su, &BigInt::one()));
    }
    // The direction of the raw line points from v towards u.
    interior_fractions()
        .take(64)
        .find_map(|(num, den)| perturb::tilt(ps, &base, &Pivot::on_segment(ps, u, v, num, den), su))
}
