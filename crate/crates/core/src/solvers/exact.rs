use alloc::vec;
use alloc::vec::Vec;

use super::family::Family;
use crate::geom::CanonicalLine;
use crate::sepsys::{candidate_lines, PointSet, SeparationMode};
use crate::{Error, Result};

/// Largest input accepted by [`exact_separability`].
pub const EXACT_CAP: usize = 14;

/// Most points that `r` lines can tell apart.
pub fn max_cells(r: usize, mode: SeparationMode) -> usize {
    match mode {
        // faces of an arrangement
        SeparationMode::Strict => 1 + r * (r + 1) / 2,
        // faces, edges and vertices
        SeparationMode::Relaxed => 1 + 2 * r * r,
    }
}

/// Smallest `r` with `max_cells(r) >= m`.
pub fn cell_bound(m: usize, mode: SeparationMode) -> usize {
    (0..).find(|&r| max_cells(r, mode) >= m).unwrap_or(0)
}

struct Search {
    n: usize,
    mode: SeparationMode,
    masks: Vec<u128>,
    covers: Vec<Vec<u16>>,
    forbidden: Vec<bool>,
    chosen: Vec<usize>,
    nodes: u64,
}

impl Search {
    fn largest_class(&self, uncovered: u128) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut bit = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if uncovered >> bit & 1 == 1 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                bit += 1;
            }
        }
        let mut size = vec![0usize; self.n];
        for i in 0..self.n {
            let r = find(&mut parent, i);
            size[r] += 1;
        }
        size.into_iter().max().unwrap_or(1)
    }

    fn allowed_covers(&self, bit: usize) -> impl Iterator<Item = usize> + '_ {
        self.covers[bit].iter().map(|&s| s as usize).filter(|&s| !self.forbidden[s])
    }

    /// Pairs no two of which share an allowed set; each needs its own line.
    fn packing_bound(&self, uncovered: u128) -> usize {
        let mut bits: Vec<(usize, usize)> = (0..128)
            .filter(|&b| uncovered >> b & 1 == 1)
            .map(|b| (self.allowed_covers(b).count(), b))
            .collect();
        bits.sort_unstable();
        let mut used = vec![false; self.masks.len()];
        let mut q = 0;
        for (_, b) in bits {
            if self.allowed_covers(b).all(|s| !used[s]) {
                q += 1;
                for s in self.allowed_covers(b).collect::<Vec<_>>() {
                    used[s] = true;
                }
            }
        }
        q
    }

    fn dfs(&mut self, uncovered: u128, budget: usize) -> bool {
        self.nodes += 1;
        if uncovered == 0 {
            return true;
        }
        if budget == 0 {
            return false;
        }
        if cell_bound(self.largest_class(uncovered), self.mode) > budget {
            return false;
        }
        if self.packing_bound(uncovered) > budget {
            return false;
        }
        // Fail first: the pair with the fewest remaining options.
        let mut best: Option<(usize, usize)> = None;
        for b in (0..128).filter(|&b| uncovered >> b & 1 == 1) {
            let c = self.allowed_covers(b).count();
            if c == 0 {
                return false;
            }
            if best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, b));
            }
        }
        let (_, bit) = best.expect("some pair is uncovered");
        let mut options: Vec<usize> = self.allowed_covers(bit).collect();
        options.sort_by_key(|&s| core::cmp::Reverse((self.masks[s] & uncovered).count_ones()));
        let mut banned = Vec::new();
        let mut found = false;
        for s in options {
            self.chosen.push(s);
            if self.dfs(uncovered & !self.masks[s], budget - 1) {
                found = true;
                break;
            }
            self.chosen.pop();
            self.forbidden[s] = true;
            banned.push(s);
        }
        for s in banned {
            self.forbidden[s] = false;
        }
        found
    }
}

/// Greedy cover of all pairs by masks; an upper bound for the search.
fn greedy_masks(masks: &[u128], full: u128) -> Vec<usize> {
    let mut left = full;
    let mut out = Vec::new();
    while left != 0 {
        let (s, _) = masks
            .iter()
            .enumerate()
            .map(|(s, &m)| (s, (m & left).count_ones()))
            .max_by_key(|&(s, c)| (c, core::cmp::Reverse(s)))
            .expect("masks cover all pairs");
        out.push(s);
        left &= !masks[s];
    }
    out
}

/// Minimum number of lines separating `ps` under `mode`, with a witness.
///
/// Branch and bound over the candidate set cover, deepening the budget from
/// a lower bound until a cover is found.
pub fn exact_separability(ps: &PointSet, mode: SeparationMode) -> Result<(usize, Vec<CanonicalLine>)> {
    let n = ps.len();
    if n > EXACT_CAP {
        return Err(Error::SizeCap { cap: EXACT_CAP, got: n });
    }
    let cands = candidate_lines(ps)?;
    let fam = Family::new(ps, &cands, mode);
    let pairs = n * (n - 1) / 2;
    let full: u128 = if pairs == 128 { u128::MAX } else { (1u128 << pairs) - 1 };

    // Distinct, non-dominated masks.
    let mut raw: Vec<(u128, usize)> = (0..fam.len()).map(|i| (fam.mask(i), i)).filter(|&(m, _)| m != 0).collect();
    raw.sort_by_key(|&(m, i)| (core::cmp::Reverse(m.count_ones()), m, i));
    raw.dedup_by_key(|(m, _)| *m);
    let mut kept: Vec<(u128, usize)> = Vec::new();
    for (m, i) in raw {
        if !kept.iter().any(|&(k, _)| k & m == m) {
            kept.push((m, i));
        }
    }
    let masks: Vec<u128> = kept.iter().map(|&(m, _)| m).collect();
    let mut covers = vec![Vec::new(); 128];
    for (s, &m) in masks.iter().enumerate() {
        for (b, c) in covers.iter_mut().enumerate() {
            if m >> b & 1 == 1 {
                c.push(s as u16);
            }
        }
    }
    let upper = greedy_masks(&masks, full);
    let mut search = Search {
        n,
        mode,
        forbidden: vec![false; masks.len()],
        masks,
        covers,
        chosen: Vec::new(),
        nodes: 0,
    };
    let lower = cell_bound(n, mode);
    let mut best = upper;
    for k in lower..best.len() {
        search.chosen.clear();
        if search.dfs(full, k) {
            best = search.chosen.clone();
            break;
        }
    }
    log::debug!("exact search: {} nodes, sigma = {}", search.nodes, best.len());
    let lines: Vec<CanonicalLine> = best.iter().map(|&s| fam.realize(kept[s].1)).collect();
    super::assert_separates(ps, &lines, mode)?;
    Ok((lines.len(), lines))
}
