use alloc::vec::Vec;

use super::PairId;

/// Partition refinement of point indices by successive keys.
///
/// Only classes with at least two members are kept; a class of size one is
/// already separated from everything else.
#[derive(Clone, Debug)]
pub(crate) struct Refinement {
    members: Vec<u32>,
    groups: Vec<(u32, u32)>,
    buf: Vec<(u64, u32)>,
    next: Vec<(u32, u32)>,
}

impl Refinement {
    pub fn new(n: usize) -> Refinement {
        Refinement {
            members: (0..n as u32).collect(),
            groups: if n >= 2 { alloc::vec![(0, n as u32)] } else { Vec::new() },
            buf: Vec::new(),
            next: Vec::new(),
        }
    }

    pub fn is_done(&self) -> bool {
        self.groups.is_empty()
    }

    /// Split every class by `key(point)`.
    pub fn split_by<F: FnMut(usize) -> u64>(&mut self, mut key: F) {
        self.next.clear();
        for &(s, e) in &self.groups {
            let slice = &mut self.members[s as usize..e as usize];
            self.buf.clear();
            self.buf.extend(slice.iter().map(|&m| (key(m as usize), m)));
            let first = self.buf[0].0;
            if self.buf.iter().all(|&(k, _)| k == first) {
                self.next.push((s, e));
                continue;
            }
            self.buf.sort_unstable();
            let mut start = 0usize;
            for t in 0..self.buf.len() {
                slice[t] = self.buf[t].1;
                if t + 1 == self.buf.len() || self.buf[t + 1].0 != self.buf[t].0 {
                    if t + 1 - start >= 2 {
                        self.next.push((s + start as u32, s + t as u32 + 1));
                    }
                    start = t + 1;
                }
            }
        }
        core::mem::swap(&mut self.groups, &mut self.next);
    }

    /// The two smallest members of the class holding the smallest index.
    pub fn first_pair(&self) -> Option<PairId> {
        self.groups
            .iter()
            .map(|&(s, _)| {
                let g = &self.members[s as usize..];
                PairId::new(g[0] as usize, g[1] as usize)
            })
            .min()
    }

    pub fn classes(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.groups.iter().map(|&(s, e)| &self.members[s as usize..e as usize])
    }
}
