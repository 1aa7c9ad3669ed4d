//! Weight-balanced search trees in an arena, updated by path copying.
//!
//! Every update returns a new root and leaves all earlier roots valid, so a
//! root index is a snapshot. Balance parameters are `delta = 3`,
//! `ratio = 2`.

use alloc::vec::Vec;

pub(crate) const NIL: u32 = u32::MAX;
const DELTA: u64 = 3;
const RATIO: u64 = 2;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Node {
    pub key: u64,
    pub own: f64,
    pub left: u32,
    pub right: u32,
    pub size: u32,
    pub mass: f64,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Arena {
    nodes: Vec<Node>,
}

impl Arena {
    pub fn new() -> Arena {
        Arena { nodes: Vec::new() }
    }

    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn get(&self, t: u32) -> &Node {
        &self.nodes[t as usize]
    }

    #[inline]
    pub fn size(&self, t: u32) -> u64 {
        if t == NIL { 0 } else { self.nodes[t as usize].size as u64 }
    }

    #[inline]
    pub fn mass(&self, t: u32) -> f64 {
        if t == NIL { 0.0 } else { self.nodes[t as usize].mass }
    }

    fn node(&mut self, key: u64, own: f64, left: u32, right: u32) -> u32 {
        let size = 1 + self.size(left) as u32 + self.size(right) as u32;
        let mass = own + self.mass(left) + self.mass(right);
        self.nodes.push(Node { key, own, left, right, size, mass });
        (self.nodes.len() - 1) as u32
    }

    fn balance(&mut self, key: u64, own: f64, l: u32, r: u32) -> u32 {
        let (sl, sr) = (self.size(l), self.size(r));
        if sl + sr <= 1 {
            self.node(key, own, l, r)
        } else if sr > DELTA * sl {
            let rn = *self.get(r);
            if self.size(rn.left) < RATIO * self.size(rn.right) {
                let inner = self.node(key, own, l, rn.left);
                self.node(rn.key, rn.own, inner, rn.right)
            } else {
                let rl = *self.get(rn.left);
                let a = self.node(key, own, l, rl.left);
                let b = self.node(rn.key, rn.own, rl.right, rn.right);
                self.node(rl.key, rl.own, a, b)
            }
        } else if sl > DELTA * sr {
            let ln = *self.get(l);
            if self.size(ln.right) < RATIO * self.size(ln.left) {
                let inner = self.node(key, own, ln.right, r);
                self.node(ln.key, ln.own, ln.left, inner)
            } else {
                let lr = *self.get(ln.right);
                let a = self.node(ln.key, ln.own, ln.left, lr.left);
                let b = self.node(key, own, lr.right, r);
                self.node(lr.key, lr.own, a, b)
            }
        } else {
            self.node(key, own, l, r)
        }
    }

    /// Insert or replace `key` with weight `own`.
    pub fn insert(&mut self, t: u32, key: u64, own: f64) -> u32 {
        if t == NIL {
            return self.node(key, own, NIL, NIL);
        }
        let n = *self.get(t);
        if key < n.key {
            let l = self.insert(n.left, key, own);
            self.balance(n.key, n.own, l, n.right)
        } else if key > n.key {
            let r = self.insert(n.right, key, own);
            self.balance(n.key, n.own, n.left, r)
        } else {
            self.node(key, own, n.left, n.right)
        }
    }

    fn remove_min(&mut self, t: u32) -> (Node, u32) {
        let n = *self.get(t);
        if n.left == NIL {
            return (n, n.right);
        }
        let (m, l) = self.remove_min(n.left);
        (m, self.balance(n.key, n.own, l, n.right))
    }

    fn remove_max(&mut self, t: u32) -> (Node, u32) {
        let n = *self.get(t);
        if n.right == NIL {
            return (n, n.left);
        }
        let (m, r) = self.remove_max(n.right);
        (m, self.balance(n.key, n.own, n.left, r))
    }

    fn glue(&mut self, l: u32, r: u32) -> u32 {
        if l == NIL {
            return r;
        }
        if r == NIL {
            return l;
        }
        if self.size(l) > self.size(r) {
            let (m, l2) = self.remove_max(l);
            self.balance(m.key, m.own, l2, r)
        } else {
            let (m, r2) = self.remove_min(r);
            self.balance(m.key, m.own, l, r2)
        }
    }

    /// Remove `key` if present.
    pub fn remove(&mut self, t: u32, key: u64) -> u32 {
        if t == NIL {
            return NIL;
        }
        let n = *self.get(t);
        if key < n.key {
            let l = self.remove(n.left, key);
            self.balance(n.key, n.own, l, n.right)
        } else if key > n.key {
            let r = self.remove(n.right, key);
            self.balance(n.key, n.own, n.left, r)
        } else {
            self.glue(n.left, n.right)
        }
    }

    pub fn find(&self, mut t: u32, key: u64) -> Option<&Node> {
        while t != NIL {
            let n = self.get(t);
            if key < n.key {
                t = n.left;
            } else if key > n.key {
                t = n.right;
            } else {
                return Some(n);
            }
        }
        None
    }

    /// Number of keys strictly below `key`.
    pub fn rank(&self, mut t: u32, key: u64) -> u64 {
        let mut r = 0;
        while t != NIL {
            let n = self.get(t);
            if key <= n.key {
                t = n.left;
            } else {
                r += self.size(n.left) + 1;
                t = n.right;
            }
        }
        r
    }

    /// The `i`-th smallest key (0-based).
    pub fn select(&self, mut t: u32, mut i: u64) -> Option<u64> {
        while t != NIL {
            let n = self.get(t);
            let sl = self.size(n.left);
            if i < sl {
                t = n.left;
            } else if i == sl {
                return Some(n.key);
            } else {
                i -= sl + 1;
                t = n.right;
            }
        }
        None
    }

    /// Walk down from the root with `u` in `[0, mass)`, returning the node
    /// whose own weight interval contains `u`.
    pub fn descend(&self, mut t: u32, mut u: f64) -> Option<&Node> {
        let mut last = None;
        while t != NIL {
            let n = self.get(t);
            let ml = self.mass(n.left);
            if u < ml && n.left != NIL {
                t = n.left;
                continue;
            }
            u -= ml;
            if n.own > 0.0 {
                last = Some(n);
            }
            if u < n.own {
                return Some(n);
            }
            u -= n.own;
            t = n.right;
        }
        // Rounding pushed u past the end: take the last positive node seen.
        last
    }

    pub fn keys(&self, t: u32, out: &mut Vec<(u64, f64)>) {
        if t == NIL {
            return;
        }
        let n = *self.get(t);
        self.keys(n.left, out);
        out.push((n.key, n.own));
        self.keys(n.right, out);
    }

    /// `true` iff every node of `t` satisfies the balance and size invariants.
    #[cfg(test)]
    pub fn check(&self, t: u32) -> bool {
        if t == NIL {
            return true;
        }
        let n = self.get(t);
        let (sl, sr) = (self.size(n.left), self.size(n.right));
        let balanced = sl + sr <= 1 || (sl <= DELTA * sr && sr <= DELTA * sl);
        balanced && n.size as u64 == sl + sr + 1 && self.check(n.left) && self.check(n.right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matches_btreeset(ops in proptest::collection::vec((any::<bool>(), 0u64..64), 1..200)) {
            let mut a = Arena::new();
            let mut root = NIL;
            let mut model = BTreeSet::new();
            let mut versions = Vec::new();
            for (ins, k) in ops {
                versions.push((root, model.clone()));
                if ins {
                    root = a.insert(root, k, 1.0);
                    model.insert(k);
                } else {
                    root = a.remove(root, k);
                    model.remove(&k);
                }
                prop_assert!(a.check(root));
                prop_assert_eq!(a.size(root), model.len() as u64);
            }
            // Every snapshot still answers as it did.
            for (r, m) in versions {
                let keys: Vec<u64> = m.iter().copied().collect();
                for (i, &k) in keys.iter().enumerate() {
                    prop_assert_eq!(a.select(r, i as u64), Some(k));
                    prop_assert_eq!(a.rank(r, k), i as u64);
                }
                prop_assert_eq!(a.select(r, keys.len() as u64), None);
                prop_assert_eq!(a.mass(r), keys.len() as f64);
            }
        }
    }
}
