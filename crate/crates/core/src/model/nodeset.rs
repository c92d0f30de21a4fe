use std::fmt;

/// A set of node indices over a fixed universe, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    len: usize,
    words: Vec<u64>,
}

impl NodeSet {
    pub fn empty(len: usize) -> NodeSet {
        NodeSet { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> NodeSet {
        let mut s = NodeSet::empty(len);
        for n in 0..len {
            s.insert(n);
        }
        s
    }

    pub fn singleton(len: usize, n: usize) -> NodeSet {
        let mut s = NodeSet::empty(len);
        s.insert(n);
        s
    }

    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, n: usize) {
        assert!(n < self.len, "node {n} outside universe of {}", self.len);
        self.words[n / 64] |= 1 << (n % 64);
    }

    pub fn contains(&self, n: usize) -> bool {
        n < self.len && self.words[n / 64] & (1 << (n % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn complement(&self) -> NodeSet {
        let mut s = NodeSet::empty(self.len);
        for n in 0..self.len {
            if !self.contains(n) {
                s.insert(n);
            }
        }
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|n| self.contains(*n))
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
