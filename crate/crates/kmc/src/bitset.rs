//! Fixed-capacity bit set over state indices.

/// A set of states represented as packed 64-bit blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    blocks: Vec<u64>,
    len: usize,
}

impl BitSet {
    /// Empty set with capacity for `len` elements.
    pub fn new(len: usize) -> Self {
        BitSet { blocks: vec![0; len.div_ceil(64)], len }
    }

    /// Set containing every element below `len`.
    pub fn full(len: usize) -> Self {
        let mut s = BitSet { blocks: vec![u64::MAX; len.div_ceil(64)], len };
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Inserts `i`; returns true if it was not already present.
    pub fn insert(&mut self, i: usize) -> bool {
        let (b, m) = (i / 64, 1u64 << (i % 64));
        let fresh = self.blocks[b] & m == 0;
        self.blocks[b] |= m;
        fresh
    }

    pub fn remove(&mut self, i: usize) {
        self.blocks[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.blocks[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    /// Complement within the capacity universe.
    pub fn complement(&self) -> BitSet {
        let mut out = BitSet {
            blocks: self.blocks.iter().map(|b| !b).collect(),
            len: self.len,
        };
        out.mask_tail();
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    /// Iterates set elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut rest = block;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bi * 64 + bit)
            })
        })
    }
}
