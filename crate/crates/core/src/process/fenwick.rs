/// Binary indexed tree over non-negative integer weights, with prefix-sum
/// search for weighted index sampling.
#[derive(Clone, Debug)]
pub(crate) struct Fenwick {
    tree: Vec<u64>,
    weights: Vec<u64>,
    total: u64,
    top_bit: usize,
}

impl Fenwick {
    pub fn new(len: usize) -> Self {
        let top_bit = if len == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - len.leading_zeros())
        };
        Fenwick {
            tree: vec![0; len + 1],
            weights: vec![0; len],
            total: 0,
            top_bit,
        }
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn set(&mut self, idx: usize, weight: u64) {
        let old = self.weights[idx];
        if old == weight {
            return;
        }
        self.weights[idx] = weight;
        self.total = self.total - old + weight;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] = self.tree[i] - old + weight;
            i += i & i.wrapping_neg();
        }
    }

    /// Index `k` such that `prefix(k) <= target < prefix(k + 1)`.
    /// Requires `target < total()`.
    pub fn find(&self, mut target: u64) -> usize {
        debug_assert!(target < self.total);
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}
