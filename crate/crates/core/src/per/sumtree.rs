/// Binary tree over a power-of-two number of leaves where every internal
/// node holds the sum of its children. Unused leaves stay at zero.
#[derive(Clone, Debug)]
pub struct SumTree {
    leaves: usize,
    len: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        let leaves = capacity.max(1).next_power_of_two();
        SumTree {
            leaves,
            len: capacity,
            nodes: vec![0.0; 2 * leaves],
        }
    }

    pub fn capacity(&self) -> usize {
        self.len
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.nodes[self.leaves + i]
    }

    pub fn set(&mut self, i: usize, value: f64) {
        assert!(i < self.len, "leaf {i} out of range");
        let mut at = self.leaves + i;
        self.nodes[at] = value;
        while at > 1 {
            at /= 2;
            self.nodes[at] = self.nodes[2 * at] + self.nodes[2 * at + 1];
        }
    }

    /// Leaf whose cumulative interval contains `mass`. Only leaves with
    /// positive value are returned, so rounding at the right edge of the
    /// range cannot select an empty slot. Requires a positive total.
    pub fn find(&self, mut mass: f64) -> usize {
        debug_assert!(self.total() > 0.0);
        let mut at = 1;
        while at < self.leaves {
            let (left, right) = (self.nodes[2 * at], self.nodes[2 * at + 1]);
            if left > 0.0 && (mass < left || right <= 0.0) {
                at *= 2;
            } else {
                mass -= left;
                at = 2 * at + 1;
            }
        }
        at - self.leaves
    }

    /// Recomputes the root from the leaves in index order.
    pub fn leaf_sum(&self) -> f64 {
        self.nodes[self.leaves..self.leaves + self.len].iter().sum()
    }
}
