//! Sorted sparse vector used for eligibility traces.
//!
//! Entries are kept in ascending index order so every reduction over the
//! trace visits weights in a fixed order, which keeps floating-point results
//! independent of update scheduling.

/// Entries with magnitude at or below this are dropped when decaying.
const PRUNE_EPS: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec {
    entries: Vec<(u32, f64)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Ascending-index iteration over nonzero entries.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Multiplies every entry by `factor`, dropping entries that fall below
    /// the pruning threshold. `factor == 0` clears the vector.
    pub fn scale(&mut self, factor: f64) {
        if factor == 0.0 {
            self.entries.clear();
            return;
        }
        for (_, v) in self.entries.iter_mut() {
            *v *= factor;
        }
        self.entries.retain(|&(_, v)| v.abs() > PRUNE_EPS);
    }

    /// Adds 1.0 at each of `indices` (sorted, unique), merging into the
    /// existing entries.
    pub fn add_unit_at(&mut self, indices: &[u32]) {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let old = std::mem::take(&mut self.entries);
        self.entries.reserve(old.len() + indices.len());
        let mut it_old = old.into_iter().peekable();
        let mut it_new = indices.iter().copied().peekable();
        loop {
            match (it_old.peek().copied(), it_new.peek().copied()) {
                (Some((i, v)), Some(j)) if i == j => {
                    self.entries.push((i, v + 1.0));
                    it_old.next();
                    it_new.next();
                }
                (Some((i, v)), Some(j)) if i < j => {
                    self.entries.push((i, v));
                    it_old.next();
                }
                (Some(_), Some(j)) => {
                    self.entries.push((j, 1.0));
                    it_new.next();
                }
                (Some((i, v)), None) => {
                    self.entries.push((i, v));
                    it_old.next();
                }
                (None, Some(j)) => {
                    self.entries.push((j, 1.0));
                    it_new.next();
                }
                (None, None) => break,
            }
        }
    }

    /// Dot product against a dense vector.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| v * dense[i as usize])
            .sum()
    }

    /// Materializes into a dense vector of length `dim`.
    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_sorted_order() {
        let mut v = SparseVec::new();
        v.add_unit_at(&[2, 5, 9]);
        v.scale(0.5);
        v.add_unit_at(&[1, 5, 10]);
        let got: Vec<(u32, f64)> = v.iter().collect();
        assert_eq!(
            got,
            vec![(1, 1.0), (2, 0.5), (5, 1.5), (9, 0.5), (10, 1.0)]
        );
    }

    #[test]
    fn scale_by_zero_clears() {
        let mut v = SparseVec::new();
        v.add_unit_at(&[0, 3]);
        v.scale(0.0);
        assert!(v.is_empty());
    }

    #[test]
    fn tiny_entries_are_pruned() {
        let mut v = SparseVec::new();
        v.add_unit_at(&[4]);
        for _ in 0..200 {
            v.scale(0.5);
        }
        assert!(v.is_empty());
    }

    #[test]
    fn dot_matches_dense() {
        let mut v = SparseVec::new();
        v.add_unit_at(&[1, 3]);
        v.scale(2.0);
        v.add_unit_at(&[3, 4]);
        let dense = [1.0, 10.0, 100.0, 1000.0, 10000.0];
        assert_eq!(v.dot(&dense), 2.0 * 10.0 + 3.0 * 1000.0 + 10000.0);
    }
}
