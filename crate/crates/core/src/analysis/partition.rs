use std::collections::BTreeMap;

use serde::Serialize;

/// A partition of the graph indices `0..m` of a model into disjoint nonempty
/// blocks. Blocks are sorted internally and ordered by their smallest
/// member, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Groups indices by equal label.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        Self::from_blocks(groups.into_values().collect())
    }

    pub fn from_blocks(mut blocks: Vec<Vec<usize>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition { blocks }
    }

    pub fn single_block(m: usize) -> Self {
        Partition {
            blocks: vec![(0..m).collect()],
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block label of every element.
    pub fn labels(&self) -> Vec<usize> {
        let m = self.blocks.iter().map(Vec::len).sum();
        let mut labels = vec![0; m];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                labels[i] = b;
            }
        }
        labels
    }

    /// True iff every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let outer = coarser.labels();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| outer[i] == outer[b[0]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let a = Partition::from_labels(&[2, 0, 2, 1]);
        let b = Partition::from_blocks(vec![vec![3], vec![2, 0], vec![1]]);
        assert_eq!(a, b);
        assert_eq!(a.blocks(), &[vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn refinement_order() {
        let fine = Partition::from_labels(&[0, 1, 2, 3]);
        let mid = Partition::from_labels(&[0, 0, 1, 1]);
        let coarse = Partition::single_block(4);
        assert!(fine.refines(&mid));
        assert!(mid.refines(&coarse));
        assert!(!coarse.refines(&mid));
        assert!(mid.refines(&mid));
    }
}
