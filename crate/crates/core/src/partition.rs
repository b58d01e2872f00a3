//! Hard partitions of a node set into non-overlapping groups.

use serde::{Deserialize, Serialize};

/// Assignment of every node to exactly one group.
///
/// Labels are always canonical: groups are numbered `0..num_groups` in order
/// of first appearance, so two `Partition`s compare equal iff they describe
/// the same set partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    labels: Vec<usize>,
    num_groups: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, canonicalising them.
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        let mut remap = std::collections::HashMap::new();
        let labels: Vec<usize> = labels
            .into_iter()
            .map(|raw| {
                let next = remap.len();
                *remap.entry(raw).or_insert(next)
            })
            .collect();
        Self {
            num_groups: remap.len(),
            labels,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            num_groups: n,
        }
    }

    pub fn all_in_one(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            num_groups: usize::from(n > 0),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    /// Number of nodes covered.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Member lists, indexed by group label, each in ascending node order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_groups];
        for (node, &label) in self.labels.iter().enumerate() {
            groups[label].push(node);
        }
        groups
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &label in &self.labels {
            sizes[label] += 1;
        }
        sizes
    }

    /// True if `self` can be obtained by merging groups of `finer`.
    pub fn is_coarsening_of(&self, finer: &Partition) -> bool {
        if self.len() != finer.len() {
            return false;
        }
        let mut image = vec![None; finer.num_groups];
        for (&fine, &coarse) in finer.labels.iter().zip(&self.labels) {
            match image[fine] {
                None => image[fine] = Some(coarse),
                Some(existing) if existing != coarse => return false,
                Some(_) => {}
            }
        }
        true
    }
}

impl From<Vec<usize>> for Partition {
    fn from(labels: Vec<usize>) -> Self {
        Self::from_labels(labels)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.labels
    }
}
