//! Set partitions of `[k]` in first-occurrence (restricted growth) form.

use serde::{Deserialize, Serialize};

/// A partition of `[k]`; `labels[ℓ]` is the block of ℓ, numbered by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetPartition {
    labels: Vec<u8>,
}

impl SetPartition {
    /// Canonical partition grouping equal values together.
    pub fn from_values<T: PartialEq>(values: &[T]) -> Self {
        let mut reps: Vec<&T> = Vec::with_capacity(values.len());
        let labels = values
            .iter()
            .map(|v| match reps.iter().position(|r| *r == v) {
                Some(p) => p as u8,
                None => {
                    reps.push(v);
                    (reps.len() - 1) as u8
                }
            })
            .collect();
        SetPartition { labels }
    }

    /// Accepts any labelling and canonicalizes it.
    pub fn from_labels(labels: &[u8]) -> Self {
        Self::from_values(labels)
    }

    /// All singletons.
    pub fn identity(k: usize) -> Self {
        SetPartition {
            labels: (0..k as u8).collect(),
        }
    }

    /// One block.
    pub fn trivial(k: usize) -> Self {
        SetPartition { labels: vec![0; k] }
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    pub fn is_identity(&self) -> bool {
        self.block_count() == self.labels.len()
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// Index of the first member of each block, in block order.
    pub fn representatives(&self) -> Vec<usize> {
        let mut reps = Vec::with_capacity(self.block_count());
        for (i, &l) in self.labels.iter().enumerate() {
            if l as usize == reps.len() {
                reps.push(i);
            }
        }
        reps
    }

    /// Blocks as sorted member lists.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(i);
        }
        blocks
    }

    /// Meet in the partition lattice: ℓ ~ m iff related in both.
    pub fn meet(&self, other: &SetPartition) -> SetPartition {
        let pairs: Vec<(u8, u8)> = self.labels.iter().zip(&other.labels).map(|(&a, &b)| (a, b)).collect();
        Self::from_values(&pairs)
    }
}

/// Every partition of `[k]`, in lexicographic order of restricted growth strings.
pub fn all_partitions(k: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    if k == 0 {
        out.push(SetPartition { labels: Vec::new() });
        return out;
    }
    let mut labels = vec![0u8; k];
    let mut maxes = vec![0u8; k];
    loop {
        out.push(SetPartition { labels: labels.clone() });
        // rightmost position that can still grow
        let mut i = k - 1;
        loop {
            if i == 0 {
                return out;
            }
            if labels[i] <= maxes[i - 1] {
                labels[i] += 1;
                break;
            }
            i -= 1;
        }
        maxes[i] = maxes[i - 1].max(labels[i]);
        for j in i + 1..k {
            labels[j] = 0;
            maxes[j] = maxes[i];
        }
    }
}

/// Bell number via the Bell triangle; `None` on overflow.
pub fn bell(k: usize) -> Option<u128> {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last.checked_add(*v)?);
        }
        row = next;
    }
    Some(row[0])
}

/// `a·(a−1)⋯(a−t+1)`; zero when `t > a`, `None` on overflow.
pub fn falling_factorial(a: u128, t: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..t as u128 {
        if i >= a {
            return Some(0);
        }
        acc = acc.checked_mul(a - i)?;
    }
    Some(acc)
}
