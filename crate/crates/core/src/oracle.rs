//! Brute-force ground truth for small hypercubes and for fixed-input sums.
//!
//! Written from the definitions alone: it shares no code with the encoder or the
//! hypercube verifier.

use thiserror::Error;

use crate::hypercube::{Dimension, Labeling};

pub const MAX_BRUTE_FORCE_DIMENSION: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("brute force limited to n <= {MAX_BRUTE_FORCE_DIMENSION} (got n = {0})")]
pub struct TooLarge(pub u32);

struct Search {
    n: u32,
    order: usize,
    /// Twice the magic constant, so odd `n(2^n − 1)` stays integral.
    double_magic: u64,
    labels: Vec<u32>,
    used: Vec<bool>,
    found: Vec<Vec<u32>>,
}

impl Search {
    fn adjacent(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).map(move |i| v ^ (1 << i))
    }

    /// Checks every vertex whose neighborhood is complete once `v` has been labeled, and
    /// that no partial neighbor sum already overshoots.
    fn consistent(&self, v: usize) -> bool {
        for u in self.adjacent(v) {
            let mut sum = 0u64;
            let mut complete = true;
            for w in self.adjacent(u) {
                if w <= v {
                    sum += self.labels[w] as u64;
                } else {
                    complete = false;
                }
            }
            if 2 * sum > self.double_magic || (complete && 2 * sum != self.double_magic) {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, v: usize) {
        if v == self.order {
            self.found.push(self.labels.clone());
            return;
        }
        for label in 0..self.order {
            if self.used[label] {
                continue;
            }
            self.used[label] = true;
            self.labels[v] = label as u32;
            if self.consistent(v) {
                self.extend(v + 1);
            }
            self.used[label] = false;
        }
    }
}

/// Every distance magic labeling of `Q_n` for `n <= 3`, in lexicographic order of the label
/// sequence. Empty when `n(2^n − 1)/2` is not an integer.
pub fn brute_force_dmls(n: Dimension) -> Result<Vec<Labeling>, TooLarge> {
    let n_raw = n.get();
    if n_raw > MAX_BRUTE_FORCE_DIMENSION {
        return Err(TooLarge(n_raw));
    }
    let order = 1usize << n_raw;
    let double_magic = n_raw as u64 * (order as u64 - 1);
    if double_magic % 2 == 1 {
        return Ok(Vec::new());
    }
    let mut search = Search {
        n: n_raw,
        order,
        double_magic,
        labels: vec![0; order],
        used: vec![false; order],
        found: Vec::new(),
    };
    search.extend(0);
    Ok(search
        .found
        .into_iter()
        .map(|labels| Labeling::new(n, labels).expect("labels in range"))
        .collect())
}

pub fn brute_force_sum_check(addends: &[u64], target: u64) -> bool {
    addends.iter().sum::<u64>() == target
}
