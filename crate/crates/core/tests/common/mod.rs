#![allow(dead_code)]

use msvp::graph::Graph;
use msvp::Partition;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected weighted graph: a random spanning tree plus extra edges
/// with probability `p_extra`, weights uniform in [0.5, 5).
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p_extra: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((j, i, rng.random_range(0.5..5.0)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p_extra && !edges.iter().any(|&(a, b, _)| (a, b) == (i, j)) {
                edges.push((i, j, rng.random_range(0.5..5.0)));
            }
        }
    }
    Graph::from_edges(n, edges).expect("spanning tree makes it connected")
}

pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, max_groups: usize) -> Partition {
    let k = rng.random_range(1..=max_groups.min(n));
    Partition::from_labels((0..n).map(|_| rng.random_range(0..k)))
}

/// Every set partition of `n` nodes, via restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Partition>) {
        if prefix.len() == n {
            out.push(Partition::from_labels(prefix.iter().copied()));
            return;
        }
        let open = prefix.iter().max().map_or(0, |m| m + 1);
        for label in 0..=open {
            prefix.push(label);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}
