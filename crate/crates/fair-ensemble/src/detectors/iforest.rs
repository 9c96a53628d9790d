//! Isolation Forest.
//!
//! Each tree isolates a subsample of at most 256 instances with random
//! axis-aligned splits; the anomaly score is 2^(-E[h(x)]/c(psi)) where h is
//! the path length (leaf size adjusted) and c the expected unsuccessful
//! BST search length. Deterministic given the seed.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{Dataset, Matrix};
use crate::error::{Error, Result};

const SUBSAMPLE_CAP: usize = 256;

enum Node {
    Leaf {
        size: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Expected path length of an unsuccessful search in a BST of m nodes,
/// using the harmonic-number approximation H(i) ~ ln(i) + Euler gamma.
pub fn average_path_length(m: usize) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    match m {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let m = m as f64;
            let harmonic = (m - 1.0).ln() + EULER_GAMMA;
            2.0 * harmonic - 2.0 * (m - 1.0) / m
        }
    }
}

fn build_node(
    feats: &Matrix,
    indices: &mut [usize],
    depth: usize,
    height_limit: usize,
    rng: &mut ChaCha8Rng,
) -> Node {
    if depth >= height_limit || indices.len() <= 1 {
        return Node::Leaf {
            size: indices.len(),
        };
    }
    // Splittable features: ones not constant over this node.
    let m = feats.cols();
    let mut candidates = Vec::with_capacity(m);
    for f in 0..m {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in indices.iter() {
            let v = feats.get(i, f);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi > lo {
            candidates.push((f, lo, hi));
        }
    }
    if candidates.is_empty() {
        return Node::Leaf {
            size: indices.len(),
        };
    }
    let (feature, lo, hi) = candidates[rng.gen_range(0..candidates.len())];
    let threshold = rng.gen_range(lo..hi);
    let split_at = partition_in_place(feats, indices, feature, threshold);
    let (left_idx, right_idx) = indices.split_at_mut(split_at);
    Node::Split {
        feature,
        threshold,
        left: Box::new(build_node(feats, left_idx, depth + 1, height_limit, rng)),
        right: Box::new(build_node(feats, right_idx, depth + 1, height_limit, rng)),
    }
}

/// Stable partition: indices with feature value < threshold first.
fn partition_in_place(feats: &Matrix, indices: &mut [usize], feature: usize, threshold: f64) -> usize {
    let left: Vec<usize> = indices
        .iter()
        .copied()
        .filter(|&i| feats.get(i, feature) < threshold)
        .collect();
    let right: Vec<usize> = indices
        .iter()
        .copied()
        .filter(|&i| feats.get(i, feature) >= threshold)
        .collect();
    let split = left.len();
    indices[..split].copy_from_slice(&left);
    indices[split..].copy_from_slice(&right);
    split
}

fn path_length(node: &Node, feats: &Matrix, i: usize, depth: usize) -> f64 {
    match node {
        Node::Leaf { size } => depth as f64 + average_path_length(*size),
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            if feats.get(i, *feature) < *threshold {
                path_length(left, feats, i, depth + 1)
            } else {
                path_length(right, feats, i, depth + 1)
            }
        }
    }
}

pub fn iforest_scores(dataset: &Dataset, n_trees: usize, seed: u64) -> Result<Vec<f64>> {
    if n_trees == 0 {
        return Err(Error::InvalidConfig("iforest requires n_trees >= 1".into()));
    }
    let n = dataset.n();
    let feats = dataset.features();
    let subsample = n.min(SUBSAMPLE_CAP);
    let height_limit = (subsample as f64).log2().ceil() as usize;
    // Degenerate single instance: path length 0, score 2^0 = 1.
    let c_norm = if subsample <= 1 {
        1.0
    } else {
        average_path_length(subsample)
    };

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let tree_seeds: Vec<u64> = (0..n_trees).map(|_| master.next_u64()).collect();

    let mut mean_path = vec![0.0f64; n];
    for tree_seed in tree_seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
        let mut indices: Vec<usize> = rand::seq::index::sample(&mut rng, n, subsample).into_vec();
        let root = build_node(feats, &mut indices, 0, height_limit, &mut rng);
        for (i, acc) in mean_path.iter_mut().enumerate() {
            *acc += path_length(&root, feats, i, 0);
        }
    }
    let trees = n_trees as f64;
    Ok(mean_path
        .into_iter()
        .map(|total| {
            let expected = total / trees;
            2.0f64.powf(-expected / c_norm)
        })
        .collect())
}
