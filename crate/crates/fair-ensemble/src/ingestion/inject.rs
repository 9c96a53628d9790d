//! Synthetic protected-attribute injection.
//!
//! Sampling rule (one `gen::<f64>()` draw per instance, index order, from
//! `ChaCha8Rng::seed_from_u64(seed)`):
//!
//! - outlier: group 0 with probability p0 = (1 + bias*(v-1))/v, otherwise
//!   group 1 + floor((u - p0) / ((1 - p0)/(v-1))), clamped to v-1;
//! - inlier: group floor(u * v), clamped to v-1.
//!
//! bias = 0 makes both branches coincide (assignment independent of the
//! label); bias = 1 sends every outlier to group 0. A deterministic repair
//! pass afterwards moves one member out of the largest group into any group
//! the sampling left empty (preferring an inlier with the largest index),
//! so the result always satisfies the dataset invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{Dataset, OUTLIER};
use crate::error::{Error, Result};

pub fn synthesize_groups(
    labels: &[u8],
    v_groups: u32,
    bias_strength: f64,
    seed: u64,
) -> Result<Vec<u32>> {
    let n = labels.len();
    if v_groups < 2 {
        return Err(Error::InvalidConfig("injection needs v_groups >= 2".into()));
    }
    if v_groups as usize > n {
        return Err(Error::InvalidConfig(format!(
            "v_groups {v_groups} exceeds instance count {n}"
        )));
    }
    if !(0.0..=1.0).contains(&bias_strength) {
        return Err(Error::InvalidConfig(
            "bias_strength must lie in [0, 1]".into(),
        ));
    }

    let v = v_groups as f64;
    let p0 = (1.0 + bias_strength * (v - 1.0)) / v;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups = Vec::with_capacity(n);
    for &label in labels {
        let u: f64 = rng.gen();
        let g = if label == OUTLIER {
            if u < p0 || p0 >= 1.0 {
                0
            } else {
                let slot = 1.0 + (u - p0) / ((1.0 - p0) / (v - 1.0));
                (slot.floor() as u32).min(v_groups - 1)
            }
        } else {
            ((u * v).floor() as u32).min(v_groups - 1)
        };
        groups.push(g);
    }
    repair_empty_groups(&mut groups, labels, v_groups);
    Ok(groups)
}

fn repair_empty_groups(groups: &mut [u32], labels: &[u8], v_groups: u32) {
    for missing in 0..v_groups {
        if groups.contains(&missing) {
            continue;
        }
        let mut counts = vec![0usize; v_groups as usize];
        for &g in groups.iter() {
            counts[g as usize] += 1;
        }
        let largest = counts
            .iter()
            .enumerate()
            .max_by_key(|(id, c)| (**c, usize::MAX - id))
            .map(|(id, _)| id as u32)
            .expect("v_groups >= 2");
        let donor = groups
            .iter()
            .enumerate()
            .rev()
            .find(|(i, g)| **g == largest && labels[*i] != OUTLIER)
            .or_else(|| groups.iter().enumerate().rev().find(|(_, g)| **g == largest))
            .map(|(i, _)| i)
            .expect("largest group is non-empty");
        groups[donor] = missing;
    }
}

/// Replace the protected attribute of a labeled dataset with a seeded
/// synthetic one biased toward concentrating outliers in group 0.
pub fn inject_protected_attribute(
    dataset: &Dataset,
    v_groups: u32,
    bias_strength: f64,
    seed: u64,
) -> Result<Dataset> {
    let labels = dataset.labels().ok_or_else(|| {
        Error::InvalidInput("protected-attribute injection needs ground-truth labels".into())
    })?;
    let groups = synthesize_groups(labels, v_groups, bias_strength, seed)?;
    dataset.with_groups(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let labels: Vec<u8> = (0..200).map(|i| u8::from(i % 13 == 0)).collect();
        let a = synthesize_groups(&labels, 3, 0.6, 42).unwrap();
        let b = synthesize_groups(&labels, 3, 0.6, 42).unwrap();
        assert_eq!(a, b);
        let c = synthesize_groups(&labels, 3, 0.6, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn maximal_bias_sends_all_outliers_to_group_zero() {
        let labels: Vec<u8> = (0..100).map(|i| u8::from(i % 5 == 0)).collect();
        let groups = synthesize_groups(&labels, 2, 1.0, 7).unwrap();
        for (g, l) in groups.iter().zip(labels.iter()) {
            if *l == 1 {
                assert_eq!(*g, 0);
            }
        }
    }

    #[test]
    fn zero_bias_assignment_is_label_independent() {
        let labels_a: Vec<u8> = (0..150).map(|i| u8::from(i % 4 == 0)).collect();
        let labels_b: Vec<u8> = labels_a.iter().map(|l| 1 - l).collect();
        let ga = synthesize_groups(&labels_a, 4, 0.0, 99).unwrap();
        let gb = synthesize_groups(&labels_b, 4, 0.0, 99).unwrap();
        assert_eq!(ga, gb);
    }

    #[test]
    fn too_many_groups_rejected() {
        let labels = vec![0u8, 1];
        assert!(synthesize_groups(&labels, 3, 0.5, 1).is_err());
    }
}
