//! Group partition over instance indices.

use crate::error::{Error, Result};

/// Disjoint cover of {0..n-1} by protected-group membership, with the list
/// of unordered group pairs used by the fairness measures.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPartition {
    /// (group id, sorted member indices), ascending by id.
    index_sets: Vec<(u32, Vec<usize>)>,
    /// All unordered pairs (p, q) with p < q, in lexicographic order.
    pair_list: Vec<(u32, u32)>,
    n: usize,
}

impl GroupPartition {
    /// Number of instances covered.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct groups.
    pub fn n_groups(&self) -> usize {
        self.index_sets.len()
    }

    /// Number of unordered group pairs, |g|(|g|-1)/2.
    pub fn n_pairs(&self) -> usize {
        self.pair_list.len()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pair_list
    }

    pub fn groups(&self) -> impl Iterator<Item = (u32, &[usize])> {
        self.index_sets.iter().map(|(id, v)| (*id, v.as_slice()))
    }

    /// Member indices of a group id, if present.
    pub fn members(&self, id: u32) -> Option<&[usize]> {
        self.index_sets
            .iter()
            .find(|(g, _)| *g == id)
            .map(|(_, v)| v.as_slice())
    }
}

/// Partition instances by group id.
///
/// Index sets are sorted ascending and keyed by ascending group id, so the
/// partition (and everything derived from it) is deterministic.
pub fn partition_groups(groups: &[u32]) -> Result<GroupPartition> {
    if groups.is_empty() {
        return Err(Error::InvalidInput("empty group vector".into()));
    }
    let mut ids: Vec<u32> = groups.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::InvalidInput(
            "fairness undefined for one group".into(),
        ));
    }
    let mut index_sets: Vec<(u32, Vec<usize>)> =
        ids.iter().map(|id| (*id, Vec::new())).collect();
    for (i, g) in groups.iter().enumerate() {
        let pos = ids.binary_search(g).expect("id collected above");
        index_sets[pos].1.push(i);
    }
    let mut pair_list = Vec::with_capacity(ids.len() * (ids.len() - 1) / 2);
    for a in 0..ids.len() {
        for b in (a + 1)..ids.len() {
            pair_list.push((ids[a], ids[b]));
        }
    }
    Ok(GroupPartition {
        index_sets,
        pair_list,
        n: groups.len(),
    })
}
