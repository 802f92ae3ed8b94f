//! Constraint families with independence oracles: uniform matroid, partition
//! matroid, and the group knapsack.
//!
//! Uniform and partition kinds are matroids (downward closed + exchange).
//! The knapsack kind is downward closed but can violate exchange, which is
//! why knapsack selection goes through partial enumeration rather than the
//! plain matroid greedy.

use crate::error::{Error, Result};
use crate::gaussian::SupportSet;

/// Disjoint groups `G_1 … G_r` over `[0, d)` with per-group costs. Default
/// costs are the group cardinalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupStructure {
    dim: usize,
    groups: Vec<Vec<usize>>,
    costs: Vec<usize>,
}

impl GroupStructure {
    /// Builds a structure with cardinality costs `c_i = |G_i|`.
    pub fn new(dim: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let costs = groups.iter().map(Vec::len).collect();
        Self::with_costs(dim, groups, costs)
    }

    /// Builds a structure with explicit positive costs.
    pub fn with_costs(dim: usize, mut groups: Vec<Vec<usize>>, costs: Vec<usize>) -> Result<Self> {
        if costs.len() != groups.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} groups but {} costs",
                groups.len(),
                costs.len()
            )));
        }
        if costs.iter().any(|&c| c == 0) {
            return Err(Error::NonPositiveCost);
        }
        let mut seen = vec![false; dim];
        for group in &mut groups {
            if group.is_empty() {
                return Err(Error::EmptyGroup);
            }
            group.sort_unstable();
            for &i in group.iter() {
                if i >= dim {
                    return Err(Error::IndexOutOfRange { index: i, dim });
                }
                if seen[i] {
                    return Err(Error::OverlappingGroups { index: i });
                }
                seen[i] = true;
            }
        }
        Ok(Self { dim, groups, costs })
    }

    /// Consecutive blocks of `size` covering `[0, d)`; the last block may be
    /// shorter.
    pub fn uniform_blocks(dim: usize, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("block size must be positive".into()));
        }
        let groups = (0..dim)
            .step_by(size)
            .map(|start| (start..(start + size).min(dim)).collect())
            .collect();
        Self::new(dim, groups)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn members(&self, id: usize) -> Result<&[usize]> {
        self.groups
            .get(id)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownGroup { id, count: self.groups.len() })
    }

    pub fn cost_of(&self, id: usize) -> Result<usize> {
        self.costs
            .get(id)
            .copied()
            .ok_or(Error::UnknownGroup { id, count: self.groups.len() })
    }

    pub fn costs(&self) -> &[usize] {
        &self.costs
    }

    /// Total cost of a set of group ids; `cost(∅) = 0`.
    pub fn cost(&self, ids: &[usize]) -> Result<usize> {
        let mut total = 0;
        let mut seen = vec![false; self.groups.len()];
        for &id in ids {
            if id >= self.groups.len() {
                return Err(Error::UnknownGroup { id, count: self.groups.len() });
            }
            if !seen[id] {
                seen[id] = true;
                total += self.costs[id];
            }
        }
        Ok(total)
    }

    /// Union of the member index sets, sorted.
    pub fn expand(&self, ids: &[usize]) -> Result<SupportSet> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.groups.len()];
        for &id in ids {
            if id >= self.groups.len() {
                return Err(Error::UnknownGroup { id, count: self.groups.len() });
            }
            if !seen[id] {
                seen[id] = true;
                out.extend_from_slice(&self.groups[id]);
            }
        }
        out.sort_unstable();
        Ok(SupportSet::from_sorted_unchecked(out))
    }
}

/// A partition of `[0, d)` into views with per-view selection caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionConstraint {
    views: Vec<Vec<usize>>,
    caps: Vec<usize>,
    view_of: Vec<usize>,
}

impl PartitionConstraint {
    /// Views must be disjoint and exhaustive over `[0, ground)`.
    pub fn new(ground: usize, mut views: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if views.len() != caps.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} views but {} caps",
                views.len(),
                caps.len()
            )));
        }
        let mut view_of = vec![usize::MAX; ground];
        for (v, view) in views.iter_mut().enumerate() {
            view.sort_unstable();
            for &i in view.iter() {
                if i >= ground {
                    return Err(Error::IndexOutOfRange { index: i, dim: ground });
                }
                if view_of[i] != usize::MAX {
                    return Err(Error::OverlappingViews { element: i });
                }
                view_of[i] = v;
            }
        }
        if let Some(e) = view_of.iter().position(|&v| v == usize::MAX) {
            return Err(Error::UnassignedElement { element: e });
        }
        Ok(Self { views, caps, view_of })
    }

    pub fn num_views(&self) -> usize {
        self.views.len()
    }

    pub fn views(&self) -> &[Vec<usize>] {
        &self.views
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn view_of(&self, element: usize) -> Result<usize> {
        self.view_of
            .get(element)
            .copied()
            .ok_or(Error::OutsideGround { element, ground: self.view_of.len() })
    }
}

/// Tagged union of the supported constraint families, each providing an
/// independence oracle over its ground set (`[d]` for uniform and partition,
/// `[r]` group ids for the knapsack).
#[derive(Clone, Debug)]
pub enum SupportConstraint {
    Uniform { ground: usize, max_size: usize },
    Partition(PartitionConstraint),
    GroupKnapsack { groups: GroupStructure, budget: usize },
}

impl SupportConstraint {
    pub fn uniform(ground: usize, max_size: usize) -> Self {
        Self::Uniform { ground, max_size }
    }

    pub fn partition(ground: usize, views: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        Ok(Self::Partition(PartitionConstraint::new(ground, views, caps)?))
    }

    pub fn knapsack(groups: GroupStructure, budget: usize) -> Self {
        Self::GroupKnapsack { groups, budget }
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Self::Uniform { ground, .. } => *ground,
            Self::Partition(p) => p.view_of.len(),
            Self::GroupKnapsack { groups, .. } => groups.num_groups(),
        }
    }

    /// True iff `set` is independent. Elements are deduplicated, so the check
    /// is on the underlying set.
    pub fn is_independent(&self, set: &[usize]) -> Result<bool> {
        let ground = self.ground_size();
        let mut seen = vec![false; ground];
        let mut unique = Vec::with_capacity(set.len());
        for &e in set {
            if e >= ground {
                return Err(Error::OutsideGround { element: e, ground });
            }
            if !seen[e] {
                seen[e] = true;
                unique.push(e);
            }
        }
        match self {
            Self::Uniform { max_size, .. } => Ok(unique.len() <= *max_size),
            Self::Partition(p) => {
                let mut counts = vec![0usize; p.caps.len()];
                for &e in &unique {
                    let v = p.view_of[e];
                    counts[v] += 1;
                    if counts[v] > p.caps[v] {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Self::GroupKnapsack { groups, budget } => {
                let total: usize = unique.iter().map(|&id| groups.costs[id]).sum();
                Ok(total <= *budget)
            }
        }
    }
}
