//! Abstract monotone set objectives with a marginal-gain interface.
//!
//! The greedy solvers only see this trait. Gains are evaluated against a
//! shared immutable state, so distinct candidates can be scored in parallel;
//! accepting a candidate produces a fresh state via [`SetObjective::extend`].

use crate::constraints::GroupStructure;
use crate::error::{Error, Result};
use crate::gaussian::{self, GainState, GaussianDensity, SupportSet};

pub trait SetObjective: Sync {
    type State: Clone + Send + Sync;

    /// Number of elements in the ground set.
    fn ground_size(&self) -> usize;

    /// State for the empty selection.
    fn empty_state(&self) -> Self::State;

    /// `f(S ∪ {e}) − f(S)` where `S` is the selection held by `state`.
    fn gain(&self, state: &Self::State, element: usize) -> Result<f64>;

    /// State for `S ∪ {e}`.
    fn extend(&self, state: &Self::State, element: usize) -> Result<Self::State>;

    /// `f(S)` evaluated from scratch, independent of any incremental state.
    fn value(&self, set: &[usize]) -> Result<f64>;

    /// Monotone objectives accept every greedy winner; non-monotone ones skip
    /// negative gains.
    fn is_monotone(&self) -> bool {
        true
    }
}

/// `J̃` over single coordinates of a Gaussian density.
pub struct JtildeObjective<'a> {
    density: &'a GaussianDensity,
}

impl<'a> JtildeObjective<'a> {
    pub fn new(density: &'a GaussianDensity) -> Self {
        Self { density }
    }
}

impl SetObjective for JtildeObjective<'_> {
    type State = GainState;

    fn ground_size(&self) -> usize {
        self.density.dim()
    }

    fn empty_state(&self) -> GainState {
        GainState::empty()
    }

    fn gain(&self, state: &GainState, element: usize) -> Result<f64> {
        gaussian::block_gain(self.density, state, &[element])
    }

    fn extend(&self, state: &GainState, element: usize) -> Result<GainState> {
        Ok(gaussian::block_extend(self.density, state, &[element])?.1)
    }

    fn value(&self, set: &[usize]) -> Result<f64> {
        let s = SupportSet::new(set.to_vec())?;
        gaussian::objective_jtilde(self.density, &s)
    }
}

/// `J̃` over group ids: selecting a group selects all of its member
/// coordinates.
pub struct GroupJtildeObjective<'a> {
    density: &'a GaussianDensity,
    groups: &'a GroupStructure,
}

impl<'a> GroupJtildeObjective<'a> {
    pub fn new(density: &'a GaussianDensity, groups: &'a GroupStructure) -> Result<Self> {
        if groups.dim() != density.dim() {
            return Err(Error::DimensionMismatch(format!(
                "group structure over {} dims, density has {}",
                groups.dim(),
                density.dim()
            )));
        }
        Ok(Self { density, groups })
    }

    pub fn groups(&self) -> &GroupStructure {
        self.groups
    }
}

impl SetObjective for GroupJtildeObjective<'_> {
    type State = GainState;

    fn ground_size(&self) -> usize {
        self.groups.num_groups()
    }

    fn empty_state(&self) -> GainState {
        GainState::empty()
    }

    fn gain(&self, state: &GainState, element: usize) -> Result<f64> {
        gaussian::block_gain(self.density, state, self.groups.members(element)?)
    }

    fn extend(&self, state: &GainState, element: usize) -> Result<GainState> {
        Ok(gaussian::block_extend(self.density, state, self.groups.members(element)?).map(|r| r.1)?)
    }

    fn value(&self, set: &[usize]) -> Result<f64> {
        let support = self.groups.expand(set)?;
        gaussian::objective_jtilde(self.density, &support)
    }
}

/// Additive weights; the textbook sanity objective for greedy solvers.
pub struct ModularObjective {
    weights: Vec<f64>,
}

impl ModularObjective {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }
}

impl SetObjective for ModularObjective {
    type State = f64;

    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn empty_state(&self) -> f64 {
        0.0
    }

    fn gain(&self, _state: &f64, element: usize) -> Result<f64> {
        self.weights
            .get(element)
            .copied()
            .ok_or(Error::OutsideGround { element, ground: self.weights.len() })
    }

    fn extend(&self, state: &f64, element: usize) -> Result<f64> {
        Ok(state + self.gain(state, element)?)
    }

    fn value(&self, set: &[usize]) -> Result<f64> {
        set.iter().map(|&e| self.gain(&0.0, e)).sum()
    }

    fn is_monotone(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
    }
}
