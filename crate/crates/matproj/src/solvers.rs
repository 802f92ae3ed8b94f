//! Greedy maximization of monotone set objectives under matroid and knapsack
//! constraints, plus an exhaustive oracle for approximation-ratio tests.
//!
//! All variants share one engine: per step, gains for the remaining
//! candidates are scored against a shared immutable state (in parallel when
//! the `parallel` feature and option are on), the best-key candidate is
//! picked with a fixed tie-break (lowest index on relative ties below
//! [`REL_TIE_TOL`]), added only if the constraint allows it, and removed from
//! the candidate pool regardless. Lazy evaluation keeps stale upper bounds in
//! a heap and re-scores only candidates that could still win the step; it is
//! valid for submodular objectives and produces the same selection, trace and
//! objective values as eager evaluation.

use std::collections::BinaryHeap;

use crate::constraints::{GroupStructure, PartitionConstraint, SupportConstraint};
use crate::error::{Error, Result};
use crate::objective::SetObjective;

/// Relative tolerance under which two candidate keys count as tied.
pub const REL_TIE_TOL: f64 = 1e-12;

/// Default cap on the number of sets [`brute_force_max`] will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Priority-queue gain evaluation (valid by submodularity). Off forces
    /// eager evaluation of every remaining candidate at every step.
    pub lazy: bool,
    /// Evaluate candidate gains in parallel. Ignored when the crate is built
    /// without the `parallel` feature. Never changes results.
    pub parallel: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self { lazy: false, parallel: true }
    }
}

/// One accepted greedy step.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub element: usize,
    pub gain: f64,
    /// Objective value after this step (telescoping sum of gains).
    pub objective: f64,
}

/// Outcome of a solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    /// Selected elements, sorted ascending.
    pub selected: Vec<usize>,
    /// Accepted steps in insertion order.
    pub trace: Vec<TraceStep>,
    pub objective_value: f64,
    /// Number of marginal-gain evaluations performed.
    pub evaluations: u64,
}

#[inline]
fn keys_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TIE_TOL * a.abs().max(b.abs())
}

fn map_gains<O: SetObjective>(
    obj: &O,
    state: &O::State,
    elements: &[usize],
    parallel: bool,
) -> Vec<Result<f64>> {
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return elements.par_iter().map(|&e| obj.gain(state, e)).collect();
        }
    }
    let _ = parallel;
    elements.iter().map(|&e| obj.gain(state, e)).collect()
}

#[derive(Clone, Copy)]
struct CacheEntry {
    version: u64,
    gain: f64,
}

struct HeapEntry {
    key: f64,
    element: usize,
    version: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.element == other.element
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on key, then min on element for a deterministic pop order.
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.element.cmp(&self.element))
    }
}

trait AcceptPolicy {
    /// Would the candidate be accepted right now? For every policy here,
    /// rejection is permanent (caps and spent cost only grow), so this also
    /// decides whether the candidate can ever be accepted.
    fn can_accept(&self, candidate: usize) -> Result<bool>;
    fn record(&mut self, candidate: usize);
}

struct MatroidPolicy<'a> {
    constraint: &'a SupportConstraint,
    current: Vec<usize>,
}

impl AcceptPolicy for MatroidPolicy<'_> {
    fn can_accept(&self, candidate: usize) -> Result<bool> {
        let mut t = self.current.clone();
        t.push(candidate);
        self.constraint.is_independent(&t)
    }
    fn record(&mut self, candidate: usize) {
        self.current.push(candidate);
    }
}

struct CounterPolicy {
    view_of: Vec<usize>,
    caps: Vec<usize>,
    counts: Vec<usize>,
}

impl AcceptPolicy for CounterPolicy {
    fn can_accept(&self, candidate: usize) -> Result<bool> {
        let v = *self
            .view_of
            .get(candidate)
            .ok_or(Error::UnassignedElement { element: candidate })?;
        Ok(self.counts[v] < self.caps[v])
    }
    fn record(&mut self, candidate: usize) {
        self.counts[self.view_of[candidate]] += 1;
    }
}

struct BudgetPolicy {
    costs: Vec<usize>,
    budget: usize,
    spent: usize,
}

impl AcceptPolicy for BudgetPolicy {
    fn can_accept(&self, candidate: usize) -> Result<bool> {
        Ok(self.spent + self.costs[candidate] <= self.budget)
    }
    fn record(&mut self, candidate: usize) {
        self.spent += self.costs[candidate];
    }
}

/// Selection key: the raw gain, or gain per unit cost for the re-weighted
/// greedy.
enum KeyRule {
    Gain,
    GainPerCost(Vec<f64>),
}

impl KeyRule {
    #[inline]
    fn key(&self, element: usize, gain: f64) -> f64 {
        match self {
            KeyRule::Gain => gain,
            KeyRule::GainPerCost(costs) => gain / costs[element],
        }
    }
}

struct Engine<'o, O: SetObjective> {
    obj: &'o O,
    state: O::State,
    remaining: Vec<usize>,
    cache: Vec<CacheEntry>,
    heap: BinaryHeap<HeapEntry>,
    version: u64,
    selected: Vec<usize>,
    trace: Vec<TraceStep>,
    objective_value: f64,
    evaluations: u64,
    key_rule: KeyRule,
    opts: GreedyOptions,
}

impl<'o, O: SetObjective> Engine<'o, O> {
    fn new(
        obj: &'o O,
        candidates: Vec<usize>,
        init: &[usize],
        key_rule: KeyRule,
        opts: GreedyOptions,
    ) -> Result<Self> {
        let ground = obj.ground_size();
        let mut engine = Self {
            obj,
            state: obj.empty_state(),
            remaining: candidates,
            cache: vec![CacheEntry { version: 0, gain: 0.0 }; ground],
            heap: BinaryHeap::new(),
            version: 1,
            selected: Vec::new(),
            trace: Vec::new(),
            objective_value: 0.0,
            evaluations: 0,
            key_rule,
            opts,
        };
        for &e in init {
            engine.accept(e)?;
        }
        if opts.lazy {
            engine.heap = engine
                .remaining
                .iter()
                .map(|&element| HeapEntry { key: f64::INFINITY, element, version: 0 })
                .collect();
        }
        Ok(engine)
    }

    fn wrap_objective_err(&self, element: usize, err: Error) -> Error {
        let mut set = self.selected.clone();
        set.push(element);
        set.sort_unstable();
        Error::ObjectiveEval { set, source: Box::new(err) }
    }

    fn accept(&mut self, element: usize) -> Result<()> {
        let gain = self
            .obj
            .gain(&self.state, element)
            .map_err(|e| self.wrap_objective_err(element, e))?;
        self.evaluations += 1;
        self.push_accept(element, gain)
    }

    fn push_accept(&mut self, element: usize, gain: f64) -> Result<()> {
        if !gain.is_finite() {
            let mut set = self.selected.clone();
            set.push(element);
            set.sort_unstable();
            return Err(Error::NonFiniteObjective { set });
        }
        self.state = self
            .obj
            .extend(&self.state, element)
            .map_err(|e| self.wrap_objective_err(element, e))?;
        let pos = self.selected.partition_point(|&x| x < element);
        self.selected.insert(pos, element);
        self.objective_value += gain;
        self.trace.push(TraceStep { element, gain, objective: self.objective_value });
        self.version += 1;
        Ok(())
    }

    /// Index-order scan with the relative tie rule: ties keep the earlier
    /// (lower) element.
    fn scan_best(entries: &[(usize, f64, f64)]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for &(element, gain, key) in entries {
            match best {
                None => best = Some((element, gain, key)),
                Some((_, _, bk)) => {
                    if !keys_tie(key, bk) && key > bk {
                        best = Some((element, gain, key));
                    }
                }
            }
        }
        best.map(|(e, g, _)| (e, g))
    }

    /// Eager winner: score every stale candidate, then scan in index order.
    fn pick_eager(&mut self) -> Result<Option<(usize, f64)>> {
        let stale: Vec<usize> = self
            .remaining
            .iter()
            .copied()
            .filter(|&e| self.cache[e].version != self.version)
            .collect();
        if !stale.is_empty() {
            let gains = map_gains(self.obj, &self.state, &stale, self.opts.parallel);
            self.evaluations += stale.len() as u64;
            for (&e, g) in stale.iter().zip(gains) {
                let g = g.map_err(|err| self.wrap_objective_err(e, err))?;
                if !g.is_finite() {
                    let mut set = self.selected.clone();
                    set.push(e);
                    set.sort_unstable();
                    return Err(Error::NonFiniteObjective { set });
                }
                self.cache[e] = CacheEntry { version: self.version, gain: g };
            }
        }
        let entries: Vec<(usize, f64, f64)> = self
            .remaining
            .iter()
            .map(|&e| {
                let gain = self.cache[e].gain;
                (e, gain, self.key_rule.key(e, gain))
            })
            .collect();
        Ok(Self::scan_best(&entries))
    }

    /// Lowest key of the tie-chain starting at the maximum (sorted keys
    /// linked while consecutive entries tie).
    fn chain_min(fresh: &[(usize, f64, f64)]) -> f64 {
        let mut keys: Vec<f64> = fresh.iter().map(|&(_, _, k)| k).collect();
        keys.sort_by(|a, b| b.total_cmp(a));
        let mut cm = keys[0];
        for &k in &keys[1..] {
            if keys_tie(k, cm) {
                cm = k;
            } else {
                break;
            }
        }
        cm
    }

    /// Lazy winner: pop stale bounds, re-score them, and stop once no
    /// remaining bound can reach the tie-chain of the current best. The
    /// fresh set then contains every candidate that could win the step, so
    /// the index-order scan matches eager evaluation exactly.
    fn pick_lazy(&mut self) -> Result<Option<(usize, f64)>> {
        let mut fresh: Vec<(usize, f64, f64)> = Vec::new();
        loop {
            let Some(top) = self.heap.peek() else { break };
            if !fresh.is_empty() {
                let cm = Self::chain_min(&fresh);
                let margin = 4.0 * REL_TIE_TOL * cm.abs().max(top.key.abs()) + f64::MIN_POSITIVE;
                if top.key < cm - margin {
                    break;
                }
            }
            let top = self.heap.pop().expect("peeked entry");
            if top.version == self.version {
                fresh.push((top.element, self.cache[top.element].gain, top.key));
            } else {
                let g = self
                    .obj
                    .gain(&self.state, top.element)
                    .map_err(|e| self.wrap_objective_err(top.element, e))?;
                self.evaluations += 1;
                if !g.is_finite() {
                    let mut set = self.selected.clone();
                    set.push(top.element);
                    set.sort_unstable();
                    return Err(Error::NonFiniteObjective { set });
                }
                self.cache[top.element] = CacheEntry { version: self.version, gain: g };
                self.heap.push(HeapEntry {
                    key: self.key_rule.key(top.element, g),
                    element: top.element,
                    version: self.version,
                });
            }
        }
        fresh.sort_by_key(|&(e, _, _)| e);
        let best = Self::scan_best(&fresh);
        if let Some((winner, _)) = best {
            for (element, _, key) in fresh {
                if element != winner {
                    self.heap.push(HeapEntry { key, element, version: self.version });
                }
            }
        }
        Ok(best)
    }

    fn remove_remaining(&mut self, element: usize) {
        if let Ok(pos) = self.remaining.binary_search(&element) {
            self.remaining.remove(pos);
        }
    }

    fn run<P: AcceptPolicy>(mut self, mut policy: P) -> Result<SelectionResult> {
        let monotone = self.obj.is_monotone();
        while !self.remaining.is_empty() {
            let mut any_acceptable = false;
            for &c in &self.remaining {
                if policy.can_accept(c)? {
                    any_acceptable = true;
                    break;
                }
            }
            if !any_acceptable {
                break;
            }
            let picked = if self.opts.lazy { self.pick_lazy()? } else { self.pick_eager()? };
            let Some((element, gain)) = picked else { break };
            let acceptable =
                policy.can_accept(element)? && (monotone || gain >= 0.0);
            self.remove_remaining(element);
            if acceptable {
                policy.record(element);
                self.push_accept(element, gain)?;
            }
        }
        Ok(SelectionResult {
            selected: self.selected,
            trace: self.trace,
            objective_value: self.objective_value,
            evaluations: self.evaluations,
        })
    }
}

/// Greedy selection over the enumeration of a uniform or partition matroid:
/// per step the globally best-gain candidate is picked, added only when
/// independence is preserved, and removed from the pool regardless.
/// Guarantees value at least half the optimum for matroid constraints, and
/// `1 − 1/e` of it under uniform (cardinality) constraints.
pub fn greedy_matroid<O: SetObjective>(
    obj: &O,
    constraint: &SupportConstraint,
    opts: GreedyOptions,
) -> Result<SelectionResult> {
    if matches!(constraint, SupportConstraint::GroupKnapsack { .. }) {
        return Err(Error::UnsupportedConstraint(
            "greedy_matroid requires a uniform or partition matroid; use greedy_partial_enum for knapsacks",
        ));
    }
    let ground = constraint.ground_size();
    if obj.ground_size() != ground {
        return Err(Error::DimensionMismatch(format!(
            "objective ground {} vs constraint ground {}",
            obj.ground_size(),
            ground
        )));
    }
    let engine = Engine::new(obj, (0..ground).collect(), &[], KeyRule::Gain, opts)?;
    engine.run(MatroidPolicy { constraint, current: Vec::new() })
}

/// Partition-matroid greedy that maintains per-view counters instead of
/// consulting a set-level oracle. Produces exactly the same selection as
/// [`greedy_matroid`] with the equivalent partition constraint.
pub fn greedy_multiview<O: SetObjective>(
    obj: &O,
    views: Vec<Vec<usize>>,
    caps: Vec<usize>,
    opts: GreedyOptions,
) -> Result<SelectionResult> {
    let ground = obj.ground_size();
    let partition = PartitionConstraint::new(ground, views, caps)?;
    let view_of: Vec<usize> = (0..ground).map(|e| partition.view_of(e)).collect::<Result<_>>()?;
    let policy = CounterPolicy {
        view_of,
        caps: partition.caps().to_vec(),
        counts: vec![0; partition.num_views()],
    };
    let engine = Engine::new(obj, (0..ground).collect(), &[], KeyRule::Gain, opts)?;
    engine.run(policy)
}

/// Cost-reweighted greedy over group ids: per step the best gain-per-cost
/// group is picked, added only while the budget allows, and removed from the
/// pool regardless. `init` seeds the selection and must be feasible.
pub fn reweighted_greedy<O: SetObjective>(
    obj: &O,
    groups: &GroupStructure,
    budget: usize,
    init: &[usize],
    opts: GreedyOptions,
) -> Result<SelectionResult> {
    let r = groups.num_groups();
    if obj.ground_size() != r {
        return Err(Error::DimensionMismatch(format!(
            "objective ground {} vs {} groups",
            obj.ground_size(),
            r
        )));
    }
    let mut seed: Vec<usize> = init.to_vec();
    seed.sort_unstable();
    seed.dedup();
    let spent = groups.cost(&seed)?;
    if spent > budget {
        return Err(Error::InfeasibleInit { cost: spent, budget });
    }
    let candidates: Vec<usize> = (0..r).filter(|e| seed.binary_search(e).is_err()).collect();
    let costs_f: Vec<f64> = groups.costs().iter().map(|&c| c as f64).collect();
    let engine = Engine::new(obj, candidates, &seed, KeyRule::GainPerCost(costs_f), opts)?;
    engine.run(BudgetPolicy { costs: groups.costs().to_vec(), budget, spent })
}

/// Options for [`greedy_partial_enum`].
#[derive(Clone, Debug)]
pub struct PartialEnumOptions {
    /// Enumeration depth. `m = 3` carries the `1 − 1/e` guarantee; its seed
    /// loop is `O(r³)` in the number of groups. `m = 1` is a fast mode (one
    /// re-weighted greedy run with a best-singleton fallback) without the
    /// guarantee.
    pub m: usize,
    /// Run seed completions under the literal residual budget `k − m − 1`
    /// instead of the full budget with the seed's cost counted.
    pub compat_budget: bool,
    pub greedy: GreedyOptions,
}

impl Default for PartialEnumOptions {
    fn default() -> Self {
        Self { m: 3, compat_budget: false, greedy: GreedyOptions::default() }
    }
}

/// Lexicographic combinations of size `k` from `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Advance.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Builds a [`SelectionResult`] for a fixed set by extending the objective
/// state along the sorted elements.
fn result_from_set<O: SetObjective>(obj: &O, set: &[usize]) -> Result<SelectionResult> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let mut state = obj.empty_state();
    let mut trace = Vec::with_capacity(sorted.len());
    let mut value = 0.0;
    for &e in &sorted {
        let gain = obj.gain(&state, e)?;
        state = obj.extend(&state, e)?;
        value += gain;
        trace.push(TraceStep { element: e, gain, objective: value });
    }
    Ok(SelectionResult {
        selected: sorted,
        trace,
        objective_value: value,
        evaluations: 0,
    })
}

struct SeedRun {
    rank: usize,
    result: SelectionResult,
}

fn run_seed<O: SetObjective>(
    obj: &O,
    groups: &GroupStructure,
    budget: usize,
    opts: &PartialEnumOptions,
    rank: usize,
    seed: &[usize],
) -> Result<SeedRun> {
    let effective = if opts.compat_budget {
        budget.saturating_sub(opts.m + 1)
    } else {
        budget
    };
    let result = if groups.cost(seed)? > effective {
        // Nothing can be added under the literal residual budget; the
        // completion is the bare seed.
        result_from_set(obj, seed)?
    } else {
        reweighted_greedy(obj, groups, effective, seed, opts.greedy)?
    };
    Ok(SeedRun { rank, result })
}

fn better_seed(a: SeedRun, b: SeedRun) -> SeedRun {
    if b.result.objective_value > a.result.objective_value
        || (b.result.objective_value == a.result.objective_value && b.rank < a.rank)
    {
        b
    } else {
        a
    }
}

/// Partial-enumeration greedy for knapsack-constrained group selection:
/// the best feasible seed of size below `m` competes against the best
/// re-weighted greedy completion over every feasible seed of size exactly
/// `m`. With `m = 3` the value is at least `(1 − 1/e)` of the optimum.
pub fn greedy_partial_enum<O: SetObjective>(
    obj: &O,
    groups: &GroupStructure,
    budget: usize,
    opts: &PartialEnumOptions,
) -> Result<SelectionResult> {
    let r = groups.num_groups();
    if obj.ground_size() != r {
        return Err(Error::DimensionMismatch(format!(
            "objective ground {} vs {} groups",
            obj.ground_size(),
            r
        )));
    }
    if opts.m == 0 {
        return Err(Error::InvalidArgument("partial enumeration depth m must be >= 1".into()));
    }

    let mut evaluations = 0u64;

    if opts.m == 1 {
        // Fast mode: plain re-weighted greedy with a best-singleton fallback.
        let completion = reweighted_greedy(obj, groups, budget, &[], opts.greedy)?;
        let mut best_single: Option<(usize, f64)> = None;
        for id in 0..r {
            if groups.cost_of(id)? > budget {
                continue;
            }
            let v = obj.value(&[id])?;
            evaluations += 1;
            if best_single.map_or(true, |(_, bv)| v > bv) {
                best_single = Some((id, v));
            }
        }
        let total_evals = evaluations + completion.evaluations;
        let mut result = match best_single {
            Some((id, v)) if v > completion.objective_value => result_from_set(obj, &[id])?,
            _ => completion,
        };
        result.evaluations = total_evals;
        return Ok(result);
    }

    // S1: exhaustive best over feasible sets of size < m (the empty set gives
    // the normalized baseline of 0).
    let mut s1: Vec<usize> = Vec::new();
    let mut s1_value = 0.0;
    for size in 1..opts.m {
        for combo in combinations(r, size) {
            if groups.cost(&combo)? > budget {
                continue;
            }
            let v = obj.value(&combo)?;
            evaluations += 1;
            if v > s1_value {
                s1_value = v;
                s1 = combo;
            }
        }
    }

    // S2: best re-weighted completion over feasible seeds of size m.
    let seeds: Vec<Vec<usize>> = combinations(r, opts.m)
        .into_iter()
        .filter(|combo| groups.cost(combo).map(|c| c <= budget).unwrap_or(false))
        .collect();
    let runs: Vec<Result<SeedRun>> = {
        #[cfg(feature = "parallel")]
        {
            if opts.greedy.parallel {
                use rayon::prelude::*;
                seeds
                    .par_iter()
                    .enumerate()
                    .map(|(rank, seed)| run_seed(obj, groups, budget, opts, rank, seed))
                    .collect()
            } else {
                seeds
                    .iter()
                    .enumerate()
                    .map(|(rank, seed)| run_seed(obj, groups, budget, opts, rank, seed))
                    .collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            seeds
                .iter()
                .enumerate()
                .map(|(rank, seed)| run_seed(obj, groups, budget, opts, rank, seed))
                .collect()
        }
    };
    let mut best: Option<SeedRun> = None;
    for run in runs {
        let run = run?;
        evaluations += run.result.evaluations;
        best = Some(match best {
            None => run,
            Some(cur) => better_seed(cur, run),
        });
    }

    let mut result = match best {
        Some(run) if run.result.objective_value > s1_value => run.result,
        _ => result_from_set(obj, &s1)?,
    };
    result.evaluations = evaluations;
    Ok(result)
}

/// Exact maximizer by exhaustive enumeration of the constraint's independent
/// sets, visiting them in lexicographic order (depth-first with downward
/// closure pruning) so ties resolve to the lexicographically smallest set.
/// Errors out once more than `max_sets` feasible sets have been visited.
pub fn brute_force_max<O: SetObjective>(
    obj: &O,
    constraint: &SupportConstraint,
    max_sets: u64,
) -> Result<SelectionResult> {
    let n = constraint.ground_size();
    if obj.ground_size() != n {
        return Err(Error::DimensionMismatch(format!(
            "objective ground {} vs constraint ground {}",
            obj.ground_size(),
            n
        )));
    }

    struct Dfs<'a, O: SetObjective> {
        obj: &'a O,
        constraint: &'a SupportConstraint,
        max_sets: u64,
        count: u64,
        best: Vec<usize>,
        best_value: f64,
        n: usize,
    }

    impl<O: SetObjective> Dfs<'_, O> {
        fn visit(&mut self, current: &mut Vec<usize>, start: usize) -> Result<()> {
            self.count += 1;
            if self.count > self.max_sets {
                return Err(Error::EnumerationCapExceeded { cap: self.max_sets });
            }
            let v = self.obj.value(current)?;
            if v > self.best_value {
                self.best_value = v;
                self.best = current.clone();
            }
            for e in start..self.n {
                current.push(e);
                if self.constraint.is_independent(current)? {
                    self.visit(current, e + 1)?;
                }
                current.pop();
            }
            Ok(())
        }
    }

    let mut dfs = Dfs {
        obj,
        constraint,
        max_sets,
        count: 0,
        best: Vec::new(),
        best_value: obj.value(&[])?,
        n,
    };
    dfs.visit(&mut Vec::new(), 0)?;

    let mut result = result_from_set(obj, &dfs.best)?;
    result.objective_value = dfs.best_value;
    result.evaluations = dfs.count;
    Ok(result)
}
