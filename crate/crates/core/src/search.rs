//! Nested rollout policy adaptation: the classical single-objective search
//! and the multi-policy Pareto search.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::pareto::{crowding_distance, policy_representatives, ObjectiveVector};
use crate::policy::{playout, PolicySet, PolicyTable};
use crate::problem::Problem;
use crate::{Error, ParetoArchive, Result, SearchRng, Solution};

/// Which front members a policy is adapted toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdaptStrategy {
    /// Every member, each toward the policy that produced it.
    AllSequences,
    /// Only the member with the largest crowding distance per policy.
    OneSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub level: usize,
    pub alpha: f64,
    pub n_policies: usize,
    pub iterations_per_level: usize,
    pub eval_budget: u64,
    pub use_bias: bool,
    pub cd_weighting: bool,
    pub adapt_strategy: AdaptStrategy,
    /// Upper bound on the crowding-distance weight of one sequence.
    pub cd_clip: f64,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            level: 4,
            alpha: 0.5,
            n_policies: 4,
            iterations_per_level: 100,
            eval_budget: 100_000,
            use_bias: true,
            cd_weighting: true,
            adapt_strategy: AdaptStrategy::AllSequences,
            cd_clip: 2.0,
            rng_seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.level < 1 {
            return fail("level must be >= 1");
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return fail("alpha must be finite and > 0");
        }
        if self.n_policies < 1 {
            return fail("n_policies must be >= 1");
        }
        if self.iterations_per_level < 1 {
            return fail("iterations_per_level must be >= 1");
        }
        if self.eval_budget < 1 {
            return fail("eval_budget must be >= 1");
        }
        if !(self.cd_clip > 0.0) {
            return fail("cd_clip must be > 0");
        }
        Ok(())
    }
}

/// Objective evaluations consumed against a hard budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalCounter {
    used: u64,
    budget: u64,
}

impl EvalCounter {
    pub fn new(budget: u64) -> Self {
        Self { used: 0, budget }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    pub fn consume(&mut self) -> Result<()> {
        if self.exhausted() {
            return Err(Error::Contract(format!(
                "evaluation budget of {} exhausted",
                self.budget
            )));
        }
        self.used += 1;
        Ok(())
    }
}

/// Hooks into a running search, mainly for tests and tracing.
pub trait SearchObserver<M> {
    fn on_playout(&mut self, _solution: &Solution<M>) {}

    /// Called after the policies of `level` were adapted in `iteration`.
    fn on_adapt(&mut self, _level: usize, _iteration: usize, _policies: &[PolicyTable]) {}

    /// Called with the level-local front after each iteration (for NRPA,
    /// the single best sequence).
    fn on_front(&mut self, _level: usize, _iteration: usize, _front: &[Solution<M>]) {}
}

impl<M> SearchObserver<M> for () {}

/// The front plus, for every policy absent from it, that policy's
/// representative in the union of the front and `recent`.
pub fn adaptation_set<M: Clone + PartialEq>(
    archive: &ParetoArchive<M>,
    recent: &[Solution<M>],
    n_policies: usize,
) -> Result<Vec<Solution<M>>> {
    let mut set: Vec<Solution<M>> = archive.solutions().to_vec();
    let mut present = vec![false; n_policies];
    for s in &set {
        *present.get_mut(s.policy_index).ok_or(Error::PolicyIndex {
            index: s.policy_index,
            n_policies,
        })? = true;
    }
    if present.iter().all(|&p| p) {
        return Ok(set);
    }
    let union: Vec<Solution<M>> = set.iter().chain(recent).cloned().collect();
    for (k, rep) in policy_representatives(&union, n_policies)? {
        if !present[k] {
            set.push(rep.clone());
        }
    }
    Ok(set)
}

/// Adapts each policy toward the members of `adapt_set` it produced,
/// weighting each sequence by its crowding distance (clipped at
/// `cd_clip`) or uniformly. Policies that produced nothing are untouched.
pub fn pareto_adapt<P: Problem>(
    policies: &mut PolicySet,
    adapt_set: &[Solution<P::Move>],
    problem: &P,
    config: &SearchConfig,
) -> Result<()> {
    let n = policies.len();
    if let Some(s) = adapt_set.iter().find(|s| s.policy_index >= n) {
        return Err(Error::PolicyIndex {
            index: s.policy_index,
            n_policies: n,
        });
    }
    let vectors: Vec<ObjectiveVector> = adapt_set.iter().map(|s| s.objectives.clone()).collect();
    let cd = crowding_distance(&vectors)?;
    let weight = |i: usize| {
        if config.cd_weighting {
            cd[i].min(config.cd_clip)
        } else {
            1.0
        }
    };
    let step = |policies: &mut PolicySet, i: usize| -> Result<()> {
        let s = &adapt_set[i];
        let w = weight(i);
        if w > 0.0 {
            policies
                .get_mut(s.policy_index)
                .expect("index checked")
                .adapt(problem, &s.moves, config.alpha, w, config.use_bias)?;
        }
        Ok(())
    };
    match config.adapt_strategy {
        AdaptStrategy::AllSequences => {
            for i in 0..adapt_set.len() {
                step(policies, i)?;
            }
        }
        AdaptStrategy::OneSequence => {
            for k in 0..n {
                // Later members win ties, like the >= rule of NRPA.
                let best = (0..adapt_set.len())
                    .filter(|&i| adapt_set[i].policy_index == k)
                    .reduce(|a, b| if cd[b] >= cd[a] { b } else { a });
                if let Some(i) = best {
                    step(policies, i)?;
                }
            }
        }
    }
    Ok(())
}

/// Nested Pareto search of the given `level` from `policies`.
///
/// Level 0 samples a policy uniformly (no draw with a single policy) and
/// returns one playout. Higher levels keep a local copy of the policies and
/// a local archive, run `iterations_per_level` sub-searches, merge each
/// result into the archive and adapt the copy after every iteration. The
/// search stops early, returning what it has, once the budget is spent.
pub fn pareto_nrpa<P, R>(
    problem: &P,
    level: usize,
    policies: &PolicySet,
    counter: &mut EvalCounter,
    config: &SearchConfig,
    rng: &mut R,
    observer: &mut dyn SearchObserver<P::Move>,
) -> Result<ParetoArchive<P::Move>>
where
    P: Problem,
    R: Rng + ?Sized,
{
    if policies.is_empty() {
        return Err(Error::InvalidConfig("policy set is empty".into()));
    }
    if level == 0 {
        let mut archive = ParetoArchive::new();
        if counter.exhausted() {
            return Ok(archive);
        }
        let k = if policies.len() == 1 {
            0
        } else {
            rng.gen_range(0..policies.len())
        };
        let s = playout(problem, &policies[k], config.use_bias, k, counter, rng)?;
        observer.on_playout(&s);
        archive.insert(s)?;
        return Ok(archive);
    }

    let mut local = policies.clone();
    let mut archive = ParetoArchive::new();
    for iteration in 0..config.iterations_per_level {
        if counter.exhausted() {
            break;
        }
        let result = pareto_nrpa(problem, level - 1, &local, counter, config, rng, observer)?;
        for s in result.solutions() {
            archive.insert(s.clone())?;
        }
        let adapt_set = adaptation_set(&archive, result.solutions(), local.len())?;
        pareto_adapt(&mut local, &adapt_set, problem, config)?;
        observer.on_adapt(level, iteration, local.tables());
        observer.on_front(level, iteration, archive.solutions());
    }
    Ok(archive)
}

/// Classical NRPA on a single-objective problem. Problems minimize, so the
/// returned score is the negated objective and larger is better.
pub fn nrpa<P, R>(
    problem: &P,
    level: usize,
    policy: &PolicyTable,
    counter: &mut EvalCounter,
    config: &SearchConfig,
    rng: &mut R,
    observer: &mut dyn SearchObserver<P::Move>,
) -> Result<(f64, Solution<P::Move>)>
where
    P: Problem,
    R: Rng + ?Sized,
{
    if problem.n_objectives() != 1 {
        return Err(Error::NotSingleObjective(problem.n_objectives()));
    }
    if level == 0 {
        let s = playout(problem, policy, config.use_bias, 0, counter, rng)?;
        observer.on_playout(&s);
        return Ok((-s.objectives[0], s));
    }
    let mut local = policy.clone();
    let mut best: Option<(f64, Solution<P::Move>)> = None;
    for iteration in 0..config.iterations_per_level {
        if counter.exhausted() {
            break;
        }
        let (score, seq) = nrpa(problem, level - 1, &local, counter, config, rng, observer)?;
        if best.as_ref().is_none_or(|(b, _)| score >= *b) {
            best = Some((score, seq));
        }
        let (_, seq) = best.as_ref().expect("set above");
        local.adapt(problem, &seq.moves, config.alpha, 1.0, config.use_bias)?;
        observer.on_adapt(level, iteration, std::slice::from_ref(&local));
        observer.on_front(level, iteration, std::slice::from_ref(seq));
    }
    best.ok_or_else(|| Error::Contract("evaluation budget exhausted before any playout".into()))
}

/// Final front of one search run and the evaluations it consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<M> {
    pub front: Vec<Solution<M>>,
    pub evaluations: u64,
}

/// Pareto-NRPA from `n_policies` uniform policies at `config.level`.
pub fn run_pareto_nrpa<P: Problem>(
    problem: &P,
    config: &SearchConfig,
) -> Result<SearchOutcome<P::Move>> {
    config.validate()?;
    let mut rng = SearchRng::seed_from_u64(config.rng_seed);
    let mut counter = EvalCounter::new(config.eval_budget);
    let policies = PolicySet::new(config.n_policies);
    let archive = pareto_nrpa(
        problem,
        config.level,
        &policies,
        &mut counter,
        config,
        &mut rng,
        &mut (),
    )?;
    Ok(SearchOutcome {
        front: archive.into_solutions(),
        evaluations: counter.used(),
    })
}

/// NRPA from a uniform policy at `config.level`; the front is the best
/// sequence found.
pub fn run_nrpa<P: Problem>(problem: &P, config: &SearchConfig) -> Result<SearchOutcome<P::Move>> {
    config.validate()?;
    let mut rng = SearchRng::seed_from_u64(config.rng_seed);
    let mut counter = EvalCounter::new(config.eval_budget);
    let (_, best) = nrpa(
        problem,
        config.level,
        &PolicyTable::new(),
        &mut counter,
        config,
        &mut rng,
        &mut (),
    )?;
    Ok(SearchOutcome {
        front: vec![best],
        evaluations: counter.used(),
    })
}

/// `eval_budget` independent playouts under a uniform policy; the front of
/// everything sampled.
pub fn run_random_playouts<P: Problem>(
    problem: &P,
    config: &SearchConfig,
) -> Result<SearchOutcome<P::Move>> {
    config.validate()?;
    let mut rng = SearchRng::seed_from_u64(config.rng_seed);
    let mut counter = EvalCounter::new(config.eval_budget);
    let uniform = PolicyTable::new();
    let mut archive = ParetoArchive::new();
    while !counter.exhausted() {
        archive.insert(playout(
            problem,
            &uniform,
            config.use_bias,
            0,
            &mut counter,
            &mut rng,
        )?)?;
    }
    Ok(SearchOutcome {
        front: archive.into_solutions(),
        evaluations: counter.used(),
    })
}

/// Exposes one objective of a multi-objective problem, so that
/// single-objective searches can run on it.
#[derive(Debug, Clone)]
pub struct SingleObjective<'a, P> {
    inner: &'a P,
    objective: usize,
}

impl<'a, P: Problem> SingleObjective<'a, P> {
    pub fn new(inner: &'a P, objective: usize) -> Result<Self> {
        if objective >= inner.n_objectives() {
            return Err(Error::InvalidConfig(format!(
                "objective {objective} out of range for {} objectives",
                inner.n_objectives()
            )));
        }
        Ok(Self { inner, objective })
    }
}

impl<P: Problem> Problem for SingleObjective<'_, P> {
    type State = P::State;
    type Move = P::Move;

    fn n_objectives(&self) -> usize {
        1
    }

    fn root(&self) -> P::State {
        self.inner.root()
    }

    fn is_terminal(&self, state: &P::State) -> bool {
        self.inner.is_terminal(state)
    }

    fn legal_moves(&self, state: &P::State, out: &mut Vec<P::Move>) {
        self.inner.legal_moves(state, out)
    }

    fn play(&self, state: &mut P::State, mv: P::Move) -> Result<()> {
        self.inner.play(state, mv)
    }

    fn evaluate(&self, state: &P::State) -> Result<crate::Evaluation> {
        let e = self.inner.evaluate(state)?;
        Ok(crate::Evaluation {
            objectives: ObjectiveVector::new(vec![e.objectives[self.objective]])?,
            violations: e.violations,
        })
    }

    fn code(&self, state: &P::State, mv: P::Move) -> u64 {
        self.inner.code(state, mv)
    }

    fn bias(&self, state: &P::State, mv: P::Move) -> f64 {
        self.inner.bias(state, mv)
    }
}
