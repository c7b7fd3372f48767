//! Softmax playout policies: sampling and gradient adaptation.

use rand::Rng;
use rustc_hash::FxHashMap;

use crate::pareto::Solution;
use crate::problem::Problem;
use crate::search::EvalCounter;
use crate::{Error, Result};

/// Sparse map from move code to logit weight. Absent codes weigh 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyTable {
    weights: FxHashMap<u64, f64>,
}

impl PolicyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn weight(&self, code: u64) -> f64 {
        self.weights.get(&code).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, code: u64, weight: f64) {
        debug_assert!(weight.is_finite());
        self.weights.insert(code, weight);
    }

    fn add(&mut self, code: u64, delta: f64) {
        *self.weights.entry(code).or_insert(0.0) += delta;
    }

    /// Number of codes touched so far.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Stored `(code, weight)` pairs sorted by code.
    pub fn entries(&self) -> Vec<(u64, f64)> {
        let mut e: Vec<_> = self.weights.iter().map(|(&c, &w)| (c, w)).collect();
        e.sort_unstable_by_key(|&(c, _)| c);
        e
    }

    /// Gradient step toward `moves`, scaled by `alpha * weight`.
    ///
    /// Replays the sequence from the root. At every visited state the played
    /// code gains `alpha * weight` and every legal code loses
    /// `alpha * weight * p`, with `p` the softmax probability under the table
    /// as it was before this call. All deltas are computed first and then
    /// applied in order.
    pub fn adapt<P: Problem>(
        &mut self,
        problem: &P,
        moves: &[P::Move],
        alpha: f64,
        weight: f64,
        use_bias: bool,
    ) -> Result<()> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be finite and >= 0, got {alpha}"
            )));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "adaptation weight must be finite and >= 0, got {weight}"
            )));
        }
        let step = alpha * weight;
        let mut deltas: Vec<(u64, f64)> = Vec::new();
        let mut legal = Vec::new();
        let mut logits = Vec::new();
        let mut state = problem.root();
        for (i, &mv) in moves.iter().enumerate() {
            problem.legal_moves(&state, &mut legal);
            let Some(played) = legal.iter().position(|&m| m == mv) else {
                return Err(Error::IllegalMove {
                    mv: format!("{mv:?}"),
                    step: i,
                });
            };
            logits.clear();
            logits.extend(
                legal
                    .iter()
                    .map(|&m| self.logit(problem, &state, m, use_bias)),
            );
            softmax_in_place(&mut logits);
            deltas.push((problem.code(&state, legal[played]), step));
            for (&m, &p) in legal.iter().zip(&logits) {
                deltas.push((problem.code(&state, m), -(step * p)));
            }
            problem.play(&mut state, mv)?;
        }
        if !problem.is_terminal(&state) {
            return Err(Error::NotTerminal);
        }
        for (code, d) in deltas {
            self.add(code, d);
        }
        Ok(())
    }

    /// Copying form of [`PolicyTable::adapt`].
    pub fn adapted<P: Problem>(
        &self,
        problem: &P,
        moves: &[P::Move],
        alpha: f64,
        weight: f64,
        use_bias: bool,
    ) -> Result<Self> {
        let mut next = self.clone();
        next.adapt(problem, moves, alpha, weight, use_bias)?;
        Ok(next)
    }

    fn logit<P: Problem>(&self, problem: &P, state: &P::State, mv: P::Move, use_bias: bool) -> f64 {
        let w = self.weight(problem.code(state, mv));
        if use_bias {
            w + problem.bias(state, mv)
        } else {
            w
        }
    }
}

/// The ordered set of policies a Pareto search samples from.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySet(Vec<PolicyTable>);

impl PolicySet {
    /// `n` uniform policies.
    pub fn new(n: usize) -> Self {
        Self(vec![PolicyTable::new(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&PolicyTable> {
        self.0.get(index)
    }

    pub fn get_mut(&mut self, index: usize) -> Option<&mut PolicyTable> {
        self.0.get_mut(index)
    }

    pub fn tables(&self) -> &[PolicyTable] {
        &self.0
    }
}

impl From<Vec<PolicyTable>> for PolicySet {
    fn from(tables: Vec<PolicyTable>) -> Self {
        Self(tables)
    }
}

impl std::ops::Index<usize> for PolicySet {
    type Output = PolicyTable;

    fn index(&self, i: usize) -> &PolicyTable {
        &self.0[i]
    }
}

/// One candidate move at a state, with its policy code and bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegalMove<M> {
    pub mv: M,
    pub code: u64,
    pub bias: f64,
}

/// Replaces logits by their softmax, subtracting the max first.
fn softmax_in_place(values: &mut [f64]) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for v in values.iter_mut() {
        *v = (*v - max).exp();
        z += *v;
    }
    for v in values.iter_mut() {
        *v /= z;
    }
}

/// Softmax over `w[code]` (plus `bias` when `use_bias`) for each legal move.
pub fn action_probabilities<M>(
    policy: &PolicyTable,
    legal: &[LegalMove<M>],
    use_bias: bool,
) -> Vec<f64> {
    let mut p: Vec<f64> = legal
        .iter()
        .map(|m| policy.weight(m.code) + if use_bias { m.bias } else { 0.0 })
        .collect();
    softmax_in_place(&mut p);
    p
}

/// Legal moves of `state` annotated with their codes and biases.
pub fn annotated_moves<P: Problem>(problem: &P, state: &P::State) -> Vec<LegalMove<P::Move>> {
    let mut moves = Vec::new();
    problem.legal_moves(state, &mut moves);
    moves
        .into_iter()
        .map(|mv| LegalMove {
            mv,
            code: problem.code(state, mv),
            bias: problem.bias(state, mv),
        })
        .collect()
}

/// Samples one root-to-terminal trajectory under `policy` and evaluates it,
/// consuming one evaluation from `counter`.
///
/// A state with a single legal move consumes no randomness.
pub fn playout<P: Problem, R: Rng + ?Sized>(
    problem: &P,
    policy: &PolicyTable,
    use_bias: bool,
    policy_index: usize,
    counter: &mut EvalCounter,
    rng: &mut R,
) -> Result<Solution<P::Move>> {
    counter.consume()?;
    let mut state = problem.root();
    let mut moves = Vec::new();
    let mut legal = Vec::new();
    let mut weights = Vec::new();
    while !problem.is_terminal(&state) {
        problem.legal_moves(&state, &mut legal);
        let chosen = match legal.len() {
            0 => return Err(Error::NoLegalMoves),
            1 => legal[0],
            _ => {
                weights.clear();
                weights.extend(
                    legal
                        .iter()
                        .map(|&m| policy.logit(problem, &state, m, use_bias)),
                );
                let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut z = 0.0;
                for w in weights.iter_mut() {
                    *w = (*w - max).exp();
                    z += *w;
                }
                let mut r = rng.gen::<f64>() * z;
                let mut pick = legal.len() - 1;
                for (i, &w) in weights.iter().enumerate() {
                    if r < w {
                        pick = i;
                        break;
                    }
                    r -= w;
                }
                legal[pick]
            }
        };
        problem.play(&mut state, chosen)?;
        moves.push(chosen);
    }
    let eval = problem.evaluate(&state)?;
    Ok(Solution {
        moves,
        objectives: eval.objectives,
        violations: eval.violations,
        policy_index,
    })
}

/// Returns a copy of `policy` adapted toward `sequence` with step
/// `alpha * weight`.
pub fn adapt_single<P: Problem>(
    policy: &PolicyTable,
    sequence: &Solution<P::Move>,
    problem: &P,
    alpha: f64,
    weight: f64,
    use_bias: bool,
) -> Result<PolicyTable> {
    policy.adapted(problem, &sequence.moves, alpha, weight, use_bias)
}

/// Probability that a playout under `policy` produces exactly `moves`.
pub fn sequence_probability<P: Problem>(
    problem: &P,
    policy: &PolicyTable,
    moves: &[P::Move],
    use_bias: bool,
) -> Result<f64> {
    let mut state = problem.root();
    let mut prob = 1.0;
    for (i, &mv) in moves.iter().enumerate() {
        let legal = annotated_moves(problem, &state);
        let Some(k) = legal.iter().position(|m| m.mv == mv) else {
            return Err(Error::IllegalMove {
                mv: format!("{mv:?}"),
                step: i,
            });
        };
        prob *= action_probabilities(policy, &legal, use_bias)[k];
        problem.play(&mut state, mv)?;
    }
    Ok(prob)
}
