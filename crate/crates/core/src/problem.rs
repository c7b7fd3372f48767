//! The sequential decision problem abstraction searched by playouts.

use std::fmt::Debug;

use crate::{ObjectiveVector, Result};

/// Objective vector of a terminal state plus its constraint-violation count.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: ObjectiveVector,
    pub violations: u32,
}

/// A problem whose solutions are built one move at a time from a root state.
///
/// Implementations must guarantee that every trajectory from the root
/// reaches a terminal state in finitely many moves, and that distinct legal
/// moves at one state map to distinct codes.
pub trait Problem {
    type State: Clone;
    type Move: Copy + PartialEq + Debug;

    fn n_objectives(&self) -> usize;

    fn root(&self) -> Self::State;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Writes the legal moves of `state` into `out` (cleared first).
    fn legal_moves(&self, state: &Self::State, out: &mut Vec<Self::Move>);

    /// Applies `mv`; fails if it is not legal in `state`.
    fn play(&self, state: &mut Self::State, mv: Self::Move) -> Result<()>;

    /// Evaluates a terminal state; fails on non-terminal input.
    fn evaluate(&self, state: &Self::State) -> Result<Evaluation>;

    /// Policy-table key of playing `mv` in `state`.
    fn code(&self, state: &Self::State, mv: Self::Move) -> u64;

    /// Additive logit offset used when biased sampling is enabled.
    fn bias(&self, _state: &Self::State, _mv: Self::Move) -> f64 {
        0.0
    }
}

/// Replays `moves` from the root and evaluates the final state.
pub fn replay<P: Problem>(problem: &P, moves: &[P::Move]) -> Result<Evaluation> {
    let mut state = problem.root();
    for &mv in moves {
        problem.play(&mut state, mv)?;
    }
    problem.evaluate(&state)
}
