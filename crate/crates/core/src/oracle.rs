//! Exhaustive enumeration of small problems: the exact Pareto front.

use serde::{Deserialize, Serialize};

use crate::problem::Problem;
use crate::tsptw::MoTsptw;
use crate::{Error, ParetoArchive, Result, Solution};

/// Largest instance (cities including the depot) [`brute_force_front`] accepts.
pub const MAX_ORACLE_CITIES: usize = 11;

/// Exact front of an enumerated problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactFront<M> {
    /// Non-dominated terminal sequences, restricted to violation-free ones
    /// whenever any exists.
    pub front: Vec<Solution<M>>,
    /// Number of terminal sequences evaluated.
    pub enumerated: u64,
    /// Whether `front` consists of violation-free sequences.
    pub feasible: bool,
}

/// Enumerates every terminal sequence of `problem` depth-first.
pub fn enumerate_front<P: Problem>(problem: &P) -> Result<ExactFront<P::Move>> {
    let mut valid = ParetoArchive::new();
    let mut invalid = ParetoArchive::new();
    let mut enumerated = 0u64;
    let mut moves = Vec::new();
    let mut path = Vec::new();
    visit(
        problem,
        problem.root(),
        &mut path,
        &mut moves,
        &mut |path, eval| {
            enumerated += 1;
            let s = Solution {
                moves: path.to_vec(),
                objectives: eval.objectives,
                violations: eval.violations,
                policy_index: 0,
            };
            if s.violations == 0 {
                valid.insert(s)?;
            } else if valid.is_empty() {
                invalid.insert(s)?;
            }
            Ok(())
        },
    )?;
    let feasible = !valid.is_empty();
    let front = if feasible { valid } else { invalid }.into_solutions();
    Ok(ExactFront {
        front,
        enumerated,
        feasible,
    })
}

fn visit<P: Problem>(
    problem: &P,
    state: P::State,
    path: &mut Vec<P::Move>,
    scratch: &mut Vec<P::Move>,
    leaf: &mut dyn FnMut(&[P::Move], crate::Evaluation) -> Result<()>,
) -> Result<()> {
    if problem.is_terminal(&state) {
        return leaf(path, problem.evaluate(&state)?);
    }
    problem.legal_moves(&state, scratch);
    if scratch.is_empty() {
        return Err(Error::NoLegalMoves);
    }
    let legal = std::mem::take(scratch);
    for &mv in &legal {
        let mut child = state.clone();
        problem.play(&mut child, mv)?;
        path.push(mv);
        visit(problem, child, path, scratch, leaf)?;
        path.pop();
    }
    *scratch = legal;
    Ok(())
}

/// Exact front of a MO-TSPTW instance by enumerating all `(n-1)!` tours.
pub fn brute_force_front(problem: &MoTsptw) -> Result<ExactFront<usize>> {
    let n = problem.instance().n();
    if n > MAX_ORACLE_CITIES {
        return Err(Error::TooLarge {
            n,
            max: MAX_ORACLE_CITIES,
        });
    }
    enumerate_front(problem)
}
