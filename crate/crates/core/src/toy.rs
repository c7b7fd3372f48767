//! Complete trees with fixed leaf objectives, small enough to enumerate.

use rand::{Rng, SeedableRng};

use crate::problem::{Evaluation, Problem};
use crate::{Error, ObjectiveVector, Result, SearchRng};

/// A complete `branching`-ary tree of height `depth`; a trajectory picks one
/// branch per level and the reached leaf carries a fixed objective vector.
///
/// Nodes are numbered breadth-first (root 0, child `b` of node `k` is
/// `k * branching + b + 1`) and the code of branch `b` at node `k` is
/// `k * branching + b`, so no two (node, branch) pairs share a code.
#[derive(Debug, Clone)]
pub struct ToyTree {
    depth: usize,
    branching: usize,
    leaves: Vec<ObjectiveVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyState {
    node: u64,
    path: Vec<usize>,
}

impl ToyTree {
    /// `leaves` are listed in lexicographic order of their branch paths.
    pub fn new(depth: usize, branching: usize, leaves: Vec<ObjectiveVector>) -> Result<Self> {
        if depth == 0 || branching == 0 {
            return Err(Error::InvalidConfig(
                "toy tree needs depth >= 1 and branching >= 1".into(),
            ));
        }
        let expected = branching
            .checked_pow(depth as u32)
            .ok_or_else(|| Error::InvalidConfig("toy tree too large".into()))?;
        if leaves.len() != expected {
            return Err(Error::InvalidConfig(format!(
                "expected {expected} leaves, got {}",
                leaves.len()
            )));
        }
        let p = leaves[0].len();
        if let Some(bad) = leaves.iter().find(|l| l.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: bad.len(),
            });
        }
        Ok(Self {
            depth,
            branching,
            leaves,
        })
    }

    /// A tree whose leaf objectives are drawn uniformly from `[0, 100)`.
    pub fn random(depth: usize, branching: usize, n_objectives: usize, seed: u64) -> Result<Self> {
        let mut rng = SearchRng::seed_from_u64(seed);
        let n_leaves = branching.pow(depth as u32);
        let leaves = (0..n_leaves)
            .map(|_| {
                ObjectiveVector::new(
                    (0..n_objectives)
                        .map(|_| rng.gen_range(0.0..100.0))
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(depth, branching, leaves)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    pub fn leaves(&self) -> &[ObjectiveVector] {
        &self.leaves
    }

    fn leaf_index(&self, path: &[usize]) -> usize {
        path.iter().fold(0, |acc, &b| acc * self.branching + b)
    }
}

impl Problem for ToyTree {
    type State = ToyState;
    type Move = usize;

    fn n_objectives(&self) -> usize {
        self.leaves[0].len()
    }

    fn root(&self) -> ToyState {
        ToyState {
            node: 0,
            path: Vec::with_capacity(self.depth),
        }
    }

    fn is_terminal(&self, state: &ToyState) -> bool {
        state.path.len() == self.depth
    }

    fn legal_moves(&self, state: &ToyState, out: &mut Vec<usize>) {
        out.clear();
        if !self.is_terminal(state) {
            out.extend(0..self.branching);
        }
    }

    fn play(&self, state: &mut ToyState, mv: usize) -> Result<()> {
        if self.is_terminal(state) || mv >= self.branching {
            return Err(Error::IllegalMove {
                mv: mv.to_string(),
                step: state.path.len(),
            });
        }
        state.node = state.node * self.branching as u64 + mv as u64 + 1;
        state.path.push(mv);
        Ok(())
    }

    fn evaluate(&self, state: &ToyState) -> Result<Evaluation> {
        if !self.is_terminal(state) {
            return Err(Error::NotTerminal);
        }
        Ok(Evaluation {
            objectives: self.leaves[self.leaf_index(&state.path)].clone(),
            violations: 0,
        })
    }

    fn code(&self, state: &ToyState, mv: usize) -> u64 {
        state.node * self.branching as u64 + mv as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::replay;

    #[test]
    fn leaf_lookup_follows_path_order() {
        let leaves = (0..4).map(|i| ObjectiveVector::from([i as f64])).collect();
        let t = ToyTree::new(2, 2, leaves).unwrap();
        assert_eq!(
            replay(&t, &[1, 0]).unwrap().objectives,
            ObjectiveVector::from([2.0])
        );
        assert_eq!(
            replay(&t, &[0, 1]).unwrap().objectives,
            ObjectiveVector::from([1.0])
        );
    }

    #[test]
    fn codes_unique_across_tree() {
        let t = ToyTree::random(3, 3, 2, 1).unwrap();
        let mut codes = std::collections::HashSet::new();
        let mut stack = vec![t.root()];
        while let Some(s) = stack.pop() {
            if t.is_terminal(&s) {
                continue;
            }
            for b in 0..3 {
                assert!(codes.insert(t.code(&s, b)));
                let mut c = s.clone();
                t.play(&mut c, b).unwrap();
                stack.push(c);
            }
        }
        assert_eq!(codes.len(), 3 + 9 + 27);
    }

    #[test]
    fn rejects_wrong_leaf_count_and_illegal_moves() {
        assert!(ToyTree::new(2, 2, vec![ObjectiveVector::from([0.0]); 3]).is_err());
        let t = ToyTree::random(1, 2, 2, 0).unwrap();
        let mut s = t.root();
        assert!(t.play(&mut s, 2).is_err());
        assert!(t.evaluate(&s).is_err());
    }
}
