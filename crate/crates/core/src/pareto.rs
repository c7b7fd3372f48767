//! Dominance relations, non-dominated sorting, crowding distance and the
//! non-dominated archive. Every objective is minimized.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Objective values of one solution, one entry per objective, all minimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Contract("objective vector must not be empty".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl<const N: usize> From<[f64; N]> for ObjectiveVector {
    /// Panics on non-finite entries or `N == 0`; intended for literals.
    fn from(values: [f64; N]) -> Self {
        Self::new(values.to_vec()).expect("objective literal must be finite and non-empty")
    }
}

impl std::ops::Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A terminal move sequence with its evaluation and the index of the policy
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution<M> {
    pub moves: Vec<M>,
    pub objectives: ObjectiveVector,
    pub violations: u32,
    pub policy_index: usize,
}

/// `true` iff `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(dominates_unchecked(a.values(), b.values()))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

fn check_homogeneous<'a>(vectors: impl IntoIterator<Item = &'a ObjectiveVector>) -> Result<()> {
    let mut expected = None;
    for v in vectors {
        match expected {
            None => expected = Some(v.len()),
            Some(e) if e != v.len() => {
                return Err(Error::DimensionMismatch {
                    expected: e,
                    found: v.len(),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Partitions `population` into ranked fronts of indices (fast
/// non-dominated sort). `F_0` holds every point no other point dominates and
/// each later front is dominated only by earlier ones. Indices inside a
/// front are ascending.
pub fn non_dominated_sort(population: &[ObjectiveVector]) -> Result<Vec<Vec<usize>>> {
    check_homogeneous(population)?;
    let n = population.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (population[i].values(), population[j].values());
            if dominates_unchecked(a, b) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_unchecked(b, a) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(fronts)
}

/// Crowding distance of every member of `front`, in input order.
///
/// Per objective the front is sorted (ties broken by the following
/// objectives cyclically, then by input position), the two extremes get
/// `+inf` and each interior point accumulates the normalized gap between its
/// neighbours. An objective with zero span contributes nothing. Members are
/// expected to be mutually non-dominated; this is not checked.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Result<Vec<f64>> {
    check_homogeneous(front)?;
    let l = front.len();
    if l <= 2 {
        return Ok(vec![f64::INFINITY; l]);
    }
    let p = front[0].len();
    let mut distance = vec![0.0; l];
    let mut order: Vec<usize> = (0..l).collect();
    for m in 0..p {
        order.sort_by(|&a, &b| {
            (0..p)
                .map(|k| (m + k) % p)
                .map(|k| front[a][k].total_cmp(&front[b][k]))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or_else(|| a.cmp(&b))
        });
        let (first, last) = (order[0], order[l - 1]);
        distance[first] = f64::INFINITY;
        distance[last] = f64::INFINITY;
        let span = front[last][m] - front[first][m];
        if span == 0.0 {
            continue;
        }
        for w in order.windows(3) {
            let (prev, mid, next) = (w[0], w[1], w[2]);
            distance[mid] += (front[next][m] - front[prev][m]) / span;
        }
    }
    Ok(distance)
}

/// Result of offering a candidate to a [`ParetoArchive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Accepted,
    RejectedDominated,
    RejectedDuplicate,
}

/// The non-dominated set of solutions found so far.
///
/// Distinct sequences with equal objective vectors are all kept; an exact
/// repeat of a stored sequence is stored once. Members keep insertion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive<M> {
    front: Vec<Solution<M>>,
}

impl<M> Default for ParetoArchive<M> {
    fn default() -> Self {
        Self { front: Vec::new() }
    }
}

impl<M: PartialEq> ParetoArchive<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, candidate: Solution<M>) -> Result<InsertOutcome> {
        if let Some(first) = self.front.first() {
            if first.objectives.len() != candidate.objectives.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.objectives.len(),
                    found: candidate.objectives.len(),
                });
            }
        }
        let cand = candidate.objectives.values();
        for member in &self.front {
            let m = member.objectives.values();
            if dominates_unchecked(m, cand) {
                return Ok(InsertOutcome::RejectedDominated);
            }
            if m == cand && member.moves == candidate.moves {
                return Ok(InsertOutcome::RejectedDuplicate);
            }
        }
        self.front
            .retain(|member| !dominates_unchecked(cand, member.objectives.values()));
        self.front.push(candidate);
        Ok(InsertOutcome::Accepted)
    }

    pub fn solutions(&self) -> &[Solution<M>] {
        &self.front
    }

    pub fn into_solutions(self) -> Vec<Solution<M>> {
        self.front
    }

    pub fn len(&self) -> usize {
        self.front.len()
    }

    pub fn is_empty(&self) -> bool {
        self.front.is_empty()
    }

    pub fn objective_vectors(&self) -> Vec<ObjectiveVector> {
        self.front.iter().map(|s| s.objectives.clone()).collect()
    }
}

impl<M: PartialEq> FromIterator<Solution<M>> for ParetoArchive<M> {
    /// Panics if the solutions disagree on the number of objectives.
    fn from_iter<I: IntoIterator<Item = Solution<M>>>(iter: I) -> Self {
        let mut archive = Self::new();
        for s in iter {
            archive.insert(s).expect("homogeneous objective vectors");
        }
        archive
    }
}

/// One representative solution per policy: the first solution of that
/// policy in the lowest-ranked front that contains one. Policies with no
/// solution in `population` are absent.
pub fn policy_representatives<M>(
    population: &[Solution<M>],
    n_policies: usize,
) -> Result<BTreeMap<usize, &Solution<M>>> {
    if let Some(s) = population.iter().find(|s| s.policy_index >= n_policies) {
        return Err(Error::PolicyIndex {
            index: s.policy_index,
            n_policies,
        });
    }
    let vectors: Vec<ObjectiveVector> = population.iter().map(|s| s.objectives.clone()).collect();
    let mut reps = BTreeMap::new();
    for front in non_dominated_sort(&vectors)? {
        for i in front {
            reps.entry(population[i].policy_index)
                .or_insert(&population[i]);
        }
        if reps.len() == n_policies {
            break;
        }
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov<const N: usize>(v: [f64; N]) -> ObjectiveVector {
        ObjectiveVector::from(v)
    }

    fn sol(v: [f64; 2], policy: usize, tag: u32) -> Solution<u32> {
        Solution {
            moves: vec![tag],
            objectives: ov(v),
            violations: 0,
            policy_index: policy,
        }
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&ov([1.0, 2.0]), &ov([2.0, 3.0])).unwrap());
        assert!(!dominates(&ov([1.0, 2.0]), &ov([2.0, 1.0])).unwrap());
        assert!(!dominates(&ov([1.0, 2.0]), &ov([1.0, 2.0])).unwrap());
        assert!(dominates(&ov([1.0, 2.0]), &ov([1.0, 3.0])).unwrap());
    }

    #[test]
    fn dominance_length_mismatch() {
        let err = dominates(&ov([1.0, 2.0]), &ov([1.0])).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn objective_vector_rejects_non_finite() {
        assert!(matches!(
            ObjectiveVector::new(vec![1.0, f64::INFINITY]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(ObjectiveVector::new(vec![]).is_err());
    }

    #[test]
    fn sort_two_fronts() {
        let pop = [
            ov([1.0, 3.0]),
            ov([2.0, 2.0]),
            ov([3.0, 1.0]),
            ov([3.0, 3.0]),
            ov([4.0, 2.0]),
        ];
        assert_eq!(
            non_dominated_sort(&pop).unwrap(),
            vec![vec![0, 1, 2], vec![3, 4]]
        );
    }

    #[test]
    fn sort_singleton_chain_and_empty() {
        assert_eq!(
            non_dominated_sort(&[ov([5.0, 5.0])]).unwrap(),
            vec![vec![0]]
        );
        let chain = [ov([1.0, 1.0]), ov([2.0, 2.0]), ov([3.0, 3.0])];
        assert_eq!(
            non_dominated_sort(&chain).unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
        assert!(non_dominated_sort(&[]).unwrap().is_empty());
    }

    #[test]
    fn sort_rejects_mixed_lengths() {
        assert!(non_dominated_sort(&[ov([1.0, 1.0]), ov([1.0])]).is_err());
    }

    #[test]
    fn crowding_three_points() {
        let d = crowding_distance(&[ov([1.0, 3.0]), ov([2.0, 2.0]), ov([3.0, 1.0])]).unwrap();
        assert_eq!(d, vec![f64::INFINITY, 2.0, f64::INFINITY]);
    }

    #[test]
    fn crowding_small_fronts_are_boundary() {
        assert_eq!(
            crowding_distance(&[ov([1.0, 1.0])]).unwrap(),
            vec![f64::INFINITY]
        );
        assert_eq!(
            crowding_distance(&[ov([1.0, 2.0]), ov([2.0, 1.0])]).unwrap(),
            vec![f64::INFINITY; 2]
        );
    }

    #[test]
    fn crowding_four_points() {
        let d = crowding_distance(&[
            ov([0.0, 4.0]),
            ov([1.0, 2.0]),
            ov([2.0, 1.0]),
            ov([4.0, 0.0]),
        ])
        .unwrap();
        assert_eq!(d[0], f64::INFINITY);
        assert_eq!(d[3], f64::INFINITY);
        assert!((d[1] - 1.25).abs() < 1e-15);
        assert!((d[2] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn crowding_flat_objective_contributes_zero() {
        let d = crowding_distance(&[ov([1.0, 5.0]), ov([2.0, 5.0]), ov([4.0, 5.0])]).unwrap();
        // Objective 2 is flat: the sort falls back to objective 1, so its
        // extremes coincide with objective 1's.
        assert_eq!(d[0], f64::INFINITY);
        assert_eq!(d[2], f64::INFINITY);
        assert!((d[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn archive_insert_examples() {
        let mut a: ParetoArchive<u32> = [sol([1.0, 3.0], 0, 1), sol([3.0, 1.0], 0, 2)]
            .into_iter()
            .collect();
        assert_eq!(
            a.insert(sol([2.0, 2.0], 0, 3)).unwrap(),
            InsertOutcome::Accepted
        );
        assert_eq!(a.len(), 3);

        let before = a.clone();
        assert_eq!(
            a.insert(sol([4.0, 4.0], 0, 4)).unwrap(),
            InsertOutcome::RejectedDominated
        );
        assert_eq!(a, before);

        let mut b: ParetoArchive<u32> = [sol([2.0, 2.0], 0, 1)].into_iter().collect();
        assert_eq!(
            b.insert(sol([1.0, 1.0], 0, 2)).unwrap(),
            InsertOutcome::Accepted
        );
        assert_eq!(b.objective_vectors(), vec![ov([1.0, 1.0])]);
    }

    #[test]
    fn archive_duplicates() {
        let mut a: ParetoArchive<u32> = ParetoArchive::new();
        a.insert(sol([1.0, 1.0], 0, 7)).unwrap();
        assert_eq!(
            a.insert(sol([1.0, 1.0], 1, 7)).unwrap(),
            InsertOutcome::RejectedDuplicate
        );
        // Equal objectives, different sequence: kept.
        assert_eq!(
            a.insert(sol([1.0, 1.0], 0, 8)).unwrap(),
            InsertOutcome::Accepted
        );
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn archive_dimension_mismatch() {
        let mut a: ParetoArchive<u32> = ParetoArchive::new();
        a.insert(sol([1.0, 1.0], 0, 1)).unwrap();
        let bad = Solution {
            moves: vec![2],
            objectives: ov([1.0]),
            violations: 0,
            policy_index: 0,
        };
        assert!(a.insert(bad).is_err());
    }

    #[test]
    fn representatives_from_later_front() {
        // Policy 0 owns the whole first front; policy 1 only appears in F1.
        let pop = vec![
            sol([1.0, 3.0], 0, 1),
            sol([3.0, 1.0], 0, 2),
            sol([2.0, 4.0], 1, 3),
            sol([5.0, 5.0], 1, 4),
        ];
        let fronts =
            non_dominated_sort(&pop.iter().map(|s| s.objectives.clone()).collect::<Vec<_>>())
                .unwrap();
        assert_eq!(fronts, vec![vec![0, 1], vec![2], vec![3]]);

        let reps = policy_representatives(&pop, 3).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[&0].moves, vec![1]);
        assert_eq!(reps[&1].moves, vec![3]);
        assert!(!reps.contains_key(&2));
    }

    #[test]
    fn representatives_single_policy_and_empty() {
        let pop = vec![sol([1.0, 3.0], 0, 1), sol([4.0, 4.0], 0, 2)];
        let reps = policy_representatives(&pop, 1).unwrap();
        assert_eq!(reps[&0].moves, vec![1]);
        let empty: Vec<Solution<u32>> = Vec::new();
        assert!(policy_representatives(&empty, 4).unwrap().is_empty());
    }

    #[test]
    fn representatives_reject_bad_policy_index() {
        let pop = vec![sol([1.0, 3.0], 5, 1)];
        assert!(matches!(
            policy_representatives(&pop, 2),
            Err(Error::PolicyIndex {
                index: 5,
                n_policies: 2
            })
        ));
    }
}
