//! Independent reference implementations used as test oracles. None of
//! these call into the library's own algorithms.
#![allow(dead_code)]

use pareto_nrpa::tsptw::MoTsptwInstance;
use pareto_nrpa::ObjectiveVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn strictly_dominates(a: &[f64], b: &[f64]) -> bool {
    weakly_dominates(a, b) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Peels fronts by repeatedly taking every point no remaining point
/// dominates. Indices within a front are ascending.
pub fn peel_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| strictly_dominates(&points[j], &points[i]))
            })
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Area of the union of the boxes `[y, r]` by summing the grid cells
/// (between consecutive distinct coordinates) covered by some box.
pub fn grid_hypervolume(points: &[Vec<f64>], r: &[f64]) -> f64 {
    let inside: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p[0] < r[0] && p[1] < r[1])
        .collect();
    let mut xs: Vec<f64> = inside.iter().map(|p| p[0]).chain([r[0]]).collect();
    let mut ys: Vec<f64> = inside.iter().map(|p| p[1]).chain([r[1]]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut area = 0.0;
    for i in 0..xs.len().saturating_sub(1) {
        for j in 0..ys.len().saturating_sub(1) {
            let covered = inside.iter().any(|p| p[0] <= xs[i] && p[1] <= ys[j]);
            if covered {
                area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
            }
        }
    }
    area
}

/// Tour evaluation straight from the problem definition: waiting on early
/// arrival, one violation per late arrival (depot return included when
/// `depot_window`), penalty 1e6 per violation on both objectives.
pub fn tour_cost(inst: &MoTsptwInstance, tour: &[usize], depot_window: bool) -> (f64, f64, u32) {
    let (mut t, mut c1, mut c2, mut late) = (0.0f64, 0.0, 0.0, 0u32);
    let mut at = 0;
    for &city in tour {
        let arrive = t + inst.cost1(at, city);
        let (open, close) = inst.window(city);
        if arrive > close && (city != 0 || depot_window) {
            late += 1;
        }
        t = arrive.max(open);
        c1 += inst.cost1(at, city);
        c2 += inst.cost2(at, city);
        at = city;
    }
    let pen = 1e6 * late as f64;
    (c1 + pen, c2 + pen, late)
}

/// Every tour over cities `1..n` followed by the depot, via Heap's algorithm.
pub fn all_tours(n: usize) -> Vec<Vec<usize>> {
    let mut cities: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            let mut t = a.clone();
            t.push(0);
            out.push(t);
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let k = cities.len();
    heap(k, &mut cities, &mut out);
    out
}

/// Random instance with integer costs and windows of random tightness.
pub fn random_instance(n: usize, seed: u64) -> MoTsptwInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = || -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            rng.gen_range(1..50) as f64
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let c1 = m();
    let c2 = m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let windows = (0..n)
        .map(|_| {
            let e = rng.gen_range(0..100) as f64;
            (e, e + rng.gen_range(0..150) as f64)
        })
        .collect();
    MoTsptwInstance::new(c1, c2, windows).unwrap()
}

pub fn vectors(points: &[Vec<f64>]) -> Vec<ObjectiveVector> {
    points
        .iter()
        .map(|p| ObjectiveVector::new(p.clone()).unwrap())
        .collect()
}
