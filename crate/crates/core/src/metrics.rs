//! Quality indicators for bi-objective front approximations, and run
//! aggregation with 95% confidence intervals.

use serde::{Deserialize, Serialize};

use crate::{Error, ObjectiveVector, Result};

/// Two-sided 95% normal quantile used for confidence intervals.
pub const Z_95: f64 = 1.96;

/// Exact area dominated by `front` and bounded by `reference`, for two
/// objectives. Points not strictly below the reference in both objectives
/// contribute nothing.
pub fn hypervolume_2d(front: &[ObjectiveVector], reference: &[f64]) -> Result<f64> {
    if reference.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: reference.len(),
        });
    }
    if let Some(bad) = front.iter().find(|y| y.len() != 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: bad.len(),
        });
    }
    let (r1, r2) = (reference[0], reference[1]);
    let mut pts: Vec<(f64, f64)> = front
        .iter()
        .map(|y| (y[0], y[1]))
        .filter(|&(a, b)| a < r1 && b < r2)
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut ceiling = r2;
    for (f1, f2) in pts {
        if f2 < ceiling {
            area += (r1 - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    Ok(area)
}

/// `hypervolume / hv_max`, clamped to `[0, 1]`.
pub fn normalized_hypervolume(
    front: &[ObjectiveVector],
    reference: &[f64],
    hv_max: f64,
) -> Result<f64> {
    if !(hv_max > 0.0 && hv_max.is_finite()) {
        return Err(Error::Contract(format!(
            "hv_max must be finite and > 0, got {hv_max}"
        )));
    }
    Ok((hypervolume_2d(front, reference)? / hv_max).clamp(0.0, 1.0))
}

/// Product over objectives of the front's extent divided by the extent of
/// the `ideal`..`maximal` box. An objective whose box is flat contributes 0;
/// an empty front scores 0.
pub fn overall_spread(front: &[ObjectiveVector], ideal: &[f64], maximal: &[f64]) -> Result<f64> {
    if ideal.len() != maximal.len() {
        return Err(Error::DimensionMismatch {
            expected: ideal.len(),
            found: maximal.len(),
        });
    }
    if front.is_empty() {
        return Ok(0.0);
    }
    if let Some(bad) = front.iter().find(|y| y.len() != ideal.len()) {
        return Err(Error::DimensionMismatch {
            expected: ideal.len(),
            found: bad.len(),
        });
    }
    let mut spread = 1.0;
    for i in 0..ideal.len() {
        let span = (ideal[i] - maximal[i]).abs();
        if span == 0.0 {
            return Ok(0.0);
        }
        let hi = front.iter().map(|y| y[i]).fold(f64::NEG_INFINITY, f64::max);
        let lo = front.iter().map(|y| y[i]).fold(f64::INFINITY, f64::min);
        spread *= (hi - lo).abs() / span;
    }
    Ok(spread)
}

/// Sample standard deviation (divisor `n - 1`) of each point's L1 distance
/// to its nearest neighbour. `None` for fewer than two points.
pub fn spacing(front: &[ObjectiveVector]) -> Option<f64> {
    let n = front.len();
    if n < 2 {
        return None;
    }
    let nearest: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&k| k != j)
                .map(|k| {
                    front[j]
                        .values()
                        .iter()
                        .zip(front[k].values())
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mean = nearest.iter().sum::<f64>() / n as f64;
    let ss: f64 = nearest.iter().map(|d| (mean - d) * (mean - d)).sum();
    Some((ss / (n - 1) as f64).sqrt())
}

/// Mean and 95% confidence half-width of per-run values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub ci95: f64,
}

/// Mean and `1.96 * sigma / sqrt(n)` with the population standard deviation.
pub fn aggregate_runs(values: &[f64]) -> Result<Aggregate> {
    if values.is_empty() {
        return Err(Error::Contract("cannot aggregate zero runs".into()));
    }
    let n = values.len() as f64;
    // Summing offsets from the first value keeps a constant list exact.
    let anchor = values[0];
    let mean = anchor + values.iter().map(|x| x - anchor).sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(Aggregate {
        mean,
        ci95: Z_95 * var.sqrt() / n.sqrt(),
    })
}

/// Coordinatewise bounds of the violation-free points of a union of results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// Coordinatewise maximum: the hypervolume reference point.
    pub reference: Vec<f64>,
    /// Coordinatewise minimum: the ideal-vector approximation.
    pub ideal: Vec<f64>,
}

/// Bounds over the points with zero violations; `None` when there are none.
pub fn bounds_from_union<'a, I>(points: I) -> Result<Option<Bounds>>
where
    I: IntoIterator<Item = (&'a ObjectiveVector, u32)>,
{
    let mut bounds: Option<Bounds> = None;
    for (y, violations) in points {
        if violations > 0 {
            continue;
        }
        match &mut bounds {
            None => {
                bounds = Some(Bounds {
                    reference: y.values().to_vec(),
                    ideal: y.values().to_vec(),
                })
            }
            Some(b) => {
                if b.reference.len() != y.len() {
                    return Err(Error::DimensionMismatch {
                        expected: b.reference.len(),
                        found: y.len(),
                    });
                }
                for (i, &v) in y.values().iter().enumerate() {
                    b.reference[i] = b.reference[i].max(v);
                    b.ideal[i] = b.ideal[i].min(v);
                }
            }
        }
    }
    Ok(bounds)
}

/// Reference point: coordinatewise maximum over the violation-free points.
pub fn reference_point_from_union<'a, I>(points: I) -> Result<Option<Vec<f64>>>
where
    I: IntoIterator<Item = (&'a ObjectiveVector, u32)>,
{
    Ok(bounds_from_union(points)?.map(|b| b.reference))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn front(points: &[[f64; 2]]) -> Vec<ObjectiveVector> {
        points.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn hypervolume_examples() {
        assert_eq!(
            hypervolume_2d(&front(&[[1.0, 2.0], [2.0, 1.0]]), &[3.0, 3.0]).unwrap(),
            3.0
        );
        assert_eq!(
            hypervolume_2d(&front(&[[1.0, 1.0]]), &[3.0, 3.0]).unwrap(),
            4.0
        );
        assert_eq!(hypervolume_2d(&[], &[3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(
            hypervolume_2d(&front(&[[3.0, 3.0]]), &[3.0, 3.0]).unwrap(),
            0.0
        );
        // Outside the reference box in one objective only.
        assert_eq!(
            hypervolume_2d(&front(&[[4.0, 0.0]]), &[3.0, 3.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn hypervolume_ignores_dominated_and_duplicates() {
        let a = hypervolume_2d(&front(&[[1.0, 2.0], [2.0, 1.0]]), &[3.0, 3.0]).unwrap();
        let b = hypervolume_2d(
            &front(&[[1.0, 2.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]]),
            &[3.0, 3.0],
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hypervolume_requires_two_objectives() {
        assert!(hypervolume_2d(&[ObjectiveVector::from([1.0])], &[3.0, 3.0]).is_err());
        assert!(hypervolume_2d(&[], &[3.0]).is_err());
    }

    #[test]
    fn normalized_examples() {
        let f = front(&[[1.0, 1.0]]);
        assert_eq!(normalized_hypervolume(&f, &[3.0, 3.0], 4.0).unwrap(), 1.0);
        assert_eq!(normalized_hypervolume(&[], &[3.0, 3.0], 4.0).unwrap(), 0.0);
        assert_eq!(normalized_hypervolume(&f, &[3.0, 3.0], 8.0).unwrap(), 0.5);
        assert_eq!(normalized_hypervolume(&f, &[3.0, 3.0], 2.0).unwrap(), 1.0);
        assert!(normalized_hypervolume(&f, &[3.0, 3.0], 0.0).is_err());
    }

    #[test]
    fn spread_examples() {
        let f = front(&[[1.0, 3.0], [3.0, 1.0]]);
        assert_eq!(overall_spread(&f, &[1.0, 1.0], &[3.0, 3.0]).unwrap(), 1.0);
        assert_eq!(
            overall_spread(&front(&[[2.0, 2.0]]), &[1.0, 1.0], &[3.0, 3.0]).unwrap(),
            0.0
        );
        assert_eq!(overall_spread(&[], &[1.0, 1.0], &[3.0, 3.0]).unwrap(), 0.0);
        let half = front(&[[1.0, 3.0], [2.0, 1.0]]);
        assert_eq!(
            overall_spread(&half, &[1.0, 1.0], &[3.0, 3.0]).unwrap(),
            0.5
        );
        assert_eq!(overall_spread(&f, &[1.0, 1.0], &[1.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn spacing_examples() {
        assert_eq!(spacing(&front(&[[0.0, 5.0], [3.0, 1.0]])), Some(0.0));
        assert_eq!(
            spacing(&front(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]])),
            Some(0.0)
        );
        // Nearest L1 distances (3, 2, 2), mean 7/3.
        let mean = 7.0 / 3.0;
        let expected = (0.5 * ((3.0f64 - mean).powi(2) + 2.0 * (2.0f64 - mean).powi(2))).sqrt();
        let sp = spacing(&front(&[[0.0, 3.0], [1.0, 1.0], [2.0, 0.0]])).unwrap();
        assert!((sp - expected).abs() < 1e-15);
        assert!((sp - 0.5773502691896257).abs() < 1e-12);
        assert_eq!(spacing(&front(&[[1.0, 1.0]])), None);
        assert_eq!(spacing(&[]), None);
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(
            aggregate_runs(&[5.0, 5.0, 5.0]).unwrap(),
            Aggregate {
                mean: 5.0,
                ci95: 0.0
            }
        );
        let a = aggregate_runs(&[0.0, 1.0]).unwrap();
        assert_eq!(a.mean, 0.5);
        assert!((a.ci95 - 1.96 * 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert!((a.ci95 - 0.6930).abs() < 1e-4);
        assert_eq!(
            aggregate_runs(&[7.0]).unwrap(),
            Aggregate {
                mean: 7.0,
                ci95: 0.0
            }
        );
        assert!(aggregate_runs(&[]).is_err());
    }

    #[test]
    fn reference_point_examples() {
        let pts = front(&[[1.0, 5.0], [4.0, 2.0]]);
        let r = reference_point_from_union(pts.iter().map(|y| (y, 0))).unwrap();
        assert_eq!(r, Some(vec![4.0, 5.0]));

        let single = front(&[[2.0, 3.0]]);
        let r = reference_point_from_union(single.iter().map(|y| (y, 0)))
            .unwrap()
            .unwrap();
        assert_eq!(r, vec![2.0, 3.0]);
        assert_eq!(hypervolume_2d(&single, &r).unwrap(), 0.0);

        let mixed = front(&[[1.0, 5.0], [1_000_004.0, 1_000_009.0]]);
        let r = reference_point_from_union(mixed.iter().zip([0, 1])).unwrap();
        assert_eq!(r, Some(vec![1.0, 5.0]));

        let none = reference_point_from_union(mixed[1..].iter().map(|y| (y, 1))).unwrap();
        assert_eq!(none, None);
    }
}
