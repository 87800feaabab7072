//! Simple-arithmetic-mean aggregation of per-user evaluations into the
//! overall performance matrix, and the contributor-disjointness check that
//! per-alternative parallel composition relies on.

use std::collections::HashMap;

use crate::error::AggregationError;
use crate::model::{criterion_names, CriterionSpec, EvaluationSet, PerformanceMatrix};

/// A user found under more than one alternative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateContributor {
    pub user: String,
    pub first: String,
    pub second: String,
}

/// Builds OM: cell (a, j) is the mean of the K scores of alternative a on criterion j.
///
/// Every alternative must carry the same number of complete rows.
pub fn aggregate_sam(evals: &EvaluationSet, criteria: &[CriterionSpec]) -> Result<PerformanceMatrix, AggregationError> {
    let names = criterion_names(criteria);
    if evals.criteria() != names.as_slice() {
        return Err(AggregationError::CriteriaMismatch);
    }
    let m = criteria.len();
    let mut expected_k = None;
    let mut values = Vec::with_capacity(evals.n_alternatives() * m);

    for (alt, rows) in evals.groups() {
        if rows.is_empty() {
            return Err(AggregationError::EmptyAlternative(alt.clone()));
        }
        match expected_k {
            None => expected_k = Some(rows.len()),
            Some(k) if k != rows.len() => {
                return Err(AggregationError::UnequalCounts {
                    alternative: alt.clone(),
                    expected: k,
                    found: rows.len(),
                })
            }
            Some(_) => {}
        }
        let mut sums = vec![0.0; m];
        for row in rows {
            if row.scores.len() != m {
                return Err(AggregationError::RaggedRows {
                    alternative: alt.clone(),
                    user: row.user.clone(),
                    expected: m,
                    found: row.scores.len(),
                });
            }
            for (s, x) in sums.iter_mut().zip(&row.scores) {
                *s += x;
            }
        }
        let k = rows.len() as f64;
        values.extend(sums.into_iter().map(|s| s / k));
    }

    Ok(PerformanceMatrix::new(evals.alternatives(), names, values))
}

/// Lists every user that appears under two different alternatives.
///
/// Each offender is reported once per extra alternative, paired with the
/// alternative where it was first seen.
pub fn check_disjoint_contributors(evals: &EvaluationSet) -> Result<(), Vec<DuplicateContributor>> {
    let mut owner: HashMap<&str, &str> = HashMap::new();
    let mut offenders = Vec::new();
    for (alt, rows) in evals.groups() {
        for row in rows {
            match owner.get(row.user.as_str()) {
                Some(&first) if first != alt => offenders.push(DuplicateContributor {
                    user: row.user.clone(),
                    first: first.to_string(),
                    second: alt.clone(),
                }),
                Some(_) => {}
                None => {
                    owner.insert(&row.user, alt);
                }
            }
        }
    }
    if offenders.is_empty() {
        Ok(())
    } else {
        Err(offenders)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_criterion(domain: (f64, f64)) -> Vec<CriterionSpec> {
        vec![CriterionSpec::new("g", domain, 1.0, 0.0, 1.0)]
    }

    fn single_column(scores: &[f64]) -> EvaluationSet {
        let mut e = EvaluationSet::new(vec!["g".into()]);
        for (i, &s) in scores.iter().enumerate() {
            e.push("a", format!("u{i}"), vec![s]);
        }
        e
    }

    #[test]
    fn mean_of_three() {
        let om = aggregate_sam(&single_column(&[70.0, 80.0, 90.0]), &one_criterion((0.0, 100.0))).unwrap();
        assert_eq!(om.get(0, 0), 80.0);
    }

    #[test]
    fn single_row_is_identity() {
        let criteria = vec![
            CriterionSpec::new("x", (0.0, 100.0), 1.0, 0.0, 1.0),
            CriterionSpec::new("y", (0.0, 100.0), 1.0, 0.0, 1.0),
        ];
        let mut e = EvaluationSet::new(vec!["x".into(), "y".into()]);
        e.push("a", "u1", vec![12.5, 99.0]);
        let om = aggregate_sam(&e, &criteria).unwrap();
        assert_eq!(om.row(0), &[12.5, 99.0]);
    }

    #[test]
    fn half_star_mean() {
        let om = aggregate_sam(&single_column(&[1.0, 1.5, 4.5, 5.0]), &one_criterion((1.0, 5.0))).unwrap();
        assert_eq!(om.get(0, 0), 3.0);
    }

    #[test]
    fn ragged_and_unequal_rows_rejected() {
        let criteria = one_criterion((0.0, 10.0));
        let mut e = EvaluationSet::new(vec!["g".into()]);
        e.push("a", "u1", vec![1.0, 2.0]);
        assert!(matches!(
            aggregate_sam(&e, &criteria),
            Err(AggregationError::RaggedRows { .. })
        ));

        let mut e = EvaluationSet::new(vec!["g".into()]);
        e.push("a", "u1", vec![1.0]);
        e.push("b", "u2", vec![1.0]);
        e.push("b", "u3", vec![1.0]);
        assert!(matches!(
            aggregate_sam(&e, &criteria),
            Err(AggregationError::UnequalCounts { .. })
        ));

        let mut e = EvaluationSet::new(vec!["g".into()]);
        e.push_group("a", vec![]);
        assert!(matches!(
            aggregate_sam(&e, &criteria),
            Err(AggregationError::EmptyAlternative(_))
        ));
    }

    #[test]
    fn disjointness() {
        let mut e = EvaluationSet::new(vec!["g".into()]);
        e.push("a", "u1", vec![1.0]);
        e.push("b", "u2", vec![1.0]);
        assert!(check_disjoint_contributors(&e).is_ok());

        e.push("b", "u1", vec![2.0]);
        let offenders = check_disjoint_contributors(&e).unwrap_err();
        assert_eq!(
            offenders,
            vec![DuplicateContributor {
                user: "u1".into(),
                first: "a".into(),
                second: "b".into()
            }]
        );
    }

    #[test]
    fn twelve_by_ten_unique_users_are_disjoint() {
        let mut e = EvaluationSet::new(vec!["g".into()]);
        for a in 0..12 {
            for k in 0..10 {
                e.push(&format!("a{a}"), format!("user{}", a * 10 + k), vec![50.0]);
            }
        }
        assert_eq!(e.total_rows(), 120);
        assert!(check_disjoint_contributors(&e).is_ok());
    }

    proptest! {
        #[test]
        fn mean_is_bounded_and_permutation_invariant(
            scores in prop::collection::vec(0.0f64..100.0, 1..40),
            shift in -50.0f64..50.0,
            seed in any::<u64>(),
        ) {
            let criteria = one_criterion((-100.0, 200.0));
            let om = aggregate_sam(&single_column(&scores), &criteria).unwrap();
            let mean = om.get(0, 0);
            let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo - 1e-9 <= mean && mean <= hi + 1e-9);

            let mut shuffled = scores.clone();
            use rand::{seq::SliceRandom, SeedableRng};
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let om2 = aggregate_sam(&single_column(&shuffled), &criteria).unwrap();
            prop_assert!((om2.get(0, 0) - mean).abs() < 1e-9);

            let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
            let om3 = aggregate_sam(&single_column(&shifted), &criteria).unwrap();
            prop_assert!((om3.get(0, 0) - (mean + shift)).abs() < 1e-9);
        }
    }
}
