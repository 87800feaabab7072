//! Laplace anonymization of the overall performance matrix.
//!
//! Each alternative is built from its own disjoint set of K contributors, so
//! by parallel composition every alternative may spend the full budget
//! `epsilon`. Within an alternative the budget is split across criteria
//! (sequential composition) as `epsilon * epsilon_share_j`.
//!
//! Noise scale per cell is `sensitivity / epsilon_j`, where the sensitivity
//! of the mean of K scores is either
//!
//! ```text
//! global: (max D - min D) / K
//! local:  max(max D - min(scores), max(scores) - min D) / K
//! ```
//!
//! the latter computed from the cell's own K raw scores (iDP).

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregation::check_disjoint_contributors;
use crate::error::PrivacyError;
use crate::model::{epsilon_shares, CriterionSpec, EvaluationSet, Mechanism, PerformanceMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    /// Total budget per alternative.
    pub epsilon: f64,
    pub mechanism: Mechanism,
    /// Clamp noisy cells back into the criterion domain (post-processing).
    pub clamp_output: bool,
    pub seed: u64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, mechanism: Mechanism, seed: u64) -> Self {
        PrivacyParams {
            epsilon,
            mechanism,
            clamp_output: true,
            seed,
        }
    }

    pub fn unclamped(mut self) -> Self {
        self.clamp_output = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCell {
    pub alternative: String,
    pub criterion: String,
    pub global_sensitivity: f64,
    pub local_sensitivity: f64,
    pub noise_scale: f64,
    pub epsilon_share: f64,
}

/// Per-cell sensitivities and the noise scale actually applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub epsilon: f64,
    pub mechanism: Mechanism,
    pub cells: Vec<SensitivityCell>,
}

impl SensitivityReport {
    /// Budget consumed by one alternative (sum of its per-criterion shares).
    pub fn epsilon_spent(&self, alternative: &str) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.alternative == alternative)
            .map(|c| self.epsilon * c.epsilon_share)
            .sum()
    }

    /// CSV with columns `alternative,criterion,global_sens,local_sens,scale,epsilon_share`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "alternative",
            "criterion",
            "global_sens",
            "local_sens",
            "scale",
            "epsilon_share",
        ])?;
        for c in &self.cells {
            w.write_record([
                c.alternative.clone(),
                c.criterion.clone(),
                c.global_sensitivity.to_string(),
                c.local_sensitivity.to_string(),
                c.noise_scale.to_string(),
                c.epsilon_share.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sensitivity of the K-sample mean over the whole criterion domain.
pub fn global_sensitivity_sam(criterion: &CriterionSpec, k: usize) -> f64 {
    criterion.width() / k as f64
}

/// Local sensitivity of the mean of `scores` (K = `scores.len()`).
pub fn local_sensitivity_sam(scores: &[f64], criterion: &CriterionSpec) -> Result<f64, PrivacyError> {
    if scores.is_empty() {
        return Err(PrivacyError::EmptyScores);
    }
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = (criterion.domain_max - lo).max(hi - criterion.domain_min);
    Ok(spread / scores.len() as f64)
}

/// Per-criterion budgets `epsilon * share_j`. Zero or negative shares are rejected.
pub fn split_budget(epsilon: f64, criteria: &[CriterionSpec]) -> Result<Vec<f64>, PrivacyError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(PrivacyError::InvalidEpsilon(epsilon));
    }
    let shares = epsilon_shares(criteria);
    let sum: f64 = shares.iter().sum();
    if (sum - 1.0).abs() > crate::model::SHARE_TOLERANCE {
        return Err(PrivacyError::ShareError(format!("shares sum to {sum}, must be 1")));
    }
    if let Some((c, s)) = criteria.iter().zip(&shares).find(|(_, &s)| s <= 0.0) {
        return Err(PrivacyError::ShareError(format!(
            "criterion {} has share {s}; every ranked criterion needs a positive share",
            c.name
        )));
    }
    Ok(shares.into_iter().map(|s| epsilon * s).collect())
}

/// One draw from Laplace(0, scale) by inverse CDF on a uniform draw.
pub fn laplace_sample<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64, PrivacyError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(PrivacyError::NonpositiveScale(scale));
    }
    Ok(laplace_unchecked(scale, rng))
}

fn laplace_unchecked<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    // u = 0 maps to an infinite draw.
    let u = loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let c = u - 0.5;
    -scale * c.signum() * (1.0 - 2.0 * c.abs()).ln()
}

/// Generator used for all noise: ChaCha8, seeded from a 64-bit value.
pub fn noise_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builds OM* from OM.
///
/// Cells are perturbed in row-major order (alternatives, then criteria) from
/// one generator seeded with `params.seed`. With [`Mechanism::None`] the
/// matrix is returned unchanged and the report carries zero scales.
pub fn anonymize_matrix(
    om: &PerformanceMatrix,
    evals: &EvaluationSet,
    criteria: &[CriterionSpec],
    params: &PrivacyParams,
) -> Result<(PerformanceMatrix, SensitivityReport), PrivacyError> {
    let mut rng = noise_rng(params.seed);
    anonymize_matrix_with_rng(om, evals, criteria, params, &mut rng)
}

/// [`anonymize_matrix`] drawing from a caller-supplied generator.
pub fn anonymize_matrix_with_rng<R: Rng + ?Sized>(
    om: &PerformanceMatrix,
    evals: &EvaluationSet,
    criteria: &[CriterionSpec],
    params: &PrivacyParams,
    rng: &mut R,
) -> Result<(PerformanceMatrix, SensitivityReport), PrivacyError> {
    check_disjoint_contributors(evals).map_err(PrivacyError::DisjointnessViolation)?;
    if om.alternatives() != evals.alternatives().as_slice() {
        return Err(PrivacyError::InputMismatch("alternative order differs".into()));
    }
    if om.n_criteria() != criteria.len() || evals.criteria() != om.criteria() {
        return Err(PrivacyError::InputMismatch("criteria differ".into()));
    }
    let budgets = split_budget(params.epsilon, criteria)?;
    let shares = epsilon_shares(criteria);

    let mut noisy = om.clone();
    let mut cells = Vec::with_capacity(om.values().len());
    for (i, alt) in om.alternatives().iter().enumerate() {
        let k = evals.rows(i).len();
        if k == 0 {
            return Err(PrivacyError::ZeroK);
        }
        for (j, c) in criteria.iter().enumerate() {
            let gs = global_sensitivity_sam(c, k);
            let ls = local_sensitivity_sam(&evals.column(i, j), c)?;
            let used = match params.mechanism {
                Mechanism::None => 0.0,
                Mechanism::Dp => gs,
                Mechanism::Idp => ls,
            };
            let scale = used / budgets[j];
            if params.mechanism != Mechanism::None && scale > 0.0 {
                let mut value = om.get(i, j) + laplace_unchecked(scale, rng);
                if params.clamp_output {
                    value = c.clamp(value);
                }
                noisy.set(i, j, value);
            }
            cells.push(SensitivityCell {
                alternative: alt.clone(),
                criterion: c.name.clone(),
                global_sensitivity: gs,
                local_sensitivity: ls,
                noise_scale: scale,
                epsilon_share: shares[j],
            });
        }
    }

    Ok((
        noisy,
        SensitivityReport {
            epsilon: params.epsilon,
            mechanism: params.mechanism,
            cells,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::aggregate_sam;
    use proptest::prelude::*;

    fn crit(domain: (f64, f64)) -> CriterionSpec {
        CriterionSpec::new("g", domain, 1.0, 0.0, 1.0)
    }

    #[test]
    fn global_sensitivity_values() {
        assert_eq!(global_sensitivity_sam(&crit((0.0, 100.0)), 10), 10.0);
        assert_eq!(global_sensitivity_sam(&crit((1.0, 5.0)), 200), 0.02);
        assert_eq!(global_sensitivity_sam(&crit((0.0, 100.0)), 400), 0.25);
    }

    #[test]
    fn local_sensitivity_values() {
        let c = crit((0.0, 100.0));
        let scores = [30.0, 41.0, 55.0, 33.0, 47.0, 50.0, 38.0, 44.0, 52.0, 36.0];
        assert_eq!(local_sensitivity_sam(&scores, &c).unwrap(), 7.0);

        let top = [100.0; 8];
        assert_eq!(local_sensitivity_sam(&top, &c).unwrap(), global_sensitivity_sam(&c, 8));

        let beer = crit((1.0, 5.0));
        assert_eq!(local_sensitivity_sam(&[2.0, 2.0, 3.0, 3.0], &beer).unwrap(), 0.75);

        assert!(matches!(local_sensitivity_sam(&[], &c), Err(PrivacyError::EmptyScores)));
    }

    #[test]
    fn budget_split() {
        let six: Vec<_> = (0..6).map(|_| crit((0.0, 1.0))).collect();
        let b = split_budget(1.0, &six).unwrap();
        assert!(b.iter().all(|&e| (e - 1.0 / 6.0).abs() < 1e-15));
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let four: Vec<_> = (0..4).map(|_| crit((0.0, 1.0))).collect();
        assert_eq!(split_budget(0.5, &four).unwrap(), vec![0.125; 4]);

        let skewed = vec![
            crit((0.0, 1.0)).with_share(1.0),
            crit((0.0, 1.0)).with_share(0.0),
            crit((0.0, 1.0)).with_share(0.0),
        ];
        assert!(matches!(split_budget(1.0, &skewed), Err(PrivacyError::ShareError(_))));
        assert!(matches!(split_budget(0.0, &four), Err(PrivacyError::InvalidEpsilon(_))));
    }

    #[test]
    fn laplace_rejects_bad_scale_and_is_deterministic() {
        let mut rng = noise_rng(1);
        assert!(matches!(
            laplace_sample(0.0, &mut rng),
            Err(PrivacyError::NonpositiveScale(_))
        ));
        assert!(laplace_sample(f64::NAN, &mut rng).is_err());

        let a: Vec<f64> = {
            let mut r = noise_rng(99);
            (0..100).map(|_| laplace_sample(2.0, &mut r).unwrap()).collect()
        };
        let b: Vec<f64> = {
            let mut r = noise_rng(99);
            (0..100).map(|_| laplace_sample(2.0, &mut r).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn laplace_moments() {
        let b = 3.0;
        let n = 1_000_000;
        let mut rng = noise_rng(7);
        let (mut sum, mut abs) = (0.0, 0.0);
        for _ in 0..n {
            let x = laplace_sample(b, &mut rng).unwrap();
            sum += x;
            abs += x.abs();
        }
        let mean = sum / n as f64;
        let mean_abs = abs / n as f64;
        // Laplace(0, b): E|X| = b, sd = b * sqrt(2).
        assert!((mean_abs - b).abs() < 0.01 * b, "mean |x| = {mean_abs}");
        assert!(mean.abs() < 3.0 * b * 2f64.sqrt() / (n as f64).sqrt(), "mean = {mean}");
    }

    fn fixture(k: usize, m: usize, domain: (f64, f64), value: f64) -> (Vec<CriterionSpec>, EvaluationSet) {
        let criteria: Vec<_> = (0..m)
            .map(|j| CriterionSpec::new(format!("g{j}"), domain, 1.0, 0.0, 1.0))
            .collect();
        let mut e = EvaluationSet::new(crate::model::criterion_names(&criteria));
        for a in 0..3 {
            for u in 0..k {
                e.push(&format!("a{a}"), format!("u{a}-{u}"), vec![value; m]);
            }
        }
        (criteria, e)
    }

    #[test]
    fn dp_scales_match_formula() {
        let (criteria, evals) = fixture(400, 6, (0.0, 100.0), 60.0);
        let om = aggregate_sam(&evals, &criteria).unwrap();
        let (_, report) = anonymize_matrix(&om, &evals, &criteria, &PrivacyParams::new(1.0, Mechanism::Dp, 3)).unwrap();
        for c in &report.cells {
            assert!((c.noise_scale - 1.5).abs() < 1e-12);
        }
        for a in om.alternatives() {
            assert!((report.epsilon_spent(a) - 1.0).abs() < 1e-9);
        }

        let (criteria, evals) = fixture(200, 4, (1.0, 5.0), 3.5);
        let om = aggregate_sam(&evals, &criteria).unwrap();
        let (_, report) = anonymize_matrix(&om, &evals, &criteria, &PrivacyParams::new(1.0, Mechanism::Dp, 3)).unwrap();
        for c in &report.cells {
            assert!((c.noise_scale - 0.08).abs() < 1e-12);
        }
    }

    #[test]
    fn no_mechanism_is_identity() {
        let (criteria, evals) = fixture(10, 3, (0.0, 100.0), 42.0);
        let om = aggregate_sam(&evals, &criteria).unwrap();
        let (noisy, _) =
            anonymize_matrix(&om, &evals, &criteria, &PrivacyParams::new(1.0, Mechanism::None, 3)).unwrap();
        assert_eq!(noisy, om);
    }

    #[test]
    fn disjointness_is_enforced() {
        let (criteria, mut evals) = fixture(2, 1, (0.0, 100.0), 42.0);
        evals.push("a1", "shared", vec![1.0]);
        evals.push("a2", "shared", vec![1.0]);
        evals.push("a0", "extra", vec![1.0]);
        let om = PerformanceMatrix::new(evals.alternatives(), vec!["g0".into()], vec![1.0; 3]);
        let err = anonymize_matrix(&om, &evals, &criteria, &PrivacyParams::new(1.0, Mechanism::Idp, 3)).unwrap_err();
        assert!(matches!(err, PrivacyError::DisjointnessViolation(_)));
    }

    #[test]
    fn clamped_output_stays_in_domain() {
        let (criteria, evals) = fixture(10, 6, (0.0, 100.0), 95.0);
        let om = aggregate_sam(&evals, &criteria).unwrap();
        let (noisy, _) = anonymize_matrix(&om, &evals, &criteria, &PrivacyParams::new(0.1, Mechanism::Dp, 11)).unwrap();
        assert!(noisy.values().iter().all(|v| (0.0..=100.0).contains(v)));
        let (raw, _) = anonymize_matrix(
            &om,
            &evals,
            &criteria,
            &PrivacyParams::new(0.1, Mechanism::Dp, 11).unclamped(),
        )
        .unwrap();
        assert!(raw.values().iter().any(|v| !(0.0..=100.0).contains(v)));
    }

    #[test]
    fn report_csv_header() {
        let (criteria, evals) = fixture(4, 2, (0.0, 10.0), 5.0);
        let om = aggregate_sam(&evals, &criteria).unwrap();
        let (_, report) = anonymize_matrix(&om, &evals, &criteria, &PrivacyParams::new(1.0, Mechanism::Dp, 0)).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "alternative,criterion,global_sens,local_sens,scale,epsilon_share"
        );
        assert_eq!(lines.next().unwrap(), "a0,g0,2.5,1.25,5,0.5");
        assert_eq!(text.lines().count(), 7);
    }

    proptest! {
        #[test]
        fn local_never_exceeds_global(
            lo in -50.0f64..50.0,
            width in 0.1f64..200.0,
            fractions in prop::collection::vec(0.0f64..=1.0, 1..60),
        ) {
            let c = CriterionSpec::new("g", (lo, lo + width), 1.0, 0.0, 0.0);
            let scores: Vec<f64> = fractions.iter().map(|f| lo + f * width).collect();
            let ls = local_sensitivity_sam(&scores, &c).unwrap();
            let gs = global_sensitivity_sam(&c, scores.len());
            prop_assert!(ls >= 0.0);
            prop_assert!(ls <= gs);
        }
    }
}
