//! End-to-end wiring: evaluations → OM → (optional) OM* → rankings.

use crate::aggregation::{aggregate_sam, check_disjoint_contributors, DuplicateContributor};
use crate::electre3::{electre3_rank, DistillationParams};
use crate::error::{Error, PrivacyError, RankingError};
use crate::model::{
    validate_problem, CriterionSpec, EvaluationSet, Mechanism, Method, PerformanceMatrix, RankMetadata, RankResult,
};
use crate::privacy::{anonymize_matrix, PrivacyParams, SensitivityReport};
use crate::promethee2::promethee2_rank;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RankingParams {
    pub distillation: DistillationParams,
}

pub fn rank_matrix(
    method: Method,
    matrix: &PerformanceMatrix,
    criteria: &[CriterionSpec],
    params: &RankingParams,
) -> Result<RankResult, RankingError> {
    match method {
        Method::Electre3 => electre3_rank(matrix, criteria, &params.distillation),
        Method::Promethee2 => promethee2_rank(matrix, criteria),
    }
}

/// Criteria whose domains are stretched to cover every value in `matrix`.
///
/// Unclamped OM* cells may leave the declared domains; thresholds and
/// preference functions do not depend on the domain, so ranking them against
/// widened domains is otherwise identical.
pub fn widen_domains(criteria: &[CriterionSpec], matrix: &PerformanceMatrix) -> Vec<CriterionSpec> {
    criteria
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut c = c.clone();
            for i in 0..matrix.n_alternatives() {
                let v = matrix.get(i, j);
                if v.is_finite() {
                    c.domain_min = c.domain_min.min(v);
                    c.domain_max = c.domain_max.max(v);
                }
            }
            c
        })
        .collect()
}

/// Everything produced by one ranking run.
#[derive(Debug, Clone)]
pub struct RankingRun {
    pub om: PerformanceMatrix,
    /// Present when a privacy mechanism was applied.
    pub anonymized: Option<(PerformanceMatrix, SensitivityReport)>,
    pub rankings: Vec<RankResult>,
    /// Contributor overlaps tolerated because no mechanism was active.
    pub warnings: Vec<DuplicateContributor>,
}

/// Aggregates, optionally anonymizes, and ranks with each requested method.
///
/// Overlapping contributor sets are fatal when a mechanism is active and are
/// reported as warnings otherwise.
pub fn run_ranking(
    evals: &EvaluationSet,
    criteria: &[CriterionSpec],
    methods: &[Method],
    ranking: &RankingParams,
    privacy: &PrivacyParams,
) -> Result<RankingRun, Error> {
    let warnings = match check_disjoint_contributors(evals) {
        Ok(()) => Vec::new(),
        Err(dups) if privacy.mechanism == Mechanism::None => dups,
        Err(dups) => return Err(PrivacyError::DisjointnessViolation(dups).into()),
    };
    let om = aggregate_sam(evals, criteria)?;
    validate_problem(criteria, &om)?;
    let k = evals.k().unwrap_or(0);

    let anonymized = match privacy.mechanism {
        Mechanism::None => None,
        _ => Some(anonymize_matrix(&om, evals, criteria, privacy)?),
    };
    let target = anonymized.as_ref().map_or(&om, |(m, _)| m);
    let ranking_criteria = if privacy.clamp_output {
        criteria.to_vec()
    } else {
        widen_domains(criteria, target)
    };
    let metadata = RankMetadata {
        mechanism: privacy.mechanism,
        epsilon: if privacy.mechanism == Mechanism::None {
            f64::INFINITY
        } else {
            privacy.epsilon
        },
        k,
        seed: privacy.seed,
    };
    let rankings = methods
        .iter()
        .map(|&m| rank_matrix(m, target, &ranking_criteria, ranking).map(|r| r.with_metadata(metadata)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RankingRun {
        om,
        anonymized,
        rankings,
        warnings,
    })
}
