//! Decision-problem data model: criteria, performance matrices, raw
//! evaluation sets and ranking results.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{ValidationErrors, Violation};

/// Tolerance used when checking that epsilon shares sum to one.
pub const SHARE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

/// PROMETHEE preference function attached to a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceFunction {
    Usual,
    #[serde(alias = "u_shape")]
    UShape,
    #[serde(alias = "v_shape")]
    VShape,
    #[default]
    Level,
    #[serde(alias = "linear")]
    LinearWithIndifference,
    Gaussian,
}

/// Per-criterion metadata. Thresholds are constants in criterion units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub name: String,
    #[serde(default)]
    pub direction: Direction,
    pub domain_min: f64,
    pub domain_max: f64,
    /// Grid spacing of raw scores (e.g. 0.5 for half-star ratings).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    pub weight: f64,
    pub q: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default)]
    pub pref_fn: PreferenceFunction,
    /// Fraction of the per-alternative budget spent on this criterion.
    /// Unset shares split the remaining mass evenly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_share: Option<f64>,
}

impl CriterionSpec {
    /// A maximize criterion with level preference and no step, veto or share.
    pub fn new(name: impl Into<String>, domain: (f64, f64), weight: f64, q: f64, p: f64) -> Self {
        CriterionSpec {
            name: name.into(),
            direction: Direction::Maximize,
            domain_min: domain.0,
            domain_max: domain.1,
            step: None,
            weight,
            q,
            p,
            v: None,
            pref_fn: PreferenceFunction::Level,
            epsilon_share: None,
        }
    }

    pub fn with_veto(mut self, v: f64) -> Self {
        self.v = Some(v);
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn with_pref_fn(mut self, pref_fn: PreferenceFunction) -> Self {
        self.pref_fn = pref_fn;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_share(mut self, share: f64) -> Self {
        self.epsilon_share = Some(share);
        self
    }

    pub fn width(&self) -> f64 {
        self.domain_max - self.domain_min
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.domain_min && value <= self.domain_max
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.domain_min, self.domain_max)
    }

    /// Performance oriented so that larger is better.
    pub fn oriented(&self, value: f64) -> f64 {
        match self.direction {
            Direction::Maximize => value,
            Direction::Minimize => -value,
        }
    }

    /// True when `value` lies on the declared step grid (always true without a step).
    pub fn on_grid(&self, value: f64) -> bool {
        match self.step {
            None => true,
            Some(step) if step > 0.0 => {
                let k = (value - self.domain_min) / step;
                (k - k.round()).abs() < 1e-9
            }
            Some(_) => true,
        }
    }
}

/// Effective epsilon shares, filling unset entries evenly from the remaining mass.
pub fn epsilon_shares(criteria: &[CriterionSpec]) -> Vec<f64> {
    let fixed: f64 = criteria.iter().filter_map(|c| c.epsilon_share).sum();
    let unset = criteria.iter().filter(|c| c.epsilon_share.is_none()).count();
    let fill = if unset == 0 { 0.0 } else { (1.0 - fixed) / unset as f64 };
    criteria.iter().map(|c| c.epsilon_share.unwrap_or(fill)).collect()
}

pub fn criterion_names(criteria: &[CriterionSpec]) -> Vec<String> {
    criteria.iter().map(|c| c.name.clone()).collect()
}

/// Alternatives × criteria grid of aggregated performances, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    alternatives: Vec<String>,
    criteria: Vec<String>,
    values: Vec<f64>,
}

impl PerformanceMatrix {
    pub fn new(alternatives: Vec<String>, criteria: Vec<String>, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            alternatives.len() * criteria.len(),
            "matrix values must be |A|*|G|"
        );
        PerformanceMatrix {
            alternatives,
            criteria,
            values,
        }
    }

    pub fn from_rows(alternatives: Vec<String>, criteria: Vec<String>, rows: &[Vec<f64>]) -> Self {
        let values = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(alternatives, criteria, values)
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn n_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn n_criteria(&self) -> usize {
        self.criteria.len()
    }

    pub fn get(&self, alternative: usize, criterion: usize) -> f64 {
        self.values[alternative * self.criteria.len() + criterion]
    }

    pub fn set(&mut self, alternative: usize, criterion: usize, value: f64) {
        let m = self.criteria.len();
        self.values[alternative * m + criterion] = value;
    }

    pub fn row(&self, alternative: usize) -> &[f64] {
        let m = self.criteria.len();
        &self.values[alternative * m..(alternative + 1) * m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.alternatives
            .iter()
            .enumerate()
            .map(move |(i, a)| (a.as_str(), self.row(i)))
    }

    /// Same matrix with alternatives reordered; `order[i]` is the source row of row `i`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let alternatives = order.iter().map(|&i| self.alternatives[i].clone()).collect();
        let values = order.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        PerformanceMatrix::new(alternatives, self.criteria.clone(), values)
    }
}

/// A single user's score vector for one alternative.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub user: String,
    pub scores: Vec<f64>,
}

/// Raw evaluations grouped by alternative, in alternative insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSet {
    criteria: Vec<String>,
    groups: Vec<(String, Vec<Evaluation>)>,
}

impl EvaluationSet {
    pub fn new(criteria: Vec<String>) -> Self {
        EvaluationSet {
            criteria,
            groups: Vec::new(),
        }
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    /// Appends an evaluation, creating the alternative group on first use.
    pub fn push(&mut self, alternative: &str, user: impl Into<String>, scores: Vec<f64>) {
        let eval = Evaluation {
            user: user.into(),
            scores,
        };
        match self.groups.iter_mut().find(|(a, _)| a == alternative) {
            Some((_, rows)) => rows.push(eval),
            None => self.groups.push((alternative.to_string(), vec![eval])),
        }
    }

    pub fn push_group(&mut self, alternative: impl Into<String>, rows: Vec<Evaluation>) {
        self.groups.push((alternative.into(), rows));
    }

    pub fn groups(&self) -> &[(String, Vec<Evaluation>)] {
        &self.groups
    }

    pub fn alternatives(&self) -> Vec<String> {
        self.groups.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn n_alternatives(&self) -> usize {
        self.groups.len()
    }

    pub fn rows(&self, alternative: usize) -> &[Evaluation] {
        &self.groups[alternative].1
    }

    /// Common number of evaluations per alternative, if every alternative has the same count.
    pub fn k(&self) -> Option<usize> {
        let first = self.groups.first()?.1.len();
        self.groups.iter().all(|(_, rows)| rows.len() == first).then_some(first)
    }

    pub fn total_rows(&self) -> usize {
        self.groups.iter().map(|(_, r)| r.len()).sum()
    }

    /// Scores of one alternative on one criterion.
    pub fn column(&self, alternative: usize, criterion: usize) -> Vec<f64> {
        self.groups[alternative].1.iter().map(|e| e.scores[criterion]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Electre3,
    Promethee2,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Electre3 => "electre3",
            Method::Promethee2 => "promethee2",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "electre3" | "electre-iii" | "electre" => Ok(Method::Electre3),
            "promethee2" | "promethee-ii" | "promethee" => Ok(Method::Promethee2),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    #[default]
    None,
    #[serde(alias = "DP")]
    Dp,
    #[serde(alias = "IDP")]
    Idp,
}

impl Mechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::None => "none",
            Mechanism::Dp => "dp",
            Mechanism::Idp => "idp",
        }
    }
}

impl std::str::FromStr for Mechanism {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Mechanism::None),
            "dp" => Ok(Mechanism::Dp),
            "idp" => Ok(Mechanism::Idp),
            other => Err(format!("unknown mechanism '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub alternative: String,
    /// Lower is better; tied scores mean tied positions.
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RankMetadata {
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankResult {
    pub method: Method,
    /// One entry per alternative, in input matrix order.
    pub entries: Vec<RankEntry>,
    pub metadata: RankMetadata,
}

impl RankResult {
    pub fn new(method: Method, alternatives: &[String], scores: &[f64]) -> Self {
        let entries = alternatives
            .iter()
            .zip(scores)
            .map(|(a, &s)| RankEntry {
                alternative: a.clone(),
                score: s,
            })
            .collect();
        RankResult {
            method,
            entries,
            metadata: RankMetadata::default(),
        }
    }

    pub fn with_metadata(mut self, metadata: RankMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    pub fn score_of(&self, alternative: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.alternative == alternative)
            .map(|e| e.score)
    }

    /// Alternative ids sorted best-first; ties keep input order.
    pub fn ordered(&self) -> Vec<&str> {
        let mut idx: Vec<usize> = (0..self.entries.len()).collect();
        idx.sort_by(|&a, &b| self.entries[a].score.total_cmp(&self.entries[b].score));
        idx.into_iter().map(|i| self.entries[i].alternative.as_str()).collect()
    }
}

/// A problem whose criteria and matrix passed [`validate_problem`].
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    criteria: Vec<CriterionSpec>,
    matrix: PerformanceMatrix,
}

impl Problem {
    pub fn criteria(&self) -> &[CriterionSpec] {
        &self.criteria
    }

    pub fn matrix(&self) -> &PerformanceMatrix {
        &self.matrix
    }

    pub fn into_parts(self) -> (Vec<CriterionSpec>, PerformanceMatrix) {
        (self.criteria, self.matrix)
    }
}

/// Checks criterion-level invariants only (no matrix).
pub fn validate_criteria(criteria: &[CriterionSpec]) -> Vec<Violation> {
    let mut out = Vec::new();
    if criteria.is_empty() {
        out.push(Violation::NoCriteria);
        return out;
    }
    for c in criteria {
        if !(c.domain_min < c.domain_max) {
            out.push(Violation::DomainOrder {
                criterion: c.name.clone(),
                min: c.domain_min,
                max: c.domain_max,
            });
        }
        let ordered = c.q >= 0.0 && c.q <= c.p && c.v.is_none_or(|v| c.p < v);
        if !ordered {
            out.push(Violation::ThresholdOrder {
                criterion: c.name.clone(),
                q: c.q,
                p: c.p,
                v: c.v,
            });
        }
        if c.weight < 0.0 || !c.weight.is_finite() {
            out.push(Violation::NegativeWeight {
                criterion: c.name.clone(),
                weight: c.weight,
            });
        }
    }
    let wsum: f64 = criteria.iter().map(|c| c.weight).sum();
    if !(wsum > 0.0) {
        out.push(Violation::WeightError { sum: wsum });
    }
    let shares = epsilon_shares(criteria);
    let ssum: f64 = shares.iter().sum();
    if (ssum - 1.0).abs() > SHARE_TOLERANCE || shares.iter().any(|&s| s < 0.0) {
        out.push(Violation::ShareError { sum: ssum });
    }
    out
}

/// Validates a problem, returning every violated invariant.
pub fn validate_problem(criteria: &[CriterionSpec], matrix: &PerformanceMatrix) -> Result<Problem, ValidationErrors> {
    let mut out = validate_criteria(criteria);

    let names = criterion_names(criteria);
    if names != matrix.criteria() {
        out.push(Violation::CriteriaMismatch {
            expected: names,
            found: matrix.criteria().to_vec(),
        });
        return Err(ValidationErrors(out));
    }

    let mut seen = HashSet::new();
    for a in matrix.alternatives() {
        if !seen.insert(a.as_str()) {
            out.push(Violation::DuplicateAlternative { alternative: a.clone() });
        }
    }

    for (i, alt) in matrix.alternatives().iter().enumerate() {
        for (j, c) in criteria.iter().enumerate() {
            let value = matrix.get(i, j);
            if !value.is_finite() {
                out.push(Violation::NonFinite {
                    alternative: alt.clone(),
                    criterion: c.name.clone(),
                });
            } else if !c.contains(value) {
                out.push(Violation::DomainViolation {
                    alternative: alt.clone(),
                    criterion: c.name.clone(),
                    value,
                    min: c.domain_min,
                    max: c.domain_max,
                });
            }
        }
    }

    if out.is_empty() {
        Ok(Problem {
            criteria: criteria.to_vec(),
            matrix: matrix.clone(),
        })
    } else {
        Err(ValidationErrors(out))
    }
}
