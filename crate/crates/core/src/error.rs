//! Error types shared across the pipeline.
//!
//! Every error belongs to one [`ErrorCategory`], which the CLI maps to its
//! process exit code and the C ABI maps to its status code.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Coarse error family: configuration, input data, or privacy accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Privacy,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Privacy => 4,
        }
    }
}

/// A single violated problem invariant, with its location.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DomainViolation {
        alternative: String,
        criterion: String,
        value: f64,
        min: f64,
        max: f64,
    },
    DomainOrder {
        criterion: String,
        min: f64,
        max: f64,
    },
    ThresholdOrder {
        criterion: String,
        q: f64,
        p: f64,
        v: Option<f64>,
    },
    NegativeWeight {
        criterion: String,
        weight: f64,
    },
    WeightError {
        sum: f64,
    },
    ShareError {
        sum: f64,
    },
    CriteriaMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    DuplicateAlternative {
        alternative: String,
    },
    NoCriteria,
    NonFinite {
        alternative: String,
        criterion: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DomainViolation {
                alternative,
                criterion,
                value,
                min,
                max,
            } => write!(
                f,
                "DomainViolation: {alternative}/{criterion} = {value} outside [{min}, {max}]"
            ),
            Violation::DomainOrder { criterion, min, max } => write!(
                f,
                "DomainOrder: criterion {criterion} has domain_min {min} >= domain_max {max}"
            ),
            Violation::ThresholdOrder { criterion, q, p, v } => match v {
                Some(v) => write!(
                    f,
                    "ThresholdOrder: criterion {criterion} requires 0 <= q <= p < v (q={q}, p={p}, v={v})"
                ),
                None => write!(
                    f,
                    "ThresholdOrder: criterion {criterion} requires 0 <= q <= p (q={q}, p={p})"
                ),
            },
            Violation::NegativeWeight { criterion, weight } => {
                write!(f, "WeightError: criterion {criterion} has negative weight {weight}")
            }
            Violation::WeightError { sum } => {
                write!(f, "WeightError: weights sum to {sum}, must be positive")
            }
            Violation::ShareError { sum } => {
                write!(f, "ShareError: epsilon shares sum to {sum}, must be 1")
            }
            Violation::CriteriaMismatch { expected, found } => write!(
                f,
                "criteria mismatch: expected [{}], found [{}]",
                expected.join(","),
                found.join(",")
            ),
            Violation::DuplicateAlternative { alternative } => {
                write!(f, "duplicate alternative id {alternative}")
            }
            Violation::NoCriteria => write!(f, "no criteria declared"),
            Violation::NonFinite { alternative, criterion } => {
                write!(f, "non-finite value at {alternative}/{criterion}")
            }
        }
    }
}

/// Every violation found while validating a problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationErrors(pub Vec<Violation>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} problem violation(s)", self.0.len())?;
        for v in &self.0 {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum AggregationError {
    #[error("alternative {0} has no evaluations")]
    EmptyAlternative(String),
    #[error("alternative {alternative}, user {user}: expected {expected} scores, found {found}")]
    RaggedRows {
        alternative: String,
        user: String,
        expected: usize,
        found: usize,
    },
    #[error("alternative {alternative} has {found} evaluations, expected K = {expected}")]
    UnequalCounts {
        alternative: String,
        expected: usize,
        found: usize,
    },
    #[error("evaluation criteria do not match the problem criteria")]
    CriteriaMismatch,
}

#[derive(Debug, Error)]
pub enum PrivacyError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("noise scale must be positive and finite, got {0}")]
    NonpositiveScale(f64),
    #[error("ShareError: {0}")]
    ShareError(String),
    #[error("DisjointnessViolation: {} user(s) contribute to several alternatives (first: {})", .0.len(), .0.first().map(|d| d.user.as_str()).unwrap_or("-"))]
    DisjointnessViolation(Vec<crate::aggregation::DuplicateContributor>),
    #[error("EmptyScores: local sensitivity needs at least one score")]
    EmptyScores,
    #[error("K must be at least 1")]
    ZeroK,
    #[error("matrix and evaluations disagree: {0}")]
    InputMismatch(String),
}

#[derive(Debug, Error)]
pub enum RankingError {
    #[error("TooFewAlternatives: need at least {needed}, got {found}")]
    TooFewAlternatives { needed: usize, found: usize },
    #[error("CoverageMismatch: preorders cover different alternative sets")]
    CoverageMismatch,
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("AlternativeSetMismatch: rankings cover different alternatives")]
    AlternativeSetMismatch,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("MissingColumn: {0}")]
    MissingColumn(String),
    #[error("DomainViolation at line {line}: {detail}")]
    DomainViolation { line: u64, detail: String },
    #[error("DuplicateUserForAlternative at line {line}: user {user} already rated {alternative}")]
    DuplicateUserForAlternative {
        line: u64,
        user: String,
        alternative: String,
    },
    #[error("ParseError at line {line}: {detail}")]
    ParseError { line: u64, detail: String },
    #[error("NotEnoughAlternatives: need {needed} with at least {k} evaluations, found {found}")]
    NotEnoughAlternatives { needed: usize, k: usize, found: usize },
    #[error("NotEnoughDisjointUsers: alternative {alternative} has only {found} unused contributors, need {needed}")]
    NotEnoughDisjointUsers {
        alternative: String,
        needed: usize,
        found: usize,
    },
    #[error("BadTierSplit: need at least 3 alternatives, got {0}")]
    BadTierSplit(usize),
    #[error("K must be at least 1")]
    ZeroK,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Top-level error returned by pipelines and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid problem: {0}")]
    Validation(#[from] ValidationErrors),
    #[error("aggregation error: {0}")]
    Aggregation(#[from] AggregationError),
    #[error("privacy error: {0}")]
    Privacy(#[from] PrivacyError),
    #[error("ranking error: {0}")]
    Ranking(#[from] RankingError),
    #[error("metric error: {0}")]
    Metric(#[from] MetricError),
    #[error("data error: {0}")]
    Data(#[from] DataError),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) => ErrorCategory::Config,
            Error::Validation(v) => {
                // Malformed thresholds, weights or shares are configuration
                // mistakes; out-of-domain cells are data mistakes.
                let data_only = v.0.iter().all(|x| {
                    matches!(
                        x,
                        Violation::DomainViolation { .. }
                            | Violation::DuplicateAlternative { .. }
                            | Violation::NonFinite { .. }
                            | Violation::CriteriaMismatch { .. }
                    )
                });
                if data_only {
                    ErrorCategory::Data
                } else {
                    ErrorCategory::Config
                }
            }
            Error::Aggregation(_) | Error::Metric(_) | Error::Data(_) => ErrorCategory::Data,
            Error::Ranking(RankingError::Invalid(_)) => ErrorCategory::Config,
            Error::Ranking(_) => ErrorCategory::Data,
            Error::Privacy(_) => ErrorCategory::Privacy,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.category().exit_code()
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
