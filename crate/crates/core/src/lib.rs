//! Differentially private multi-criteria rankings.
//!
//! Per-user evaluations are averaged into a performance matrix, perturbed
//! with Laplace noise under global (DP) or local (iDP) sensitivity, and ranked
//! with ELECTRE-III or PROMETHEE-II. The [`evaluation`] module measures the
//! utility cost with MAE and Spearman's rank correlation over (epsilon, K) grids.
//!
//! ```
//! use outrank_dp::model::{CriterionSpec, EvaluationSet, Mechanism};
//! use outrank_dp::{aggregation, privacy, promethee2};
//!
//! let criteria = vec![CriterionSpec::new("taste", (1.0, 5.0), 1.0, 0.5, 1.0)];
//! let mut evals = EvaluationSet::new(vec!["taste".into()]);
//! evals.push("stout", "u1", vec![4.5]);
//! evals.push("lager", "u2", vec![3.0]);
//! let om = aggregation::aggregate_sam(&evals, &criteria).unwrap();
//! let params = privacy::PrivacyParams::new(1.0, Mechanism::Idp, 7);
//! let (noisy, _report) = privacy::anonymize_matrix(&om, &evals, &criteria, &params).unwrap();
//! let ranking = promethee2::promethee2_rank(&noisy, &criteria).unwrap();
//! assert_eq!(ranking.entries.len(), 2);
//! ```

pub mod aggregation;
pub mod cli;
pub mod config;
pub mod data_io;
pub mod electre3;
pub mod error;
pub mod evaluation;
pub mod model;
pub mod pipeline;
pub mod privacy;
pub mod promethee2;
pub mod ranks;

pub use config::Config;
pub use error::{Error, ErrorCategory, Result};
pub use model::{CriterionSpec, EvaluationSet, Mechanism, Method, PerformanceMatrix, RankResult};
