//! PROMETHEE-II: weighted preference indices and net-flow ranking.

use std::io::Write;

use crate::error::RankingError;
use crate::model::{validate_problem, CriterionSpec, Method, PerformanceMatrix, PreferenceFunction, RankResult};
use crate::ranks::average_ranks;

/// Degree to which an advantage `d` (already oriented so positive favours the
/// first alternative) translates into preference on this criterion.
pub fn preference_value(d: f64, criterion: &CriterionSpec) -> f64 {
    let (q, p) = (criterion.q, criterion.p);
    match criterion.pref_fn {
        PreferenceFunction::Usual => {
            if d > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        PreferenceFunction::UShape => {
            if d > q {
                1.0
            } else {
                0.0
            }
        }
        PreferenceFunction::VShape => {
            if p > 0.0 {
                (d / p).clamp(0.0, 1.0)
            } else if d > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        PreferenceFunction::Level => {
            if d <= q {
                0.0
            } else if d <= p {
                0.5
            } else {
                1.0
            }
        }
        PreferenceFunction::LinearWithIndifference => {
            if d <= q {
                0.0
            } else if d > p {
                1.0
            } else {
                (d - q) / (p - q)
            }
        }
        PreferenceFunction::Gaussian => {
            if d <= 0.0 {
                0.0
            } else {
                let s = p;
                1.0 - (-(d * d) / (2.0 * s * s)).exp()
            }
        }
    }
}

/// Aggregated preference `Pi(a, b)`: weighted mean of the partial preferences.
pub fn preference_index(a: usize, b: usize, matrix: &PerformanceMatrix, criteria: &[CriterionSpec]) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, c) in criteria.iter().enumerate() {
        let d = c.oriented(matrix.get(a, j)) - c.oriented(matrix.get(b, j));
        num += c.weight * preference_value(d, c);
        den += c.weight;
    }
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow {
    pub leaving: f64,
    pub entering: f64,
    pub net: f64,
}

pub fn net_flows(matrix: &PerformanceMatrix, criteria: &[CriterionSpec]) -> Result<Vec<Flow>, RankingError> {
    let n = matrix.n_alternatives();
    if n < 2 {
        return Err(RankingError::TooFewAlternatives { needed: 2, found: n });
    }
    let mut pi = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            pi[a * n + b] = preference_index(a, b, matrix, criteria);
        }
    }
    let norm = 1.0 / (n as f64 - 1.0);
    Ok((0..n)
        .map(|a| {
            let leaving: f64 = (0..n).filter(|&x| x != a).map(|x| pi[a * n + x]).sum::<f64>() * norm;
            let entering: f64 = (0..n).filter(|&x| x != a).map(|x| pi[x * n + a]).sum::<f64>() * norm;
            Flow {
                leaving,
                entering,
                net: leaving - entering,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Promethee2Outcome {
    pub flows: Vec<Flow>,
    pub rank: RankResult,
}

impl Promethee2Outcome {
    /// CSV with columns `alternative,phi_plus,phi_minus,phi_net,rank`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["alternative", "phi_plus", "phi_minus", "phi_net", "rank"])?;
        for (f, e) in self.flows.iter().zip(&self.rank.entries) {
            w.write_record([
                e.alternative.clone(),
                f.leaving.to_string(),
                f.entering.to_string(),
                f.net.to_string(),
                e.score.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Ranks by descending net flow; exact ties share the average position.
pub fn promethee2(matrix: &PerformanceMatrix, criteria: &[CriterionSpec]) -> Result<Promethee2Outcome, RankingError> {
    validate_problem(criteria, matrix)?;
    let flows = net_flows(matrix, criteria)?;
    let neg: Vec<f64> = flows.iter().map(|f| -f.net).collect();
    let rank = RankResult::new(Method::Promethee2, matrix.alternatives(), &average_ranks(&neg));
    Ok(Promethee2Outcome { flows, rank })
}

pub fn promethee2_rank(matrix: &PerformanceMatrix, criteria: &[CriterionSpec]) -> Result<RankResult, RankingError> {
    promethee2(matrix, criteria).map(|o| o.rank)
}
