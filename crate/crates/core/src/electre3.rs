//! ELECTRE-III: valued outranking credibilities and their exploitation by
//! descending and ascending distillation.
//!
//! Per-criterion concordance and discordance use the piecewise-linear
//! pseudo-criterion forms. Credibility attenuates the weighted concordance
//! `c(a,b)` by every discordance that exceeds it:
//!
//! ```text
//! rho(a,b) = c(a,b)                                          if d_j(a,b) <= c(a,b) for all j
//! rho(a,b) = c(a,b) * prod_{d_j > c} (1 - d_j) / (1 - c)     otherwise
//! ```

use std::io::Write;

use crate::error::RankingError;
use crate::model::{validate_problem, CriterionSpec, Method, PerformanceMatrix, RankResult};

/// Square matrix of outranking credibilities; the diagonal is unused (zero).
#[derive(Debug, Clone, PartialEq)]
pub struct CredibilityMatrix {
    alternatives: Vec<String>,
    values: Vec<f64>,
}

impl CredibilityMatrix {
    /// Builds a matrix from explicit rows. Values must lie in [0, 1].
    pub fn from_rows(alternatives: Vec<String>, rows: &[Vec<f64>]) -> Self {
        let n = alternatives.len();
        assert_eq!(rows.len(), n);
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n);
            for (j, &v) in row.iter().enumerate() {
                assert!((0.0..=1.0).contains(&v), "credibility out of [0,1]");
                values.push(if i == j { 0.0 } else { v });
            }
        }
        CredibilityMatrix { alternatives, values }
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.alternatives.len() + b]
    }

    /// Square CSV with a header row and column of alternative ids.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.alternatives.iter().cloned());
        w.write_record(&header)?;
        for (i, a) in self.alternatives.iter().enumerate() {
            let mut rec = vec![a.clone()];
            rec.extend((0..self.len()).map(|j| self.get(i, j).to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Discrimination threshold `s(lambda) = alpha * lambda + beta` and an
/// optional fixed cutting level.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DistillationParams {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// When set, each step uses this cut instead of the iterated `lambda` levels
    /// and stops after one qualification round.
    #[serde(default)]
    pub fixed_cut: Option<f64>,
}

fn default_alpha() -> f64 {
    -0.15
}

fn default_beta() -> f64 {
    0.30
}

impl Default for DistillationParams {
    fn default() -> Self {
        DistillationParams {
            alpha: default_alpha(),
            beta: default_beta(),
            fixed_cut: None,
        }
    }
}

impl DistillationParams {
    pub fn discrimination(&self, lambda: f64) -> f64 {
        self.alpha * lambda + self.beta
    }

    /// `s(lambda) >= 0` on [0, 1]; s is affine so checking both ends suffices.
    pub fn is_valid(&self) -> bool {
        self.discrimination(0.0) >= 0.0
            && self.discrimination(1.0) >= 0.0
            && self.fixed_cut.is_none_or(|c| (0.0..=1.0).contains(&c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistillationDirection {
    Descending,
    Ascending,
}

/// Complete preorder as ordered classes of alternative indices, best class first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preorder {
    pub classes: Vec<Vec<usize>>,
}

impl Preorder {
    /// Tie-aware position of every alternative (1 = best), averaged within a class.
    pub fn positions(&self, n: usize) -> Vec<f64> {
        let mut pos = vec![f64::NAN; n];
        let mut before = 0usize;
        for class in &self.classes {
            let p = before as f64 + (class.len() as f64 + 1.0) / 2.0;
            for &a in class {
                pos[a] = p;
            }
            before += class.len();
        }
        pos
    }

    /// Class index of every alternative (0 = best class).
    pub fn class_index(&self, n: usize) -> Vec<Option<usize>> {
        let mut idx = vec![None; n];
        for (c, class) in self.classes.iter().enumerate() {
            for &a in class {
                idx[a] = Some(c);
            }
        }
        idx
    }
}

/// Pairwise relation in the intersected partial preorder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// a is preferred to b.
    Preferred,
    /// b is preferred to a.
    Dominated,
    Indifferent,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialPreorder {
    n: usize,
    relations: Vec<Relation>,
    /// Mean of the two tie-aware distillation positions; lower is better.
    pub rank_scores: Vec<f64>,
}

impl PartialPreorder {
    pub fn relation(&self, a: usize, b: usize) -> Relation {
        self.relations[a * self.n + b]
    }

    pub fn incomparable_pairs(&self) -> usize {
        (0..self.n)
            .flat_map(|a| (a + 1..self.n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.relation(a, b) == Relation::Incomparable)
            .count()
    }
}

/// Full ELECTRE-III result for one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Electre3Outcome {
    pub credibility: CredibilityMatrix,
    pub descending: Preorder,
    pub ascending: Preorder,
    pub preorder: PartialPreorder,
    pub rank: RankResult,
}

/// Oriented difference `g(b) - g(a)`: how much b beats a on this criterion.
fn advantage_of_b(a_perf: f64, b_perf: f64, criterion: &CriterionSpec) -> f64 {
    criterion.oriented(b_perf) - criterion.oriented(a_perf)
}

/// Partial concordance `c_j(a,b)` with the claim "a is at least as good as b".
pub fn concordance_partial(a_perf: f64, b_perf: f64, criterion: &CriterionSpec) -> f64 {
    let d = advantage_of_b(a_perf, b_perf, criterion);
    let (q, p) = (criterion.q, criterion.p);
    if d <= q {
        1.0
    } else if d >= p {
        0.0
    } else {
        (p - d) / (p - q)
    }
}

/// Weighted global concordance `c(a,b)`.
pub fn concordance_global(a: usize, b: usize, matrix: &PerformanceMatrix, criteria: &[CriterionSpec]) -> f64 {
    let (num, den) = criteria.iter().enumerate().fold((0.0, 0.0), |(num, den), (j, c)| {
        (
            num + c.weight * concordance_partial(matrix.get(a, j), matrix.get(b, j), c),
            den + c.weight,
        )
    });
    num / den
}

/// Partial discordance `d_j(a,b)`; identically zero without a veto threshold.
pub fn discordance(a_perf: f64, b_perf: f64, criterion: &CriterionSpec) -> f64 {
    let Some(v) = criterion.v else {
        return 0.0;
    };
    let d = advantage_of_b(a_perf, b_perf, criterion);
    let p = criterion.p;
    if d <= p {
        0.0
    } else if d >= v {
        1.0
    } else {
        (d - p) / (v - p)
    }
}

/// Credibility combining concordance with discordances above it.
pub fn credibility_from_indices(concordance: f64, discordances: &[f64]) -> f64 {
    let mut rho = concordance;
    for &d in discordances {
        if d > concordance {
            if d >= 1.0 {
                return 0.0;
            }
            // d > c implies c < 1, so the divisor is positive.
            rho *= (1.0 - d) / (1.0 - concordance);
        }
    }
    rho
}

pub fn credibility(a: usize, b: usize, matrix: &PerformanceMatrix, criteria: &[CriterionSpec]) -> f64 {
    let c = concordance_global(a, b, matrix, criteria);
    let d: Vec<f64> = criteria
        .iter()
        .enumerate()
        .map(|(j, cr)| discordance(matrix.get(a, j), matrix.get(b, j), cr))
        .collect();
    credibility_from_indices(c, &d)
}

pub fn credibility_matrix(matrix: &PerformanceMatrix, criteria: &[CriterionSpec]) -> CredibilityMatrix {
    let n = matrix.n_alternatives();
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                values[a * n + b] = credibility(a, b, matrix, criteria);
            }
        }
    }
    CredibilityMatrix {
        alternatives: matrix.alternatives().to_vec(),
        values,
    }
}

/// Largest credibility among ordered pairs of `set`, if any.
fn max_credibility(cred: &CredibilityMatrix, set: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for &a in set {
        for &b in set {
            if a != b {
                best = best.max(cred.get(a, b));
            }
        }
    }
    best
}

/// Largest credibility strictly below `bound` among pairs of `set`, or 0.
fn next_level(cred: &CredibilityMatrix, set: &[usize], bound: f64) -> f64 {
    let mut best = 0.0f64;
    for &a in set {
        for &b in set {
            if a != b {
                let r = cred.get(a, b);
                if r < bound && r > best {
                    best = r;
                }
            }
        }
    }
    best
}

/// Qualification of every member of `set` at cut `lambda`.
fn qualifications(cred: &CredibilityMatrix, set: &[usize], lambda: f64, params: &DistillationParams) -> Vec<i64> {
    let outranks = |a: usize, b: usize| {
        let r = cred.get(a, b);
        r > lambda && r > cred.get(b, a) + params.discrimination(r)
    };
    set.iter()
        .map(|&a| {
            set.iter()
                .filter(|&&b| b != a)
                .map(|&b| i64::from(outranks(a, b)) - i64::from(outranks(b, a)))
                .sum()
        })
        .collect()
}

/// Extracts the first class of `remaining` (best for descending, worst for ascending).
fn distill_class(
    cred: &CredibilityMatrix,
    remaining: &[usize],
    direction: DistillationDirection,
    params: &DistillationParams,
) -> Vec<usize> {
    let mut current = remaining.to_vec();
    let mut lambda_top = max_credibility(cred, &current);
    loop {
        if current.len() <= 1 {
            return current;
        }
        let lambda = match params.fixed_cut {
            Some(cut) => cut,
            None => next_level(cred, &current, lambda_top - params.discrimination(lambda_top)),
        };
        let q = qualifications(cred, &current, lambda, params);
        let target = match direction {
            DistillationDirection::Descending => *q.iter().max().expect("nonempty"),
            DistillationDirection::Ascending => *q.iter().min().expect("nonempty"),
        };
        let next: Vec<usize> = current
            .iter()
            .zip(&q)
            .filter(|(_, &qa)| qa == target)
            .map(|(&a, _)| a)
            .collect();
        if next.len() == 1 || params.fixed_cut.is_some() || lambda <= 0.0 {
            return next;
        }
        current = next;
        lambda_top = lambda;
    }
}

/// Distillation into a complete preorder, returned best class first in both directions.
pub fn distill(cred: &CredibilityMatrix, direction: DistillationDirection, params: &DistillationParams) -> Preorder {
    let mut remaining: Vec<usize> = (0..cred.len()).collect();
    let mut classes = Vec::new();
    while !remaining.is_empty() {
        let class = distill_class(cred, &remaining, direction, params);
        debug_assert!(!class.is_empty());
        remaining.retain(|a| !class.contains(a));
        classes.push(class);
    }
    if direction == DistillationDirection::Ascending {
        classes.reverse();
    }
    Preorder { classes }
}

/// Intersects two complete preorders over the same `n` alternatives.
pub fn intersect_preorders(
    descending: &Preorder,
    ascending: &Preorder,
    n: usize,
) -> Result<PartialPreorder, RankingError> {
    let di = descending.class_index(n);
    let ai = ascending.class_index(n);
    let covers = |p: &Preorder, idx: &[Option<usize>]| {
        idx.iter().all(Option::is_some) && p.classes.iter().map(Vec::len).sum::<usize>() == n
    };
    if !covers(descending, &di) || !covers(ascending, &ai) {
        return Err(RankingError::CoverageMismatch);
    }
    let di: Vec<usize> = di.into_iter().map(Option::unwrap).collect();
    let ai: Vec<usize> = ai.into_iter().map(Option::unwrap).collect();

    let mut relations = vec![Relation::Indifferent; n * n];
    for a in 0..n {
        for b in 0..n {
            let (d, s) = (di[a].cmp(&di[b]), ai[a].cmp(&ai[b]));
            use std::cmp::Ordering::*;
            relations[a * n + b] = match (d, s) {
                (Equal, Equal) => Relation::Indifferent,
                (Less | Equal, Less | Equal) => Relation::Preferred,
                (Greater | Equal, Greater | Equal) => Relation::Dominated,
                _ => Relation::Incomparable,
            };
        }
    }

    let pd = descending.positions(n);
    let pa = ascending.positions(n);
    let rank_scores = pd.iter().zip(&pa).map(|(d, a)| (d + a) / 2.0).collect();
    Ok(PartialPreorder {
        n,
        relations,
        rank_scores,
    })
}

/// Full pipeline: credibilities, both distillations, intersection, rank scores.
pub fn electre3(
    matrix: &PerformanceMatrix,
    criteria: &[CriterionSpec],
    params: &DistillationParams,
) -> Result<Electre3Outcome, RankingError> {
    validate_problem(criteria, matrix)?;
    let credibility = credibility_matrix(matrix, criteria);
    let descending = distill(&credibility, DistillationDirection::Descending, params);
    let ascending = distill(&credibility, DistillationDirection::Ascending, params);
    let n = matrix.n_alternatives();
    let preorder = intersect_preorders(&descending, &ascending, n)?;
    let rank = RankResult::new(Method::Electre3, matrix.alternatives(), &preorder.rank_scores);
    Ok(Electre3Outcome {
        credibility,
        descending,
        ascending,
        preorder,
        rank,
    })
}

pub fn electre3_rank(
    matrix: &PerformanceMatrix,
    criteria: &[CriterionSpec],
    params: &DistillationParams,
) -> Result<RankResult, RankingError> {
    electre3(matrix, criteria, params).map(|o| o.rank)
}
