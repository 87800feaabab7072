//! Utility metrics (MAE, Spearman rank correlation) and the seeded
//! (epsilon, K) experiment runner.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aggregation::aggregate_sam;
use crate::data_io::{gen_synthetic_with, select_alternatives, TierProfile};
use crate::error::{Error, MetricError};
use crate::model::{CriterionSpec, EvaluationSet, Mechanism, Method, PerformanceMatrix, RankResult};
use crate::pipeline::{rank_matrix, widen_domains, RankingParams};
use crate::privacy::{anonymize_matrix_with_rng, noise_rng, PrivacyParams};
use crate::ranks::average_ranks;

/// Mean absolute cellwise difference.
pub fn mae(m1: &PerformanceMatrix, m2: &PerformanceMatrix) -> Result<f64, MetricError> {
    if m1.n_alternatives() != m2.n_alternatives() || m1.n_criteria() != m2.n_criteria() {
        return Err(MetricError::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            m1.n_alternatives(),
            m1.n_criteria(),
            m2.n_alternatives(),
            m2.n_criteria()
        )));
    }
    if m1.criteria() != m2.criteria() {
        return Err(MetricError::ShapeMismatch("criterion order differs".into()));
    }
    let n = m1.values().len();
    if n == 0 {
        return Ok(0.0);
    }
    let total: f64 = m1.values().iter().zip(m2.values()).map(|(a, b)| (a - b).abs()).sum();
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpearmanOutcome {
    pub coefficient: f64,
    /// Either ranking was constant, so the correlation is undefined (reported as 0).
    pub degenerate: bool,
}

/// Tie-aware Spearman correlation of two score vectors (Pearson on average ranks).
pub fn spearman_scores(x: &[f64], y: &[f64]) -> Result<SpearmanOutcome, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::ShapeMismatch(format!("{} vs {} scores", x.len(), y.len())));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if rx.len() < 2 || sxx == 0.0 || syy == 0.0 {
        return Ok(SpearmanOutcome {
            coefficient: 0.0,
            degenerate: true,
        });
    }
    Ok(SpearmanOutcome {
        coefficient: (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// Spearman correlation between two rankings of the same alternatives.
pub fn spearman(r1: &RankResult, r2: &RankResult) -> Result<SpearmanOutcome, MetricError> {
    if r1.entries.len() != r2.entries.len() {
        return Err(MetricError::AlternativeSetMismatch);
    }
    let lookup: HashMap<&str, f64> = r2.entries.iter().map(|e| (e.alternative.as_str(), e.score)).collect();
    if lookup.len() != r2.entries.len() {
        return Err(MetricError::AlternativeSetMismatch);
    }
    let mut y = Vec::with_capacity(r1.entries.len());
    for e in &r1.entries {
        y.push(
            *lookup
                .get(e.alternative.as_str())
                .ok_or(MetricError::AlternativeSetMismatch)?,
        );
    }
    spearman_scores(&r1.scores(), &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationBand {
    NegligibleToWeak,
    Moderate,
    Strong,
    VeryStrong,
}

impl CorrelationBand {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationBand::NegligibleToWeak => "negligible-to-weak",
            CorrelationBand::Moderate => "moderate",
            CorrelationBand::Strong => "strong",
            CorrelationBand::VeryStrong => "very-strong",
        }
    }
}

impl std::fmt::Display for CorrelationBand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Conventional strength band of |r_s|; intervals are left-closed.
pub fn correlation_band(r_s: f64) -> CorrelationBand {
    let r = r_s.abs();
    if r >= 0.9 {
        CorrelationBand::VeryStrong
    } else if r >= 0.7 {
        CorrelationBand::Strong
    } else if r >= 0.4 {
        CorrelationBand::Moderate
    } else {
        CorrelationBand::NegligibleToWeak
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub epsilons: Vec<f64>,
    pub ks: Vec<usize>,
    pub iterations: usize,
    pub mechanisms: Vec<Mechanism>,
    pub methods: Vec<Method>,
    pub base_seed: u64,
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Config(format!("experiment grid: {m}")));
        if self.epsilons.is_empty() || self.ks.is_empty() || self.mechanisms.is_empty() || self.methods.is_empty() {
            return bad("epsilons, ks, mechanisms and methods must be nonempty");
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1");
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("epsilons must be positive");
        }
        if self.ks.contains(&0) {
            return bad("K values must be positive");
        }
        Ok(())
    }

    /// Seed of iteration `i`: `base_seed + i`.
    pub fn iteration_seed(&self, iteration: usize) -> u64 {
        self.base_seed.wrapping_add(iteration as u64)
    }
}

/// Seed of the noise stream derived from an iteration seed (SplitMix64 finalizer),
/// kept apart from the data stream seeded with the iteration seed itself.
pub fn noise_seed(iteration_seed: u64) -> u64 {
    let mut z = iteration_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Supplies one evaluation set per (K, iteration).
pub trait EvaluationSource {
    fn draw(&self, k: usize, rng: &mut ChaCha8Rng) -> Result<EvaluationSet, Error>;
}

/// Tiered synthetic generator.
#[derive(Debug, Clone)]
pub struct SyntheticSource {
    pub n_alternatives: usize,
    pub criteria: Vec<CriterionSpec>,
    pub profile: TierProfile,
}

impl EvaluationSource for SyntheticSource {
    fn draw(&self, k: usize, rng: &mut ChaCha8Rng) -> Result<EvaluationSet, Error> {
        Ok(gen_synthetic_with(
            self.n_alternatives,
            &self.criteria,
            k,
            &self.profile,
            rng,
        )?)
    }
}

/// Resamples representative alternatives from a full rating dataset.
#[derive(Debug, Clone)]
pub struct DatasetSource {
    pub data: EvaluationSet,
    pub n_alternatives: usize,
}

impl EvaluationSource for DatasetSource {
    fn draw(&self, k: usize, rng: &mut ChaCha8Rng) -> Result<EvaluationSet, Error> {
        Ok(select_alternatives(&self.data, self.n_alternatives, k, rng)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExperimentSettings {
    pub ranking: RankingParams,
    /// Disables clamping of OM* to the criterion domains.
    pub unclamped: bool,
    /// Record wall-clock time per record; otherwise `runtime_ms` is 0 so output is byte-reproducible.
    pub record_timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub method: Method,
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub k: usize,
    pub iteration: usize,
    pub mae: f64,
    pub spearman: f64,
    pub degenerate: bool,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub method: Method,
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub k: usize,
    pub iterations: usize,
    pub mae_mean: f64,
    pub mae_std: f64,
    pub spearman_mean: f64,
    pub spearman_std: f64,
    pub degenerate: usize,
}

impl CellSummary {
    pub fn band(&self) -> CorrelationBand {
        correlation_band(self.spearman_mean)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub grid: ExperimentGrid,
    /// Ordered by (method, mechanism, epsilon, K, iteration) in grid order.
    pub records: Vec<ExperimentRecord>,
    /// Ordered like `records`, one entry per cell.
    pub summary: Vec<CellSummary>,
}

impl ExperimentOutcome {
    pub fn cell(&self, method: Method, mechanism: Mechanism, epsilon: f64, k: usize) -> Option<&CellSummary> {
        self.summary
            .iter()
            .find(|c| c.method == method && c.mechanism == mechanism && c.epsilon == epsilon && c.k == k)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every (method, mechanism, epsilon, K) cell for `grid.iterations` iterations.
///
/// Iteration `i` draws its evaluation set from a generator seeded with
/// `base_seed + i`; the noise generator is seeded from [`noise_seed`] of the
/// same value and restarted for every (epsilon, mechanism) pair, so all cells
/// of an iteration see the same data and the same underlying uniform draws.
pub fn run_experiment(
    source: &dyn EvaluationSource,
    criteria: &[CriterionSpec],
    settings: &ExperimentSettings,
    grid: &ExperimentGrid,
) -> Result<ExperimentOutcome, Error> {
    grid.validate()?;
    // (method, mechanism, epsilon, K, iteration) positions in the grid
    type Key = (usize, usize, usize, usize, usize);
    let mut keyed: Vec<(Key, ExperimentRecord)> = Vec::new();

    for (ki, &k) in grid.ks.iter().enumerate() {
        for iteration in 0..grid.iterations {
            let seed = grid.iteration_seed(iteration);
            let mut data_rng = ChaCha8Rng::seed_from_u64(seed);
            let evals = source.draw(k, &mut data_rng)?;
            let om = aggregate_sam(&evals, criteria)?;
            let truth = grid
                .methods
                .iter()
                .map(|&m| rank_matrix(m, &om, criteria, &settings.ranking))
                .collect::<Result<Vec<_>, _>>()?;

            for (ei, &epsilon) in grid.epsilons.iter().enumerate() {
                for (mi, &mechanism) in grid.mechanisms.iter().enumerate() {
                    let started = Instant::now();
                    let params = PrivacyParams {
                        epsilon,
                        mechanism,
                        clamp_output: !settings.unclamped,
                        seed: noise_seed(seed),
                    };
                    let mut rng = noise_rng(params.seed);
                    let (noisy, _) = anonymize_matrix_with_rng(&om, &evals, criteria, &params, &mut rng)?;
                    let err = mae(&om, &noisy)?;
                    let noise_ms = started.elapsed().as_secs_f64() * 1e3;
                    let widened;
                    let rank_criteria = if settings.unclamped {
                        widened = widen_domains(criteria, &noisy);
                        &widened[..]
                    } else {
                        criteria
                    };

                    for (ti, &method) in grid.methods.iter().enumerate() {
                        let t = Instant::now();
                        let ranked = rank_matrix(method, &noisy, rank_criteria, &settings.ranking)?;
                        let rs = spearman(&truth[ti], &ranked)?;
                        let runtime_ms = if settings.record_timing {
                            noise_ms + t.elapsed().as_secs_f64() * 1e3
                        } else {
                            0.0
                        };
                        keyed.push((
                            (ti, mi, ei, ki, iteration),
                            ExperimentRecord {
                                method,
                                mechanism,
                                epsilon,
                                k,
                                iteration,
                                mae: err,
                                spearman: rs.coefficient,
                                degenerate: rs.degenerate,
                                runtime_ms,
                            },
                        ));
                    }
                }
            }
        }
    }

    keyed.sort_by_key(|(key, _)| *key);
    let records: Vec<ExperimentRecord> = keyed.into_iter().map(|(_, r)| r).collect();
    let summary = records
        .chunks(grid.iterations)
        .map(|cell| {
            let maes: Vec<f64> = cell.iter().map(|r| r.mae).collect();
            let rss: Vec<f64> = cell.iter().map(|r| r.spearman).collect();
            let (mae_mean, mae_std) = mean_std(&maes);
            let (spearman_mean, spearman_std) = mean_std(&rss);
            let first = &cell[0];
            CellSummary {
                method: first.method,
                mechanism: first.mechanism,
                epsilon: first.epsilon,
                k: first.k,
                iterations: cell.len(),
                mae_mean,
                mae_std,
                spearman_mean,
                spearman_std,
                degenerate: cell.iter().filter(|r| r.degenerate).count(),
            }
        })
        .collect();

    Ok(ExperimentOutcome {
        grid: grid.clone(),
        records,
        summary,
    })
}

/// Per-iteration CSV: `method,mechanism,epsilon,K,iteration,mae,spearman,runtime_ms`.
pub fn write_results_csv<W: Write>(records: &[ExperimentRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "mechanism",
        "epsilon",
        "K",
        "iteration",
        "mae",
        "spearman",
        "runtime_ms",
    ])?;
    for r in records {
        w.write_record([
            r.method.as_str().to_string(),
            r.mechanism.as_str().to_string(),
            r.epsilon.to_string(),
            r.k.to_string(),
            r.iteration.to_string(),
            r.mae.to_string(),
            r.spearman.to_string(),
            r.runtime_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-cell CSV with means, standard deviations and the correlation band.
pub fn write_summary_csv<W: Write>(summary: &[CellSummary], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "mechanism",
        "epsilon",
        "K",
        "iterations",
        "mae_mean",
        "mae_std",
        "spearman_mean",
        "spearman_std",
        "band",
        "degenerate",
    ])?;
    for c in summary {
        w.write_record([
            c.method.as_str().to_string(),
            c.mechanism.as_str().to_string(),
            c.epsilon.to_string(),
            c.k.to_string(),
            c.iterations.to_string(),
            c.mae_mean.to_string(),
            c.mae_std.to_string(),
            c.spearman_mean.to_string(),
            c.spearman_std.to_string(),
            c.band().to_string(),
            c.degenerate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMetric {
    Mae,
    Spearman(Method),
}

/// Aligned text table: one row per epsilon, one column group per K, one
/// sub-column per mechanism.
pub fn format_table(outcome: &ExperimentOutcome, metric: TableMetric) -> String {
    let grid = &outcome.grid;
    let method = match metric {
        TableMetric::Mae => grid.methods[0],
        TableMetric::Spearman(m) => m,
    };
    let title = match metric {
        TableMetric::Mae => "MAE".to_string(),
        TableMetric::Spearman(m) => format!("Spearman r_s ({})", m.as_str()),
    };
    let width = 8;
    let group = width * grid.mechanisms.len() + grid.mechanisms.len() - 1;
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = write!(s, "{:>7} ", "eps/K");
    for k in &grid.ks {
        let _ = write!(s, "| {:^group$} ", k);
    }
    s.push('\n');
    let _ = write!(s, "{:>7} ", "");
    for _ in &grid.ks {
        let labels: Vec<String> = grid
            .mechanisms
            .iter()
            .map(|m| format!("{:>width$}", m.as_str().to_uppercase()))
            .collect();
        let _ = write!(s, "| {} ", labels.join(" "));
    }
    s.push('\n');
    for &eps in &grid.epsilons {
        let _ = write!(s, "{eps:>7} ");
        for &k in &grid.ks {
            let cells: Vec<String> = grid
                .mechanisms
                .iter()
                .map(|&mech| {
                    outcome.cell(method, mech, eps, k).map_or_else(
                        || format!("{:>width$}", "-"),
                        |c| match metric {
                            TableMetric::Mae => format!("{:>width$.2}", c.mae_mean),
                            TableMetric::Spearman(_) => format!("{:>width$.3}", c.spearman_mean),
                        },
                    )
                })
                .collect();
            let _ = write!(s, "| {} ", cells.join(" "));
        }
        s.push('\n');
    }
    s
}

/// Line chart of mean r_s against K, one series per epsilon, with the
/// moderate/strong/very-strong thresholds drawn as dashed guides.
pub fn render_svg(outcome: &ExperimentOutcome, method: Method, mechanism: Mechanism) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const L: f64 = 60.0;
    const R: f64 = 130.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
    let grid = &outcome.grid;
    let nk = grid.ks.len().max(2) - 1;
    let x_at = |i: usize| L + (W - L - R) * i as f64 / nk as f64;
    let y_at = |r: f64| T + (H - T - B) * (1.0 - (r.clamp(-1.0, 1.0) + 1.0) / 2.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{} / {}: mean r_s vs K</text>"#,
        W / 2.0,
        method.as_str(),
        mechanism.as_str()
    );
    let _ = writeln!(
        s,
        r#"<line x1="{L}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - B,
        W - R,
        H - B
    );
    let _ = writeln!(s, r#"<line x1="{L}" y1="{T}" x2="{L}" y2="{}" stroke="black"/>"#, H - B);
    for r in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let y = y_at(r);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{r}</text>"#,
            L - 6.0,
            y + 4.0
        );
    }
    for (label, r) in [("moderate", 0.4), ("strong", 0.7), ("very strong", 0.9)] {
        let y = y_at(r);
        let _ = writeln!(
            s,
            r##"<line x1="{L}" y1="{y}" x2="{}" y2="{y}" stroke="#999" stroke-dasharray="4 3"/>"##,
            W - R
        );
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" fill="#666">{label}</text>"##,
            W - R + 4.0,
            y + 4.0
        );
    }
    for (i, k) in grid.ks.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{k}</text>"#,
            x_at(i),
            H - B + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">K</text>"#,
        (L + W - R) / 2.0,
        H - 10.0
    );
    for (e, &eps) in grid.epsilons.iter().enumerate() {
        let color = palette[e % palette.len()];
        let points: Vec<String> = grid
            .ks
            .iter()
            .enumerate()
            .filter_map(|(i, &k)| {
                outcome
                    .cell(method, mechanism, eps, k)
                    .map(|c| format!("{:.2},{:.2}", x_at(i), y_at(c.spearman_mean)))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = T + 16.0 * e as f64 + 120.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}">eps = {eps}</text>"#,
            W - R + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rank(scores: &[f64]) -> RankResult {
        let ids: Vec<String> = (0..scores.len()).map(|i| format!("a{i}")).collect();
        RankResult::new(Method::Promethee2, &ids, scores)
    }

    fn m(rows: &[Vec<f64>]) -> PerformanceMatrix {
        let crit = (0..rows[0].len()).map(|j| format!("g{j}")).collect();
        PerformanceMatrix::from_rows((0..rows.len()).map(|i| format!("a{i}")).collect(), crit, rows)
    }

    #[test]
    fn mae_cases() {
        let a = m(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(mae(&a, &a).unwrap(), 0.0);
        let b = m(&[vec![2.0, 3.0], vec![4.0, 5.0]]);
        assert_eq!(mae(&a, &b).unwrap(), 1.0);
        assert_eq!(mae(&m(&[vec![0.0, 10.0]]), &m(&[vec![4.0, 2.0]])).unwrap(), 6.0);
        assert!(matches!(
            mae(&a, &m(&[vec![1.0, 2.0]])),
            Err(MetricError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn spearman_cases() {
        let r = rank(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(spearman(&r, &r).unwrap().coefficient, 1.0);
        let rev = rank(&[4.0, 3.0, 2.0, 1.0]);
        assert_eq!(spearman(&r, &rev).unwrap().coefficient, -1.0);
        let flat = rank(&[2.0; 4]);
        let out = spearman(&r, &flat).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.coefficient, 0.0);
        let other = RankResult::new(
            Method::Promethee2,
            &["x".into(), "y".into(), "z".into(), "w".into()],
            &[1.0, 2.0, 3.0, 4.0],
        );
        assert!(matches!(spearman(&r, &other), Err(MetricError::AlternativeSetMismatch)));
    }

    #[test]
    fn spearman_aligns_by_id() {
        let a = RankResult::new(
            Method::Electre3,
            &["x".into(), "y".into(), "z".into()],
            &[1.0, 2.0, 3.0],
        );
        let b = RankResult::new(
            Method::Electre3,
            &["z".into(), "x".into(), "y".into()],
            &[3.0, 1.0, 2.0],
        );
        assert_eq!(spearman(&a, &b).unwrap().coefficient, 1.0);
    }

    #[test]
    fn bands() {
        assert_eq!(correlation_band(0.95), CorrelationBand::VeryStrong);
        assert_eq!(correlation_band(0.9), CorrelationBand::VeryStrong);
        assert_eq!(correlation_band(0.70), CorrelationBand::Strong);
        assert_eq!(correlation_band(0.69), CorrelationBand::Moderate);
        assert_eq!(correlation_band(0.4), CorrelationBand::Moderate);
        assert_eq!(correlation_band(0.39), CorrelationBand::NegligibleToWeak);
        assert_eq!(correlation_band(-0.8), CorrelationBand::Strong);
    }

    #[test]
    fn grid_validation() {
        let mut g = ExperimentGrid {
            epsilons: vec![1.0],
            ks: vec![10],
            iterations: 1,
            mechanisms: vec![Mechanism::Dp],
            methods: vec![Method::Promethee2],
            base_seed: 0,
        };
        assert!(g.validate().is_ok());
        g.iterations = 0;
        assert!(g.validate().is_err());
        g.iterations = 1;
        g.ks.clear();
        assert!(g.validate().is_err());
    }

    proptest! {
        #[test]
        fn spearman_symmetric_and_bounded(x in prop::collection::vec(0u8..6, 2..15), seed in any::<u64>()) {
            let xs: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let mut ys = xs.clone();
            use rand::seq::SliceRandom;
            ys.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let a = spearman_scores(&xs, &ys).unwrap();
            let b = spearman_scores(&ys, &xs).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!((-1.0..=1.0).contains(&a.coefficient));
            let s = spearman_scores(&xs, &xs).unwrap();
            prop_assert!(s.degenerate || s.coefficient == 1.0);
        }
    }
}
