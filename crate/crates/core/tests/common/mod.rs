#![allow(dead_code)]

use outrank_dp::model::{CriterionSpec, PerformanceMatrix};

/// Three criteria on [0, 100], weights 0.5/0.3/0.2, q=2, p=10, v=20.
pub fn trio_criteria() -> Vec<CriterionSpec> {
    [("g1", 0.5), ("g2", 0.3), ("g3", 0.2)]
        .iter()
        .map(|&(n, w)| CriterionSpec::new(n, (0.0, 100.0), w, 2.0, 10.0).with_veto(20.0))
        .collect()
}

/// a = (80, 60, 50), b = (70, 65, 55), c = (60, 80, 40).
pub fn trio_matrix() -> PerformanceMatrix {
    PerformanceMatrix::from_rows(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["g1".into(), "g2".into(), "g3".into()],
        &[vec![80.0, 60.0, 50.0], vec![70.0, 65.0, 55.0], vec![60.0, 80.0, 40.0]],
    )
}

/// Hand-computed credibilities for the trio, row = outranking alternative.
pub const TRIO_CREDIBILITY: [[f64; 3]; 3] = [[0.0, 0.8125, 0.0], [0.5, 0.0, 0.7], [0.0, 3.0 / 14.0, 0.0]];

/// Hand-computed PROMETHEE preference indices for the trio (level function).
pub const TRIO_PI: [[f64; 3]; 3] = [[0.0, 0.25, 0.6], [0.25, 0.0, 0.45], [0.3, 0.3, 0.0]];
pub const TRIO_PHI_PLUS: [f64; 3] = [0.425, 0.35, 0.3];
pub const TRIO_PHI_MINUS: [f64; 3] = [0.275, 0.275, 0.525];
pub const TRIO_PHI: [f64; 3] = [0.15, 0.075, -0.225];

/// Credibilities whose distillations disagree on b vs c.
pub const SPLIT_CREDIBILITY: [[f64; 3]; 3] = [[0.0, 0.9, 0.72], [0.2, 0.0, 0.65], [0.5, 0.4, 0.0]];

/// Rank of each value by counting: 1 + #smaller + (#equal others)/2.
pub fn brute_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let smaller = x.iter().filter(|&&v| v < xi).count() as f64;
            let equal = x.iter().enumerate().filter(|&(j, &v)| j != i && v == xi).count() as f64;
            1.0 + smaller + equal / 2.0
        })
        .collect()
}

/// Pearson correlation of the brute-force ranks (None when either is constant).
pub fn brute_spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    let (rx, ry) = (brute_ranks(x), brute_ranks(y));
    let n = x.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (mx, my) = (mean(&rx), mean(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        None
    } else {
        Some(cov / (vx.sqrt() * vy.sqrt()))
    }
}

pub fn laplace_cdf(x: f64, b: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    }
}

/// Kolmogorov distance between the empirical CDF of `draws` and Laplace(0, b).
pub fn ks_distance(draws: &mut [f64], b: f64) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = laplace_cdf(x, b);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}
