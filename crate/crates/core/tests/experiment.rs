use outrank_dp::config::Config;
use outrank_dp::data_io::{gen_synthetic, TierProfile};
use outrank_dp::evaluation::{
    run_experiment, write_results_csv, write_summary_csv, DatasetSource, ExperimentGrid, ExperimentSettings,
    SyntheticSource,
};
use outrank_dp::model::Mechanism;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn synthetic_source(config: &Config) -> SyntheticSource {
    SyntheticSource {
        n_alternatives: 12,
        criteria: config.criteria.clone(),
        profile: TierProfile::default(),
    }
}

#[test]
fn mae_shrinks_with_epsilon_and_k() {
    let config = Config::synthetic();
    let grid = config.grid().unwrap();
    let settings = ExperimentSettings {
        ranking: config.ranking(),
        ..Default::default()
    };
    let out = run_experiment(&synthetic_source(&config), &config.criteria, &settings, &grid).unwrap();
    assert_eq!(out.summary.len(), 2 * 2 * 3 * 6);
    assert_eq!(out.records.len(), out.summary.len() * 50);
    for r in &out.records {
        assert!(r.mae >= 0.0 && (-1.0..=1.0).contains(&r.spearman));
        assert_eq!(r.runtime_ms, 0.0);
    }
    let method = grid.methods[0];
    for &mech in &grid.mechanisms {
        let mae = |e: f64, k: usize| out.cell(method, mech, e, k).unwrap().mae_mean;
        for &k in &grid.ks {
            for w in grid.epsilons.windows(2) {
                assert!(mae(w[1], k) <= 1.05 * mae(w[0], k), "eps {w:?} at K={k}");
            }
        }
        for &e in &grid.epsilons {
            for w in grid.ks.windows(2) {
                assert!(mae(e, w[1]) <= 1.05 * mae(e, w[0]), "K {w:?} at eps={e}");
            }
        }
    }
}

#[test]
fn output_is_reproducible_and_seed_sensitive() {
    let config = Config::synthetic();
    let mut grid = config.grid().unwrap();
    grid.epsilons = vec![0.5];
    grid.ks = vec![25, 100];
    grid.iterations = 5;
    let settings = ExperimentSettings {
        ranking: config.ranking(),
        ..Default::default()
    };
    let csv = |grid: &ExperimentGrid| {
        let out = run_experiment(&synthetic_source(&config), &config.criteria, &settings, grid).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_results_csv(&out.records, &mut a).unwrap();
        write_summary_csv(&out.summary, &mut b).unwrap();
        (a, b)
    };
    let first = csv(&grid);
    assert_eq!(first, csv(&grid));
    grid.base_seed += 1;
    assert_ne!(first.0, csv(&grid).0);
}

#[test]
fn dataset_source_runs() {
    let config = Config::beer();
    let full = gen_synthetic(40, &config.criteria, 60, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let source = DatasetSource {
        data: full,
        n_alternatives: 20,
    };
    let mut grid = config.grid().unwrap();
    grid.epsilons = vec![1.0];
    grid.ks = vec![10, 50];
    grid.iterations = 3;
    grid.mechanisms = vec![Mechanism::None, Mechanism::Idp];
    let settings = ExperimentSettings {
        ranking: config.ranking(),
        ..Default::default()
    };
    let out = run_experiment(&source, &config.criteria, &settings, &grid).unwrap();
    for r in out.records.iter().filter(|r| r.mechanism == Mechanism::None) {
        assert_eq!((r.mae, r.spearman), (0.0, 1.0));
    }
    grid.ks = vec![61];
    assert!(run_experiment(&source, &config.criteria, &settings, &grid).is_err());
}
