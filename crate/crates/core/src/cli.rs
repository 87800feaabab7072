//! Command-line front end. `main` lives in `src/bin/outrank-dp.rs`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aggregation::{aggregate_sam, check_disjoint_contributors};
use crate::config::Config;
use crate::data_io::{
    gen_synthetic, load_evaluations_csv, read_matrix_csv, select_alternatives, write_atomic, write_evaluations_csv,
    write_matrix_csv, TierProfile,
};
use crate::electre3::electre3;
use crate::error::{Error, PrivacyError};
use crate::evaluation::{
    correlation_band, format_table, mae, render_svg, run_experiment, spearman, DatasetSource, EvaluationSource,
    ExperimentSettings, SyntheticSource, TableMetric,
};
use crate::model::{validate_problem, Mechanism, Method};
use crate::pipeline::{rank_matrix, widen_domains};
use crate::privacy::{anonymize_matrix, PrivacyParams};
use crate::promethee2::promethee2;

#[derive(Debug, Parser)]
#[command(
    name = "outrank-dp",
    version,
    about = "Differentially private ELECTRE-III / PROMETHEE-II rankings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Bundled config name (`synthetic`, `beer`) or path to a JSON config.
    #[arg(long, default_value = "synthetic")]
    pub config: String,
    /// RNG seed; overrides the config.
    #[arg(long, env = "OUTRANK_DP_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PrivacyArgs {
    #[arg(long)]
    pub mechanism: Option<Mechanism>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Keep noisy values outside the criterion domains.
    #[arg(long)]
    pub unclamped: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate tiered synthetic evaluations.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long)]
        n_alternatives: Option<usize>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Aggregate, optionally anonymize, and rank an evaluations CSV.
    Rank {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        evals: PathBuf,
        /// electre3, promethee2 or all (default: the config's methods).
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        privacy: PrivacyArgs,
        /// Directory for OM* and the sensitivity report.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Aggregate and anonymize an evaluations CSV into OM*.
    Anonymize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        evals: PathBuf,
        #[command(flatten)]
        privacy: PrivacyArgs,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write the aggregated matrix OM.
        #[arg(long)]
        om_out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the (epsilon, K) grid and write results, summary and charts.
    Experiment {
        #[command(flatten)]
        common: Common,
        /// Grid override, e.g. `eps=0.1,1;k=10,400;iter=5;mech=dp,idp`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
        /// Record wall-clock runtimes (output is then not byte-reproducible).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        unclamped: bool,
        /// Full evaluations CSV to subsample instead of synthetic data.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Compare a true and an anonymized matrix: MAE and r_s per method.
    Eval {
        #[arg(long, default_value = "synthetic")]
        config: String,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        noisy: PathBuf,
    },
    /// Subsample representative alternatives and evaluations from a dataset.
    Select {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n_alternatives: Option<usize>,
        #[arg(long, short)]
        out: PathBuf,
    },
}

/// Parsed `--grid` override; unset fields keep the config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridOverride {
    pub epsilons: Option<Vec<f64>>,
    pub ks: Option<Vec<usize>>,
    pub iterations: Option<usize>,
    pub mechanisms: Option<Vec<Mechanism>>,
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, Error> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("--grid: bad value '{s}' for {key}")))
        })
        .collect()
}

pub fn parse_grid(spec: &str) -> Result<GridOverride, Error> {
    let mut g = GridOverride::default();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--grid: expected key=value, got '{part}'")))?;
        match key.trim() {
            "eps" | "epsilon" | "epsilons" => g.epsilons = Some(parse_list(key, value)?),
            "k" | "K" | "ks" => g.ks = Some(parse_list(key, value)?),
            "iter" | "iterations" => {
                g.iterations = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("--grid: bad iterations '{value}'")))?,
                )
            }
            "mech" | "mechanisms" => g.mechanisms = Some(parse_list(key, value)?),
            other => return Err(Error::Config(format!("--grid: unknown key '{other}'"))),
        }
    }
    Ok(g)
}

fn methods_for(arg: Option<&str>, config: &Config) -> Result<Vec<Method>, Error> {
    match arg {
        None => Ok(config.method.methods.clone()),
        Some("all") => Ok(vec![Method::Electre3, Method::Promethee2]),
        Some(m) => Ok(vec![m.parse::<Method>().map_err(Error::Config)?]),
    }
}

fn privacy_for(config: &Config, args: &PrivacyArgs, seed: Option<u64>) -> Result<PrivacyParams, Error> {
    let mut p = config.privacy_params();
    if let Some(m) = args.mechanism {
        p.mechanism = m;
    }
    if let Some(e) = args.epsilon {
        if !(e > 0.0 && e.is_finite()) {
            return Err(PrivacyError::InvalidEpsilon(e).into());
        }
        p.epsilon = e;
    }
    if args.unclamped {
        p.clamp_output = false;
    }
    if let Some(s) = seed {
        p.seed = s;
    }
    Ok(p)
}

fn n_alternatives(config: &Config, arg: Option<usize>) -> usize {
    arg.or(config.experiment.as_ref().map(|e| e.n_alternatives))
        .unwrap_or(12)
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    write_atomic(path, |w| {
        w.write_all(text.as_bytes()).map_err(|source| {
            Error::from(crate::error::DataError::Io {
                path: path.to_path_buf(),
                source,
            })
        })
    })
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| {
        crate::error::DataError::Io {
            path: dir.to_path_buf(),
            source,
        }
        .into()
    })
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Error> {
    match cli.command {
        Command::Synth {
            common,
            k,
            n_alternatives: n,
            out: path,
        } => {
            let config = Config::resolve(&common.config)?;
            let n = n_alternatives(&config, n);
            let seed = common.seed.unwrap_or(config.privacy.seed);
            let evals = gen_synthetic(n, &config.criteria, k, &mut ChaCha8Rng::seed_from_u64(seed))?;
            write_evaluations_csv(&evals, &path)?;
            emit(
                out,
                &format!("wrote {} evaluations to {}\n", evals.total_rows(), path.display()),
            )
        }
        Command::Rank {
            common,
            evals,
            method,
            privacy,
            out_dir,
        } => cmd_rank(&common, &evals, method.as_deref(), &privacy, &out_dir, out),
        Command::Anonymize {
            common,
            evals,
            privacy,
            out: path,
            om_out,
            report,
        } => {
            let config = Config::resolve(&common.config)?;
            let params = privacy_for(&config, &privacy, common.seed)?;
            let data = load_evaluations_csv(&evals, &config.criteria)?;
            let om = aggregate_sam(&data, &config.criteria)?;
            validate_problem(&config.criteria, &om)?;
            let (noisy, rep) = anonymize_matrix(&om, &data, &config.criteria, &params)?;
            write_matrix_csv(&noisy, &path)?;
            if let Some(p) = om_out {
                write_matrix_csv(&om, &p)?;
            }
            if let Some(p) = report {
                write_atomic(&p, |w| rep.write_csv(w).map_err(csv_err(&p)))?;
            }
            emit(
                out,
                &format!(
                    "wrote OM* ({} mechanism, epsilon {}) to {}; MAE vs OM = {}\n",
                    params.mechanism.as_str(),
                    params.epsilon,
                    path.display(),
                    mae(&om, &noisy)?
                ),
            )
        }
        Command::Experiment {
            common,
            grid,
            iterations,
            out_dir,
            timings,
            unclamped,
            dataset,
        } => cmd_experiment(
            &common,
            grid.as_deref(),
            iterations,
            &out_dir,
            timings,
            unclamped,
            dataset.as_deref(),
            out,
        ),
        Command::Eval { config, truth, noisy } => {
            let config = Config::resolve(&config)?;
            let om = read_matrix_csv(&truth, &config.criteria)?;
            let om_star = read_matrix_csv(&noisy, &config.criteria)?;
            let err = mae(&om, &om_star)?;
            let mut s = format!("MAE {err:.6}\n");
            for &m in &config.method.methods {
                let r_true = rank_matrix(m, &om, &config.criteria, &config.ranking())?;
                let r_noisy = rank_matrix(m, &om_star, &config.criteria, &config.ranking())?;
                let rs = spearman(&r_true, &r_noisy)?;
                let _ = writeln!(
                    s,
                    "{:<10} r_s {:.6} ({}){}",
                    m.as_str(),
                    rs.coefficient,
                    correlation_band(rs.coefficient),
                    if rs.degenerate { " degenerate" } else { "" }
                );
            }
            emit(out, &s)
        }
        Command::Select {
            common,
            dataset,
            k,
            n_alternatives: n,
            out: path,
        } => {
            let config = Config::resolve(&common.config)?;
            let n = n_alternatives(&config, n);
            let seed = common.seed.unwrap_or(config.privacy.seed);
            let data = load_evaluations_csv(&dataset, &config.criteria)?;
            let picked = select_alternatives(&data, n, k, &mut ChaCha8Rng::seed_from_u64(seed))?;
            write_evaluations_csv(&picked, &path)?;
            emit(
                out,
                &format!("selected {n} alternatives x {k} evaluations into {}\n", path.display()),
            )
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Error> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Config(format!("stdout: {e}")))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| {
        Error::from(crate::error::DataError::Io {
            path: path.to_path_buf(),
            source: e.into(),
        })
    }
}

fn cmd_rank(
    common: &Common,
    evals: &Path,
    method: Option<&str>,
    privacy: &PrivacyArgs,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let config = Config::resolve(&common.config)?;
    let methods = methods_for(method, &config)?;
    let params = privacy_for(&config, privacy, common.seed)?;
    let data = load_evaluations_csv(evals, &config.criteria)?;
    let mut s = String::new();
    if let Err(dups) = check_disjoint_contributors(&data) {
        if params.mechanism != Mechanism::None {
            return Err(PrivacyError::DisjointnessViolation(dups).into());
        }
        let _ = writeln!(s, "warning: {} users rate more than one alternative", dups.len());
    }
    let om = aggregate_sam(&data, &config.criteria)?;
    validate_problem(&config.criteria, &om)?;

    let target = if params.mechanism == Mechanism::None {
        om.clone()
    } else {
        let (noisy, report) = anonymize_matrix(&om, &data, &config.criteria, &params)?;
        ensure_dir(out_dir)?;
        let om_path = out_dir.join("om_star.csv");
        let rep_path = out_dir.join("sensitivity.csv");
        write_matrix_csv(&noisy, &om_path)?;
        write_atomic(&rep_path, |w| report.write_csv(w).map_err(csv_err(&rep_path)))?;
        let _ = writeln!(
            s,
            "{} epsilon {} (seed {}): wrote {} and {}",
            params.mechanism.as_str(),
            params.epsilon,
            params.seed,
            om_path.display(),
            rep_path.display()
        );
        noisy
    };

    let criteria = if params.clamp_output {
        config.criteria.clone()
    } else {
        widen_domains(&config.criteria, &target)
    };
    let alts = target.alternatives();
    for m in methods {
        let _ = writeln!(s, "\n{}", m.as_str());
        match m {
            Method::Electre3 => {
                let o = electre3(&target, &criteria, &config.method.distillation)?;
                let desc = o.descending.positions(alts.len());
                let asc = o.ascending.positions(alts.len());
                let _ = writeln!(
                    s,
                    "{:<12} {:>6} {:>11} {:>10}",
                    "alternative", "rank", "descending", "ascending"
                );
                for i in order_by(&o.rank.scores()) {
                    let _ = writeln!(
                        s,
                        "{:<12} {:>6} {:>11} {:>10}",
                        alts[i], o.rank.entries[i].score, desc[i], asc[i]
                    );
                }
                let inc = o.preorder.incomparable_pairs();
                if inc > 0 {
                    let _ = writeln!(s, "incomparable pairs: {inc}");
                }
            }
            Method::Promethee2 => {
                let o = promethee2(&target, &criteria)?;
                let _ = writeln!(
                    s,
                    "{:<12} {:>6} {:>10} {:>10} {:>10}",
                    "alternative", "rank", "phi+", "phi-", "phi"
                );
                for i in order_by(&o.rank.scores()) {
                    let f = o.flows[i];
                    let _ = writeln!(
                        s,
                        "{:<12} {:>6} {:>10.4} {:>10.4} {:>10.4}",
                        alts[i], o.rank.entries[i].score, f.leaving, f.entering, f.net
                    );
                }
            }
        }
    }
    emit(out, &s)
}

fn order_by(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    idx
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    common: &Common,
    grid_arg: Option<&str>,
    iterations: Option<usize>,
    out_dir: &Path,
    timings: bool,
    unclamped: bool,
    dataset: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let config = Config::resolve(&common.config)?;
    let mut grid = config
        .grid()
        .ok_or_else(|| Error::Config("config has no experiment section".into()))?;
    if let Some(spec) = grid_arg {
        let o = parse_grid(spec)?;
        grid.epsilons = o.epsilons.unwrap_or(grid.epsilons);
        grid.ks = o.ks.unwrap_or(grid.ks);
        grid.iterations = o.iterations.unwrap_or(grid.iterations);
        grid.mechanisms = o.mechanisms.unwrap_or(grid.mechanisms);
    }
    if let Some(i) = iterations {
        grid.iterations = i;
    }
    if let Some(s) = common.seed {
        grid.base_seed = s;
    }
    let n = config.experiment.as_ref().map_or(12, |e| e.n_alternatives);
    let source: Box<dyn EvaluationSource> = match dataset {
        Some(path) => Box::new(DatasetSource {
            data: load_evaluations_csv(path, &config.criteria)?,
            n_alternatives: n,
        }),
        None => Box::new(SyntheticSource {
            n_alternatives: n,
            criteria: config.criteria.clone(),
            profile: TierProfile::default(),
        }),
    };
    let settings = ExperimentSettings {
        ranking: config.ranking(),
        unclamped: unclamped || !config.privacy.clamp_output,
        record_timing: timings,
    };
    let outcome = run_experiment(source.as_ref(), &config.criteria, &settings, &grid)?;

    let mut tables = format_table(&outcome, TableMetric::Mae);
    for &m in &grid.methods {
        tables.push('\n');
        tables.push_str(&format_table(&outcome, TableMetric::Spearman(m)));
    }

    ensure_dir(out_dir)?;
    let results = out_dir.join("results.csv");
    let summary = out_dir.join("summary.csv");
    write_atomic(&results, |w| {
        crate::evaluation::write_results_csv(&outcome.records, w).map_err(csv_err(&results))
    })?;
    write_atomic(&summary, |w| {
        crate::evaluation::write_summary_csv(&outcome.summary, w).map_err(csv_err(&summary))
    })?;
    write_text(&out_dir.join("tables.txt"), &tables)?;
    for &m in &grid.methods {
        for &mech in &grid.mechanisms {
            let name = format!("rs_{}_{}.svg", m.as_str(), mech.as_str());
            write_text(&out_dir.join(name), &render_svg(&outcome, m, mech))?;
        }
    }
    emit(
        out,
        &format!(
            "{tables}\n{} records written to {}\n",
            outcome.records.len(),
            out_dir.display()
        ),
    )
}
