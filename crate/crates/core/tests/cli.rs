use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_outrank-dp"));
    c.env_remove("OUTRANK_DP_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path, name: &str, k: &str, seed: &str) -> std::path::PathBuf {
    let out = dir.join(name);
    let o = run(&["synth", "--k", k, "--seed", seed, "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn synth_defaults_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.csv", "25", "11");
    let b = synth(dir.path(), "b.csv", "25", "11");
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 1 + 12 * 25);
    assert!(text.starts_with("alternative_id,user_id,g1,g2,g3,g4,g5,g6\n"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.path().join("c.csv");
    let o = bin()
        .args(["synth", "--k", "25", "--out", p(&c)])
        .env("OUTRANK_DP_SEED", "11")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn synth_rejects_two_alternatives() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["synth", "--n-alternatives", "2", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn rank_without_mechanism_writes_no_privacy_files() {
    let dir = tempfile::tempdir().unwrap();
    let evals = synth(dir.path(), "e.csv", "20", "3");
    let outdir = dir.path().join("out");
    let args = [
        "rank",
        "--evals",
        p(&evals),
        "--method",
        "promethee2",
        "--mechanism",
        "none",
        "--out-dir",
        p(&outdir),
    ];
    let first = run(&args);
    assert!(first.status.success());
    assert_eq!(stdout(&first), stdout(&run(&args)));
    assert!(stdout(&first).contains("phi"));
    assert!(!outdir.join("om_star.csv").exists());
    assert!(!outdir.join("sensitivity.csv").exists());
}

#[test]
fn rank_with_dp_writes_om_star_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let evals = synth(dir.path(), "e.csv", "50", "3");
    let outdir = dir.path().join("out");
    let o = run(&[
        "rank",
        "--evals",
        p(&evals),
        "--mechanism",
        "dp",
        "--epsilon",
        "1",
        "--seed",
        "5",
        "--out-dir",
        p(&outdir),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("electre3") && text.contains("promethee2"));
    let om = fs::read_to_string(outdir.join("om_star.csv")).unwrap();
    assert_eq!(om.lines().count(), 13);
    let report = fs::read_to_string(outdir.join("sensitivity.csv")).unwrap();
    assert!(report.starts_with("alternative,criterion,global_sens,local_sens,scale,epsilon_share\n"));
    assert_eq!(report.lines().count(), 1 + 12 * 6);
    // m = 6, K = 50, domain width 100: GS = 2, scale = 6 * 2 / 1 = 12
    let first: Vec<&str> = report.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[2], "2");
    assert_eq!(first[4], "12");
}

#[test]
fn idp_on_overlapping_users_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let evals = dir.path().join("dup.csv");
    fs::write(
        &evals,
        "alternative_id,user_id,g1,g2,g3,g4,g5,g6\n\
         a1,u1,10,20,30,40,50,60\n\
         a2,u1,60,50,40,30,20,10\n\
         a3,u2,50,50,50,50,50,50\n",
    )
    .unwrap();
    let outdir = dir.path().join("out");
    let o = run(&[
        "rank",
        "--evals",
        p(&evals),
        "--mechanism",
        "idp",
        "--out-dir",
        p(&outdir),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("u1"));
    assert!(!outdir.exists());

    let ok = run(&["rank", "--evals", p(&evals), "--mechanism", "none"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("warning"));
}

#[test]
fn experiment_single_cell_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("r1");
    let out2 = dir.path().join("r2");
    let grid = "eps=1;k=10;iter=1;mech=dp";
    for out in [&out1, &out2] {
        let o = run(&["experiment", "--grid", grid, "--seed", "9", "--out-dir", p(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let results = fs::read_to_string(out1.join("results.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next(),
        Some("method,mechanism,epsilon,K,iteration,mae,spearman,runtime_ms")
    );
    // one record per configured method
    assert_eq!(lines.count(), 2);
    assert_eq!(
        fs::read(out1.join("results.csv")).unwrap(),
        fs::read(out2.join("results.csv")).unwrap()
    );
    assert!(out1.join("summary.csv").exists());
    assert!(out1.join("rs_electre3_dp.svg").exists());
    assert!(out1.join("tables.txt").exists());
}

#[test]
fn experiment_rejects_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["experiment", "--grid", "eps=abc", "--out-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["experiment", "--grid", "k=", "--out-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn anonymize_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let evals = synth(dir.path(), "e.csv", "400", "21");
    let om = dir.path().join("om.csv");
    let star = dir.path().join("star.csv");
    let o = run(&[
        "anonymize",
        "--evals",
        p(&evals),
        "--mechanism",
        "dp",
        "--epsilon",
        "1",
        "--seed",
        "4",
        "--out",
        p(&star),
        "--om-out",
        p(&om),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let same = run(&["eval", "--truth", p(&om), "--noisy", p(&om)]);
    assert!(same.status.success());
    let text = stdout(&same);
    assert!(text.starts_with("MAE 0.000000\n"));
    assert!(text.contains("electre3   r_s 1.000000 (very-strong)"));
    assert!(text.contains("promethee2 r_s 1.000000 (very-strong)"));

    let noisy = stdout(&run(&["eval", "--truth", p(&om), "--noisy", p(&star)]));
    let mae: f64 = noisy.lines().next().unwrap()[4..].parse().unwrap();
    // E|Lap(1.5)| = 1.5 over 72 cells
    assert!((0.9..2.2).contains(&mae), "{mae}");
}

#[test]
fn eval_shape_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, "alternative_id,g1,g2,g3,g4,g5,g6\nx,1,2,3,4,5,6\ny,6,5,4,3,2,1\n").unwrap();
    fs::write(&b, "alternative_id,g1,g2,g3,g4,g5\nx,1,2,3,4,5\ny,6,5,4,3,2\n").unwrap();
    let o = run(&["eval", "--truth", p(&a), "--noisy", p(&b)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        "{\"criteria\": [{\"name\": \"g\", \"domain_min\": 0, \"domain_max\": 1, \"weight\": 1, \"q\": 5, \"p\": 2}]}",
    )
    .unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["synth", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ThresholdOrder"));
    assert!(!out.exists());
}

#[test]
fn select_subsamples_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let o = run(&[
        "synth",
        "--config",
        "beer",
        "--n-alternatives",
        "30",
        "--k",
        "40",
        "--seed",
        "2",
        "--out",
        p(&full),
    ]);
    assert!(o.status.success());
    let picked = dir.path().join("picked.csv");
    let o = run(&[
        "select",
        "--config",
        "beer",
        "--dataset",
        p(&full),
        "--k",
        "25",
        "--seed",
        "8",
        "--out",
        p(&picked),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&picked).unwrap().lines().count(), 1 + 20 * 25);
    let o = run(&[
        "select",
        "--config",
        "beer",
        "--dataset",
        p(&full),
        "--k",
        "41",
        "--out",
        p(&picked),
    ]);
    assert_eq!(o.status.code(), Some(3));
}
