//! End-to-end runs of the `wedgeguide` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wedgeguide::harness::ExperimentConfig;
use wedgeguide::load_qtable;
use wedgeguide::trace::Trace;

const SMALL: &str = r#"
maps = ["home"]
systems = ["FGS", "ADV"]
distances_m = [4.0]
trials_per_distance = 4
runs = 2

[learner]
episodes = 300

[evaluation]
episodes = 100
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wedgeguide"));
    c.env_remove("GHAL_SEED");
    c
}

fn ok(c: &mut Command) -> Output {
    let out = c.output().unwrap();
    assert!(out.status.success(), "{:?} failed:\n{}", c, String::from_utf8_lossy(&out.stderr));
    out
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("small.toml");
    fs::write(&p, SMALL).unwrap();
    p
}

#[test]
fn train_writes_a_loadable_table_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    ok(bin().args(["train", "--episodes", "400", "--seed", "3", "--out"]).arg(dir.path()));
    let q = load_qtable(&dir.path().join("qtable.ghqt")).unwrap();
    assert!(q.is_finite());
    let curve = fs::read_to_string(dir.path().join("training_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 401);
    assert_eq!(curve.lines().next(), Some("episode,return"));
}

#[test]
fn solve_reports_the_oracle_summary() {
    let dir = tempfile::tempdir().unwrap();
    ok(bin().args(["train", "--episodes", "200", "--out"]).arg(dir.path()));
    ok(bin().args(["solve", "--out"]).arg(dir.path()).arg("--compare").arg(dir.path().join("qtable.ghqt")));
    let summary = fs::read_to_string(dir.path().join("solve.toml")).unwrap();
    assert!(summary.contains("iterations = 458\n"), "{summary}");
    assert!(summary.contains("reachable_states = 2048\n"), "{summary}");
    assert!(summary.contains("compared_agreement = "), "{summary}");
    load_qtable(&dir.path().join("oracle.ghqt")).unwrap();
}

#[test]
fn eval_checkpoints_writes_one_row_per_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    ok(bin().arg("--config").arg(&cfg).args(["eval-checkpoints", "--out"]).arg(dir.path()));
    let csv = fs::read_to_string(dir.path().join("checkpoints.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "checkpoint,episode,mean_return,fgs_mean_return");
    assert_eq!(lines.len(), 1 + 3);
    // the baseline column is constant
    let fgs: Vec<_> = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap()).collect();
    assert!(fgs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn experiment_output_is_reproducible_and_seeded_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = |sub: &str, env: Option<&str>, extra: &[&str]| {
        let out = dir.path().join(sub);
        let mut c = bin();
        c.arg("--config").arg(&cfg).args(["experiment", "--format", "both", "--out"]).arg(&out).args(extra);
        if let Some(s) = env {
            c.env("GHAL_SEED", s);
        }
        ok(&mut c);
        out
    };
    let a = run("a", None, &[]);
    let b = run("b", None, &[]);
    for name in ["times.csv", "accuracy.csv", "report.json", "config.toml"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let seeded = run("c", Some("77"), &[]);
    let used = ExperimentConfig::from_toml(&fs::read_to_string(seeded.join("config.toml")).unwrap()).unwrap();
    assert_eq!(used.base_seed, 77);
    assert!(fs::read_to_string(seeded.join("times.csv")).unwrap().contains("base_seed=77"));
    let flagged = run("d", Some("77"), &["--seed", "5"]);
    assert!(fs::read_to_string(flagged.join("times.csv")).unwrap().contains("base_seed=5"));
}

#[test]
fn trial_trace_replays_as_text_frames() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    ok(bin()
        .args(["trial", "--map", "office", "--system", "FGS", "--distance", "4", "--seed", "2", "--out"])
        .arg(&trace));
    let parsed = Trace::parse(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(parsed.header.map, "office");
    let outcome = parsed.outcome.as_ref().unwrap();
    assert_eq!(parsed.ticks.len(), outcome.ticks as usize + 1);

    let out = ok(bin().arg("replay").arg(&trace));
    let frames = String::from_utf8(out.stdout).unwrap();
    assert_eq!(frames.matches("tick ").count(), parsed.ticks.len());
    assert!(frames.contains("outcome:"));
}

#[test]
fn bad_inputs_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "runs = 2\nbogus = true\n").unwrap();
    let (bad, missing) = (bad.display().to_string(), dir.path().join("missing.jsonl").display().to_string());
    let cases: [&[&str]; 4] = [
        &["--config", &bad, "train", "--out", "x"],
        &["trial", "--map", "nowhere.map", "--system", "ADV", "--out", "x"],
        &["trial", "--system", "ADV", "--distance", "900", "--out", "x"],
        &["replay", &missing],
    ];
    for args in cases {
        let out = bin().current_dir(dir.path()).args(args).output().unwrap();
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "), "{args:?}");
    }
    let out =
        bin().env("GHAL_SEED", "not-a-number").args(["train", "--out", "x"]).current_dir(dir.path()).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("GHAL_SEED"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let desk = ExperimentConfig::from_toml(&fs::read_to_string(dir.join("desk.toml")).unwrap()).unwrap();
    assert_eq!(desk, ExperimentConfig::default());
    for name in ["full.toml", "smoke.toml"] {
        ExperimentConfig::from_toml(&fs::read_to_string(dir.join(name)).unwrap()).unwrap().validate().unwrap();
    }
}
