use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use coph_core::{Permutation, TrialStats};

fn coph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "\
# small synthetic grid
dim = 256
union = 64
jaccard = 0.25, 0.5, 0.75
bins = 8
hashes = 8, 16
trials = 300
seed = 17
scheme = reden
scheme = coph-sigma-pi
scheme = coph-2u-pi
";

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_parseable_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("a.csv");
    let plot = dir.path().join("a.svg");
    let o = coph(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(coph_core::estimate::STATS_CSV_HEADER));
    let rows: Vec<TrialStats> = lines.map(|l| TrialStats::from_csv_row(l).unwrap()).collect();
    assert_eq!(rows.len(), 3 * 2 * 3);
    assert!(rows.iter().all(|r| r.n_trials == 300 && r.dim == 256 && r.bins == 8));
    assert!(fs::read_to_string(&plot).unwrap().contains("K = 8, M = 16"));

    let again = dir.path().join("b.csv");
    let o = coph(&["run", "--config", &cfg, "--out", again.to_str().unwrap(), "--jobs", "1"]);
    assert!(o.status.success());
    assert_eq!(csv, fs::read_to_string(&again).unwrap());

    let reseeded = coph(&["run", "--config", &cfg, "--seed", "18"]);
    assert!(reseeded.status.success());
    assert_ne!(stdout(&reseeded), csv);
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        (SMALL.replace("trials = 300", "trials = 0"), "trials"),
        (SMALL.replace("scheme = reden", "scheme = nonsense"), "unknown scheme"),
        (SMALL.replace("union = 64", "union = 300"), "infeasible"),
        (
            SMALL.replace("hashes = 8, 16", "hashes = 512") + "scheme = cminhash-sigma-pi\n",
            "infeasible",
        ),
    ] {
        let cfg = write_config(dir.path(), &text);
        let o = coph(&["run", "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
    }
}

#[test]
fn theory_outputs_closed_forms_per_spec_cases() {
    let o = coph(&["theory", "--dim", "64", "--bins", "4", "-a", "8", "-f", "24"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("C-OPH < ReDen"));

    let o = coph(&["theory", "--dim", "64", "--bins", "4", "-a", "24", "-f", "24", "--csv"]);
    let text = stdout(&o);
    assert!(text.contains("64,4,24,24,1,variance_coph,0\n"), "{text}");
    assert!(text.contains("variance_reden,0\n"));

    let o = coph(&["theory", "--dim", "64", "--bins", "16", "-a", "8", "-f", "24"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("K² ≤ D"), "{}", stderr(&o));
    let o = coph(&[
        "theory",
        "--dim",
        "64",
        "--bins",
        "16",
        "-a",
        "8",
        "-f",
        "24",
        "--override-theory-hypotheses",
    ]);
    assert!(o.status.success());
}

#[test]
fn theory_oracle_cross_check() {
    let o = coph(&[
        "theory", "--dim", "8", "--bins", "2", "-a", "2", "-f", "4", "--oracle", "--exact",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let field = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        line[name.len()..].trim().parse().unwrap()
    };
    assert!((field("oracle C-OPH") - field("variance C-OPH")).abs() < 1e-12);
    assert!((field("oracle ReDen") - field("variance ReDen")).abs() < 1e-12);
}

#[test]
fn run_with_theory_output() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        "dim = 64\nunion = 24\njaccard = 0.333333\nbins = 4\ntrials = 50\nscheme = coph\ntheory_out = theory.csv\n";
    let cfg = write_config(dir.path(), text);
    let o = coph(&["run", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let theory = fs::read_to_string(dir.path().join("theory.csv")).unwrap();
    assert!(theory.starts_with("D,K,a,f,J,quantity,value\n64,4,8,24,"));
}

#[test]
fn ingest_sketch_estimate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let docs: Vec<String> = (0..64)
        .map(|i| {
            let mut words = vec!["common".to_string()];
            if i % 2 == 0 {
                words.push("even".into());
            }
            if i % 4 == 0 {
                words.push("quad".into());
            }
            words.join(" ")
        })
        .collect();
    let corpus = dir.path().join("docs.txt");
    fs::write(&corpus, docs.join("\n")).unwrap();
    let vectors = dir.path().join("vectors.csv");
    let o = coph(&["ingest", corpus.to_str().unwrap(), "--out", vectors.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("3 terms over 64 documents"));

    let sketch = |term: &str, scheme: &str| {
        let out = dir.path().join(format!("{term}-{scheme}.sk"));
        let o = coph(&[
            "sketch",
            "--vectors",
            vectors.to_str().unwrap(),
            "--term",
            term,
            "--scheme",
            scheme,
            "--bins",
            "8",
            "--hashes",
            "32",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        out.to_str().unwrap().to_string()
    };
    for scheme in ["coph-sigma-pi", "reden", "minhash"] {
        let (even, quad) = (sketch("even", scheme), sketch("quad", scheme));
        let o = coph(&["estimate", &even, &quad]);
        assert!(o.status.success(), "{}", stderr(&o));
        let j: f64 = stdout(&o).trim().parse().unwrap();
        assert!((0.0..=1.0).contains(&j), "{scheme}: {j}");
        let same = coph(&["estimate", &even, &even]);
        assert_eq!(stdout(&same).trim(), "1");
    }
    let mismatch = coph(&["estimate", &sketch("even", "reden"), &sketch("even", "coph-sigma-pi")]);
    assert!(!mismatch.status.success());
}

#[test]
fn perm_writes_loadable_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let o = coph(&["perm", "--dim", "100", "--seed", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let bytes = fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 8 * 101);
    let p = Permutation::read_from(&mut bytes.as_slice()).unwrap();
    assert_eq!(p, Permutation::from_seed(100, 3).unwrap());
}
