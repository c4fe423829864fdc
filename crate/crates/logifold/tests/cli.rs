use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logifold")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const IDENTITY: &str = r#"{"input_dim": 2, "head": "index_max", "layers": [
  {"weights": [[1, 0], [0, 1]], "bias": [0, 0], "activation": "relu"},
  {"weights": [[1, 0], [0, 1]], "bias": [0, 0]}]}"#;

#[test]
fn compile_identity_on_nonnegative_box() {
    let dir = tempfile::tempdir().unwrap();
    let mlp = write(dir.path(), "id.json", IDENTITY);
    let out = run(&["compile", &mlp, "--domain", "0,1", "--mode", "sampling", "--samples", "2000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("first_layer_chambers=1\n"), "{text}");
    assert!(text.starts_with("seed=0\n"));
}

#[test]
fn compile_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mlp = write(dir.path(), "id.json", &IDENTITY.replace("index_max", "softmax"));
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&[
            "compile",
            &mlp,
            "--seed",
            "7",
            "--mode",
            "sampling",
            "--samples",
            "500",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let graph = logifold::io::load_graph(&a).unwrap();
    assert!(matches!(graph, logifold::io::GraphFile::Fuzzy { seed: 7, .. }));
}

#[test]
fn malformed_inputs_exit_nonzero_with_error_name() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", &IDENTITY.replace("\"relu\"", "\"gelu2\""));
    let o = run(&["compile", &bad]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("MlpError::UnknownActivation"));

    let preds = write(dir.path(), "p.txt", "# model_id=m labels=a,b\nx,0.5,0.4\n");
    let truth = write(dir.path(), "t.txt", "x,a\n");
    let o = run(&["combine", &preds, "--truth", &truth]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("PredictionError::RowSum") && err.contains("`x`"), "{err}");

    let o = run(&["compile", "/nonexistent/file.json"]);
    assert!(!o.status.success());
}

#[test]
fn single_perfect_chart_scores_one_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let preds = write(dir.path(), "p.txt", "# model_id=m labels=a,b\nx,1,0\ny,0,1\nz,0.9,0.1\n");
    let truth = write(dir.path(), "t.txt", "x,a\ny,b\nz,a\n");
    let o = run(&["combine", &preds, "--truth", &truth, "--ladder", "0,0.95"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "threshold\tacc_refined\tacc_certain\tn_certain\n\
         0.0000\t1.0000\t1.0000\t3\n\
         0.9500\t1.0000\t1.0000\t2\n\
         simple_average\t1.0000\n\
         majority_vote\t1.0000\n"
    );
}

#[test]
fn two_chart_toy_by_hand() {
    // instance 0: A (0.6, 0.4) on {a,b}, B (0.5, 0.5) on {b,c} → (0.3, 0.45, 0.25) → b
    // instance 1: A (0.95, 0.05), B (0.1, 0.9); at t = 0.9 only A counts → a
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", "# model_id=A labels=a,b\ni0,0.6,0.4\ni1,0.95,0.05\n");
    let b = write(dir.path(), "b.txt", "# model_id=B labels=b,c\ni0,0.5,0.5\ni1,0.1,0.9\n");
    let truth = write(dir.path(), "t.txt", "i0,b\ni1,a\n");
    let out = dir.path().join("table.tsv");
    let o = run(&["combine", &a, &b, "--truth", &truth, "--ladder", "0,0.9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    // t = 0: i1 averages to (0.475, 0.075, 0.45) → a, so both right;
    // combined certainties 0.45 and 0.475 are both above 0.
    // t = 0.9: i0 falls back (b), i1 uses A alone with certainty 0.95.
    assert_eq!(
        fs::read_to_string(out).unwrap(),
        "threshold\tacc_refined\tacc_certain\tn_certain\n\
         0.0000\t1.0000\t1.0000\t2\n\
         0.9000\t1.0000\t1.0000\t1\n\
         simple_average\t1.0000\n\
         majority_vote\t0.5000\n"
    );
}

#[test]
fn routing_file_drives_the_filter() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", "# model_id=F labels=g1,g2\ni0,0.9,0.1\ni1,0.2,0.8\n");
    let e1 = write(dir.path(), "e1.txt", "# model_id=E1 labels=a,b\ni0,0.8,0.2\ni1,0.8,0.2\n");
    let e2 = write(dir.path(), "e2.txt", "# model_id=E2 labels=c,d\ni0,0.5,0.5\ni1,0.3,0.7\n");
    let truth = write(dir.path(), "t.txt", "i0,a\ni1,d\n");
    let routing = write(dir.path(), "r.txt", "filter=F\ng1=E1\ng2=E2\n");
    let o = run(&["combine", &f, &e1, &e2, "--truth", &truth, "--ladder", "0", "--routing", &routing]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("0.0000\t1.0000\t1.0000\t2\n"));
    let bad = write(dir.path(), "bad.txt", "filter=F\ng1=E1\n");
    let o = run(&["combine", &f, &e1, &e2, "--truth", &truth, "--routing", &bad]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("EnsembleError::IncompleteCoarseMap"));
}

#[test]
fn theory_reports() {
    let o = run(&["theory", "-n", "1", "-k", "4", "--mode", "exhaustive", "--families", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("agreement = 5/6 (0.833333333333)"), "{text}");
    assert!(text.contains("claimed_bound = 5/8"));
    assert!(text.contains("claimed_bound_holds = fail (reported, not asserted)"));
    assert!(text.contains("proof_checks = pass"));
    assert_eq!(text, stdout(&run(&["theory", "-n", "1", "-k", "4", "--mode", "exhaustive", "--families", "20"])));

    let o = run(&["theory", "-n", "1", "-k", "3"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("TheoryError::KTooSmall"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let preds = write(dir.path(), "p.txt", "# model_id=m labels=a,b\nx,0.7,0.3\ny,0.4,0.6\n");
    let truth = write(dir.path(), "t.txt", "x,a\ny,a\n");
    let one = Command::new(env!("CARGO_BIN_EXE_logifold"))
        .env("LOGIFOLD_THREADS", "1")
        .args(["combine", &preds, "--truth", &truth])
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(stdout(&one), stdout(&run(&["combine", &preds, "--truth", &truth])));
}
