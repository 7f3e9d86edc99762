mod common;

use common::*;

fn visibility_workspace() -> (tempfile::TempDir, String, String) {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "src/Demo.java", VISIBILITY_JAVA);
    let pairs = dir.path().join("pairs.tsv").to_string_lossy().into_owned();
    let model = dir.path().join("model.m2c").to_string_lossy().into_owned();
    let src = dir.path().join("src").to_string_lossy().into_owned();
    assert!(m2c(&["extract", "--corpus", &src, "--out", &pairs]).status.success());
    assert!(m2c(&["train", "--pairs", &pairs, "--out", &model]).status.success());
    (dir, pairs, model)
}

#[test]
fn extract_visibility_directory() {
    let (_dir, pairs, _) = visibility_workspace();
    let tsv = std::fs::read_to_string(pairs).unwrap();
    assert_eq!(
        tsv,
        "Android\tDemo.java:3\t#var setVisibility#iden\t#var:android.view.View #var:android.view.View.setVisibility(android.view.View.VISIBLE)\n"
    );
}

#[test]
fn extract_reports_stats_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "src/Demo.java", VISIBILITY_JAVA);
    write(dir.path(), "src/Broken.java", "class B { void m() { \"unterminated");
    let out = dir.path().join("p.tsv");
    let o = m2c(&["extract", "--corpus", dir.path().join("src").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("files skipped: 1"), "{err}");
    assert!(err.contains("pairs written: 1"), "{err}");
}

#[test]
fn extract_empty_directory_warns() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("src")).unwrap();
    let out = dir.path().join("p.tsv");
    let o = m2c(&["extract", "--corpus", dir.path().join("src").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert_eq!(std::fs::read_to_string(out).unwrap(), "");
}

#[test]
fn extract_missing_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "src/Demo.java", VISIBILITY_JAVA);
    let src = dir.path().join("src");
    let out = dir.path().join("p.tsv");
    let missing_db = dir.path().join("nope.tsv");
    let o = m2c(&[
        "extract",
        "--corpus",
        src.to_str().unwrap(),
        "--typedb",
        missing_db.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = m2c(&["extract", "--corpus", dir.path().join("absent").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extract_with_custom_typedb() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "src/W.java", "import com.acme.Widget;\nclass W { void m(Widget w) { w.spin(); } }\n");
    let db = write(dir.path(), "db.tsv", "TYPE\tWidget\tcom.acme.Widget\tAcme\n");
    let out = dir.path().join("p.tsv");
    let o = m2c(&[
        "extract",
        "--corpus",
        dir.path().join("src").to_str().unwrap(),
        "--typedb",
        db.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let tsv = std::fs::read_to_string(out).unwrap();
    assert!(tsv.starts_with("Acme\tW.java:2\t"), "{tsv}");
    assert!(tsv.contains("#var:com.acme.Widget.spin()"), "{tsv}");
}

#[test]
fn translate_name_text_visibility() {
    let (_dir, _, model) = visibility_workspace();
    let o = m2c(&["translate", "--model", &model, "--name-text", "set visibility"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "display: «var:View».setVisibility(View.VISIBLE)");
    assert_eq!(lines[1], "raw: #var:android.view.View.setVisibility(android.view.View.VISIBLE)");
    let score: f64 = lines[2].strip_prefix("score: ").unwrap().parse().unwrap();
    assert!(score.is_finite() && score < 0.0);
    assert!(stderr(&o).contains("setVisibility"));
}

#[test]
fn translate_unknown_name_is_copied_through() {
    let (_dir, _, model) = visibility_workspace();
    let o = m2c(&["translate", "--model", &model, "--name", "frobnicate"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("display: frobnicate#iden#OOV\n"));
    assert!(stderr(&o).contains("note:"));
}

#[test]
fn translate_requires_a_name() {
    let (_dir, _, model) = visibility_workspace();
    assert_eq!(m2c(&["translate", "--model", &model]).status.code(), Some(2));
}

#[test]
fn suggest_get_bit_map() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.m2c");
    bitmap_model().save(&model).unwrap();
    let o = m2c(&["suggest", "--model", model.to_str().unwrap(), "--text", "get bit map", "-k", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "getBitmap\t1.0000\n");
    let o = m2c(&["suggest", "--model", model.to_str().unwrap(), "--text", "get bit map"]);
    assert_eq!(stdout(&o), "getBitmap\t1.0000\ngetBitmapBounds\t0.6667\nsetBitmap\t0.3333\n");
}

#[test]
fn corrupt_and_unsupported_models_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("m.m2c");
    bitmap_model().save(&good).unwrap();
    let text = std::fs::read_to_string(&good).unwrap();

    let tampered = write(dir.path(), "t.m2c", &text.replacen("getBitmap", "getBitmaq", 1));
    let o = m2c(&["suggest", "--model", tampered.to_str().unwrap(), "--text", "x"]);
    assert_eq!(o.status.code(), Some(3));

    let future = write(dir.path(), "f.m2c", &text.replacen("M2C-MODEL v1", "M2C-MODEL v9", 1));
    let o = m2c(&["translate", "--model", future.to_str().unwrap(), "--name", "x"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unsupported"));

    let missing = dir.path().join("none.m2c");
    assert_eq!(m2c(&["suggest", "--model", missing.to_str().unwrap(), "--text", "x"]).status.code(), Some(2));
}

#[test]
fn train_rejects_empty_corpus_and_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.tsv", "");
    let out = dir.path().join("m.m2c");
    let o = m2c(&["train", "--pairs", empty.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = m2c(&["train", "--pairs", empty.to_str().unwrap(), "--out", out.to_str().unwrap(), "--lmax", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write(dir.path(), "b.tsv", "only\ttwo\n");
    let o = m2c(&["train", "--pairs", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_replay_prints_total_row() {
    let (dir, pairs, model) = visibility_workspace();
    let report = dir.path().join("report.tsv");
    let o = m2c(&["eval", "--model", &model, "--test", &pairs, "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "Total\t1\t0\t0\t0\t0\t1\t100.00%\t100.00%\t100.00%\n");
    let tsv = std::fs::read_to_string(report).unwrap();
    assert!(tsv.starts_with("Library\tCorrect\tIncorrect\tOOSource\tOOTarget\tOOVoc\tTotal\tPrecision\tRecall\tF1\n"));
    assert!(tsv.contains("\nAndroid\t1\t0\t0\t0\t0\t1\t"));
}

#[test]
fn split_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut tsv = String::new();
    for i in 0..60 {
        tsv.push_str(&format!("JDK\tF{i}.java:1\tx#iden\tX.x()\n"));
    }
    let pairs = write(dir.path(), "p.tsv", &tsv);
    let run = |tag: &str| {
        let tr = dir.path().join(format!("train{tag}.tsv"));
        let te = dir.path().join(format!("test{tag}.tsv"));
        let o = m2c(&[
            "split",
            "--pairs",
            pairs.to_str().unwrap(),
            "--train-out",
            tr.to_str().unwrap(),
            "--test-out",
            te.to_str().unwrap(),
            "--test-fraction",
            "0.25",
            "--seed",
            "7",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (std::fs::read_to_string(tr).unwrap(), std::fs::read_to_string(te).unwrap())
    };
    let (a_train, a_test) = run("a");
    let (b_train, b_test) = run("b");
    assert_eq!((&a_train, &a_test), (&b_train, &b_test));
    assert_eq!(a_train.lines().count() + a_test.lines().count(), 60);
    assert!(a_test.lines().count() > 0);
    let o = m2c(&[
        "split",
        "--pairs",
        pairs.to_str().unwrap(),
        "--train-out",
        "/dev/null",
        "--test-out",
        "/dev/null",
        "--test-fraction",
        "1.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_documents_exit_codes() {
    let o = m2c(&["--help"]);
    assert!(stdout(&o).contains("Exit codes:"));
    let o = m2c(&["serve", "--help"]);
    assert!(stdout(&o).contains("port already in use"));
}

#[test]
fn serve_port_in_use_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.m2c");
    bitmap_model().save(&model).unwrap();
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = m2c(&["serve", "--model", model.to_str().unwrap(), "--port", &port]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot listen"));
}
