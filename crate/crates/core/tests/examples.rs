//! Worked examples for each pipeline stage.

use m2c_core::encoder::{
    encode_file, method_source_token, split_subtokens, EncodeOptions, ExpressionTemplate, ParallelPair, PairError,
};
use m2c_core::evaluator::{
    classify_instance, compute_metrics, format_row, split_corpus, EvalCounts, EvalReport, Outcome, SplitError,
    REPORT_HEADER,
};
use m2c_core::extractor::{extract_invocations, lex, resolve_fqn, ArgRole, ParsedFile, Receiver, TokenKind, TypeDatabase};
use m2c_core::querier::{encode_query, render, DeveloperQuery, NameIndex, PlaceholderKind, QueryError};
use m2c_core::translator::{
    extract_phrases, lm_logprob, train, ModelError, TrainConfig, TrainError, TranslationModel, BOS, EOS,
};

fn pair(src: &[&str], tgt: &[&str]) -> ParallelPair {
    ParallelPair::from_canonical(src, tgt, "JDK", "T.java:1").unwrap()
}

fn code_tokens(src: &str) -> Vec<(TokenKind, String)> {
    lex(src).unwrap().into_iter().filter(|t| !t.is_synthetic()).map(|t| (t.kind, t.text)).collect()
}

#[test]
fn lex_examples() {
    use TokenKind::*;
    let expected: Vec<(TokenKind, String)> =
        [(Identifier, "a"), (Separator, "."), (Identifier, "b"), (Separator, "("), (Identifier, "c"), (Separator, ")")]
            .into_iter()
            .map(|(k, t)| (k, t.to_string()))
            .collect();
    assert_eq!(code_tokens("a.b(c)"), expected);

    // Nine code tokens plus the end marker.
    let all = lex("view.setVisibility(View.VISIBLE);").unwrap();
    assert_eq!(all.len(), 10);
    assert!(all[9].is_synthetic());
    let toks = code_tokens("view.setVisibility(View.VISIBLE);");
    let idents: Vec<&str> = toks.iter().filter(|t| t.0 == Identifier).map(|t| t.1.as_str()).collect();
    assert_eq!(idents, ["view", "setVisibility", "View", "VISIBLE"]);

    assert_eq!(lex("x = \"un"), Err(m2c_core::extractor::LexError::UnterminatedString(1)));
}

#[test]
fn invocation_examples() {
    let s = extract_invocations(&lex("view.setVisibility(View.VISIBLE);").unwrap());
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].method_name, "setVisibility");
    assert_eq!(s[0].receiver, Receiver::Variable("view".into()));
    assert_eq!(s[0].args.len(), 1);
    assert_eq!(s[0].args[0].role, ArgRole::ConstantRef);

    let s = extract_invocations(&lex("System.out.println(a + b);").unwrap());
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].method_name, "println");
    assert_eq!(s[0].receiver, Receiver::FieldChain(vec!["System".into(), "out".into()]));
    assert_eq!(s[0].args[0].role, ArgRole::Compound);
    assert_eq!(s[0].args[0].operator_parts, ["+"]);

    assert!(extract_invocations(&lex("int x = 3;").unwrap()).is_empty());
}

#[test]
fn resolve_examples() {
    let db = TypeDatabase::bundled();
    assert_eq!(resolve_fqn("View", &["android.view.View".into()], &db).as_deref(), Some("android.view.View"));

    let mut only_view = TypeDatabase::new();
    only_view.add_type("View", "android.view.View", "Android");
    assert_eq!(resolve_fqn("View", &[], &only_view).as_deref(), Some("android.view.View"));

    let mut blobs = TypeDatabase::new();
    blobs.add_type("Blob", "mylib.Blob", "Mine");
    blobs.add_type("Blob", "java.sql.Blob", "JDK");
    // Candidates sorted: "java.sql.Blob" < "mylib.Blob".
    let mut by_hand = ["mylib.Blob", "java.sql.Blob"];
    by_hand.sort();
    assert_eq!(resolve_fqn("Blob", &[], &blobs).as_deref(), Some(by_hand[0]));
}

#[test]
fn subtoken_examples() {
    assert_eq!(split_subtokens("x"), ["x"]);
    assert_eq!(split_subtokens("parseHTTPRequest2"), ["parse", "http", "request", "2"]);
    // camelCase splitting keeps "Bitmap" whole; "bit map" still matches
    // through query-word merging in the name index.
    assert_eq!(split_subtokens("getBitmap"), ["get", "bitmap"]);
    assert_eq!(split_subtokens("getBitMap"), ["get", "bit", "map"]);
}

fn encode(src: &str, detailed: bool) -> Vec<ParallelPair> {
    let file = ParsedFile::parse("Demo.java", src).unwrap();
    encode_file(&file, &TypeDatabase::bundled(), EncodeOptions { detailed }).pairs
}

#[test]
fn encoder_examples() {
    let pairs = encode("import android.view.View;\nclass A { void m(View view) {\n view.setVisibility(View.VISIBLE);\n } }", false);
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0].source_strings(), ["#var", "setVisibility#iden"]);
    assert_eq!(
        pairs[0].target_strings(),
        ["#var:android.view.View", "#var:android.view.View.setVisibility(android.view.View.VISIBLE)"]
    );
    assert_eq!(pairs[0].library(), "Android");

    let pairs = encode("class A { void m(int a, int b) { System.out.println(a + b); } }", false);
    assert_eq!(pairs[0].target_strings()[1], "java.lang.System.out.println(#var:int~+~#var:int)");

    let pairs = encode("import android.view.View;\nclass A { View v; int w = View.VISIBLE; void m() { v.setVisibility(w); } }", false);
    let p = pairs.iter().find(|p| p.source_strings().contains(&"setVisibility#iden")).unwrap();
    assert_eq!(p.source_strings().len(), p.target_strings().len());

    assert!(encode("class A { void m() { int x = 3; } }", false).is_empty());

    let file = ParsedFile::parse("U.java", "class U { void m(Mystery q) { q.go(); } }").unwrap();
    let out = encode_file(&file, &TypeDatabase::bundled(), EncodeOptions::default());
    assert!(out.pairs.is_empty());
    assert_eq!(out.dropped, 1);
}

#[test]
fn template_parse_examples() {
    let t = ExpressionTemplate::parse("java.lang.System.out.println(#var:int~+~#var:int)").unwrap();
    assert_eq!(t.method, "println");
    assert_eq!(t.placeholders().len(), 2);
    assert_eq!(t.serialize(), "java.lang.System.out.println(#var:int~+~#var:int)");
}

#[test]
fn phrase_examples() {
    let three = extract_phrases(&["s1", "s2"], &["t1", "t2"], 2).unwrap();
    assert_eq!(three.len(), 3);
    for p in [("s1", "t1"), ("s2", "t2"), ("s1 s2", "t1 t2")] {
        assert!(three.contains(&(p.0.to_string(), p.1.to_string())));
    }
    assert_eq!(extract_phrases(&["a", "b", "c"], &["x", "y", "z"], 2).unwrap().len(), 5);
    assert!(matches!(
        extract_phrases(&["a", "b"], &["x", "y", "z"], 2),
        Err(PairError::LengthMismatch { source_len: 2, target_len: 3 })
    ));
}

#[test]
fn train_examples() {
    let m = train(&[pair(&["a"], &["x"])], TrainConfig::default()).unwrap();
    assert_eq!(m.phrases.get("a")[0].p_fwd, 1.0);
    // Witten-Bell: history <s> has c(x)=1, N=1, T=1, so P(x|<s>) = 1/(1+1).
    assert!((m.lm.prob(&[BOS], "x") - 0.5).abs() < 1e-15);
    // Then P(</s>|<s> x) = 1/2 as well.
    let by_hand = (1.0f64 / 2.0).ln() + (1.0f64 / 2.0).ln();
    assert!((lm_logprob(&m.lm, &["x"]) - by_hand).abs() < 1e-12);
    assert!((m.lm.prob(&[BOS, "x"], EOS) - 0.5).abs() < 1e-15);
    let unk = lm_logprob(&m.lm, &["never"]);
    assert!(unk.is_finite() && unk < 0.0);

    let m = train(&[pair(&["a"], &["x"]), pair(&["a"], &["x"]), pair(&["a"], &["y"])], TrainConfig::default()).unwrap();
    let probs: Vec<(&str, f64)> = m.phrases.get("a").iter().map(|e| (e.target.as_str(), e.p_fwd)).collect();
    assert_eq!(probs, [("x", 2.0 / 3.0), ("y", 1.0 / 3.0)]);
    assert_eq!(m.decode(&["a"], 10).target, ["x"]);
    assert_eq!(m.decode(&["qqq"], 10).target, ["qqq#OOV"]);

    assert!(matches!(train(&[], TrainConfig::default()), Err(TrainError::EmptyCorpus)));
}

#[test]
fn model_file_examples() {
    let m = train(&[pair(&["a", "b"], &["x", "y"]), pair(&["a"], &["z"])], TrainConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.m2c");
    m.save(&path).unwrap();
    let back = TranslationModel::load(&path).unwrap();
    let (a, b) = (m.decode(&["a"], 10), back.decode(&["a"], 10));
    assert_eq!(a.target, b.target);
    assert!((a.score - b.score).abs() < 1e-12);

    let bytes = std::fs::read(&path).unwrap();
    assert!(matches!(TranslationModel::from_bytes(&bytes[..bytes.len() / 2]), Err(ModelError::CorruptModel(_))));
    let text = String::from_utf8(bytes).unwrap().replacen("M2C-MODEL v1", "M2C-MODEL v2", 1);
    assert!(matches!(TranslationModel::from_bytes(text.as_bytes()), Err(ModelError::UnsupportedVersion(_))));
}

#[test]
fn suggest_examples() {
    let idx = NameIndex::from_counts(
        [("getBitmap", 1), ("setBitmap", 1), ("getBitmapBounds", 1)].into_iter().map(|(n, c)| (n.to_string(), c)).collect(),
    );
    let s = idx.suggest("get bit map", 3).unwrap();
    assert_eq!(s[0].name, "getBitmap");
    assert_eq!(s[0].score, 1.0);
    assert!(idx.suggest("zzz", 3).unwrap().is_empty());

    let idx = NameIndex::from_counts([("abMethodX".to_string(), 5), ("abMethodY".to_string(), 2)].into_iter().collect());
    let s = idx.suggest("ab method", 2).unwrap();
    // {ab, method} against {ab, method, x}: 2 shared of 3.
    let jaccard = 2.0 / 3.0;
    assert_eq!((s[0].name.as_str(), s[1].name.as_str()), ("abMethodX", "abMethodY"));
    assert!((s[0].score - jaccard).abs() < 1e-12 && (s[1].score - jaccard).abs() < 1e-12);
}

#[test]
fn query_examples() {
    let q = DeveloperQuery { chosen_name: Some("getBitmap".into()), ..Default::default() };
    assert_eq!(encode_query(&q).unwrap(), ["getBitmap#iden"]);
    let q = DeveloperQuery {
        chosen_name: Some("println".into()),
        variables: vec!["int".into(), "int".into()],
        words: vec!["+".into()],
        ..Default::default()
    };
    let by_hand = format!("println{}{}{}", "#iden", "#var:int#var:int", "#word:+");
    assert_eq!(encode_query(&q).unwrap(), std::slice::from_ref(&by_hand));
    assert_eq!(method_source_token("println", &["int", "int"], &["+"]), by_hand);
    let q = DeveloperQuery { name_text: Some("get bit map".into()), ..Default::default() };
    assert_eq!(encode_query(&q), Err(QueryError::MissingName));
}

#[test]
fn render_examples() {
    let r = render("#var:android.view.View.setVisibility(android.view.View.VISIBLE)").unwrap();
    assert_eq!(r.display, "«var:View».setVisibility(View.VISIBLE)");
    assert_eq!(r.placeholders.len(), 1);
    let r = render("java.lang.System.out.println(#var:int~+~#var:int)").unwrap();
    assert_eq!(r.display, "System.out.println(«var:int» + «var:int»)");
    assert_eq!(r.placeholders.len(), 2);
    assert!(r.placeholders.iter().all(|p| p.kind == PlaceholderKind::Var && p.type_name.as_deref() == Some("int")));
    let err = render("qqq#OOV").unwrap_err();
    assert!(err.0.contains("qqq#OOV"));
}

#[test]
fn split_examples() {
    let pairs: Vec<ParallelPair> = (0..100)
        .map(|i| ParallelPair::from_canonical(&["a#iden"], &["X.a()"], "JDK", format!("F{i}.java:1")).unwrap())
        .collect();
    let (train1, test1) = split_corpus(&pairs, 0.1, 42).unwrap();
    assert!((1..=99).contains(&test1.len()));
    assert_eq!(split_corpus(&pairs, 0.1, 42).unwrap(), (train1, test1));
    assert!(matches!(split_corpus(&pairs, 0.0, 42), Err(SplitError::InvalidFraction(_))));
}

#[test]
fn classify_examples() {
    let model = train(&[pair(&["a#iden"], &["X.a(#var:int)"])], TrainConfig::default()).unwrap();
    assert_eq!(classify_instance(&model, &pair(&["a#iden"], &["X.a(#var:int)"]), 10), Ok(Outcome::Correct));
    assert_eq!(classify_instance(&model, &pair(&["zzz#iden"], &["X.zzz()"]), 10), Ok(Outcome::OoSource));
    assert_eq!(classify_instance(&model, &pair(&["a#iden"], &["Y.a()"]), 10), Ok(Outcome::OoTarget));
}

fn pct(num: u64, den: u64) -> f64 {
    100.0 * num as f64 / den as f64
}

#[test]
fn metric_examples() {
    for (c, i, s, t, p, r, f) in [
        (39635, 22318, 3082, 28440, "63.98%", "55.70%", "59.55%"),
        (27364, 10608, 51, 1692, "72.06%", "94.01%", "81.59%"),
        (1649666, 692673, 17335, 506459, "70.43%", "75.90%", "73.06%"),
        (10, 0, 0, 0, "100.00%", "100.00%", "100.00%"),
    ] {
        let m = compute_metrics(&EvalCounts::new(c, i, s, t));
        assert_eq!((m.precision.percent().as_str(), m.recall.percent().as_str(), m.f1.percent().as_str()), (p, r, f));
        // Independent float check of the formulas.
        let (pp, rr) = (pct(c, c + i), pct(c, c + s + t));
        assert!((m.f1.value() * 100.0 - 2.0 * pp * rr / (pp + rr)).abs() < 1e-9);
    }
    let m = compute_metrics(&EvalCounts::new(0, 5, 0, 0));
    assert_eq!((m.precision.value(), m.recall.value(), m.f1.value()), (0.0, 0.0, 0.0));
}

#[test]
fn report_examples() {
    let gwt = EvalCounts::new(39635, 22318, 3082, 28440);
    assert!(format_row("GWT", &gwt).ends_with("\t93475\t63.98%\t55.70%\t59.55%"));

    let empty = EvalReport::default().to_tsv();
    assert_eq!(empty, format!("{REPORT_HEADER}\nTotal\t0\t0\t0\t0\t0\t0\t0.00%\t0.00%\t0.00%\n"));

    let mut report = EvalReport::default();
    report.per_library.insert("A".into(), EvalCounts::new(3, 1, 0, 1));
    report.per_library.insert("B".into(), EvalCounts::new(2, 2, 1, 0));
    let tsv = report.to_tsv();
    let rows: Vec<&str> = tsv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].starts_with("Total\t5\t3\t1\t1\t2\t10\t"));
}
