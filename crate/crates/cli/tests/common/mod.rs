#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use m2c_core::encoder::{extract_corpus, EncodeOptions, ParallelPair};
use m2c_core::extractor::TypeDatabase;
use m2c_core::translator::{train, TrainConfig, TranslationModel};

pub const VISIBILITY_JAVA: &str =
    "import android.view.View;\nclass Demo { void show(View view) {\n view.setVisibility(View.VISIBLE);\n } }\n";
pub const PRINTLN_JAVA: &str = "class Sum { void m(int a, int b) { System.out.println(a + b); } }\n";

pub fn m2c(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_m2c")).args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).unwrap();
    }
    std::fs::write(&path, text).unwrap();
    path
}

pub fn extract_text(files: &[(&str, &str)], detailed: bool) -> Vec<ParallelPair> {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        write(dir.path(), name, text);
    }
    extract_corpus(dir.path(), &TypeDatabase::bundled(), EncodeOptions { detailed }).unwrap().pairs
}

pub fn model_from(files: &[(&str, &str)], detailed: bool) -> TranslationModel {
    train(&extract_text(files, detailed), TrainConfig::default()).unwrap()
}

pub fn pair(src: &[&str], tgt: &[&str], library: &str, origin: &str) -> ParallelPair {
    ParallelPair::from_canonical(src, tgt, library, origin).unwrap()
}

/// Model whose name index holds getBitmap, setBitmap and getBitmapBounds.
pub fn bitmap_model() -> TranslationModel {
    let pairs = vec![
        pair(&["#var", "getBitmap#iden"], &["#var:a.B", "#var:a.B.getBitmap()"], "A", "a:1"),
        pair(&["#var", "getBitmap#iden"], &["#var:a.B", "#var:a.B.getBitmap()"], "A", "a:2"),
        pair(&["#var", "setBitmap#iden"], &["#var:a.B", "#var:a.B.setBitmap(#var:a.C)"], "A", "a:3"),
        pair(&["#var", "getBitmapBounds#iden"], &["#var:a.B", "#var:a.B.getBitmapBounds()"], "A", "a:4"),
    ];
    train(&pairs, TrainConfig::default()).unwrap()
}
