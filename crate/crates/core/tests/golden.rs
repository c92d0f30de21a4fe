//! Golden files under `golden/`. Set `HXPROOF_BLESS=1` to rewrite them.

use std::path::PathBuf;

use hxproof::corpus::golden_derivations;
use hxproof::kernel::{check_derivation, Derivation};
use hxproof::model::{ingest_datagraph, DataGraph, HybridDataModel, ModelJson};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../golden")
}

fn bless() -> bool {
    std::env::var("HXPROOF_BLESS").is_ok_and(|v| v == "1")
}

fn compare(name: &str, fresh: &str) {
    let path = golden_dir().join(name);
    if bless() {
        std::fs::write(&path, fresh).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stored, fresh, "{name} differs from its golden file; rerun with HXPROOF_BLESS=1 after review");
}

#[test]
fn golden_derivations_match_and_check() {
    for (name, d) in golden_derivations().unwrap() {
        let text = serde_json::to_string_pretty(&d).unwrap() + "\n";
        compare(&format!("{name}.json"), &text);
        let stored: Derivation = serde_json::from_str(&text).unwrap();
        assert!(check_derivation(&stored).is_ok(), "{name}");
    }
}

#[test]
fn example1_model_matches() {
    let text = std::fs::read_to_string(golden_dir().join("example1-datagraph.json")).unwrap();
    let dg: DataGraph = serde_json::from_str(&text).unwrap();
    let m = ingest_datagraph(&dg).unwrap();
    let json = serde_json::to_string_pretty(&ModelJson::from(&m)).unwrap() + "\n";
    compare("example1.json", &json);
    let back: ModelJson = serde_json::from_str(&json).unwrap();
    assert_eq!(ModelJson::from(&HybridDataModel::try_from(&back).unwrap()), back);
}
