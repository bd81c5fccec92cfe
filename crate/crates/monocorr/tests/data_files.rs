//! The committed data files must stay in sync with the generators. Run
//! with MONOCORR_REGEN_DATA=1 to rewrite them after an intentional change.

use std::path::PathBuf;

use monocorr::catalog::default_catalog;

fn workspace_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join(rel)
}

#[test]
fn committed_catalog_matches_the_generator() {
    let path = workspace_file("data/catalog.json");
    let mut expected =
        serde_json::to_string_pretty(&default_catalog()).expect("catalog serializes");
    expected.push('\n');
    if std::env::var("MONOCORR_REGEN_DATA").is_ok() {
        std::fs::write(&path, &expected).expect("write catalog");
        return;
    }
    let actual = std::fs::read_to_string(&path)
        .expect("data/catalog.json exists; regenerate with MONOCORR_REGEN_DATA=1");
    assert_eq!(
        actual, expected,
        "data/catalog.json is stale; regenerate with MONOCORR_REGEN_DATA=1"
    );
}
