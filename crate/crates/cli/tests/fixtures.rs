//! Bundled data fixtures: the disk and annulus catalogs and their system
//! variants must match the canonical constructors exactly.
//!
//! Regenerate after changing the constructors with
//!   cargo test -p psh-cli --test fixtures -- --ignored regenerate

use psh_core::builder::{annulus_sequence, disk_sequence};
use psh_core::json::sequence_to_doc;
use std::path::PathBuf;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn fixture_contents() -> Vec<(&'static str, String)> {
    let disk = disk_sequence(6);
    let annulus = annulus_sequence(4);
    let render = |doc| serde_json::to_string_pretty(&doc).unwrap() + "\n";
    vec![
        ("disk.json", render(sequence_to_doc(&disk, false))),
        ("disk_system.json", render(sequence_to_doc(&disk, true))),
        ("annulus.json", render(sequence_to_doc(&annulus, false))),
        ("annulus_system.json", render(sequence_to_doc(&annulus, true))),
    ]
}

#[test]
fn bundled_catalogs_match_constructors() {
    for (name, expected) in fixture_contents() {
        let path = data_dir().join(name);
        let on_disk = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing fixture {}: {e}", path.display()));
        assert_eq!(on_disk, expected, "{name} drifted; regenerate with the ignored test");
    }
}

#[test]
#[ignore = "writes the bundled fixtures in place"]
fn regenerate() {
    for (name, contents) in fixture_contents() {
        std::fs::write(data_dir().join(name), contents).unwrap();
    }
}
