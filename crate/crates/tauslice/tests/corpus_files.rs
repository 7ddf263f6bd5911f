//! The shipped `corpus/` directory matches the generators byte for byte.
//! Regenerate with `TAUSLICE_WRITE_CORPUS=1 cargo test --test corpus_files`.

use std::path::PathBuf;
use tauslice::corpus::corpus_files;
use tauslice::quiver::BoundQuiver;
use tauslice::stability::check_stable;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn corpus_matches_generators() {
    let dir = corpus_dir();
    let write = std::env::var_os("TAUSLICE_WRITE_CORPUS").is_some();
    if write {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, bq) in corpus_files() {
        let path = dir.join(&name);
        let text = bq.serialize();
        if write {
            std::fs::write(&path, &text).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk, text, "{name} is stale");
        assert_eq!(BoundQuiver::parse(&on_disk).unwrap(), bq, "{name} does not round-trip");
    }
}

#[test]
fn corpus_stability_status() {
    for (name, bq) in corpus_files() {
        let stable = check_stable(&bq, None).is_ok();
        let expected = !(name.starts_with("linear") || name.starts_with("mckay_cubic"));
        assert_eq!(stable, expected, "{name}");
    }
}
