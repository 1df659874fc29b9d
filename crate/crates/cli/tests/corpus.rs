//! The bundled `corpus/*.cx` files must match their generators. Run with
//! `CAT0LAB_BLESS=1` to rewrite them.

use std::path::PathBuf;

use cat0lab::corpus::{hyperbolic_45, mixed_tiling, tripod_line, ConeWindow};
use cat0lab::RawComplex;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn generated() -> Vec<(&'static str, RawComplex)> {
    vec![
        ("plane", ConeWindow::new(4, 6, 1.0).raw()),
        ("cone3", ConeWindow::new(3, 2, 1.0).raw()),
        ("cone5", ConeWindow::new(5, 6, 1.0).raw()),
        ("tripod", tripod_line(5)),
        ("hyperbolic", hyperbolic_45(2, 2.0)),
        ("mixed", mixed_tiling(3, 4).0),
    ]
}

#[test]
fn corpus_files_match_generators() {
    let bless = std::env::var_os("CAT0LAB_BLESS").is_some();
    for (name, raw) in generated() {
        let path = corpus_dir().join(format!("{name}.cx"));
        let want = raw.to_json() + "\n";
        if bless {
            std::fs::create_dir_all(corpus_dir()).unwrap();
            std::fs::write(&path, &want).unwrap();
            continue;
        }
        let have = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(have == want, "{name}.cx is stale; rerun with CAT0LAB_BLESS=1");
    }
}
