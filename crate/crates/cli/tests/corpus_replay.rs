//! Replays the checked-in fuzz corpus through the properties the fuzz targets
//! assert, so the seeds are exercised without a fuzzing toolchain.

use std::path::Path;

use bialg_cli::input::{parse_input, render_document};
use bialg_cli::pipeline::parse_stages;
use bialg_core::coalgebra::BasisId;
use bialg_core::exactlin::parse_scalar;

fn seeds(target: &str) -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files.iter().filter_map(|p| String::from_utf8(std::fs::read(p).unwrap()).ok()).collect()
}

#[test]
fn parse_input_seeds() {
    let mut parsed = 0;
    for text in seeds("parse_input") {
        if let Ok(doc) = parse_input(&text) {
            let again = parse_input(&render_document(&doc.raw)).unwrap();
            assert_eq!(again.raw, doc.raw);
            parsed += 1;
        }
    }
    assert!(parsed >= 4);
}

#[test]
fn parse_scalar_seeds() {
    for text in seeds("parse_scalar") {
        if let Ok(c) = parse_scalar(&text) {
            assert_eq!(parse_scalar(&c.to_string()).unwrap(), c);
        }
    }
}

#[test]
fn basis_id_seeds() {
    for text in seeds("basis_id") {
        if let Ok(id) = text.parse::<BasisId>() {
            assert_eq!(id.to_string().parse::<BasisId>().unwrap(), id);
        }
    }
}

#[test]
fn parse_stages_seeds() {
    for text in seeds("parse_stages") {
        if let Ok(stages) = parse_stages(&text) {
            let joined: Vec<&str> = stages.iter().map(|s| s.name()).collect();
            assert_eq!(parse_stages(&joined.join(",")).unwrap(), stages);
        }
    }
}
