use std::path::PathBuf;

use gke_lab::expr::{parse, JetContext, SampleConfig};
use gke_lab::model::{catalog, gke_rhs, CatalogDoc, GkeModel};
use gke_lab::reduction::{ansatz_case, reduce, Case};
use gke_lab::symmetry::prolong2;

/// Compare with `tests/golden/<name>`; `GOLDEN_UPDATE=1` rewrites it.
fn golden(name: &str, body: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("GOLDEN_UPDATE").is_some() {
        std::fs::write(&path, body).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(body, want, "{name} drifted; rerun with GOLDEN_UPDATE=1 after review");
}

#[test]
fn catalog_document() {
    let doc = CatalogDoc::new(&catalog());
    golden("catalog.json", &(serde_json::to_string_pretty(&doc).unwrap() + "\n"));
}

#[test]
fn model_right_hand_sides() {
    let mut body = String::new();
    for m in [GkeModel::exponential(), GkeModel::four_thirds(), GkeModel::linear(), GkeModel::one(), GkeModel::zero()] {
        body += &format!("{}\t{}\n", m.label, gke_rhs(&m));
    }
    golden("rhs.txt", &body);
}

#[test]
fn reduced_odes() {
    let mut body = String::new();
    for c in Case::ALL {
        let a = ansatz_case(c);
        assert!(reduce(&a, &SampleConfig::default()).unwrap().pass());
        body += &format!("{c}\t{}\n", a.expected_ode);
    }
    golden("reduced_odes.txt", &body);
}

#[test]
fn prolongations_of_the_four_thirds_basis() {
    let mut body = String::new();
    for g in gke_lab::reduction::basis() {
        let p = prolong2(&g).unwrap();
        body += &format!("{} eta_t\t{}\n{} eta_x\t{}\n{} eta_xx\t{}\n", g.name, p.eta_t, g.name, p.eta_x, g.name, p.eta_xx);
    }
    golden("prolongations.txt", &body);
}

#[test]
fn golden_text_parses_back() {
    let ctx = JetContext::standard();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/reduced_odes.txt");
    for line in std::fs::read_to_string(path).unwrap().lines() {
        let (_, text) = line.split_once('\t').unwrap();
        let e = parse(text, &ctx).unwrap();
        assert_eq!(e.to_string(), text);
    }
}
