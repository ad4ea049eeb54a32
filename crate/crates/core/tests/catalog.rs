use gke_lab::expr::SampleConfig;
use gke_lab::model::catalog;
use gke_lab::symmetry::verify_symmetry;

fn config_for(ranges: &std::collections::BTreeMap<String, (f64, f64)>) -> SampleConfig {
    let mut cfg = SampleConfig::default();
    for (k, (lo, hi)) in ranges {
        cfg = cfg.with_range(k, *lo, *hi);
    }
    cfg
}

#[test]
fn every_listed_generator_is_admitted() {
    for entry in catalog() {
        let cfg = config_for(&entry.ranges);
        for basis in &entry.bases {
            for g in &basis.generators {
                let r = verify_symmetry(g, &entry.model, &cfg, None).unwrap();
                assert!(r.pass, "row {} {} {}: {:?}", entry.row, basis.source, g.name, r.witness);
            }
        }
        for inst in &entry.instances {
            for g in &inst.generators {
                let r = verify_symmetry(g, &inst.model, &SampleConfig::default(), None).unwrap();
                assert!(r.pass, "{} {}", inst.model.label, g.name);
            }
        }
        if let Some(fam) = &entry.infinite_family {
            let r = verify_symmetry(&fam.generator, &entry.model, &cfg, Some(&fam.constraints)).unwrap();
            assert!(r.pass, "row {} family", entry.row);
            let r = verify_symmetry(&fam.generator, &entry.model, &cfg, None).unwrap();
            assert!(!r.pass, "row {} family must need its side condition", entry.row);
        }
    }
}
