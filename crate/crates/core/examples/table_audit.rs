//! Check every listed generator of every catalog row against its equation.
//!
//! `cargo run --example table_audit`

use gke_lab::expr::SampleConfig;
use gke_lab::model::catalog;
use gke_lab::symmetry::verify_symmetry;

fn main() {
    let started = std::time::Instant::now();
    let mut total = 0;
    for entry in catalog() {
        let mut cfg = SampleConfig::default();
        for (k, (lo, hi)) in &entry.ranges {
            cfg = cfg.with_range(k, *lo, *hi);
        }
        println!("row {}  f = {}", entry.row, entry.model.f);
        for basis in &entry.bases {
            for g in &basis.generators {
                let r = verify_symmetry(g, &entry.model, &cfg, None).unwrap();
                total += 1;
                println!("  {:<5} {:<10} {:<6} max residual {:.1e}", if r.pass { "ok" } else { "FAIL" }, basis.source, g.name, r.max_residual);
            }
        }
        if let Some(fam) = &entry.infinite_family {
            let r = verify_symmetry(&fam.generator, &entry.model, &cfg, Some(&fam.constraints)).unwrap();
            total += 1;
            println!("  {:<5} family     {}  given {}", if r.pass { "ok" } else { "FAIL" }, fam.generator.name, fam.side_condition);
        }
    }
    println!("{total} checks in {:.2?}", started.elapsed());
}
