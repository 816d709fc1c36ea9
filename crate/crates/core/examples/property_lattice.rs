//! Run every property check over the default lattice and summarize the
//! worst discrepancy per property and grid size.

use std::collections::BTreeMap;

use fracvar::verify::{run_lattice, LatticeConfig, PropertyReport};

pub fn run() -> fracvar::Result<Vec<PropertyReport>> {
    let reports = run_lattice(&LatticeConfig::default())?;
    let mut worst: BTreeMap<(String, usize), (f64, f64, bool)> = BTreeMap::new();
    for r in &reports {
        let key = (format!("{:?}", r.property), r.n);
        let slot = worst
            .entry(key)
            .or_insert((f64::NEG_INFINITY, r.tolerance, true));
        slot.0 = slot.0.max(r.discrepancy);
        slot.2 &= r.passed;
    }
    println!(
        "{:<20} {:>5} {:>12} {:>10}  ok",
        "property", "n", "worst", "tol"
    );
    for ((name, n), (w, tol, ok)) in &worst {
        println!("{name:<20} {n:>5} {w:>12.3e} {tol:>10.1e}  {ok}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", reports.len());
    Ok(reports)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
