//! Five copies, copy k missing party k, give a secret bit to any pair.

use std::time::Instant;

use boundinfo::protocols::verify::five_copy_checks;
use boundinfo::protocols::{five_copy_layout, symmetrized_five};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (k, parties) in five_copy_layout() {
        println!("copy {k}: {}", parties.join(" "));
    }
    let start = Instant::now();
    let d = symmetrized_five();
    println!("{} rows over {} registers", d.support_size(), d.names().len());
    for c in five_copy_checks(&d)? {
        println!("{} {} ({})", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    println!("{:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}
