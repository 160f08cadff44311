//! Two copies of bound information, each missing one of five parties,
//! combine by one-time-pad teleportation into a secret bit for D and E.

use boundinfo::protocols::superactivate_pair;
use boundinfo::protocols::verify::superactivation_checks;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (fin, t) = superactivate_pair()?;
    for (i, s) in t.steps().iter().enumerate() {
        println!("{:>2}. {}: {}", i + 1, s.actor, s.op);
    }
    for c in superactivation_checks(&t)? {
        println!("{} {}", c.name, if c.pass { "PASS" } else { "FAIL" });
    }
    println!("\nEve sees {:?}", fin.eve_view());
    println!("{}", fin.marginalize(&["D'", "E"])?.to_text());
    Ok(())
}
