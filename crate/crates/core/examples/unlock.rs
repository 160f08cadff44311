//! Two parties join their bits and announce whether they agree; the other
//! two end up with a secret bit.

use boundinfo::protocols::verify::unlock_checks;
use boundinfo::protocols::{smolin_table, unlock, PairTarget};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = smolin_table();
    let (joiners, targets) = (PairTarget::new("B", "D")?, PairTarget::new("A", "C")?);
    let (branches, transcript) = unlock(&t, &joiners, &targets)?;
    for step in transcript.steps() {
        println!("{}: {} {:?}", step.actor, step.op, step.announced);
    }
    for b in &branches {
        println!("\n{} branch, probability {}, sbit {}", b.label, b.acceptance, b.sbit);
        println!("{}", b.distribution.marginalize(&["A", "C"])?.to_text());
    }
    for c in unlock_checks(&t, &joiners, &targets)? {
        println!("{} {}", c.name, if c.pass { "PASS" } else { "FAIL" });
    }
    Ok(())
}
