//! The four-qubit bound entangled state: spectrum, PPT cuts, and the
//! classical table obtained by measuring a purification.

use boundinfo::dist::Owner;
use boundinfo::quantum::{
    computational_basis, is_ppt, measure, purify_ensemble, smolin_ensemble, smolin_eve_basis, smolin_state,
    Subsystem,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho = smolin_state();
    println!("eigenvalues {:?}", rho.eigenvalues().iter().map(|l| format!("{l:.3}")).collect::<Vec<_>>());
    for side in [["A", "B"], ["A", "C"], ["A", "D"]] {
        println!("PPT across {}{}: {}", side[0], side[1], is_ppt(&rho, &side)?);
    }
    for side in ["A", "B", "C", "D"] {
        println!("{side} vs rest PPT: {}", is_ppt(&rho, &[side])?);
    }
    let (w, states) = smolin_ensemble();
    let psi = purify_ensemble(&w, &states, "Eve")?;
    let mut bases: Vec<_> = ["A", "B", "C", "D"]
        .iter()
        .map(|n| computational_basis(&Subsystem::qubit(n), Owner::party(*n)))
        .collect();
    bases.push(smolin_eve_basis("Eve"));
    let m = measure(&psi, &bases)?;
    println!("\nmeasured (exact: {})\n{}", m.exact, m.distribution.to_text());
    Ok(())
}
