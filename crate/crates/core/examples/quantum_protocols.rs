//! Teleportation, unlocking, superactivation and GHZ extension on dense
//! density matrices.

use boundinfo::quantum::{
    bell_state, ghz_extend, quantum_superactivation, quantum_teleport, quantum_unlock_branches, StateVector,
    Subsystem, CVector, C64,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let msg = StateVector::new(
        vec![Subsystem::qubit("M")],
        CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]),
    )?;
    let rho = msg.tensor(&bell_state(1)?)?.to_density();
    for b in quantum_teleport(&rho, "M", ("A", "B"))? {
        let f = boundinfo::quantum::fidelity(&b.state, &msg.relabel(&["B"])?)?;
        println!("teleport outcome {} p={:.3} fidelity {f:.9}", b.outcome, b.probability);
    }
    for b in quantum_unlock_branches(("A", "B"), ("C", "D"), true)? {
        println!("unlock outcome {:?} p={:.3} fidelity {:.9}", b.outcomes, b.probability, b.fidelity);
    }
    let s = quantum_superactivation()?;
    println!(
        "superactivation: {} branches, checkpoint distance {:.1e}, min fidelity {:.9}, key is sbit {}",
        s.branches.len(),
        s.checkpoint_distance,
        s.min_fidelity(),
        s.key.is_sbit("D'", "E")
    );
    let g = ghz_extend()?;
    println!("GHZ extension: {} branches, min fidelity {:.9}", g.branches.len(), g.min_fidelity());
    Ok(())
}
