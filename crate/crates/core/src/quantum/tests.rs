use approx::assert_abs_diff_eq;

use super::*;
use crate::dist::{prob, Owner};
use crate::protocols::tables::smolin_table;

fn four_party_bases(eve: BasisSpec) -> MeasurementBasis {
    let mut b: MeasurementBasis = ["A", "B", "C", "D"]
        .iter()
        .map(|n| computational_basis(&Subsystem::qubit(n), Owner::party(*n)))
        .collect();
    b.push(eve);
    b
}

fn table_pairs() -> [(&'static str, &'static str); 5] {
    [("A", "A"), ("B", "B"), ("C", "C"), ("D", "D"), ("Eve", "Eve")]
}

#[test]
fn bell_states_are_orthonormal() {
    for i in 1..=4 {
        for j in 1..=4 {
            let ip = bell_state(i).unwrap().inner(&bell_state(j).unwrap()).unwrap();
            assert_abs_diff_eq!(ip.re, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-12);
        }
    }
    assert!(matches!(bell_state(5), Err(QuantumError::Index(5))));
}

#[test]
fn singlet_is_antisymmetric() {
    let psi = bell_state(4).unwrap();
    let swapped = psi.permute(&["B", "A"]).unwrap().relabel(&["A", "B"]).unwrap();
    assert_abs_diff_eq!(psi.inner(&swapped).unwrap().re, -1.0, epsilon = 1e-12);
}

#[test]
fn smolin_spectrum_and_entries() {
    let rho = smolin_state();
    assert_eq!(rho.rank(1e-9), 4);
    for l in rho.eigenvalues().iter().filter(|l| **l > 1e-9) {
        assert_abs_diff_eq!(*l, 0.25, epsilon = 1e-12);
    }
    for z in rho.matrix().iter() {
        let scaled = z.re * 8.0;
        assert!((scaled - scaled.round()).abs() < 1e-12 && z.im.abs() < 1e-12);
    }
    assert!(rho.distance(&smolin_pauli_form()).unwrap() < 1e-12);
}

#[test]
fn smolin_is_permutation_invariant() {
    let rho = smolin_state();
    for perm in [["B", "A", "D", "C"], ["C", "D", "A", "B"], ["A", "C", "B", "D"], ["D", "A", "C", "B"]] {
        let moved = rho.relabel(&perm).unwrap();
        assert!(rho.distance(&moved).unwrap() < 1e-12, "{perm:?}");
    }
}

#[test]
fn smolin_is_ppt_on_two_versus_two_cuts() {
    let rho = smolin_state();
    for side in [["A", "B"], ["A", "C"], ["A", "D"]] {
        assert!(is_ppt(&rho, &side).unwrap(), "{side:?}");
    }
    // single-party cuts: reported, not asserted
    for side in ["A", "B", "C", "D"] {
        let pt = rho.partial_transpose(&[side]).unwrap();
        let min = state::hermitian_eigenvalues(&pt)[0];
        assert!(min.is_finite());
    }
}

#[test]
fn smolin_two_party_marginal_is_maximally_mixed() {
    let ab = smolin_state().partial_trace(&["C", "D"]).unwrap();
    let mixed = CMatrix::identity(4, 4).unscale(4.0);
    assert!(max_abs(&(ab.matrix() - mixed)) < 1e-12);
}

#[test]
fn partial_transpose_is_an_involution_and_detects_entanglement() {
    let rho = smolin_state();
    let once = DensityOperator::unchecked(rho.labels().to_vec(), rho.partial_transpose(&["B", "D"]).unwrap()).unwrap();
    let twice = once.partial_transpose(&["B", "D"]).unwrap();
    assert!(max_abs(&(twice - rho.matrix())) < 1e-12);
    let pair = bell_state(1).unwrap().to_density();
    let min = state::hermitian_eigenvalues(&pair.partial_transpose(&["B"]).unwrap())[0];
    assert_abs_diff_eq!(min, -0.5, epsilon = 1e-12);
    assert!(!is_ppt(&pair, &["A"]).unwrap());
}

#[test]
fn purification_round_trips() {
    let rho = smolin_state();
    let psi = purify(&rho, "Eve").unwrap();
    assert_eq!(psi.labels().last().unwrap().dim, 4);
    let back = psi.to_density().partial_trace(&["Eve"]).unwrap();
    assert!(back.distance(&rho).unwrap() < 1e-12);
}

#[test]
fn ensemble_purification_gives_bound_information_table() {
    let (w, states) = smolin_ensemble();
    let psi = purify_ensemble(&w, &states, "Eve").unwrap();
    let m = measure(&psi, &four_party_bases(smolin_eve_basis("Eve"))).unwrap();
    assert!(m.exact);
    assert_eq!(m.distribution.support_size(), 8);
    assert!(m.distribution.permute_check(&smolin_table(), &table_pairs()));
}

#[test]
fn eigenbasis_purification_gives_table_up_to_eve_labels() {
    let psi = purify(&smolin_state(), "Eve").unwrap();
    let eve = computational_basis(&Subsystem::new("Eve", 4), Owner::Eve);
    let m = measure(&psi, &four_party_bases(eve)).unwrap();
    assert!(m.exact);
    assert!(m
        .distribution
        .permute_check_up_to_symbols(&smolin_table(), &table_pairs(), "Eve"));
}

#[test]
fn measurement_rejects_bad_bases() {
    let psi = bell_state(1).unwrap();
    let a = computational_basis(&Subsystem::qubit("A"), Owner::party("A"));
    assert!(matches!(measure(&psi, &vec![a.clone()]), Err(QuantumError::Basis(_))));
    let skew = vec![("0".to_string(), CVector::from_vec(vec![c(1.0), c(0.0)])), ("1".to_string(), CVector::from_vec(vec![c(1.0), c(0.0)]))];
    assert!(BasisSpec::new("B", Owner::party("B"), skew).is_err());
    let b = computational_basis(&Subsystem::qubit("B"), Owner::party("B"));
    let m = measure(&psi, &vec![a, b]).unwrap();
    assert_eq!(m.distribution.probability(&["0", "0"]).unwrap(), prob(1, 2));
    assert_eq!(m.distribution.probability(&["0", "1"]).unwrap(), prob(0, 1));
}

#[test]
fn rationalize_finds_small_denominators() {
    assert_eq!(measure::rationalize(0.375), (prob(3, 8), true));
    assert_eq!(measure::rationalize(1.0 / 3.0), (prob(1, 3), true));
    let (_, exact) = measure::rationalize(std::f64::consts::PI / 10.0);
    assert!(!exact);
}

#[test]
fn bell_measurement_of_product_state() {
    let rho = StateVector::basis(qubits(&["A", "B"]), &[0, 0]).unwrap().to_density();
    let branches = bell_measure(&rho, ("A", "B")).unwrap();
    let p: Vec<f64> = branches.iter().map(|b| b.probability).collect();
    for (got, want) in p.iter().zip([0.5, 0.5, 0.0, 0.0]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
    }
    assert!(branches.iter().all(|b| b.post.is_none()));
}

fn message_states() -> Vec<StateVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = [
        vec![c(1.0), c(0.0)],
        vec![c(0.0), c(1.0)],
        vec![c(s), c(s)],
        vec![c(s), C64::new(0.0, s)],
        vec![c(0.6), C64::new(0.0, -0.8)],
    ];
    amps.into_iter()
        .map(|a| StateVector::new(qubits(&["M"]), CVector::from_vec(a)).unwrap())
        .collect()
}

#[test]
fn teleportation_is_identity() {
    let resource = bell_state(1).unwrap();
    for msg in message_states() {
        let rho = msg.tensor(&resource).unwrap().to_density();
        let branches = quantum_teleport(&rho, "M", ("A", "B")).unwrap();
        assert_eq!(branches.len(), 4);
        let expected = msg.relabel(&["B"]).unwrap();
        for b in branches {
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(fidelity(&b.state, &expected).unwrap(), 1.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn teleportation_through_phase_flipped_pair_applies_z() {
    let resource = bell_state(2).unwrap();
    for msg in message_states() {
        let rho = msg.tensor(&resource).unwrap().to_density();
        let z = StateVector::new(qubits(&["B"]), &pauli(3) * msg.amplitudes()).unwrap();
        for b in quantum_teleport(&rho, "M", ("A", "B")).unwrap() {
            assert_abs_diff_eq!(fidelity(&b.state, &z).unwrap(), 1.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn unlocking_yields_a_bell_pair() {
    assert_abs_diff_eq!(quantum_unlock().unwrap(), 1.0, epsilon = 1e-9);
    let pairs = [("A", "B"), ("A", "C"), ("A", "D"), ("B", "C"), ("B", "D"), ("C", "D")];
    for j in pairs {
        let t: Vec<&str> = ["A", "B", "C", "D"].into_iter().filter(|n| *n != j.0 && *n != j.1).collect();
        let branches = quantum_unlock_branches(j, (t[0], t[1]), true).unwrap();
        assert_eq!(branches.len(), 4);
        for b in &branches {
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(b.fidelity, 1.0, epsilon = 1e-9);
        }
        let raw = quantum_unlock_branches(j, (t[0], t[1]), false).unwrap();
        let avg: f64 = raw.iter().map(|b| b.probability * b.fidelity).sum();
        assert_abs_diff_eq!(avg, 0.25, epsilon = 1e-9);
    }
    assert!(quantum_unlock_branches(("A", "A"), ("C", "D"), true).is_err());
}

#[test]
fn superactivation_distills_a_bell_pair() {
    let r = quantum_superactivation().unwrap();
    assert!(r.checkpoint_distance < 1e-9, "{}", r.checkpoint_distance);
    assert_eq!(r.branches.len(), 64);
    for b in &r.branches {
        assert_abs_diff_eq!(b.probability, 1.0 / 64.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.fidelity, 1.0, epsilon = 1e-9);
    }
    assert!(r.exact);
    assert!(r.key.is_sbit("D'", "E"));
}

#[test]
fn ghz_extension_reaches_four_parties() {
    let r = ghz_extend().unwrap();
    assert_eq!(r.branches.len(), 16);
    for b in &r.branches {
        assert_abs_diff_eq!(b.probability, 1.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.fidelity, 1.0, epsilon = 1e-9);
    }
    assert!(r.exact);
    assert_eq!(r.outcomes.support_size(), 16);
}

#[test]
fn kraus_completeness_is_checked() {
    let ch = KrausChannel::parity_instrument();
    assert_eq!(ch.output_dim, 2);
    let half = ch.operators[0].clone();
    assert!(KrausChannel::new(vec![half], vec!["0".into()]).is_err());
}

#[test]
fn density_json_round_trip() {
    let rho = smolin_state();
    let back = DensityOperator::from_json(&rho.to_json()).unwrap();
    assert!(back.distance(&rho).unwrap() < 1e-15);
    assert!(DensityOperator::from_json("{\"labels\":[],\"re\":[[2]],\"im\":[[0]]}").is_err());
}

#[test]
fn invalid_states_are_rejected() {
    let bad = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.5), c(0.0), c(0.0)]);
    assert!(DensityOperator::new(qubits(&["A"]), bad).is_err());
    let neg = CMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
    assert!(DensityOperator::new(qubits(&["A"]), neg).is_err());
    assert!(StateVector::new(qubits(&["A"]), CVector::from_vec(vec![c(1.0), c(1.0)])).is_err());
    assert!(StateVector::new(qubits(&["A", "A"]), CVector::zeros(4)).is_err());
}

#[test]
fn pure_state_purifies_with_trivial_ancilla() {
    let psi = bell_state(3).unwrap();
    let p = purify(&psi.to_density(), "Eve").unwrap();
    assert_eq!(p.labels().last().unwrap().dim, 1);
    assert_abs_diff_eq!(p.to_density().partial_trace(&["Eve"]).unwrap().distance(&psi.to_density()).unwrap(), 0.0, epsilon = 1e-12);
}

#[test]
fn measuring_an_ebit_gives_an_sbit() {
    let bases: MeasurementBasis = ["A", "B"]
        .iter()
        .map(|n| computational_basis(&Subsystem::qubit(n), Owner::party(*n)))
        .collect();
    let m = measure(&bell_state(1).unwrap(), &bases).unwrap();
    assert!(m.exact && m.distribution.is_sbit("A", "B"));
    let names = ["A", "B", "C"];
    let bases: MeasurementBasis = names
        .iter()
        .map(|n| computational_basis(&Subsystem::qubit(n), Owner::party(*n)))
        .collect();
    let m = measure(&ghz_state(&names).unwrap(), &bases).unwrap();
    assert_eq!(m.distribution.support_size(), 2);
    assert_eq!(m.distribution.probability(&["1", "1", "1"]).unwrap(), prob(1, 2));
}

#[test]
fn bell_measurement_of_one_pair_leaves_the_same_bell_state() {
    let rho = smolin_state();
    let branches = bell_measure(&rho, ("A", "B")).unwrap();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    for b in branches {
        assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-12);
        let cd = bell_state(b.outcome).unwrap().relabel(&["C", "D"]).unwrap();
        assert_abs_diff_eq!(fidelity(b.post.as_ref().unwrap(), &cd).unwrap(), 1.0, epsilon = 1e-12);
    }
    assert!(matches!(bell_measure(&rho, ("A", "Z")), Err(QuantumError::Label(_))));
}

#[test]
fn ppt_does_not_depend_on_the_side_named() {
    let rho = smolin_state();
    for (side, other) in [(["A", "B"], ["C", "D"]), (["A", "C"], ["B", "D"]), (["A", "D"], ["B", "C"])] {
        assert_eq!(is_ppt(&rho, &side).unwrap(), is_ppt(&rho, &other).unwrap());
    }
    let pair = bell_state(4).unwrap().to_density();
    assert_eq!(is_ppt(&pair, &["A"]).unwrap(), is_ppt(&pair, &["B"]).unwrap());
}
