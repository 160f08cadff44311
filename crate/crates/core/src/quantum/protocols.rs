use std::collections::BTreeMap;

use num_traits::Zero;

use super::measure::{bell_measure, rationalize};
use super::ops::{bell_frame, bell_state, fidelity, ghz_state, plus_state, smolin_state, KrausChannel};
use super::{DensityOperator, QuantumError, Result, StateVector, BUILD_TOL};
use crate::dist::{JointDistribution, Owner, Prob, RegisterSpec};

fn rename(rho: &DensityOperator, from: &str, to: &str) -> Result<DensityOperator> {
    let names: Vec<&str> = rho.names().into_iter().map(|n| if n == from { to } else { n }).collect();
    rho.relabel(&names)
}

fn bell_on(a: &str, b: &str, k: usize) -> Result<StateVector> {
    bell_state(k)?.relabel(&[a, b])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityOperator,
}

/// Bell-measures `(msg, pair.0)` and applies the Pauli correction for the
/// outcome to `pair.1`. `rho` must already hold the resource on `pair`.
pub fn quantum_teleport(rho: &DensityOperator, msg: &str, pair: (&str, &str)) -> Result<Vec<TeleportBranch>> {
    let mut out = Vec::new();
    for b in bell_measure(rho, (msg, pair.0))? {
        if let Some(post) = b.post {
            out.push(TeleportBranch {
                outcome: b.outcome,
                probability: b.probability,
                state: post.apply_unitary(&bell_frame(b.outcome), &[pair.1])?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QBranch {
    pub outcomes: Vec<usize>,
    pub probability: f64,
    /// Fidelity of the targets with `ψ1`.
    pub fidelity: f64,
}

/// Joiners Bell-measure the bound entangled state; with `correct` the
/// first target undoes the Pauli frame of the outcome.
pub fn quantum_unlock_branches(joiners: (&str, &str), targets: (&str, &str), correct: bool) -> Result<Vec<QBranch>> {
    let mut names = vec![joiners.0, joiners.1, targets.0, targets.1];
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) || names != ["A", "B", "C", "D"] {
        return Err(QuantumError::Label(format!(
            "joiners {joiners:?} and targets {targets:?} must partition A,B,C,D"
        )));
    }
    let rho = smolin_state();
    let target = bell_on(targets.0, targets.1, 1)?;
    let mut out = Vec::new();
    for b in bell_measure(&rho, joiners)? {
        let Some(mut post) = b.post else { continue };
        if correct {
            post = post.apply_unitary(&bell_frame(b.outcome).adjoint(), &[targets.0])?;
        }
        out.push(QBranch {
            outcomes: vec![b.outcome],
            probability: b.probability,
            fidelity: fidelity(&post, &target)?,
        });
    }
    Ok(out)
}

/// Smallest branch fidelity for joiners `(A,B)` and targets `(C,D)`.
pub fn quantum_unlock() -> Result<f64> {
    let branches = quantum_unlock_branches(("A", "B"), ("C", "D"), true)?;
    Ok(branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperBranch {
    /// Bell outcomes of Alice, Bob and Clare.
    pub outcomes: [usize; 3],
    pub probability: f64,
    /// Fidelity of `(D', E)` with `ψ1`.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperactivationReport {
    pub branches: Vec<SuperBranch>,
    /// Largest deviation, over the sixteen outcomes of the two teleports,
    /// of `(C1', D', C2, E)` from the bound entangled state.
    pub checkpoint_distance: f64,
    /// Public outcomes `k1, k2, k3` with computational-basis readouts of
    /// `D'` and `E`.
    pub key: JointDistribution,
    /// `false` when a probability had to be approximated.
    pub exact: bool,
}

impl SuperactivationReport {
    pub fn min_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min)
    }
}

/// Two copies, one over `(A1,C1,B1,D)` and one over `(A2,B2,C2,E)`. Alice
/// teleports `A2` to Clare through `(A1,C1)`, Bob teleports `B2` to David
/// through `(B1,D)`, then Clare Bell-measures `(C1',C2)` and David corrects.
pub fn quantum_superactivation() -> Result<SuperactivationReport> {
    let s = smolin_state();
    let rho = s.relabel(&["A1", "C1", "B1", "D"])?.tensor(&s.relabel(&["A2", "B2", "C2", "E"])?)?;
    let reference = s.relabel(&["C1'", "D'", "C2", "E"])?;
    let target = bell_on("D'", "E", 1)?;
    let mut branches = Vec::new();
    let mut checkpoint_distance: f64 = 0.0;
    let mut rows: BTreeMap<Vec<String>, f64> = BTreeMap::new();
    for t1 in quantum_teleport(&rho, "A2", ("A1", "C1"))? {
        let after1 = rename(&t1.state, "C1", "C1'")?;
        for t2 in quantum_teleport(&after1, "B2", ("B1", "D"))? {
            let after2 = rename(&t2.state, "D", "D'")?;
            checkpoint_distance = checkpoint_distance.max(after2.distance(&reference)?);
            for b in bell_measure(&after2, ("C1'", "C2"))? {
                let Some(post) = b.post else { continue };
                let fixed = post.apply_unitary(&bell_frame(b.outcome).adjoint(), &["D'"])?;
                let p = t1.probability * t2.probability * b.probability;
                let outcomes = [t1.outcome, t2.outcome, b.outcome];
                branches.push(SuperBranch {
                    outcomes,
                    probability: p,
                    fidelity: fidelity(&fixed, &target)?,
                });
                let aligned = fixed.permute(&["D'", "E"])?;
                for idx in 0..4 {
                    let q = p * aligned.matrix()[(idx, idx)].re;
                    if q > BUILD_TOL {
                        let mut row: Vec<String> = outcomes.iter().map(|k| k.to_string()).collect();
                        row.push((idx >> 1).to_string());
                        row.push((idx & 1).to_string());
                        rows.insert(row, q);
                    }
                }
            }
        }
    }
    let outcome_symbols = ["1", "2", "3", "4"];
    let registers = vec![
        RegisterSpec::new("k1", &outcome_symbols, Owner::Public),
        RegisterSpec::new("k2", &outcome_symbols, Owner::Public),
        RegisterSpec::new("k3", &outcome_symbols, Owner::Public),
        RegisterSpec::bit("D'", Owner::party("D")),
        RegisterSpec::bit("E", Owner::party("E")),
    ];
    let (key, exact) = exact_distribution(registers, rows)?;
    Ok(SuperactivationReport {
        branches,
        checkpoint_distance,
        key,
        exact,
    })
}

fn exact_distribution(
    registers: Vec<RegisterSpec>,
    rows: BTreeMap<Vec<String>, f64>,
) -> Result<(JointDistribution, bool)> {
    let mut exact = true;
    let mut table: BTreeMap<Vec<String>, Prob> = BTreeMap::new();
    for (k, p) in rows {
        let (q, ok) = rationalize(p);
        exact &= ok;
        table.insert(k, q);
    }
    let total = table.values().fold(Prob::zero(), |a, p| a + p);
    if total != Prob::from_integer(1.into()) {
        exact = false;
        for p in table.values_mut() {
            *p = &*p / &total;
        }
    }
    Ok((JointDistribution::new(registers, table)?, exact))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhzBranch {
    /// Parity outcomes of `A, B, C, D`.
    pub outcomes: [u8; 4],
    pub probability: f64,
    /// Fidelity with the four-qubit GHZ state after the correction.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhzReport {
    pub branches: Vec<GhzBranch>,
    /// Public parity outcomes `a, b, c, d`.
    pub outcomes: JointDistribution,
    pub exact: bool,
}

impl GhzReport {
    pub fn min_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min)
    }
}

/// Extends a three-party GHZ state to David using one copy of the bound
/// entangled state. Each party applies the parity instrument to its GHZ
/// qubit and its bound entangled qubit; David flips when the announced
/// parities sum to one.
pub fn ghz_extend() -> Result<GhzReport> {
    let parties = ["A", "B", "C", "D"];
    let ghz = ghz_state(&["Ag", "Bg", "Cg"])?.tensor(&plus_state("Dg"))?;
    let rho = ghz.to_density().tensor(&smolin_state().relabel(&["As", "Bs", "Cs", "Ds"])?)?;
    let instrument = KrausChannel::parity_instrument();
    let mut frontier: Vec<(Vec<u8>, f64, DensityOperator)> = vec![(Vec::new(), 1.0, rho)];
    for p in parties {
        let (g, s) = (format!("{p}g"), format!("{p}s"));
        let mut next = Vec::new();
        for (outcomes, prob, state) in frontier {
            for (label, q, post) in instrument.apply(&state, &[&g, &s], p)? {
                let mut o = outcomes.clone();
                o.push(if label == "0" { 0 } else { 1 });
                next.push((o, prob * q, post));
            }
        }
        frontier = next;
    }
    let target = ghz_state(&parties)?;
    let x = super::ops::pauli(1);
    let mut branches = Vec::new();
    let mut rows = BTreeMap::new();
    for (o, p, state) in frontier {
        let v = o.iter().fold(0, |a, b| a ^ b);
        let fixed = if v == 1 { state.apply_unitary(&x, &["D"])? } else { state };
        let outcomes = [o[0], o[1], o[2], o[3]];
        branches.push(GhzBranch {
            outcomes,
            probability: p,
            fidelity: fidelity(&fixed, &target)?,
        });
        rows.insert(o.iter().map(|b| b.to_string()).collect::<Vec<_>>(), p);
    }
    let registers = ["a", "b", "c", "d"].iter().map(|n| RegisterSpec::bit(n, Owner::Public)).collect();
    let (outcomes, exact) = exact_distribution(registers, rows)?;
    Ok(GhzReport {
        branches,
        outcomes,
        exact,
    })
}
