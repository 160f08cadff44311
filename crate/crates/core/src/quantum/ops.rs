use std::f64::consts::FRAC_1_SQRT_2;

use super::{c, qubits, CMatrix, CVector, DensityOperator, QuantumError, Result, StateVector, Subsystem, BUILD_TOL, C64, CHECK_TOL};

/// `I, X, Y, Z` for `k = 0..3`.
pub fn pauli(k: usize) -> CMatrix {
    let (o, l, i) = (c(0.0), c(1.0), C64::new(0.0, 1.0));
    match k {
        0 => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        1 => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        2 => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        3 => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("no Pauli matrix {k}"),
    }
}

/// `ψ_k = (σ_k ⊗ I) ψ_1` up to phase, with `σ = I, Z, X, XZ`.
pub(crate) fn bell_frame(k: usize) -> CMatrix {
    match k {
        1 => pauli(0),
        2 => pauli(3),
        3 => pauli(1),
        4 => pauli(1) * pauli(3),
        _ => panic!("no Bell state {k}"),
    }
}

/// `ψ1 = (|00⟩+|11⟩)/√2`, `ψ2 = (|00⟩-|11⟩)/√2`, `ψ3 = (|01⟩+|10⟩)/√2`,
/// `ψ4 = (|01⟩-|10⟩)/√2`, on qubits `A, B`.
pub fn bell_state(i: usize) -> Result<StateVector> {
    let h = FRAC_1_SQRT_2;
    let amps = match i {
        1 => [h, 0.0, 0.0, h],
        2 => [h, 0.0, 0.0, -h],
        3 => [0.0, h, h, 0.0],
        4 => [0.0, h, -h, 0.0],
        _ => return Err(QuantumError::Index(i)),
    };
    StateVector::new(qubits(&["A", "B"]), CVector::from_iterator(4, amps.iter().map(|&a| c(a))))
}

/// `(|0…0⟩ + |1…1⟩)/√2` on the named qubits.
pub fn ghz_state(names: &[&str]) -> Result<StateVector> {
    if names.is_empty() {
        return Err(QuantumError::Label("GHZ state needs a qubit".into()));
    }
    let n = 1usize << names.len();
    let mut amps = CVector::zeros(n);
    amps[0] = c(FRAC_1_SQRT_2);
    amps[n - 1] = c(FRAC_1_SQRT_2);
    StateVector::new(qubits(names), amps)
}

pub fn plus_state(name: &str) -> StateVector {
    StateVector::new(qubits(&[name]), CVector::from_element(2, c(FRAC_1_SQRT_2))).expect("normalized")
}

/// `¼ Σ_i |ψ_i⟩⟨ψ_i|_AB ⊗ |ψ_i⟩⟨ψ_i|_CD`.
pub fn smolin_state() -> DensityOperator {
    let mut m = CMatrix::zeros(16, 16);
    for i in 1..=4 {
        let b = bell_state(i).expect("valid index");
        let pair = b.to_density();
        m += pair.matrix().kronecker(pair.matrix()).scale(0.25);
    }
    DensityOperator::new(qubits(&["A", "B", "C", "D"]), m).expect("valid state")
}

/// The same state written as `(1/16)(I + X⊗4 + Y⊗4 + Z⊗4)`.
pub fn smolin_pauli_form() -> DensityOperator {
    let mut m = CMatrix::zeros(16, 16);
    for k in 0..4 {
        let p = pauli(k);
        m += p.kronecker(&p).kronecker(&p).kronecker(&p);
    }
    DensityOperator::new(qubits(&["A", "B", "C", "D"]), m.unscale(16.0)).expect("valid state")
}

/// Positive partial transpose across `side` versus the rest.
pub fn is_ppt(rho: &DensityOperator, side: &[&str]) -> Result<bool> {
    let pt = rho.partial_transpose(side)?;
    let min = super::state::hermitian_eigenvalues(&pt)[0];
    Ok(min >= -CHECK_TOL)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &DensityOperator, psi: &StateVector) -> Result<f64> {
    let aligned = rho.permute(&psi.names())?;
    let a = psi.amplitudes();
    Ok((a.adjoint() * aligned.matrix() * a)[(0, 0)].re)
}

/// A measurement instrument: labelled Kraus operators from `inputs` to
/// `output` with `Σ K†K = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub operators: Vec<CMatrix>,
    pub outcomes: Vec<String>,
    pub output_dim: usize,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>, outcomes: Vec<String>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| QuantumError::Invalid("no Kraus operators".into()))?;
        let (dout, din) = first.shape();
        if operators.len() != outcomes.len() {
            return Err(QuantumError::Invalid("one label per Kraus operator".into()));
        }
        let mut sum = CMatrix::zeros(din, din);
        for k in &operators {
            if k.shape() != (dout, din) {
                return Err(QuantumError::Invalid("Kraus operators differ in shape".into()));
            }
            sum += k.adjoint() * k;
        }
        let dev = super::max_abs(&(sum - CMatrix::identity(din, din)));
        if dev > BUILD_TOL {
            return Err(QuantumError::Invalid(format!("Kraus operators are incomplete (deviation {dev:e})")));
        }
        Ok(KrausChannel {
            operators,
            outcomes,
            output_dim: dout,
        })
    }

    /// `K0 = |0⟩⟨00| + |1⟩⟨11|`, `K1 = |0⟩⟨01| + |1⟩⟨10|`: learns whether two
    /// qubits agree and keeps the first one's value.
    pub fn parity_instrument() -> Self {
        let mut k0 = CMatrix::zeros(2, 4);
        k0[(0, 0)] = c(1.0);
        k0[(1, 3)] = c(1.0);
        let mut k1 = CMatrix::zeros(2, 4);
        k1[(0, 1)] = c(1.0);
        k1[(1, 2)] = c(1.0);
        Self::new(vec![k0, k1], vec!["0".into(), "1".into()]).expect("complete")
    }

    /// Branches `(outcome, probability, normalized post-state)`; branches
    /// with vanishing probability are dropped.
    pub fn apply(
        &self,
        rho: &DensityOperator,
        inputs: &[&str],
        output: &str,
    ) -> Result<Vec<(String, f64, DensityOperator)>> {
        let out = [Subsystem::new(output, self.output_dim)];
        let mut branches = Vec::new();
        for (k, label) in self.operators.iter().zip(&self.outcomes) {
            let post = rho.apply(k, inputs, &out)?;
            let p = post.trace();
            if p > BUILD_TOL {
                branches.push((label.clone(), p, post.normalized()?));
            }
        }
        Ok(branches)
    }
}
