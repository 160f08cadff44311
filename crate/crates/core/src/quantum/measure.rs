use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::SymmetricEigen;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ops::bell_state;
use super::{c, CMatrix, CVector, DensityOperator, QuantumError, Result, StateVector, Subsystem, BUILD_TOL, CHECK_TOL};
use crate::dist::{JointDistribution, Owner, Prob, RegisterSpec};

/// Orthonormal basis of one subsystem with outcome symbols; the outcome
/// becomes register `register` owned by `owner`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub subsystem: String,
    pub register: String,
    pub owner: Owner,
    pub vectors: Vec<(String, CVector)>,
}

impl BasisSpec {
    pub fn new(subsystem: &str, owner: Owner, vectors: Vec<(String, CVector)>) -> Result<Self> {
        let n = vectors.len();
        for (i, (si, vi)) in vectors.iter().enumerate() {
            if vi.len() != n {
                return Err(QuantumError::Basis(format!("vector {si} has length {}, basis has {n} vectors", vi.len())));
            }
            for (sj, vj) in &vectors[i..] {
                let expected = if si == sj { 1.0 } else { 0.0 };
                if (vi.dotc(vj) - c(expected)).norm() > BUILD_TOL {
                    return Err(QuantumError::Basis(format!("{si} and {sj} are not orthonormal")));
                }
            }
        }
        Ok(BasisSpec {
            subsystem: subsystem.to_string(),
            register: subsystem.to_string(),
            owner,
            vectors,
        })
    }

    pub fn with_register(mut self, register: &str) -> Self {
        self.register = register.to_string();
        self
    }
}

/// One basis per subsystem.
pub type MeasurementBasis = Vec<BasisSpec>;

/// `|0⟩ … |d-1⟩` labelled `"0"…`.
pub fn computational_basis(subsystem: &Subsystem, owner: Owner) -> BasisSpec {
    let vectors = (0..subsystem.dim)
        .map(|k| {
            let mut v = CVector::zeros(subsystem.dim);
            v[k] = c(1.0);
            (k.to_string(), v)
        })
        .collect();
    BasisSpec::new(&subsystem.name, owner, vectors).expect("orthonormal")
}

/// Eve's basis on the four-level ancilla of [`purify_ensemble`] applied to
/// [`smolin_ensemble`]: `(|1⟩±|2⟩)/√2`, `(|3⟩±|4⟩)/√2` (one-based), labelled
/// so the outcome table equals the bound-information table symbol for
/// symbol.
pub fn smolin_eve_basis(subsystem: &str) -> BasisSpec {
    let h = FRAC_1_SQRT_2;
    let v = |a: [f64; 4]| CVector::from_iterator(4, a.iter().map(|&x| c(x)));
    BasisSpec::new(
        subsystem,
        Owner::Eve,
        vec![
            ("e1".into(), v([h, h, 0.0, 0.0])),
            ("e2".into(), v([0.0, 0.0, h, h])),
            ("e3".into(), v([h, -h, 0.0, 0.0])),
            ("e4".into(), v([0.0, 0.0, h, -h])),
        ],
    )
    .expect("orthonormal")
}

/// A Born-rule outcome distribution. `exact` is false when some
/// probability was not within `1e-12` of a rational with denominator at
/// most `2^16` and had to be approximated.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub distribution: JointDistribution,
    pub exact: bool,
}

/// Nearest small-denominator rational, or a `2^-40` grid value.
pub(crate) fn rationalize(x: f64) -> (Prob, bool) {
    const MAX_DEN: i64 = 1 << 16;
    // continued-fraction convergents
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k2 > MAX_DEN {
            break;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= BUILD_TOL {
            return (BigRational::new(BigInt::from(h2), BigInt::from(k2)), true);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    let den = 1i64 << 40;
    (
        BigRational::new(BigInt::from((x * den as f64).round() as i64), BigInt::from(den)),
        false,
    )
}

fn basis_change(spec: &BasisSpec) -> CMatrix {
    let n = spec.vectors.len();
    CMatrix::from_fn(n, n, |k, j| spec.vectors[k].1[j].conj())
}

/// Outcome distribution of measuring every subsystem of `rho`.
pub fn measure_density(rho: &DensityOperator, bases: &MeasurementBasis) -> Result<Measured> {
    if bases.len() != rho.labels().len() {
        return Err(QuantumError::Basis(format!(
            "{} bases for {} subsystems",
            bases.len(),
            rho.labels().len()
        )));
    }
    let mut rotated = rho.clone();
    let mut registers = Vec::new();
    for s in rho.labels() {
        let spec = bases
            .iter()
            .find(|b| b.subsystem == s.name)
            .ok_or_else(|| QuantumError::Basis(format!("no basis for {}", s.name)))?;
        if spec.vectors.len() != s.dim {
            return Err(QuantumError::Basis(format!(
                "basis for {} has {} vectors, dimension is {}",
                s.name,
                spec.vectors.len(),
                s.dim
            )));
        }
        rotated = rotated.apply_unitary(&basis_change(spec), &[&s.name])?;
        let symbols: Vec<&str> = spec.vectors.iter().map(|(k, _)| k.as_str()).collect();
        registers.push(RegisterSpec::new(&spec.register, &symbols, spec.owner.clone()));
    }
    let dims: Vec<usize> = rho.labels().iter().map(|s| s.dim).collect();
    let mut exact = true;
    let mut rows: BTreeMap<Vec<String>, Prob> = BTreeMap::new();
    for idx in 0..rotated.dim() {
        let p = rotated.matrix()[(idx, idx)].re;
        if p <= BUILD_TOL {
            continue;
        }
        let (q, ok) = rationalize(p);
        exact &= ok;
        let mut rest = idx;
        let mut digits = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = rest % dims[k];
            rest /= dims[k];
        }
        let outcome = digits
            .iter()
            .zip(&registers)
            .map(|(&d, r)| r.alphabet[d].clone())
            .collect();
        rows.insert(outcome, q);
    }
    let total = rows.values().fold(Prob::zero(), |a, p| a + p);
    if !total.is_one() {
        exact = false;
        for p in rows.values_mut() {
            *p = &*p / &total;
        }
    }
    Ok(Measured {
        distribution: JointDistribution::new(registers, rows)?,
        exact,
    })
}

pub fn measure(state: &StateVector, bases: &MeasurementBasis) -> Result<Measured> {
    measure_density(&state.to_density(), bases)
}

/// Canonical eigenbasis purification with Eve's ancilla `eve` of dimension
/// rank(ρ). Within each eigenvalue cluster the basis is fixed by
/// Gram–Schmidt over the projected computational basis vectors.
pub fn purify(rho: &DensityOperator, eve: &str) -> Result<StateVector> {
    let eig = SymmetricEigen::new(rho.matrix().clone());
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&l, v)| (l, v.into_owned()))
        .collect();
    for (l, _) in &pairs {
        if *l > BUILD_TOL && *l < CHECK_TOL {
            return Err(QuantumError::NumericalRank(format!("eigenvalue {l:e}")));
        }
    }
    pairs.retain(|(l, _)| *l >= CHECK_TOL);
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
    let n = rho.dim();
    let mut clusters: Vec<(f64, Vec<CVector>)> = Vec::new();
    for (l, v) in pairs {
        match clusters.last_mut() {
            Some((m, vs)) if (*m - l).abs() < CHECK_TOL => vs.push(v),
            _ => clusters.push((l, vec![v])),
        }
    }
    let mut terms: Vec<(f64, CVector)> = Vec::new();
    for (l, vs) in &clusters {
        let mut proj = CMatrix::zeros(n, n);
        for v in vs {
            proj += v * v.adjoint();
        }
        let mut basis: Vec<CVector> = Vec::new();
        for j in 0..n {
            if basis.len() == vs.len() {
                break;
            }
            let mut w: CVector = proj.column(j).into_owned();
            for u in &basis {
                let overlap = u.dotc(&w);
                w -= u * overlap;
            }
            let norm = w.norm();
            if norm > 1e-6 {
                basis.push(w.unscale(norm));
            }
        }
        if basis.len() != vs.len() {
            return Err(QuantumError::NumericalRank("degenerate eigenspace could not be spanned".into()));
        }
        terms.extend(basis.into_iter().map(|b| (*l, b)));
    }
    let weights: Vec<f64> = terms.iter().map(|(l, _)| *l).collect();
    let states: Vec<StateVector> = terms
        .into_iter()
        .map(|(_, v)| StateVector::normalized(rho.labels().to_vec(), v))
        .collect::<Result<_>>()?;
    purify_ensemble(&weights, &states, eve)
}

/// `Σ_k √w_k |s_k⟩ ⊗ |k⟩_eve` for an ensemble with weights summing to one.
pub fn purify_ensemble(weights: &[f64], states: &[StateVector], eve: &str) -> Result<StateVector> {
    let first = states.first().ok_or_else(|| QuantumError::Invalid("empty ensemble".into()))?;
    if weights.len() != states.len() {
        return Err(QuantumError::Invalid("one weight per state".into()));
    }
    let m = states.len();
    let dim = first.amplitudes().len();
    let mut amps = CVector::zeros(dim * m);
    for (k, (w, s)) in weights.iter().zip(states).enumerate() {
        let s = s.permute(&first.names())?;
        for i in 0..dim {
            amps[i * m + k] = s.amplitudes()[i] * w.sqrt();
        }
    }
    let mut labels = first.labels().to_vec();
    labels.push(Subsystem::new(eve, m));
    let total: f64 = weights.iter().sum();
    let norm = amps.norm_squared();
    if (total - 1.0).abs() > BUILD_TOL {
        return Err(QuantumError::Invalid(format!("weights sum to {total}")));
    }
    StateVector::new(labels, amps.unscale(norm.sqrt()))
}

/// The four product states `ψ_i ⊗ ψ_i` on `(A,B),(C,D)`, weight `1/4` each.
pub fn smolin_ensemble() -> (Vec<f64>, Vec<StateVector>) {
    let states = (1..=4)
        .map(|i| {
            let ab = bell_state(i).expect("valid");
            let cd = ab.relabel(&["C", "D"]).expect("two names");
            ab.tensor(&cd).expect("disjoint")
        })
        .collect();
    (vec![0.25; 4], states)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellBranch {
    /// `1..=4`.
    pub outcome: usize,
    pub probability: f64,
    /// State of the remaining subsystems; `None` when the branch has
    /// vanishing probability or nothing remains.
    pub post: Option<DensityOperator>,
}

/// Projective measurement of `pair` in the basis `ψ1..ψ4`.
pub fn bell_measure(rho: &DensityOperator, pair: (&str, &str)) -> Result<Vec<BellBranch>> {
    for n in [pair.0, pair.1] {
        let s = rho
            .labels()
            .iter()
            .find(|s| s.name == n)
            .ok_or_else(|| QuantumError::Label(format!("no subsystem {n}")))?;
        if s.dim != 2 {
            return Err(QuantumError::Label(format!("{n} is not a qubit")));
        }
    }
    if pair.0 == pair.1 {
        return Err(QuantumError::Label("Bell measurement needs two qubits".into()));
    }
    let mut out = Vec::new();
    for k in 1..=4 {
        let b = bell_state(k)?;
        let bra = CMatrix::from_row_slice(1, 4, b.amplitudes().adjoint().as_slice());
        let post = rho.apply(&bra, &[pair.0, pair.1], &[])?;
        let p = post.trace();
        let post = (p > BUILD_TOL && !post.labels().is_empty())
            .then(|| post.normalized())
            .transpose()?;
        out.push(BellBranch {
            outcome: k,
            probability: p.max(0.0),
            post,
        });
    }
    Ok(out)
}
