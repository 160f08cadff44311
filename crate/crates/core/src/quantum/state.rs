use std::collections::HashSet;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::{c, CMatrix, CVector, QuantumError, Result, Subsystem, BUILD_TOL, C64, CHECK_TOL};

fn total_dim(labels: &[Subsystem]) -> usize {
    labels.iter().map(|s| s.dim).product()
}

fn check_labels(labels: &[Subsystem]) -> Result<()> {
    let mut seen = HashSet::new();
    for s in labels {
        if s.dim == 0 {
            return Err(QuantumError::Label(format!("{} has dimension 0", s.name)));
        }
        if !seen.insert(s.name.as_str()) {
            return Err(QuantumError::Label(format!("duplicate subsystem {}", s.name)));
        }
    }
    Ok(())
}

fn position(labels: &[Subsystem], name: &str) -> Result<usize> {
    labels
        .iter()
        .position(|s| s.name == name)
        .ok_or_else(|| QuantumError::Label(format!("no subsystem {name}")))
}

/// `map[old_index] = new_index` for reordering `labels` to `order`.
fn permutation_map(labels: &[Subsystem], order: &[&str]) -> Result<(Vec<Subsystem>, Vec<usize>)> {
    if order.len() != labels.len() {
        return Err(QuantumError::Label(format!(
            "order names {} subsystems, state has {}",
            order.len(),
            labels.len()
        )));
    }
    let src: Vec<usize> = order.iter().map(|n| position(labels, n)).collect::<Result<_>>()?;
    if src.iter().collect::<HashSet<_>>().len() != src.len() {
        return Err(QuantumError::Label("order repeats a subsystem".into()));
    }
    let new_labels: Vec<Subsystem> = src.iter().map(|&i| labels[i].clone()).collect();
    let dims: Vec<usize> = labels.iter().map(|s| s.dim).collect();
    let new_dims: Vec<usize> = new_labels.iter().map(|s| s.dim).collect();
    let n = total_dim(labels);
    let mut map = vec![0; n];
    let mut digits = vec![0; dims.len()];
    for (old, slot) in map.iter_mut().enumerate() {
        let mut rest = old;
        for k in (0..dims.len()).rev() {
            digits[k] = rest % dims[k];
            rest /= dims[k];
        }
        let mut idx = 0;
        for (k, &s) in src.iter().enumerate() {
            idx = idx * new_dims[k] + digits[s];
        }
        *slot = idx;
    }
    Ok((new_labels, map))
}

/// Label order after replacing `targets` by `outputs` at the first
/// target's position.
fn replaced_order(labels: &[Subsystem], targets: &[&str], outputs: &[Subsystem]) -> Vec<String> {
    let first = labels.iter().position(|s| targets.contains(&s.name.as_str()));
    let mut order = Vec::new();
    for (i, s) in labels.iter().enumerate() {
        if Some(i) == first {
            order.extend(outputs.iter().map(|o| o.name.clone()));
        }
        if !targets.contains(&s.name.as_str()) {
            order.push(s.name.clone());
        }
    }
    order
}

/// Validates an operator from `targets` to `outputs`.
fn check_op(labels: &[Subsystem], op: &CMatrix, targets: &[&str], outputs: &[Subsystem]) -> Result<()> {
    if targets.is_empty() {
        return Err(QuantumError::Label("operator needs at least one target".into()));
    }
    let mut din = 1;
    for t in targets {
        din *= labels[position(labels, t)?].dim;
    }
    if targets.iter().collect::<HashSet<_>>().len() != targets.len() {
        return Err(QuantumError::Label("repeated target".into()));
    }
    let dout: usize = outputs.iter().map(|s| s.dim).product();
    if op.ncols() != din || op.nrows() != dout {
        return Err(QuantumError::Invalid(format!(
            "operator is {}x{}, expected {dout}x{din}",
            op.nrows(),
            op.ncols()
        )));
    }
    for o in outputs {
        if !targets.contains(&o.name.as_str()) && labels.iter().any(|s| s.name == o.name) {
            return Err(QuantumError::Label(format!("output {} already exists", o.name)));
        }
    }
    Ok(())
}

/// Pure state on named subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<Subsystem>,
    amps: CVector,
}

impl StateVector {
    pub fn new(labels: Vec<Subsystem>, amps: CVector) -> Result<Self> {
        check_labels(&labels)?;
        if amps.len() != total_dim(&labels) {
            return Err(QuantumError::Invalid(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                total_dim(&labels)
            )));
        }
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > BUILD_TOL {
            return Err(QuantumError::Invalid(format!("squared norm {norm}")));
        }
        Ok(StateVector { labels, amps })
    }

    /// Normalizes `amps` first.
    pub fn normalized(labels: Vec<Subsystem>, amps: CVector) -> Result<Self> {
        let n = amps.norm();
        if n < BUILD_TOL {
            return Err(QuantumError::Invalid("zero vector".into()));
        }
        Self::new(labels, amps.unscale(n))
    }

    /// Computational basis state with the given digits.
    pub fn basis(labels: Vec<Subsystem>, digits: &[usize]) -> Result<Self> {
        if digits.len() != labels.len() {
            return Err(QuantumError::Label("one digit per subsystem".into()));
        }
        let mut idx = 0;
        for (d, s) in digits.iter().zip(&labels) {
            if *d >= s.dim {
                return Err(QuantumError::Index(*d));
            }
            idx = idx * s.dim + d;
        }
        let mut amps = CVector::zeros(total_dim(&labels));
        amps[idx] = c(1.0);
        Self::new(labels, amps)
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn names(&self) -> Vec<&str> {
        self.labels.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn relabel(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.labels.len() {
            return Err(QuantumError::Label("one name per subsystem".into()));
        }
        let labels = self
            .labels
            .iter()
            .zip(names)
            .map(|(s, n)| Subsystem::new(n, s.dim))
            .collect();
        Self::new(labels, self.amps.clone())
    }

    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_labels(&labels)?;
        Ok(StateVector {
            labels,
            amps: self.amps.kronecker(&other.amps),
        })
    }

    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        let (labels, map) = permutation_map(&self.labels, order)?;
        let mut amps = CVector::zeros(self.amps.len());
        for (old, &new) in map.iter().enumerate() {
            amps[new] = self.amps[old];
        }
        Ok(StateVector { labels, amps })
    }

    /// `⟨self|other⟩` after aligning label order.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        let other = other.permute(&self.names())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// Applies `op` (maps the product of `targets` onto `outputs`); the
    /// result is not renormalized.
    pub fn apply(&self, op: &CMatrix, targets: &[&str], outputs: &[Subsystem]) -> Result<CVector> {
        check_op(&self.labels, op, targets, outputs)?;
        let mut order: Vec<&str> = targets.to_vec();
        order.extend(self.labels.iter().map(|s| s.name.as_str()).filter(|n| !targets.contains(n)));
        let aligned = self.permute(&order)?;
        let rest: usize = aligned.labels[targets.len()..].iter().map(|s| s.dim).product();
        let din = op.ncols();
        let mut out = CVector::zeros(op.nrows() * rest);
        for a in 0..op.nrows() {
            for b in 0..din {
                let k = op[(a, b)];
                if k == c(0.0) {
                    continue;
                }
                for r in 0..rest {
                    out[a * rest + r] += k * aligned.amps[b * rest + r];
                }
            }
        }
        Ok(out)
    }

    /// Unitary on `targets`, keeping their labels.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[&str]) -> Result<Self> {
        let outputs: Vec<Subsystem> = targets
            .iter()
            .map(|t| position(&self.labels, t).map(|i| self.labels[i].clone()))
            .collect::<Result<_>>()?;
        let amps = self.apply(u, targets, &outputs)?;
        let mut labels = outputs.clone();
        labels.extend(self.labels.iter().filter(|s| !targets.contains(&s.name.as_str())).cloned());
        let order = replaced_order(&self.labels, targets, &outputs);
        let order: Vec<&str> = order.iter().map(String::as_str).collect();
        StateVector::new(labels, amps)?.permute(&order)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            labels: self.labels.clone(),
            matrix: &self.amps * self.amps.adjoint(),
        }
    }
}

/// Mixed state on named subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    labels: Vec<Subsystem>,
    matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub labels: Vec<Subsystem>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DensityOperator {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(labels: Vec<Subsystem>, matrix: CMatrix) -> Result<Self> {
        let d = Self::unchecked(labels, matrix)?;
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn unchecked(labels: Vec<Subsystem>, matrix: CMatrix) -> Result<Self> {
        check_labels(&labels)?;
        let n = total_dim(&labels);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(QuantumError::Invalid(format!(
                "matrix is {}x{}, dimension is {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DensityOperator { labels, matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = super::max_abs(&(&self.matrix - self.matrix.adjoint()));
        if herm > BUILD_TOL {
            return Err(QuantumError::Invalid(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > BUILD_TOL || tr.im.abs() > BUILD_TOL {
            return Err(QuantumError::Invalid(format!("trace {tr}")));
        }
        let min = self.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -CHECK_TOL {
            return Err(QuantumError::Invalid(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn names(&self) -> Vec<&str> {
        self.labels.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > tol).count()
    }

    pub fn relabel(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.labels.len() {
            return Err(QuantumError::Label("one name per subsystem".into()));
        }
        let labels = self
            .labels
            .iter()
            .zip(names)
            .map(|(s, n)| Subsystem::new(n, s.dim))
            .collect();
        Self::unchecked(labels, self.matrix.clone())
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_labels(&labels)?;
        Ok(DensityOperator {
            labels,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        let (labels, map) = permutation_map(&self.labels, order)?;
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(DensityOperator { labels, matrix: m })
    }

    /// Traces out `remove`.
    pub fn partial_trace(&self, remove: &[&str]) -> Result<Self> {
        for r in remove {
            position(&self.labels, r)?;
        }
        let keep: Vec<&str> = self
            .labels
            .iter()
            .map(|s| s.name.as_str())
            .filter(|n| !remove.contains(n))
            .collect();
        let mut order = keep.clone();
        order.extend(remove.iter().copied());
        let aligned = self.permute(&order)?;
        let dk: usize = aligned.labels[..keep.len()].iter().map(|s| s.dim).product();
        let dr = aligned.dim() / dk;
        let m = CMatrix::from_fn(dk, dk, |i, j| {
            (0..dr).map(|r| aligned.matrix[(i * dr + r, j * dr + r)]).sum()
        });
        Ok(DensityOperator {
            labels: aligned.labels[..keep.len()].to_vec(),
            matrix: m,
        })
    }

    /// Keeps only `keep`, in the given order.
    pub fn reduce(&self, keep: &[&str]) -> Result<Self> {
        let remove: Vec<&str> = self
            .labels
            .iter()
            .map(|s| s.name.as_str())
            .filter(|n| !keep.contains(n))
            .collect();
        self.partial_trace(&remove)?.permute(keep)
    }

    /// Transposes the indices of `subs`; the result need not be a state.
    pub fn partial_transpose(&self, subs: &[&str]) -> Result<CMatrix> {
        let which: Vec<usize> = subs.iter().map(|n| position(&self.labels, n)).collect::<Result<_>>()?;
        let dims: Vec<usize> = self.labels.iter().map(|s| s.dim).collect();
        let n = self.dim();
        let split = |mut idx: usize| {
            let mut d = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                d[k] = idx % dims[k];
                idx /= dims[k];
            }
            d
        };
        let join = |d: &[usize]| d.iter().zip(&dims).fold(0, |acc, (x, m)| acc * m + x);
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            let di = split(i);
            for j in 0..n {
                let dj = split(j);
                let (mut ri, mut rj) = (di.clone(), dj.clone());
                for &w in &which {
                    ri[w] = dj[w];
                    rj[w] = di[w];
                }
                out[(join(&ri), join(&rj))] = self.matrix[(i, j)];
            }
        }
        Ok(out)
    }

    /// `op ρ op†` with `op` mapping `targets` onto `outputs`, which take
    /// the place of the first target. Not renormalized.
    pub fn apply(&self, op: &CMatrix, targets: &[&str], outputs: &[Subsystem]) -> Result<Self> {
        check_op(&self.labels, op, targets, outputs)?;
        let mut order: Vec<&str> = targets.to_vec();
        order.extend(self.labels.iter().map(|s| s.name.as_str()).filter(|n| !targets.contains(n)));
        let aligned = self.permute(&order)?;
        let rest_labels = aligned.labels[targets.len()..].to_vec();
        let rest: usize = rest_labels.iter().map(|s| s.dim).product();
        let big = op.kronecker(&CMatrix::identity(rest, rest));
        let m = &big * &aligned.matrix * big.adjoint();
        let mut labels = outputs.to_vec();
        labels.extend(rest_labels);
        let out = DensityOperator { labels, matrix: m };
        let final_order = replaced_order(&self.labels, targets, outputs);
        let final_order: Vec<&str> = final_order.iter().map(String::as_str).collect();
        out.permute(&final_order)
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[&str]) -> Result<Self> {
        let outputs: Vec<Subsystem> = targets
            .iter()
            .map(|t| position(&self.labels, t).map(|i| self.labels[i].clone()))
            .collect::<Result<_>>()?;
        self.apply(u, targets, &outputs)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Divides by the trace.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(QuantumError::Invalid("zero trace".into()));
        }
        Ok(DensityOperator {
            labels: self.labels.clone(),
            matrix: self.matrix.unscale(t),
        })
    }

    /// Largest entrywise deviation from `other` after aligning labels.
    pub fn distance(&self, other: &DensityOperator) -> Result<f64> {
        let other = other.permute(&self.names())?;
        if other.labels != self.labels {
            return Err(QuantumError::Label("dimensions differ".into()));
        }
        Ok(super::max_abs(&(&self.matrix - &other.matrix)))
    }

    pub fn to_json_struct(&self) -> OperatorJson {
        let rows = |f: &dyn Fn(C64) -> f64| {
            (0..self.dim())
                .map(|i| (0..self.dim()).map(|j| f(self.matrix[(i, j)])).collect())
                .collect()
        };
        OperatorJson {
            labels: self.labels.clone(),
            re: rows(&|z| z.re),
            im: rows(&|z| z.im),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_struct()).expect("operator serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: OperatorJson = serde_json::from_str(s).map_err(|e| QuantumError::Invalid(e.to_string()))?;
        let n = total_dim(&j.labels);
        if j.re.len() != n || j.im.len() != n || j.re.iter().chain(&j.im).any(|r| r.len() != n) {
            return Err(QuantumError::Invalid("matrix shape does not match labels".into()));
        }
        let m = CMatrix::from_fn(n, n, |i, k| C64::new(j.re[i][k], j.im[i][k]));
        Self::new(j.labels, m)
    }
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).unscale(2.0);
    let mut v: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v
}
