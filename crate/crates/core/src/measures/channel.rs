//! Eve's stochastic post-processing `E → Ē`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{MeasureError, Result, EVE_BAR};
use crate::dist::{format_prob, parse_prob, DistError, JointDistribution, Owner, Prob, RegisterSpec};

/// Row-stochastic matrix `matrix[e][ē] = P(ē | e)` with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EveChannel {
    inputs: Vec<String>,
    outputs: Vec<String>,
    matrix: Vec<Vec<Prob>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

impl EveChannel {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, matrix: Vec<Vec<Prob>>) -> Result<Self> {
        let bad = |m: String| Err(MeasureError::InvalidChannel(m));
        if inputs.is_empty() || outputs.is_empty() {
            return bad("empty alphabet".into());
        }
        if matrix.len() != inputs.len() {
            return bad(format!("{} rows for {} inputs", matrix.len(), inputs.len()));
        }
        for (row, sym) in matrix.iter().zip(&inputs) {
            if row.len() != outputs.len() {
                return bad(format!("row {sym} has {} entries", row.len()));
            }
            if row.iter().any(Signed::is_negative) {
                return bad(format!("row {sym} has a negative entry"));
            }
            if !row.iter().fold(Prob::zero(), |a, p| a + p).is_one() {
                return bad(format!("row {sym} does not sum to 1"));
            }
        }
        Ok(EveChannel { inputs, outputs, matrix })
    }

    pub fn identity(alphabet: &[String]) -> Self {
        let n = alphabet.len();
        let map: Vec<usize> = (0..n).collect();
        Self::deterministic(alphabet, alphabet, &map).expect("identity is a valid map")
    }

    /// `e_i ↦ outputs[map[i]]` with probability one.
    pub fn deterministic(inputs: &[String], outputs: &[String], map: &[usize]) -> Result<Self> {
        if map.len() != inputs.len() || map.iter().any(|&j| j >= outputs.len()) {
            return Err(MeasureError::InvalidChannel("map out of range".into()));
        }
        let matrix = map
            .iter()
            .map(|&j| {
                (0..outputs.len())
                    .map(|k| if k == j { Prob::one() } else { Prob::zero() })
                    .collect()
            })
            .collect();
        Self::new(inputs.to_vec(), outputs.to_vec(), matrix)
    }

    /// Deterministic channel given by symbol pairs; unmapped inputs stay put.
    pub fn from_symbol_map(alphabet: &[String], pairs: &[(&str, &str)]) -> Result<Self> {
        let map = alphabet
            .iter()
            .enumerate()
            .map(|(i, s)| match pairs.iter().find(|(from, _)| from == s) {
                Some((_, to)) => alphabet
                    .iter()
                    .position(|t| t == to)
                    .ok_or_else(|| MeasureError::InvalidChannel(format!("unknown symbol {to}"))),
                None => Ok(i),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::deterministic(alphabet, alphabet, &map)
    }

    /// Everything to the first output symbol: Eve forgets her data.
    pub fn constant(inputs: &[String]) -> Self {
        Self::deterministic(inputs, &inputs[..1], &vec![0; inputs.len()]).expect("valid map")
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn matrix(&self) -> &[Vec<Prob>] {
        &self.matrix
    }

    /// For a deterministic channel, the output index of every input.
    pub fn as_map(&self) -> Option<Vec<usize>> {
        self.matrix
            .iter()
            .map(|row| {
                let ones: Vec<usize> = row.iter().enumerate().filter(|(_, p)| p.is_one()).map(|(i, _)| i).collect();
                (ones.len() == 1).then(|| ones[0])
            })
            .collect()
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            matrix: self.matrix.iter().map(|r| r.iter().map(format_prob).collect()).collect(),
        }
    }

    pub fn from_json(j: ChannelJson) -> Result<Self> {
        let matrix = j
            .matrix
            .iter()
            .map(|r| r.iter().map(|s| parse_prob(s)).collect::<Result<Vec<_>, DistError>>())
            .collect::<Result<Vec<_>, DistError>>()?;
        Self::new(j.inputs, j.outputs, matrix)
    }
}

/// Merges `names` into one register (symbols joined with `,`, alphabet in
/// lexicographic product order) placed where the first of them was.
pub fn flatten_registers<S: AsRef<str>>(d: &JointDistribution, names: &[S], out: &str) -> Result<JointDistribution> {
    if names.is_empty() {
        return Err(MeasureError::EmptySubset);
    }
    let idx = names
        .iter()
        .map(|n| d.registers().iter().position(|r| r.name == n.as_ref()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| DistError::UnknownRegister(names.iter().map(|n| n.as_ref()).collect::<Vec<_>>().join(",")))?;
    if names.len() == 1 {
        return Ok(d.rename(names[0].as_ref(), out)?);
    }
    let regs = d.registers();
    let owner = regs[idx[0]].owner.clone();
    let mut alphabet = vec![String::new()];
    for &i in &idx {
        alphabet = alphabet
            .iter()
            .flat_map(|p| {
                regs[i]
                    .alphabet
                    .iter()
                    .map(move |s| if p.is_empty() { s.clone() } else { format!("{p},{s}") })
            })
            .collect();
    }
    let radices: Vec<usize> = idx.iter().map(|&i| regs[i].alphabet.len()).collect();
    let first = *idx.iter().min().expect("non-empty");
    let mut registers: Vec<RegisterSpec> = Vec::new();
    let mut keep = Vec::new();
    for (i, r) in regs.iter().enumerate() {
        if i == first {
            registers.push(RegisterSpec {
                name: out.to_string(),
                alphabet: alphabet.clone(),
                owner: owner.clone(),
            });
            keep.push(None);
        } else if !idx.contains(&i) {
            registers.push(r.clone());
            keep.push(Some(i));
        }
    }
    if registers.iter().filter(|r| r.name == out).count() > 1 {
        return Err(DistError::NameCollision(out.to_string()).into());
    }
    let mut table: BTreeMap<Vec<u16>, Prob> = BTreeMap::new();
    for (k, p) in d.table() {
        let mut code = 0usize;
        for (&i, &r) in idx.iter().zip(&radices) {
            code = code * r + k[i] as usize;
        }
        let key: Vec<u16> = keep
            .iter()
            .map(|slot| match slot {
                Some(i) => k[*i],
                None => code as u16,
            })
            .collect();
        *table.entry(key).or_insert_with(Prob::zero) += p;
    }
    if alphabet.len() > u16::MAX as usize {
        return Err(DistError::SupportTooLarge(alphabet.len()).into());
    }
    Ok(JointDistribution::from_parts(registers, table))
}

/// Replaces Eve's registers by a single output register [`EVE_BAR`] with
/// `P(x, ē) = Σ_e P(x, e) ch(ē | e)`.
pub fn apply_eve_channel<S: AsRef<str>>(d: &JointDistribution, eve_regs: &[S], ch: &EveChannel) -> Result<JointDistribution> {
    apply_eve_channel_as(d, eve_regs, ch, EVE_BAR)
}

pub fn apply_eve_channel_as<S: AsRef<str>>(
    d: &JointDistribution,
    eve_regs: &[S],
    ch: &EveChannel,
    out: &str,
) -> Result<JointDistribution> {
    for n in eve_regs {
        let r = d.register(n.as_ref())?;
        if !r.owner.visible_to_eve() {
            return Err(DistError::Ownership {
                actor: "eve".into(),
                register: r.name.clone(),
                owner: r.owner.to_string(),
            }
            .into());
        }
    }
    let tmp = super::fresh_name(d, "__eve_flat");
    let flat = flatten_registers(d, eve_regs, &tmp)?;
    let pos = flat.position(&tmp)?;
    let spec = &flat.registers()[pos];
    if spec.alphabet != ch.inputs {
        return Err(MeasureError::AlphabetMismatch {
            expected: ch.inputs.len(),
            got: spec.alphabet.len(),
        });
    }
    let mut registers = flat.registers().to_vec();
    registers[pos] = RegisterSpec {
        name: out.to_string(),
        alphabet: ch.outputs.clone(),
        owner: Owner::Eve,
    };
    if registers.iter().filter(|r| r.name == out).count() > 1 {
        return Err(DistError::NameCollision(out.to_string()).into());
    }
    let mut table: BTreeMap<Vec<u16>, Prob> = BTreeMap::new();
    for (k, p) in flat.table() {
        for (j, w) in ch.matrix[k[pos] as usize].iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let mut key = k.clone();
            key[pos] = j as u16;
            *table.entry(key).or_insert_with(Prob::zero) += p * w;
        }
    }
    Ok(JointDistribution::from_parts(registers, table))
}
