//! Shannon measures over [`JointDistribution`]s and the intrinsic
//! information upper bound.
//!
//! Entropies are evaluated in `f64` (base 2, `0 log 0 = 0`). Whenever a
//! conditional mutual information is zero, that fact is certified with an
//! exact rational factorization test instead of a float threshold, and the
//! returned [`MeasureValue`] carries `exact_zero = true`.

mod channel;
mod search;

use std::collections::HashSet;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DistError, JointDistribution};

pub use channel::{apply_eve_channel, apply_eve_channel_as, flatten_registers, ChannelJson, EveChannel};
pub use search::{intrinsic_information_search, SearchConfig, SearchResult, Strategy};

/// Name of the register produced by [`apply_eve_channel`].
pub const EVE_BAR: &str = "Ebar";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("register {0} appears in more than one argument")]
    Overlap(String),
    #[error("empty register set")]
    EmptySubset,
    #[error("channel expects {expected} input symbols, Eve's registers have {got}")]
    AlphabetMismatch { expected: usize, got: usize },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("search needs {needed} evaluations but the budget is {budget}")]
    SearchBudget { needed: u128, budget: u64 },
}

pub type Result<T, E = MeasureError> = std::result::Result<T, E>;

/// A measure in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub value: f64,
    /// Set only when the value is certified to be exactly zero by rational
    /// arithmetic.
    pub exact: bool,
}

impl MeasureValue {
    pub fn exact_zero() -> Self {
        MeasureValue { value: 0.0, exact: true }
    }

    pub fn float(value: f64) -> Self {
        MeasureValue { value, exact: false }
    }
}

/// Shannon entropy of the marginal on `subset`.
pub fn entropy<S: AsRef<str>>(d: &JointDistribution, subset: &[S]) -> Result<MeasureValue> {
    if subset.is_empty() {
        return Err(MeasureError::EmptySubset);
    }
    let m = d.marginalize(subset)?;
    if m.support_size() == 1 {
        return Ok(MeasureValue::exact_zero());
    }
    Ok(MeasureValue::float(entropy_of(&m)))
}

pub(crate) fn entropy_of(d: &JointDistribution) -> f64 {
    d.rows()
        .map(|(_, p)| p.to_f64().unwrap_or(0.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

fn entropy_or_zero<S: AsRef<str>>(d: &JointDistribution, subset: &[S]) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy_of(&d.marginalize(subset)?))
}

/// `I(X:Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z)`.
///
/// `Z` may be empty (plain mutual information); `X` and `Y` may not.
pub fn conditional_mutual_information<S: AsRef<str>>(
    d: &JointDistribution,
    x: &[S],
    y: &[S],
    z: &[S],
) -> Result<MeasureValue> {
    if x.is_empty() || y.is_empty() {
        return Err(MeasureError::EmptySubset);
    }
    let mut seen = HashSet::new();
    for n in x.iter().chain(y).chain(z) {
        d.register(n.as_ref())?;
        if !seen.insert(n.as_ref()) {
            return Err(MeasureError::Overlap(n.as_ref().to_string()));
        }
    }
    if d.conditionally_independent(x, y, z)? {
        return Ok(MeasureValue::exact_zero());
    }
    let cat = |a: &[S], b: &[S]| a.iter().chain(b).map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
    let xz = cat(x, z);
    let yz = cat(y, z);
    let mut xyz = xz.clone();
    xyz.extend(y.iter().map(|s| s.as_ref().to_string()));
    let value = entropy_or_zero(d, &xz)? + entropy_or_zero(d, &yz)?
        - entropy_or_zero(d, &xyz)?
        - entropy_or_zero(d, z)?;
    Ok(MeasureValue::float(value))
}

/// `I(X:Y)`.
pub fn mutual_information<S: AsRef<str>>(d: &JointDistribution, x: &[S], y: &[S]) -> Result<MeasureValue> {
    conditional_mutual_information(d, x, y, &[])
}

/// `I(X:Y|Ē)` after Eve processes `eve_regs` with `ch`: an upper bound on
/// the intrinsic information, and hence on the secret-key rate.
pub fn intrinsic_information_upper<S: AsRef<str>>(
    d: &JointDistribution,
    x: &[S],
    y: &[S],
    eve_regs: &[S],
    ch: &EveChannel,
) -> Result<MeasureValue> {
    let out = fresh_name(d, EVE_BAR);
    let processed = apply_eve_channel_as(d, eve_regs, ch, &out)?;
    let x: Vec<&str> = x.iter().map(AsRef::as_ref).collect();
    let y: Vec<&str> = y.iter().map(AsRef::as_ref).collect();
    conditional_mutual_information(&processed, &x, &y, &[out.as_str()])
}

pub(crate) fn fresh_name(d: &JointDistribution, base: &str) -> String {
    let mut name = base.to_string();
    while d.has_register(&name) {
        name.push('\'');
    }
    name
}
