//! Search over Eve's channels for a small `I(X:Y|Ē)`.
//!
//! The output alphabet is capped at Eve's input alphabet size `m`. The
//! exhaustive strategy evaluates all `m^m` deterministic maps; the refined
//! strategy then runs a coordinate-wise simplex descent over stochastic
//! matrices from the best map and from seeded random starts. Either way
//! the result is an upper bound on the intrinsic information, not a proof
//! of the minimum.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{intrinsic_information_upper, EveChannel, MeasureError, MeasureValue, Result};
use crate::dist::{JointDistribution, Prob};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    DeterministicExhaustive,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Total objective evaluations allowed. The exhaustive stage must fit
    /// entirely; refinement uses whatever remains.
    pub max_evaluations: u64,
    /// Random restarts for the refined strategy.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::DeterministicExhaustive,
            max_evaluations: 10_000,
            restarts: 10,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn refined() -> Self {
        SearchConfig {
            strategy: Strategy::Refined,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub value: MeasureValue,
    pub witness: EveChannel,
    pub evaluations: u64,
}

/// Dense float tensor `P[x][y][e]` used for fast objective evaluation.
struct Objective {
    nx: usize,
    ny: usize,
    m: usize,
    p: Vec<f64>,
}

impl Objective {
    fn build<S: AsRef<str>>(d: &JointDistribution, x: &[S], y: &[S], eve: &[S]) -> Result<(Self, Vec<String>)> {
        let xi = d.positions(x)?;
        let yi = d.positions(y)?;
        let ei = d.positions(eve)?;
        let regs = d.registers();
        let mut alphabet = vec![String::new()];
        for &i in &ei {
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
        let m = alphabet.len();
        let mut xs: HashMap<Vec<u16>, usize> = HashMap::new();
        let mut ys: HashMap<Vec<u16>, usize> = HashMap::new();
        let mut cells = Vec::new();
        for (k, p) in d.table() {
            let kx: Vec<u16> = xi.iter().map(|&i| k[i]).collect();
            let ky: Vec<u16> = yi.iter().map(|&i| k[i]).collect();
            let nx = xs.len();
            let ix = *xs.entry(kx).or_insert(nx);
            let ny = ys.len();
            let iy = *ys.entry(ky).or_insert(ny);
            let mut e = 0usize;
            for &i in &ei {
                e = e * regs[i].alphabet.len() + k[i] as usize;
            }
            cells.push((ix, iy, e, p.to_f64().unwrap_or(0.0)));
        }
        let (nx, ny) = (xs.len(), ys.len());
        let mut p = vec![0.0; nx * ny * m];
        for (ix, iy, e, v) in cells {
            p[(ix * ny + iy) * m + e] += v;
        }
        Ok((Objective { nx, ny, m, p }, alphabet))
    }

    /// `I(X:Y|Ē)` for a row-stochastic `w[e * m + ē]`.
    fn eval(&self, w: &[f64]) -> f64 {
        let m = self.m;
        let mut q = vec![0.0; self.nx * self.ny * m];
        for xy in 0..self.nx * self.ny {
            let src = &self.p[xy * m..(xy + 1) * m];
            let dst = &mut q[xy * m..(xy + 1) * m];
            for (e, &pe) in src.iter().enumerate() {
                if pe == 0.0 {
                    continue;
                }
                for (eb, out) in dst.iter_mut().enumerate() {
                    *out += pe * w[e * m + eb];
                }
            }
        }
        cmi_dense(&q, self.nx, self.ny, m)
    }

    fn eval_map(&self, map: &[usize]) -> f64 {
        let m = self.m;
        let mut w = vec![0.0; m * m];
        for (e, &eb) in map.iter().enumerate() {
            w[e * m + eb] = 1.0;
        }
        self.eval(&w)
    }
}

fn cmi_dense(q: &[f64], nx: usize, ny: usize, m: usize) -> f64 {
    let mut pz = vec![0.0; m];
    let mut pxz = vec![0.0; nx * m];
    let mut pyz = vec![0.0; ny * m];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..m {
                let v = q[(x * ny + y) * m + z];
                pz[z] += v;
                pxz[x * m + z] += v;
                pyz[y * m + z] += v;
            }
        }
    }
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..m {
                let v = q[(x * ny + y) * m + z];
                if v > 0.0 {
                    total += v * (v * pz[z] / (pxz[x * m + z] * pyz[y * m + z])).log2();
                }
            }
        }
    }
    total
}

fn decode_map(mut index: u128, m: usize) -> Vec<usize> {
    let mut map = vec![0; m];
    for slot in map.iter_mut().rev() {
        *slot = (index % m as u128) as usize;
        index /= m as u128;
    }
    map
}

/// Upper bound on `I(X:Y↓E)` with a witness channel.
pub fn intrinsic_information_search<S: AsRef<str>>(
    d: &JointDistribution,
    x: &[S],
    y: &[S],
    eve_regs: &[S],
    config: &SearchConfig,
) -> Result<SearchResult> {
    if x.is_empty() || y.is_empty() || eve_regs.is_empty() {
        return Err(MeasureError::EmptySubset);
    }
    let (obj, alphabet) = Objective::build(d, x, y, eve_regs)?;
    let m = obj.m;
    let needed = (m as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if needed > config.max_evaluations as u128 {
        return Err(MeasureError::SearchBudget {
            needed,
            budget: config.max_evaluations,
        });
    }

    let values: Vec<f64> = (0..needed).into_par_iter().map(|i| obj.eval_map(&decode_map(i, m))).collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    // lexicographically first map within float noise of the minimum
    let best_index = values.iter().position(|&v| v <= best + 1e-12).expect("non-empty") as u128;
    let best_map = decode_map(best_index, m);
    let det_channel = EveChannel::deterministic(&alphabet, &alphabet, &best_map)?;
    let det_value = intrinsic_information_upper(d, x, y, eve_regs, &det_channel)?;
    let mut evaluations = needed as u64;

    let mut result = SearchResult {
        value: det_value,
        witness: det_channel,
        evaluations,
    };
    if config.strategy == Strategy::DeterministicExhaustive || det_value.exact {
        return Ok(result);
    }

    let remaining = config.max_evaluations - evaluations;
    let share = remaining / (config.restarts as u64 + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts = vec![map_to_matrix(&best_map, m)];
    for _ in 0..config.restarts {
        starts.push(random_stochastic(&mut rng, m));
    }
    let mut best_w: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let (v, w, used) = refine(&obj, start, share);
        evaluations += used;
        if best_w.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best_w = Some((v, w));
        }
    }
    result.evaluations = evaluations;
    if let Some((v, w)) = best_w {
        if v < det_value.value - 1e-12 {
            let channel = rationalize(&alphabet, &w, m)?;
            let exact = intrinsic_information_upper(d, x, y, eve_regs, &channel)?;
            if exact.value < result.value.value {
                result.value = exact;
                result.witness = channel;
            }
        }
    }
    Ok(result)
}

fn map_to_matrix(map: &[usize], m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m * m];
    for (e, &eb) in map.iter().enumerate() {
        w[e * m + eb] = 1.0;
    }
    w
}

fn random_stochastic(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m * m];
    for row in w.chunks_mut(m) {
        // exponential draws normalised give a uniform point on the simplex
        for v in row.iter_mut() {
            *v = -(1.0 - rng.gen::<f64>()).ln();
        }
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    w
}

/// Coordinate-wise descent: move `step` of mass between two entries of
/// one row; halve the step after a sweep without improvement.
fn refine(obj: &Objective, mut w: Vec<f64>, budget: u64) -> (f64, Vec<f64>, u64) {
    let m = obj.m;
    let mut used = 1u64;
    let mut value = obj.eval(&w);
    let mut step: f64 = 0.25;
    while step > 1e-9 && used < budget {
        let mut improved = false;
        'sweep: for r in 0..m {
            for a in 0..m {
                for b in 0..m {
                    if a == b || w[r * m + a] <= 0.0 {
                        continue;
                    }
                    if used >= budget {
                        break 'sweep;
                    }
                    let t = step.min(w[r * m + a]);
                    w[r * m + a] -= t;
                    w[r * m + b] += t;
                    let v = obj.eval(&w);
                    used += 1;
                    if v < value - 1e-15 {
                        value = v;
                        improved = true;
                    } else {
                        w[r * m + a] += t;
                        w[r * m + b] -= t;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (value, w, used)
}

/// Exact channel close to `w`: entries rounded to multiples of `2^-20`,
/// the last positive entry of each row absorbing the rounding.
fn rationalize(alphabet: &[String], w: &[f64], m: usize) -> Result<EveChannel> {
    const DEN: i64 = 1 << 20;
    let mut matrix = Vec::with_capacity(m);
    for row in w.chunks(m) {
        let mut nums: Vec<i64> = row.iter().map(|v| (v * DEN as f64).round().max(0.0) as i64).collect();
        let total: i64 = nums.iter().sum();
        let fix = nums.iter().rposition(|&n| n > 0).unwrap_or(0);
        nums[fix] += DEN - total;
        if nums[fix] < 0 {
            let argmax = (0..m).max_by_key(|&i| nums[i]).unwrap_or(0);
            nums[argmax] += nums[fix];
            nums[fix] = 0;
        }
        matrix.push(
            nums.into_iter()
                .map(|n| BigRational::new(BigInt::from(n), BigInt::from(DEN)))
                .collect::<Vec<Prob>>(),
        );
    }
    EveChannel::new(alphabet.to_vec(), alphabet.to_vec(), matrix)
}
