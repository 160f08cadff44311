//! The four-party bound-information table, its compact two-copy forms, and
//! closed-form reference tables that the protocol checkpoints are compared
//! against.
//!
//! Reference tables are written row by row with symbolic entries such as
//! `"i"`, `"j+1"` or `"s+i+1"`: each variable ranges over `{0,1}`, sums are
//! taken mod 2, and symbols like `"e3"` / `"f2"` are Eve's opaque labels.
//! Every (row, assignment) pair carries equal weight.

use std::collections::BTreeMap;

use crate::dist::{prob, JointDistribution, Owner, Prob, RegisterSpec};

use super::{ProtocolError, Result};

pub const EVE_SYMBOLS: [&str; 4] = ["e1", "e2", "e3", "e4"];
pub const EVE2_SYMBOLS: [&str; 4] = ["f1", "f2", "f3", "f4"];

pub(crate) fn bit_col(name: &str, owner: &str) -> RegisterSpec {
    RegisterSpec::bit(name, owner)
}

pub(crate) fn eve_col(name: &str, alphabet: &[&str]) -> RegisterSpec {
    RegisterSpec::new(name, alphabet, Owner::Eve)
}

/// Evaluates a mod-2 sum such as `s+i+1` under `vars`.
fn eval_cell(cell: &str, vars: &BTreeMap<char, u8>) -> Option<String> {
    let looks_symbolic = cell
        .split('+')
        .all(|t| t == "0" || t == "1" || (t.len() == 1 && t.chars().all(|c| c.is_ascii_lowercase())));
    if !looks_symbolic {
        return None;
    }
    let mut acc = 0u8;
    for term in cell.split('+') {
        acc ^= match term {
            "0" => 0,
            "1" => 1,
            v => *vars.get(&v.chars().next()?)?,
        };
    }
    Some(acc.to_string())
}

/// Expands symbolic rows over every assignment of `vars`, uniformly.
pub(crate) fn expand(cols: &[RegisterSpec], vars: &[char], rows: &[&[&str]]) -> Result<JointDistribution> {
    let registers = cols.to_vec();
    let n_assign = 1usize << vars.len();
    let weight = prob(1, (rows.len() * n_assign) as i64);
    let mut acc: BTreeMap<Vec<String>, Prob> = BTreeMap::new();
    for row in rows {
        if row.len() != cols.len() {
            return Err(ProtocolError::Shape(format!("row {row:?} does not match {} columns", cols.len())));
        }
        for a in 0..n_assign {
            let assignment: BTreeMap<char, u8> = vars
                .iter()
                .enumerate()
                .map(|(k, &v)| (v, ((a >> (vars.len() - 1 - k)) & 1) as u8))
                .collect();
            let outcome: Vec<String> = row
                .iter()
                .map(|cell| eval_cell(cell, &assignment).unwrap_or_else(|| cell.to_string()))
                .collect();
            *acc.entry(outcome).or_insert_with(|| prob(0, 1)) += &weight;
        }
    }
    Ok(JointDistribution::new(registers, acc)?)
}

/// The bound-information distribution over honest bits `A, C, B, D` and
/// Eve's label `Eve ∈ {e1..e4}`, eight rows at `1/8`.
pub fn smolin_table() -> JointDistribution {
    let cols = [
        bit_col("A", "A"),
        bit_col("C", "C"),
        bit_col("B", "B"),
        bit_col("D", "D"),
        eve_col("Eve", &EVE_SYMBOLS),
    ];
    let rows: [&[&str]; 8] = [
        &["0", "0", "0", "0", "e1"],
        &["0", "0", "1", "1", "e2"],
        &["1", "1", "0", "0", "e2"],
        &["1", "1", "1", "1", "e1"],
        &["0", "1", "0", "1", "e3"],
        &["0", "1", "1", "0", "e4"],
        &["1", "0", "0", "1", "e4"],
        &["1", "0", "1", "0", "e3"],
    ];
    expand(&cols, &[], &rows).expect("fixed table is valid")
}

/// Compact closed form of one copy: copy 1 over `A1, C1, B1, D, Eve1`
/// with labels `e*`; copy 2 over `A2, B2, C2, E, Eve2` with labels `f*`.
pub fn compact_table(copy: u8) -> Result<JointDistribution> {
    let (names, owners, eve, syms, var): ([&str; 4], [&str; 4], &str, &[&str; 4], &str) = match copy {
        1 => (["A1", "C1", "B1", "D"], ["A", "C", "B", "D"], "Eve1", &EVE_SYMBOLS, "i"),
        2 => (["A2", "B2", "C2", "E"], ["A", "B", "C", "E"], "Eve2", &EVE2_SYMBOLS, "j"),
        other => return Err(ProtocolError::Shape(format!("no compact table for copy {other}"))),
    };
    let cols: Vec<RegisterSpec> = names
        .iter()
        .zip(owners)
        .map(|(n, o)| bit_col(n, o))
        .chain([eve_col(eve, syms)])
        .collect();
    let v = var;
    let v1 = format!("{v}+1");
    let v1 = v1.as_str();
    let rows: [&[&str]; 4] = [
        &[v, v, v, v, syms[0]],
        &[v, v, v1, v1, syms[1]],
        &[v, v1, v, v1, syms[2]],
        &[v, v1, v1, v, syms[3]],
    ];
    expand(&cols, &[v.chars().next().expect("one letter")], &rows)
}

/// The equal-branch table after `B` and `D` post-select on equality.
pub fn unlock_reference() -> JointDistribution {
    let cols = [
        bit_col("A", "A"),
        bit_col("C", "C"),
        bit_col("B", "B"),
        bit_col("D", "D"),
        eve_col("Eve", &EVE_SYMBOLS),
    ];
    let rows: [&[&str]; 4] = [
        &["0", "0", "0", "0", "e1"],
        &["0", "0", "1", "1", "e2"],
        &["1", "1", "0", "0", "e2"],
        &["1", "1", "1", "1", "e1"],
    ];
    expand(&cols, &[], &rows).expect("fixed table is valid")
}

fn two_eve_cols() -> [RegisterSpec; 2] {
    [eve_col("Eve1", &EVE_SYMBOLS), eve_col("Eve2", &EVE2_SYMBOLS)]
}

/// Two copies shared by five parties, 64 rows at `1/64`.
pub fn two_copy_reference() -> JointDistribution {
    let mut cols: Vec<RegisterSpec> = [
        ("A1", "A"),
        ("A2", "A"),
        ("B1", "B"),
        ("B2", "B"),
        ("C1", "C"),
        ("C2", "C"),
        ("D", "D"),
        ("E", "E"),
    ]
    .iter()
    .map(|(n, o)| bit_col(n, o))
    .collect();
    cols.extend(two_eve_cols());
    let rows: [&[&str]; 16] = [
        &["i", "j", "i", "j", "i", "j", "i", "j", "e1", "f1"],
        &["i", "j", "i", "j", "i", "j+1", "i", "j+1", "e1", "f2"],
        &["i", "j", "i", "j+1", "i", "j", "i", "j+1", "e1", "f3"],
        &["i", "j", "i", "j+1", "i", "j+1", "i", "j", "e1", "f4"],
        &["i", "j", "i+1", "j", "i", "j", "i+1", "j", "e2", "f1"],
        &["i", "j", "i+1", "j", "i", "j+1", "i+1", "j+1", "e2", "f2"],
        &["i", "j", "i+1", "j+1", "i", "j", "i+1", "j+1", "e2", "f3"],
        &["i", "j", "i+1", "j+1", "i", "j+1", "i+1", "j", "e2", "f4"],
        &["i", "j", "i", "j", "i+1", "j", "i+1", "j", "e3", "f1"],
        &["i", "j", "i", "j", "i+1", "j+1", "i+1", "j+1", "e3", "f2"],
        &["i", "j", "i", "j+1", "i+1", "j", "i+1", "j+1", "e3", "f3"],
        &["i", "j", "i", "j+1", "i+1", "j+1", "i+1", "j", "e3", "f4"],
        &["i", "j", "i+1", "j", "i+1", "j", "i", "j", "e4", "f1"],
        &["i", "j", "i+1", "j", "i+1", "j+1", "i", "j+1", "e4", "f2"],
        &["i", "j", "i+1", "j+1", "i+1", "j", "i", "j+1", "e4", "f3"],
        &["i", "j", "i+1", "j+1", "i+1", "j+1", "i", "j", "e4", "f4"],
    ];
    expand(&cols, &['i', 'j'], &rows).expect("fixed table is valid")
}

/// After Alice's pad: `C1' = C1 + A1 + A2`, consumed registers removed.
pub fn after_first_teleport_reference() -> JointDistribution {
    let mut cols: Vec<RegisterSpec> = [("B1", "B"), ("B2", "B"), ("C1'", "C"), ("C2", "C"), ("D", "D"), ("E", "E")]
        .iter()
        .map(|(n, o)| bit_col(n, o))
        .collect();
    cols.extend(two_eve_cols());
    let rows: [&[&str]; 16] = [
        &["i", "j", "j", "j", "i", "j", "e1", "f1"],
        &["i", "j", "j", "j+1", "i", "j+1", "e1", "f2"],
        &["i", "j+1", "j", "j", "i", "j+1", "e1", "f3"],
        &["i", "j+1", "j", "j+1", "i", "j", "e1", "f4"],
        &["i+1", "j", "j", "j", "i+1", "j", "e2", "f1"],
        &["i+1", "j", "j", "j+1", "i+1", "j+1", "e2", "f2"],
        &["i+1", "j+1", "j", "j", "i+1", "j+1", "e2", "f3"],
        &["i+1", "j+1", "j", "j+1", "i+1", "j", "e2", "f4"],
        &["i", "j", "j+1", "j", "i+1", "j", "e3", "f1"],
        &["i", "j", "j+1", "j+1", "i+1", "j+1", "e3", "f2"],
        &["i", "j+1", "j+1", "j", "i+1", "j+1", "e3", "f3"],
        &["i", "j+1", "j+1", "j+1", "i+1", "j", "e3", "f4"],
        &["i+1", "j", "j+1", "j", "i", "j", "e4", "f1"],
        &["i+1", "j", "j+1", "j+1", "i", "j+1", "e4", "f2"],
        &["i+1", "j+1", "j+1", "j", "i", "j+1", "e4", "f3"],
        &["i+1", "j+1", "j+1", "j+1", "i", "j", "e4", "f4"],
    ];
    expand(&cols, &['i', 'j'], &rows).expect("fixed table is valid")
}

fn after_second_cols() -> Vec<RegisterSpec> {
    let mut cols: Vec<RegisterSpec> = [("C1'", "C"), ("C2", "C"), ("D'", "D"), ("E", "E")]
        .iter()
        .map(|(n, o)| bit_col(n, o))
        .collect();
    cols.extend(two_eve_cols());
    cols
}

/// After Bob's pad: `D' = D + B1 + B2`; the full 16-row form, 32 outcomes
/// at `1/32`.
pub fn after_second_teleport_reference() -> JointDistribution {
    let rows: [&[&str]; 16] = [
        &["j", "j", "j", "j", "e1", "f1"],
        &["j", "j+1", "j", "j+1", "e1", "f2"],
        &["j", "j", "j+1", "j+1", "e1", "f3"],
        &["j", "j+1", "j+1", "j", "e1", "f4"],
        &["j", "j", "j", "j", "e2", "f1"],
        &["j", "j+1", "j", "j+1", "e2", "f2"],
        &["j", "j", "j+1", "j+1", "e2", "f3"],
        &["j", "j+1", "j+1", "j", "e2", "f4"],
        &["j+1", "j", "j+1", "j", "e3", "f1"],
        &["j+1", "j+1", "j+1", "j+1", "e3", "f2"],
        &["j+1", "j", "j", "j+1", "e3", "f3"],
        &["j+1", "j+1", "j", "j", "e3", "f4"],
        &["j+1", "j", "j+1", "j", "e4", "f1"],
        &["j+1", "j+1", "j+1", "j+1", "e4", "f2"],
        &["j+1", "j", "j", "j+1", "e4", "f3"],
        &["j+1", "j+1", "j", "j", "e4", "f4"],
    ];
    expand(&after_second_cols(), &['j'], &rows).expect("fixed table is valid")
}

/// The four-row compact form of the same checkpoint. Rows are written for
/// `e1`/`e2`; for `e3`/`e4` the teleported columns `C1'` and `D'` take
/// `j+1` in place of `j`.
pub fn after_second_teleport_compact() -> JointDistribution {
    let compact: [[&str; 5]; 4] = [
        ["j", "j", "j", "j", "f1"],
        ["j", "j+1", "j", "j+1", "f2"],
        ["j", "j", "j+1", "j+1", "f3"],
        ["j", "j+1", "j+1", "j", "f4"],
    ];
    let shift = |cell: &str| -> String {
        // j -> j+1, j+1 -> j+1+1 (= j)
        format!("{cell}+1")
    };
    let mut owned: Vec<Vec<String>> = Vec::new();
    for m in EVE_SYMBOLS {
        let replace = m == "e3" || m == "e4";
        for r in &compact {
            let c1 = if replace { shift(r[0]) } else { r[0].to_string() };
            let d = if replace { shift(r[2]) } else { r[2].to_string() };
            owned.push(vec![c1, r[1].to_string(), d, r[3].to_string(), m.to_string(), r[4].to_string()]);
        }
    }
    let rows: Vec<Vec<&str>> = owned.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    let rows: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
    expand(&after_second_cols(), &['j'], &rows).expect("fixed table is valid")
}

fn secrecy_cols(last: &str) -> Vec<RegisterSpec> {
    let mut cols = vec![bit_col("S", "A")];
    cols.extend([("A", "A"), ("C", "C"), ("B", "B"), (last, "D")].iter().map(|(n, o)| bit_col(n, o)));
    cols.push(eve_col("Eve", &EVE_SYMBOLS));
    cols
}

/// Announced parities `s + i_k` of the three key holders next to David's
/// untouched bit. Conditioned on `S = s` this is the eight-row table with
/// entries `1/8`.
pub fn parity_reference() -> JointDistribution {
    let rows: [&[&str]; 4] = [
        &["s", "s+i", "s+i", "s+i", "i", "e1"],
        &["s", "s+i", "s+i", "s+i+1", "i+1", "e2"],
        &["s", "s+i", "s+i+1", "s+i", "i+1", "e3"],
        &["s", "s+i", "s+i+1", "s+i+1", "i", "e4"],
    ];
    expand(&secrecy_cols("D"), &['s', 'i'], &rows).expect("fixed table is valid")
}

/// David's bit after adding `v_D`, the sum of the three announced parities.
pub fn corrected_reference() -> JointDistribution {
    let base = parity_reference();
    let rows: Vec<(Vec<String>, Prob)> = base
        .rows()
        .map(|(r, p)| {
            let bit = |s: &str| s.parse::<u8>().expect("binary");
            let v = bit(r[1]) ^ bit(r[2]) ^ bit(r[3]);
            let mut out: Vec<String> = r.iter().map(|s| s.to_string()).collect();
            out[4] = (bit(r[4]) ^ v).to_string();
            (out, p.clone())
        })
        .collect();
    JointDistribution::new(secrecy_cols("D'"), rows).expect("row-wise map of a valid table")
}
