//! Comparisons of protocol checkpoints against the closed-form reference
//! tables, packaged as named pass/fail checks.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{prob, JointDistribution, Prob};
use crate::measures::{conditional_mutual_information, flatten_registers};

use super::tables::{
    after_first_teleport_reference, after_second_teleport_compact, after_second_teleport_reference,
    corrected_reference, parity_reference, smolin_table, two_copy_reference, unlock_reference,
};
use super::{
    distill_pair_from_five, unlock, PairTarget, ProtocolError, ProtocolTranscript, Result, FIVE_PARTIES,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Restricts `d` to the left names of `pairs` and compares it with
/// `reference` under the renaming; `relabel` (a left name) may
/// additionally have its symbols permuted.
pub fn matches_on(
    d: &JointDistribution,
    reference: &JointDistribution,
    pairs: &[(&str, &str)],
    relabel: Option<&str>,
) -> Result<bool> {
    let keep: Vec<&str> = pairs.iter().map(|(a, _)| *a).collect();
    let restricted = d.marginalize(&keep)?;
    Ok(match relabel {
        None => restricted.permute_check(reference, pairs),
        Some(r) => restricted.permute_check_up_to_symbols(reference, pairs, r),
    })
}

fn identity_pairs(reference: &JointDistribution) -> Vec<(&str, &str)> {
    reference.names().into_iter().map(|n| (n, n)).collect()
}

/// Merges the symbols of `reg` that induce the same conditional
/// distribution on every other register of `d`. Each class is labelled by
/// its first member.
pub fn merge_equivalent_symbols(d: &JointDistribution, reg: &str) -> Result<JointDistribution> {
    let pos = d.position(reg)?;
    let mut mass: BTreeMap<u16, Prob> = BTreeMap::new();
    for (k, p) in d.table() {
        *mass.entry(k[pos]).or_insert_with(|| prob(0, 1)) += p;
    }
    let mut conditionals: BTreeMap<u16, BTreeMap<Vec<u16>, Prob>> = BTreeMap::new();
    for (k, p) in d.table() {
        let mut rest = k.clone();
        rest.remove(pos);
        conditionals.entry(k[pos]).or_default().insert(rest, p / &mass[&k[pos]]);
    }
    let mut classes: Vec<(u16, &BTreeMap<Vec<u16>, Prob>)> = Vec::new();
    let mut label: BTreeMap<u16, u16> = BTreeMap::new();
    for (sym, cond) in &conditionals {
        let rep = match classes.iter().find(|(_, c)| *c == cond) {
            Some((r, _)) => *r,
            None => {
                classes.push((*sym, cond));
                *sym
            }
        };
        label.insert(*sym, rep);
    }
    let spec = &d.registers()[pos];
    let alphabet: Vec<&str> = classes.iter().map(|(r, _)| spec.alphabet[*r as usize].as_str()).collect();
    let mut registers = d.registers().to_vec();
    registers[pos] = crate::dist::RegisterSpec::new(&spec.name, &alphabet, spec.owner.clone());
    let mut rows: BTreeMap<Vec<&str>, Prob> = BTreeMap::new();
    for (k, p) in d.table() {
        let outcome: Vec<&str> = k
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let s = if i == pos { label[&s] } else { s };
                d.registers()[i].alphabet[s as usize].as_str()
            })
            .collect();
        *rows.entry(outcome).or_insert_with(|| prob(0, 1)) += p;
    }
    let merged = JointDistribution::new(registers, rows)?;
    Ok(merged)
}

fn snapshot<'a>(t: &'a ProtocolTranscript, name: &str) -> Result<&'a JointDistribution> {
    t.snapshot(name)
        .ok_or_else(|| ProtocolError::Shape(format!("transcript has no checkpoint {name}")))
}

fn table_check(name: &str, ok: bool) -> Check {
    Check::new(name, ok, if ok { "MATCH" } else { "MISMATCH" })
}

/// Checkpoints of [`superactivate_pair`](super::superactivate_pair).
pub fn superactivation_checks(t: &ProtocolTranscript) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let t10 = two_copy_reference();
    out.push(table_check("table-10", matches_on(snapshot(t, "table-10")?, &t10, &identity_pairs(&t10), None)?));
    let t11 = after_first_teleport_reference();
    out.push(table_check("table-11", matches_on(snapshot(t, "table-11")?, &t11, &identity_pairs(&t11), None)?));
    let t12 = after_second_teleport_reference();
    let s12 = snapshot(t, "table-12")?;
    let full = matches_on(s12, &t12, &identity_pairs(&t12), None)?;
    let compact = after_second_teleport_compact() == t12;
    out.push(table_check("table-12", full && compact));

    let restricted = s12.marginalize(&["C1'", "C2", "D'", "E", "Eve1", "Eve2"])?;
    let merged = merge_equivalent_symbols(&flatten_registers(&restricted, &["Eve1", "Eve2"], "Eve")?, "Eve")?;
    let same = merged.permute_check_up_to_symbols(
        &smolin_table(),
        &[("C1'", "A"), ("C2", "C"), ("D'", "B"), ("E", "D"), ("Eve", "Eve")],
        "Eve",
    );
    out.push(table_check("table-12 as bound information", same));

    let fin = snapshot(t, "final")?;
    let sbit = fin.is_sbit("D'", "E");
    out.push(Check::new(
        "sbit(D,E)",
        sbit,
        format!("Eve view {:?}", fin.eve_view()),
    ));
    out.push(Check::new(
        "announcements public",
        t.check_invariants(),
        "every announced register is public afterwards",
    ));
    Ok(out)
}

/// Both branches of [`unlock`] on `d`, plus the equal-branch table when
/// the roles are those of the reference table.
pub fn unlock_checks(d: &JointDistribution, joiners: &PairTarget, targets: &PairTarget) -> Result<Vec<Check>> {
    let (branches, t) = unlock(d, joiners, targets)?;
    let mut out = Vec::new();
    for b in &branches {
        out.push(Check::new(
            format!("unlock {joiners} -> {targets} {} branch sbit", b.label),
            b.sbit,
            format!("acceptance {}", crate::dist::format_prob(&b.acceptance)),
        ));
    }
    if joiners == &PairTarget::new("B", "D")? && targets == &PairTarget::new("A", "C")? {
        let eq = &branches[0];
        let r = unlock_reference();
        let ok = matches_on(&eq.distribution, &r, &identity_pairs(&r), None)? && eq.acceptance == prob(1, 2);
        out.push(table_check("table-8", ok));
    }
    out.push(Check::new("announcements public", t.check_invariants(), ""));
    Ok(out)
}

/// All ten pairs of the five-copy table, run in parallel.
pub fn five_copy_checks(d: &JointDistribution) -> Result<Vec<Check>> {
    let pairs: Vec<PairTarget> = FIVE_PARTIES
        .iter()
        .enumerate()
        .flat_map(|(i, a)| FIVE_PARTIES[i + 1..].iter().map(move |b| PairTarget::new(a, b)))
        .collect::<Result<_>>()?;
    pairs
        .par_iter()
        .map(|p| {
            let (_, sbit, t) = distill_pair_from_five(d, p)?;
            Ok(Check::new(
                format!("sbit{p}"),
                sbit && t.check_invariants(),
                format!("{} steps", t.steps().len()),
            ))
        })
        .collect()
}

/// Checkpoints of [`distribute_secret`](super::distribute_secret) run with
/// holders `A, B, C` and newcomer `D`.
pub fn secret_distribution_checks(t: &ProtocolTranscript) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let parities = [("S_A", "S"), ("S_A+A", "A"), ("S_C+C", "C"), ("S_B+B", "B")];
    let mut p17: Vec<(&str, &str)> = parities.to_vec();
    p17.extend([("D", "D"), ("Eve", "Eve")]);
    out.push(table_check("table-17", matches_on(snapshot(t, "table-17")?, &parity_reference(), &p17, None)?));
    let mut p18: Vec<(&str, &str)> = parities.to_vec();
    p18.extend([("S_D", "D'"), ("Eve", "Eve")]);
    out.push(table_check(
        "table-18",
        matches_on(snapshot(t, "table-18")?, &corrected_reference(), &p18, None)?,
    ));
    let fin = snapshot(t, "final")?;
    let pos_s = fin.position("S_A")?;
    let pos_d = fin.position("S_D")?;
    let equal = fin.table().keys().all(|k| k[pos_s] == k[pos_d]);
    out.push(Check::new("David bit == s in all branches", equal, ""));
    let eve = fin.eve_view();
    let mi = conditional_mutual_information(fin, &["S_A"], &eve, &[])?;
    out.push(Check::new(
        "I(s:EveView)=0 exact",
        mi.exact && mi.value == 0.0,
        format!("Eve view {eve:?}"),
    ));
    out.push(Check::new(
        "multipartite sbit(S_A,S_B,S_C,S_D)",
        fin.is_multipartite_sbit(&["S_A", "S_B", "S_C", "S_D"]),
        "",
    ));
    out.push(Check::new("announcements public", t.check_invariants(), ""));
    Ok(out)
}
