use num_traits::Zero;

use super::tables::*;
use super::verify::*;
use super::*;
use crate::dist::{prob, DistError, JointDistribution, Owner, Prob, RegisterSpec};
use crate::measures::mutual_information;

fn pair(a: &str, b: &str) -> PairTarget {
    PairTarget::new(a, b).unwrap()
}

fn two_copies() -> JointDistribution {
    compact_table(1).unwrap().product(&compact_table(2).unwrap()).unwrap()
}

#[test]
fn teleport_on_two_copies_gives_the_first_checkpoint() {
    let (d, t) = classical_teleport(&two_copies(), "A", "A2", "A1", "C", "C1", "C1'").unwrap();
    let r = after_first_teleport_reference();
    let pairs: Vec<(&str, &str)> = r.names().into_iter().map(|n| (n, n)).collect();
    assert!(matches_on(&d, &r, &pairs, None).unwrap());
    assert_eq!(d.register("A2+A1").unwrap().owner, Owner::Public);
    assert!(!d.has_register("A1") && !d.has_register("A2") && !d.has_register("C1"));
    assert!(t.check_invariants());
    assert_eq!(t.steps().len(), 4);
}

#[test]
fn teleport_needs_ownership() {
    let err = classical_teleport(&two_copies(), "A", "B2", "A1", "C", "C1", "C1'").unwrap_err();
    assert!(matches!(err, ProtocolError::Dist(DistError::Ownership { .. })));
    let err = classical_teleport(&two_copies(), "A", "A2", "A1", "C", "D", "C1'").unwrap_err();
    assert!(matches!(err, ProtocolError::Dist(DistError::Ownership { .. })));
}

/// Message `M` with a copy `Mc` at Alice, key bits `KA`, `KB`.
fn keyed_message(key_owner_a: Owner, key_owner_b: Owner) -> JointDistribution {
    let msg = JointDistribution::uniform(
        vec![RegisterSpec::bit("M", "A"), RegisterSpec::bit("Mc", "A")],
        &[["0", "0"], ["1", "1"]],
    )
    .unwrap();
    let key = JointDistribution::uniform(
        vec![RegisterSpec::bit("KA", key_owner_a), RegisterSpec::bit("KB", key_owner_b)],
        &[["0", "0"], ["1", "1"]],
    )
    .unwrap();
    msg.product(&key).unwrap()
}

#[test]
fn teleport_over_a_secret_key_keeps_the_message_secret() {
    let d = keyed_message(Owner::party("A"), Owner::party("B"));
    assert_eq!(d.support_size(), 4);
    let (out, _) = classical_teleport(&d, "A", "M", "KA", "B", "KB", "Mb").unwrap();
    assert!(out.is_sbit("Mc", "Mb"));
    let mi = mutual_information(&out, &["Mc"], &["M+KA"]).unwrap();
    assert!(mi.exact && mi.value == 0.0);
}

#[test]
fn teleport_over_a_public_key_is_not_secret() {
    let d = keyed_message(Owner::Public, Owner::Public);
    let (out, _) = classical_teleport(&d, "A", "M", "KA", "B", "KB", "Mb").unwrap();
    for (row, _) in out.rows() {
        let names = out.names();
        let at = |n: &str| row[names.iter().position(|m| *m == n).unwrap()];
        assert_eq!(at("Mc"), at("Mb"));
    }
    assert!(!out.is_sbit("Mc", "Mb"));
}

#[test]
fn unlock_reference_roles() {
    let (branches, t) = unlock(&smolin_table(), &pair("B", "D"), &pair("A", "C")).unwrap();
    assert_eq!(branches.len(), 2);
    let eq = &branches[0];
    assert_eq!(eq.acceptance, prob(1, 2));
    assert!(eq.sbit);
    let r = unlock_reference();
    let pairs: Vec<(&str, &str)> = r.names().into_iter().map(|n| (n, n)).collect();
    assert!(matches_on(&eq.distribution, &r, &pairs, None).unwrap());
    assert_eq!(branches[1].acceptance, prob(1, 2));
    assert!(branches[1].sbit);
    assert!(t.check_invariants());
    assert!(t.snapshot("branch-equal").is_some() && t.snapshot("branch-unequal").is_some());
}

#[test]
fn unlock_every_joiner_pair() {
    let t = smolin_table();
    for (j, g) in [
        (("B", "D"), ("A", "C")),
        (("A", "C"), ("B", "D")),
        (("A", "B"), ("C", "D")),
        (("C", "D"), ("A", "B")),
        (("A", "D"), ("B", "C")),
        (("B", "C"), ("A", "D")),
    ] {
        let (branches, _) = unlock(&t, &pair(j.0, j.1), &pair(g.0, g.1)).unwrap();
        assert!(branches.iter().all(|b| b.sbit), "joiners {j:?}");
    }
}

#[test]
fn unlock_without_joining_gives_nothing() {
    // the targets alone: no sbit before unlocking
    assert!(!smolin_table().is_sbit("A", "C"));
}

#[test]
fn unlock_shape_errors() {
    let t = smolin_table();
    assert!(matches!(
        unlock(&t, &pair("A", "B"), &pair("A", "C")),
        Err(ProtocolError::Shape(_))
    ));
    let three = t.marginalize(&["A", "C", "B", "Eve"]).unwrap();
    assert!(matches!(
        unlock(&three, &pair("B", "D"), &pair("A", "C")),
        Err(ProtocolError::Shape(_))
    ));
    assert!(PairTarget::new("A", "A").is_err());
    assert!(PairTarget::new("A", "eve").is_err());
}

#[test]
fn superactivation_checkpoints() {
    let (d, t) = superactivate_pair().unwrap();
    for c in superactivation_checks(&t).unwrap() {
        assert!(c.pass, "{} failed: {}", c.name, c.detail);
    }
    assert!(d.is_sbit("D'", "E"));
    let mut view = d.eve_view();
    view.sort();
    assert_eq!(view, vec!["A2+A1", "B2+B1", "C1'=C2", "Eve1", "Eve2"]);
}

#[test]
fn superactivation_needs_the_final_correction() {
    let (_, t) = superactivate_pair().unwrap();
    let before = t.snapshot("table-12").unwrap();
    assert!(!before.is_sbit("D'", "E"));
}

#[test]
fn superactivation_transcript_round_trips() {
    let (_, t) = superactivate_pair().unwrap();
    let back = ProtocolTranscript::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
    let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
    assert!(v["steps"].as_array().unwrap().iter().all(|s| s["snapshot"].is_string()));
}

#[test]
fn merge_keeps_distinct_conditionals() {
    let t = smolin_table();
    let merged = merge_equivalent_symbols(&t, "Eve").unwrap();
    assert_eq!(merged, t);
    let honest_only = t.marginalize(&["A", "Eve"]).unwrap();
    let m = merge_equivalent_symbols(&honest_only, "Eve").unwrap();
    assert_eq!(m.register("Eve").unwrap().alphabet, vec!["e1".to_string()]);
}

#[test]
fn symmetrized_five_shape() {
    let d = symmetrized_five();
    assert_eq!(d.support_size(), 32768);
    assert!(d.rows().all(|(_, p)| *p == prob(1, 32768)));
    let mut view = d.eve_view();
    view.sort();
    assert_eq!(view, vec!["Eve1", "Eve2", "Eve3", "Eve4", "Eve5"]);
    let copy1 = d.marginalize(&["A1", "B1", "C1", "D1", "Eve1"]).unwrap();
    assert!(copy1.permute_check(
        &smolin_table(),
        &[("A1", "A"), ("B1", "B"), ("C1", "C"), ("D1", "D"), ("Eve1", "Eve")]
    ));
    let copy5 = d.marginalize(&["B5", "C5", "D5", "E5", "Eve5"]).unwrap();
    assert!(copy5.permute_check(
        &smolin_table(),
        &[("B5", "A"), ("C5", "B"), ("D5", "C"), ("E5", "D"), ("Eve5", "Eve")]
    ));
}

#[test]
fn five_copy_pairs() {
    let d = symmetrized_five();
    let (_, sbit, t) = distill_pair_from_five(&d, &pair("D", "E")).unwrap();
    assert!(sbit);
    assert!(t.check_invariants());
    // copies one and two carry the run
    assert!(t.steps()[1].op.contains("A2"));
    let (_, sbit, _) = distill_pair_from_five(&d, &pair("A", "B")).unwrap();
    assert!(sbit);
    let checks = five_copy_checks(&d).unwrap();
    assert_eq!(checks.len(), 10);
    for c in checks {
        assert!(c.pass, "{}", c.name);
    }
}

#[test]
fn five_copy_shape_errors() {
    assert!(matches!(
        distill_pair_from_five(&smolin_table(), &pair("D", "E")),
        Err(ProtocolError::Shape(_))
    ));
    assert!(matches!(
        distill_pair_from_five(&symmetrized_five(), &pair("D", "F")),
        Err(ProtocolError::Shape(_))
    ));
}

#[test]
fn secret_distribution_checkpoints() {
    let (d, t) = distribute_secret(&smolin_table(), &["A", "B", "C"], "D").unwrap();
    for c in secret_distribution_checks(&t).unwrap() {
        assert!(c.pass, "{} failed: {}", c.name, c.detail);
    }
    // the secret is uniform given everything Eve sees
    let view = d.eve_view();
    let marg = d.marginalize(&[&["S_A"][..], &view[..]].concat()).unwrap();
    let eve_only = d.marginalize(&view).unwrap();
    for (row, p) in marg.rows() {
        let pe = eve_only.probability(&row[1..]).unwrap();
        assert_eq!(p / pe, prob(1, 2));
    }
}

#[test]
fn announced_parities_are_uniform() {
    let (_, t) = distribute_secret(&smolin_table(), &["A", "B", "C"], "D").unwrap();
    let s17 = t.snapshot("table-17").unwrap();
    let ann = s17.marginalize(&["S_A+A", "S_B+B", "S_C+C"]).unwrap();
    assert_eq!(ann.support_size(), 8);
    assert!(ann.rows().all(|(_, p)| *p == prob(1, 8)));
    // relative parities only take four values
    let rel = s17
        .apply_bit_function("public", &["S_A+A", "S_C+C"], "ac", |b| b[0] ^ b[1])
        .unwrap()
        .apply_bit_function("public", &["S_A+A", "S_B+B"], "ab", |b| b[0] ^ b[1])
        .unwrap()
        .marginalize(&["ac", "ab"])
        .unwrap();
    assert_eq!(rel.support_size(), 4);
    assert!(rel.rows().all(|(_, p)| *p == prob(1, 4)));
}

#[test]
fn secret_distribution_errors() {
    let t = smolin_table();
    assert!(matches!(distribute_secret(&t, &["A", "B", "D"], "D"), Err(ProtocolError::Shape(_))));
    assert!(matches!(distribute_secret(&t, &["A", "A"], "D"), Err(ProtocolError::Shape(_))));
    assert!(matches!(distribute_secret(&t, &["A", "B"], "E"), Err(ProtocolError::Shape(_))));
}

fn names(parties: &[&str]) -> Vec<String> {
    parties.iter().map(|p| format!("K_{p}")).collect()
}

#[test]
fn pad_chaining_star() {
    let pairs: Vec<PairSbit> = ["B", "C", "D", "E"].iter().map(|q| PairSbit::fresh("A", q).unwrap()).collect();
    let (d, t) = multipartite_from_pairwise(&pairs).unwrap();
    assert!(d.is_multipartite_sbit(&names(&["A", "B", "C", "D", "E"])));
    assert!(t.check_invariants());
}

#[test]
fn pad_chaining_pair_and_chain() {
    let (d, _) = multipartite_from_pairwise(&[PairSbit::fresh("A", "B").unwrap()]).unwrap();
    assert!(d.is_sbit("K_A", "K_B"));
    let chain = [PairSbit::fresh("A", "B").unwrap(), PairSbit::fresh("B", "C").unwrap()];
    let (d, _) = multipartite_from_pairwise(&chain).unwrap();
    assert!(d.is_multipartite_sbit(&names(&["A", "B", "C"])));
}

#[test]
fn pad_chaining_errors() {
    let split = [PairSbit::fresh("A", "B").unwrap(), PairSbit::fresh("C", "D").unwrap()];
    assert_eq!(
        multipartite_from_pairwise(&split).unwrap_err(),
        ProtocolError::DisconnectedGraph(vec!["C".into(), "D".into()])
    );
    assert!(multipartite_from_pairwise(&[]).is_err());
    let mut leaky = PairSbit::fresh("A", "B").unwrap();
    leaky.distribution = leaky.distribution.reown(&["KAB"], Owner::Public).unwrap();
    assert!(matches!(multipartite_from_pairwise(&[leaky]), Err(ProtocolError::Shape(_))));
}

#[test]
fn snapshots_are_normalized() {
    let (_, t) = distribute_secret(&smolin_table(), &["A", "B", "C"], "D").unwrap();
    for name in t.snapshot_names() {
        let total = t
            .snapshot(name)
            .unwrap()
            .rows()
            .fold(Prob::zero(), |a, (_, p)| a + p);
        assert_eq!(total, prob(1, 1));
    }
}
