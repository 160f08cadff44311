use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::dist::{JointDistribution, Owner, Prob, RegisterSpec};

use super::tables::{smolin_table, two_copy_reference};
use super::transcript::Run;
use super::{sole_register, PairTarget, ProtocolError, ProtocolTranscript, Result};

pub const FIVE_PARTIES: [&str; 5] = ["A", "B", "C", "D", "E"];

fn xor(bits: &[u8]) -> u8 {
    bits.iter().fold(0, |a, b| a ^ b)
}

/// Sender publishes `msg ⊕ sender_key`; receiver adds its key. The message
/// and both keys are consumed unless Eve can already read them.
fn teleport_steps(
    run: &mut Run,
    sender: &str,
    msg: &str,
    sender_key: &str,
    receiver: &str,
    receiver_key: &str,
    out: &str,
) -> Result<String> {
    let ann = teleport_steps_keep(run, sender, msg, sender_key, receiver, receiver_key, out)?;
    // whatever Eve could already read stays in her view
    let mut consumed = Vec::new();
    for r in [msg, sender_key, receiver_key] {
        if run.d.register(r)?.owner.is_honest() {
            consumed.push(r);
        }
    }
    if !consumed.is_empty() {
        let d = run.d.discard(&consumed)?;
        run.step(
            &format!("{sender},{receiver}"),
            format!("consume {}", consumed.join(", ")),
            &[],
            d,
        );
    }
    Ok(ann)
}

/// One-time-pad teleportation of the bit `msg` from `sender` to
/// `receiver` over the key pair `(sender_key, receiver_key)`.
pub fn classical_teleport(
    d: &JointDistribution,
    sender: &str,
    msg: &str,
    sender_key: &str,
    receiver: &str,
    receiver_key: &str,
    out: &str,
) -> Result<(JointDistribution, ProtocolTranscript)> {
    for (party, reg) in [(sender, msg), (sender, sender_key), (receiver, receiver_key)] {
        if !d.register(reg)?.is_binary() {
            return Err(ProtocolError::Shape(format!("{reg} of {party} is not binary")));
        }
    }
    let mut run = Run::new(d.clone());
    teleport_steps(&mut run, sender, msg, sender_key, receiver, receiver_key, out)?;
    run.checkpoint("final");
    Ok((run.d, run.t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnlockBranch {
    /// `"equal"` or `"unequal"`.
    pub label: String,
    pub distribution: JointDistribution,
    pub acceptance: Prob,
    pub sbit: bool,
}

/// The joiners pool their bits and announce whether they agree; each
/// branch is post-selected, and in the unequal branch the first target
/// flips its bit.
pub fn unlock(
    d: &JointDistribution,
    joiners: &PairTarget,
    targets: &PairTarget,
) -> Result<(Vec<UnlockBranch>, ProtocolTranscript)> {
    let parties = [&joiners.holder1, &joiners.holder2, &targets.holder1, &targets.holder2];
    if parties.iter().collect::<BTreeSet<_>>().len() != 4 {
        return Err(ProtocolError::Shape(format!("joiners {joiners} and targets {targets} overlap")));
    }
    let honest = d.registers().iter().filter(|r| r.owner.is_honest()).count();
    if honest != 4 {
        return Err(ProtocolError::Shape(format!("expected four honest registers, found {honest}")));
    }
    let regs = parties
        .iter()
        .map(|p| sole_register(d, p))
        .collect::<Result<Vec<_>>>()?;
    let (j1, j2, t1, t2) = (&regs[0], &regs[1], &regs[2], &regs[3]);

    let joint = format!("{}+{}", joiners.holder1, joiners.holder2);
    let mut run = Run::new(d.clone());
    let pooled = run.d.reown(&[j1, j2], Owner::from(joint.as_str()))?;
    run.step(&joint, format!("{} and {} join", joiners.holder1, joiners.holder2), &[], pooled);
    let eq = format!("{j1}={j2}");
    run.compute(&joint, &[j1, j2], &eq, format!("{eq} = 1 iff {j1} == {j2}"), |b| u8::from(b[0] == b[1]))?;
    run.announce(&joint, &eq)?;
    let base = run.d.clone();

    let mut branches = Vec::new();
    for (label, value) in [("equal", "1"), ("unequal", "0")] {
        let (selected, acceptance) = base.post_select(&[eq.as_str()], |v| v[0] == value)?;
        run.step(&joint, format!("keep {label} branch"), &[], selected);
        if label == "unequal" {
            run.overwrite(
                &targets.holder1,
                &[t1.as_str()],
                t1,
                format!("{} flips {t1}", targets.holder1),
                |b| b[0] ^ 1,
            )?;
        }
        run.checkpoint(&format!("branch-{label}"));
        branches.push(UnlockBranch {
            label: label.to_string(),
            sbit: run.d.is_sbit(t1, t2),
            distribution: run.d.clone(),
            acceptance,
        });
    }
    Ok((branches, run.t))
}

/// Register names of one superactivation run.
struct Roles {
    /// First teleporter, its message and key.
    t1: String,
    t1_msg: String,
    t1_key: String,
    /// Second teleporter.
    t2: String,
    t2_msg: String,
    t2_key: String,
    /// Receives the first teleport and announces whether its two bits agree.
    ann: String,
    ann_key: String,
    ann_own: String,
    /// The target pair.
    x: String,
    x_key: String,
    y_key: String,
}

/// Returns the two output registers.
fn superactivation_steps(run: &mut Run, r: &Roles, checkpoints: [&str; 2]) -> Result<(String, String)> {
    let ann_out = format!("{}'", r.ann_key);
    teleport_steps(run, &r.t1, &r.t1_msg, &r.t1_key, &r.ann, &r.ann_key, &ann_out)?;
    run.checkpoint(checkpoints[0]);
    let x_out = format!("{}'", r.x_key);
    teleport_steps(run, &r.t2, &r.t2_msg, &r.t2_key, &r.x, &r.x_key, &x_out)?;
    run.checkpoint(checkpoints[1]);
    let eq = format!("{ann_out}={}", r.ann_own);
    run.compute(
        &r.ann,
        &[&ann_out, &r.ann_own],
        &eq,
        format!("{eq} = 1 iff {ann_out} == {}", r.ann_own),
        |b| u8::from(b[0] == b[1]),
    )?;
    run.announce(&r.ann, &eq)?;
    run.overwrite(
        &r.x,
        &[x_out.as_str(), eq.as_str()],
        &x_out,
        format!("{} flips {x_out} unless {eq}", r.x),
        |b| b[0] ^ b[1] ^ 1,
    )?;
    run.checkpoint("final");
    Ok((x_out, r.y_key.clone()))
}

/// Two copies of the bound-information table, five parties: `D` and `E`
/// end with an sbit in registers `D'` and `E`.
pub fn superactivate_pair() -> Result<(JointDistribution, ProtocolTranscript)> {
    let start = super::compact_table(1)?.product(&super::compact_table(2)?)?;
    let order: Vec<String> = two_copy_reference().names().iter().map(|s| s.to_string()).collect();
    let mut run = Run::new(start.reorder(&order)?);
    run.checkpoint("table-10");
    let s = |x: &str| x.to_string();
    let roles = Roles {
        t1: s("A"),
        t1_msg: s("A2"),
        t1_key: s("A1"),
        t2: s("B"),
        t2_msg: s("B2"),
        t2_key: s("B1"),
        ann: s("C"),
        ann_key: s("C1"),
        ann_own: s("C2"),
        x: s("D"),
        x_key: s("D"),
        y_key: s("E"),
    };
    superactivation_steps(&mut run, &roles, ["table-11", "table-12"])?;
    Ok((run.d, run.t))
}

/// The five copies and the parties holding each: copy `k` omits party
/// `E, D, C, B, A` for `k = 1..5`.
pub fn five_copy_layout() -> Vec<(usize, Vec<&'static str>)> {
    (1..=5)
        .map(|k| {
            let omitted = FIVE_PARTIES[5 - k];
            (k, FIVE_PARTIES.iter().copied().filter(|p| *p != omitted).collect())
        })
        .collect()
}

/// Register name of `party`'s bit in copy `k`.
fn copy_register(party: &str, k: usize) -> String {
    format!("{party}{k}")
}

/// Product of five bound-information tables, one for every four of the
/// five parties. In each copy the sorted parties play the roles
/// `A, B, C, D` of [`smolin_table`]; Eve holds `Eve1..Eve5`.
pub fn symmetrized_five() -> JointDistribution {
    let base = smolin_table();
    let roles = ["A", "B", "C", "D"];
    let mut acc: Option<JointDistribution> = None;
    for (k, parties) in five_copy_layout() {
        let mut copy = base.rename("Eve", &format!("Eve{k}")).expect("fresh name");
        for (role, party) in roles.iter().zip(&parties) {
            let name = copy_register(party, k);
            copy = copy
                .rename(role, &name)
                .and_then(|c| c.reown(&[name.as_str()], Owner::from(*party)))
                .expect("fresh name");
        }
        acc = Some(match acc {
            None => copy,
            Some(a) => a.product(&copy).expect("disjoint copies"),
        });
    }
    acc.expect("five copies")
}

/// Runs the two-copy protocol for `target` on the five-copy table: the
/// copy without `holder2` and the copy without `holder1` play the two
/// copies, the first two remaining parties teleport and the third
/// announces.
pub fn distill_pair_from_five(
    d: &JointDistribution,
    target: &PairTarget,
) -> Result<(JointDistribution, bool, ProtocolTranscript)> {
    let layout = five_copy_layout();
    for (k, parties) in &layout {
        for p in parties {
            let name = copy_register(p, *k);
            if d.register(&name).map(|r| r.owner != Owner::from(*p)).unwrap_or(true) {
                return Err(ProtocolError::Shape(format!("missing register {name} owned by {p}")));
            }
        }
        if !d.has_register(&format!("Eve{k}")) {
            return Err(ProtocolError::Shape(format!("missing register Eve{k}")));
        }
    }
    let (x, y) = (target.holder1.as_str(), target.holder2.as_str());
    for h in [x, y] {
        if !FIVE_PARTIES.contains(&h) {
            return Err(ProtocolError::Shape(format!("{h} is not one of the five parties")));
        }
    }
    let copy_without = |p: &str| layout.iter().find(|(_, ps)| !ps.contains(&p)).map(|(k, _)| *k).expect("layout");
    let (alpha, beta) = (copy_without(y), copy_without(x));
    let common: Vec<&str> = FIVE_PARTIES.iter().copied().filter(|p| *p != x && *p != y).collect();
    let (c1, c2, c3) = (common[0], common[1], common[2]);

    let unused: Vec<String> = layout
        .iter()
        .filter(|(k, _)| *k != alpha && *k != beta)
        .flat_map(|(k, ps)| ps.iter().map(move |p| copy_register(p, *k)))
        .collect();
    let mut run = Run::new(d.discard(&unused)?);
    run.t.record("all", "set aside unused copies", &[], &run.d);
    let a = |p: &str| copy_register(p, alpha);
    let b = |p: &str| copy_register(p, beta);
    let roles = Roles {
        t1: c1.into(),
        t1_msg: b(c1),
        t1_key: a(c1),
        t2: c2.into(),
        t2_msg: b(c2),
        t2_key: a(c2),
        ann: c3.into(),
        ann_key: a(c3),
        ann_own: b(c3),
        x: x.into(),
        x_key: a(x),
        y_key: b(y),
    };
    let (xo, yo) = superactivation_steps(&mut run, &roles, ["teleport-1", "teleport-2"])?;
    let sbit = run.d.is_sbit(&xo, &yo);
    Ok((run.d, sbit, run.t))
}

/// The holders of a shared secret bit each announce its parity with their
/// bit of `bound_info`; the newcomer adds the announcements to its own bit
/// and recovers the secret. Secret copies are named `S_<party>`.
pub fn distribute_secret(
    bound_info: &JointDistribution,
    s_holders: &[&str],
    newcomer: &str,
) -> Result<(JointDistribution, ProtocolTranscript)> {
    if s_holders.is_empty()
        || s_holders.iter().collect::<BTreeSet<_>>().len() != s_holders.len()
        || s_holders.contains(&newcomer)
    {
        return Err(ProtocolError::Shape(format!(
            "holders {s_holders:?} must be distinct and exclude {newcomer}"
        )));
    }
    let keys = s_holders
        .iter()
        .map(|h| sole_register(bound_info, h))
        .collect::<Result<Vec<_>>>()?;
    let new_key = sole_register(bound_info, newcomer)?;

    let secret_regs: Vec<RegisterSpec> = s_holders.iter().map(|h| RegisterSpec::bit(&format!("S_{h}"), *h)).collect();
    let names: Vec<String> = secret_regs.iter().map(|r| r.name.clone()).collect();
    let secret = JointDistribution::uniform(secret_regs, &[vec!["0"; s_holders.len()], vec!["1"; s_holders.len()]])?;
    let mut run = Run::new(bound_info.clone());
    let joined = secret.product(bound_info)?;
    run.step(&s_holders.join(","), "share secret bit", &[], joined);

    let mut announced = Vec::new();
    for ((h, s), k) in s_holders.iter().zip(&names).zip(&keys) {
        let p = format!("{s}+{k}");
        run.compute(h, &[s.as_str(), k.as_str()], &p, format!("{p} = {s} xor {k}"), xor)?;
        run.announce(h, &p)?;
        announced.push(p);
    }
    run.checkpoint("table-17");
    let out = format!("S_{newcomer}");
    let mut inputs: Vec<&str> = vec![new_key.as_str()];
    inputs.extend(announced.iter().map(String::as_str));
    run.compute(newcomer, &inputs, &out, format!("{out} = {new_key} + sum of announcements"), xor)?;
    run.checkpoint("table-18");
    run.checkpoint("final");
    Ok((run.d, run.t))
}

/// A perfectly shared bit `left`/`right` between two parties.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSbit {
    pub distribution: JointDistribution,
    pub left: String,
    pub right: String,
}

impl PairSbit {
    /// A fresh sbit with registers `K<p><q>` and `K<q><p>`, unknown to Eve.
    pub fn fresh(p: &str, q: &str) -> Result<Self> {
        let (left, right) = (format!("K{p}{q}"), format!("K{q}{p}"));
        let distribution = JointDistribution::uniform(
            vec![RegisterSpec::bit(&left, p), RegisterSpec::bit(&right, q)],
            &[["0", "0"], ["1", "1"]],
        )?;
        Ok(PairSbit {
            distribution,
            left,
            right,
        })
    }
}

/// Extends pairwise sbits to one secret bit `K_<party>` shared by every
/// party: the alphabetically first party samples it and one-time-pads it
/// along a breadth-first spanning tree of the pair graph.
pub fn multipartite_from_pairwise(pairs: &[PairSbit]) -> Result<(JointDistribution, ProtocolTranscript)> {
    if pairs.is_empty() {
        return Err(ProtocolError::Shape("no pairwise sbits".into()));
    }
    let mut d: Option<JointDistribution> = None;
    // party -> [(neighbour, own key, neighbour key)]
    let mut graph: BTreeMap<String, Vec<(String, String, String)>> = BTreeMap::new();
    for pair in pairs {
        let dist = &pair.distribution;
        let lp = dist.register(&pair.left)?.owner.clone();
        let rp = dist.register(&pair.right)?.owner.clone();
        let (Some(lp), Some(rp)) = (lp.party_name(), rp.party_name()) else {
            return Err(ProtocolError::Shape(format!("{} and {} must be honest", pair.left, pair.right)));
        };
        if lp == rp || !dist.is_sbit(&pair.left, &pair.right) {
            return Err(ProtocolError::Shape(format!("{} / {} is not an sbit", pair.left, pair.right)));
        }
        graph
            .entry(lp.to_string())
            .or_default()
            .push((rp.to_string(), pair.left.clone(), pair.right.clone()));
        graph
            .entry(rp.to_string())
            .or_default()
            .push((lp.to_string(), pair.right.clone(), pair.left.clone()));
        d = Some(match d {
            None => dist.clone(),
            Some(acc) => acc.product(dist)?,
        });
    }
    let root = graph.keys().next().expect("non-empty").clone();
    let root_key = format!("K_{root}");
    let coin = JointDistribution::uniform(vec![RegisterSpec::bit(&root_key, root.as_str())], &[["0"], ["1"]])?;
    let mut run = Run::new(d.expect("non-empty"));
    let with_coin = run.d.product(&coin)?;
    run.step(&root, format!("{root} samples {root_key}"), &[], with_coin);

    let mut seen: BTreeSet<String> = [root.clone()].into();
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for (v, ku, kv) in &graph[&u] {
            if !seen.insert(v.clone()) {
                continue;
            }
            let src = format!("K_{u}");
            let dst = format!("K_{v}");
            teleport_steps_keep(&mut run, &u, &src, ku, v, kv, &dst)?;
            queue.push_back(v.clone());
        }
    }
    let unreached: Vec<String> = graph.keys().filter(|p| !seen.contains(*p)).cloned().collect();
    if !unreached.is_empty() {
        return Err(ProtocolError::DisconnectedGraph(unreached));
    }
    run.checkpoint("final");
    Ok((run.d, run.t))
}

/// Like [`teleport_steps`] but the message stays with the sender.
fn teleport_steps_keep(
    run: &mut Run,
    sender: &str,
    msg: &str,
    sender_key: &str,
    receiver: &str,
    receiver_key: &str,
    out: &str,
) -> Result<String> {
    let ann = format!("{msg}+{sender_key}");
    run.compute(sender, &[msg, sender_key], &ann, format!("{ann} = {msg} xor {sender_key}"), xor)?;
    run.announce(sender, &ann)?;
    run.compute(receiver, &[&ann, receiver_key], out, format!("{out} = {ann} xor {receiver_key}"), xor)?;
    Ok(ann)
}
