use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::dist::{DistError, DistributionJson, JointDistribution, Owner, Prob};

use super::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub actor: String,
    pub op: String,
    pub announced: Vec<String>,
    /// Name of the snapshot taken right after the step.
    pub snapshot: String,
}

/// Ordered steps of a protocol run with a snapshot after each of them.
/// Named checkpoints are aliases of step snapshots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProtocolTranscript {
    steps: Vec<Step>,
    snapshots: Vec<(String, JointDistribution)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptJson {
    pub steps: Vec<Step>,
    pub snapshots: Vec<SnapshotJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotJson {
    pub name: String,
    pub distribution: DistributionJson,
}

impl ProtocolTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn snapshot_names(&self) -> Vec<&str> {
        self.snapshots.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn snapshot(&self, name: &str) -> Option<&JointDistribution> {
        self.snapshots.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    /// Records a step and snapshots `after` as `step-N`.
    pub fn record(&mut self, actor: &str, op: impl Into<String>, announced: &[&str], after: &JointDistribution) {
        let name = format!("step-{}", self.steps.len() + 1);
        self.steps.push(Step {
            actor: actor.to_string(),
            op: op.into(),
            announced: announced.iter().map(|s| s.to_string()).collect(),
            snapshot: name.clone(),
        });
        self.snapshots.push((name, after.clone()));
    }

    /// Stores `d` as the named checkpoint `name`.
    pub fn checkpoint(&mut self, name: &str, d: &JointDistribution) {
        self.snapshots.retain(|(n, _)| n != name);
        self.snapshots.push((name.to_string(), d.clone()));
    }

    /// Appends another transcript; its step snapshots are renumbered.
    pub fn extend(&mut self, other: ProtocolTranscript) {
        let offset = self.steps.len();
        for (n, d) in other.snapshots {
            let renamed = match n.strip_prefix("step-").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) => format!("step-{}", k + offset),
                None => n,
            };
            self.snapshots.retain(|(m, _)| *m != renamed);
            self.snapshots.push((renamed, d));
        }
        for mut s in other.steps {
            if let Some(k) = s.snapshot.strip_prefix("step-").and_then(|k| k.parse::<usize>().ok()) {
                s.snapshot = format!("step-{}", k + offset);
            }
            self.steps.push(s);
        }
    }

    /// Every announced register is public in each later step snapshot,
    /// and every snapshot sums to one.
    pub fn check_invariants(&self) -> bool {
        let normalized = self
            .snapshots
            .iter()
            .all(|(_, d)| d.rows().fold(Prob::from_integer(0.into()), |a, (_, p)| a + p).is_one());
        let public = self.steps.iter().enumerate().all(|(i, s)| {
            self.steps[i..].iter().all(|later| {
                let Some(d) = self.snapshot(&later.snapshot) else {
                    return false;
                };
                s.announced
                    .iter()
                    .all(|a| d.register(a).map(|r| r.owner == Owner::Public).unwrap_or(false))
            })
        });
        normalized && public
    }

    pub fn to_json_struct(&self) -> TranscriptJson {
        TranscriptJson {
            steps: self.steps.clone(),
            snapshots: self
                .snapshots
                .iter()
                .map(|(n, d)| SnapshotJson {
                    name: n.clone(),
                    distribution: d.into(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_struct()).expect("transcript serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: TranscriptJson = serde_json::from_str(s).map_err(|e| DistError::Format(e.to_string()))?;
        let snapshots = j
            .snapshots
            .into_iter()
            .map(|s| Ok((s.name, JointDistribution::try_from(s.distribution)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProtocolTranscript {
            steps: j.steps,
            snapshots,
        })
    }
}

/// A protocol in progress: the current distribution plus its transcript.
pub(crate) struct Run {
    pub d: JointDistribution,
    pub t: ProtocolTranscript,
}

impl Run {
    pub fn new(d: JointDistribution) -> Self {
        Run {
            d,
            t: ProtocolTranscript::new(),
        }
    }

    pub fn step(&mut self, actor: &str, op: impl Into<String>, announced: &[&str], d: JointDistribution) {
        self.d = d;
        self.t.record(actor, op, announced, &self.d);
    }

    pub fn checkpoint(&mut self, name: &str) {
        self.t.checkpoint(name, &self.d);
    }

    /// `actor` computes bit `out` from `inputs`.
    pub fn compute<F>(&mut self, actor: &str, inputs: &[&str], out: &str, op: impl Into<String>, f: F) -> Result<()>
    where
        F: Fn(&[u8]) -> u8,
    {
        let d = self.d.apply_bit_function(actor, inputs, out, f)?;
        self.step(actor, op, &[], d);
        Ok(())
    }

    pub fn announce(&mut self, actor: &str, name: &str) -> Result<()> {
        let d = self.d.announce(name)?;
        self.step(actor, format!("announce {name}"), &[name], d);
        Ok(())
    }

    /// `actor` overwrites its register `target` with `f(inputs)`.
    pub fn overwrite<F>(&mut self, actor: &str, inputs: &[&str], target: &str, op: impl Into<String>, f: F) -> Result<()>
    where
        F: Fn(&[u8]) -> u8,
    {
        let order: Vec<String> = self.d.names().iter().map(|s| s.to_string()).collect();
        let tmp = crate::measures::fresh_name(&self.d, &format!("{target}~"));
        let d = self
            .d
            .apply_bit_function(actor, inputs, &tmp, f)?
            .discard(&[target])?
            .rename(&tmp, target)?
            .reorder(&order)?;
        self.step(actor, op, &[], d);
        Ok(())
    }
}
