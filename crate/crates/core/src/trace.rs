//! Per-iteration run records shared by both solvers.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::graph::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<R> {
    pub records: Vec<R>,
    pub status: RunStatus,
    /// Best sign-rounded iterate seen during the run, when the method rounds
    /// by sign.
    pub incumbent: Option<Incumbent>,
}

/// A sign vector recorded during a run together with its objective and the
/// iteration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub partition: Partition,
    pub objective: f64,
    pub k: usize,
}

impl Incumbent {
    /// Replaces the incumbent when `objective` is strictly lower; earlier
    /// iterates win ties.
    pub(crate) fn offer(slot: &mut Option<Incumbent>, signs: &[f64], objective: f64, k: usize) {
        if slot.as_ref().is_none_or(|b| objective < b.objective) {
            *slot = Some(Incumbent {
                partition: Partition::from_signs(signs),
                objective,
                k,
            });
        }
    }
}

impl<R: Serialize> RunTrace<R> {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&R> {
        self.records.last()
    }

    /// One JSON object per line, one line per iteration.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
