use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::rng::seeded;

/// Two-community stochastic block model. Nodes `0..m` form the first
/// community; the rest form the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub n: usize,
    /// Size of the smaller community.
    pub m: usize,
    /// Intra-community edge probability.
    pub p: f64,
    /// Inter-community edge probability.
    pub q: f64,
    pub seed: u64,
}

impl SbmSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.q && self.q < self.p && self.p < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "SBM needs 0 < q < p < 1, got p = {}, q = {}",
                self.p, self.q
            )));
        }
        if self.m == 0 || 2 * self.m > self.n {
            return Err(Error::InvalidConfig(format!(
                "SBM needs 1 <= m <= n/2, got n = {}, m = {}",
                self.n, self.m
            )));
        }
        Ok(())
    }

    pub fn ground_truth(&self) -> Partition {
        Partition::new(
            (0..self.n)
                .map(|i| if i < self.m { 1 } else { -1 })
                .collect(),
        )
        .expect("labels are +-1")
    }
}

/// Samples every pair independently (unit weights) and returns the graph with
/// its planted labels.
pub fn sbm_generate(spec: &SbmSpec) -> Result<(Graph, Partition)> {
    spec.validate()?;
    let mut rng = seeded(spec.seed);
    let mut edges = Vec::new();
    for i in 0..spec.n {
        for j in (i + 1)..spec.n {
            let same = (i < spec.m) == (j < spec.m);
            let prob = if same { spec.p } else { spec.q };
            if rng.random::<f64>() < prob {
                edges.push((i, j, 1.0));
            }
        }
    }
    Ok((Graph::new(spec.n, edges)?, spec.ground_truth()))
}
