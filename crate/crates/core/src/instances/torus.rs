//! Three-dimensional toroidal grid graphs with random weights, the family the
//! DIMACS `g3-*` and `pm3-*` instances come from.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TorusWeights {
    /// `-1` with the given probability, `+1` otherwise.
    PlusMinusOne { negative_fraction: f64 },
    /// `round(scale * N(0, 1))`; zero weights are kept.
    Gaussian { scale: f64 },
}

/// `side^3` nodes, each joined to its successor along every axis (with
/// wrap-around), giving `3 side^3` edges for `side >= 3`.
pub fn toroidal_grid_3d(side: usize, weights: TorusWeights, seed: u64) -> Result<Graph> {
    if side < 3 {
        return Err(Error::InvalidConfig(format!(
            "torus side must be at least 3, got {side}"
        )));
    }
    let mut rng = seeded(seed);
    let idx = |a: usize, b: usize, c: usize| a + side * (b + side * c);
    let mut edges = Vec::with_capacity(3 * side * side * side);
    for c in 0..side {
        for b in 0..side {
            for a in 0..side {
                let u = idx(a, b, c);
                for v in [
                    idx((a + 1) % side, b, c),
                    idx(a, (b + 1) % side, c),
                    idx(a, b, (c + 1) % side),
                ] {
                    let w = match weights {
                        TorusWeights::PlusMinusOne { negative_fraction } => {
                            if rng.random::<f64>() < negative_fraction {
                                -1.0
                            } else {
                                1.0
                            }
                        }
                        TorusWeights::Gaussian { scale } => {
                            let g: f64 = StandardNormal.sample(&mut rng);
                            (scale * g).round()
                        }
                    };
                    edges.push((u, v, w));
                }
            }
        }
    }
    Graph::new_signed(side * side * side, edges)
}
