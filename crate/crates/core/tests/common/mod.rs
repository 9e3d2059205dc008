#![allow(dead_code)]

use bqp_admm::rng::gaussian_matrix;
use bqp_admm::Graph;
use nalgebra::DMatrix;
use rand::Rng;
use sha2::{Digest, Sha256};

/// `(A + A^T) / 2` for a standard normal `A`.
pub fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = gaussian_matrix(n, n, rng);
    (&a + a.transpose()) * 0.5
}

/// Erdos-Renyi graph with edge probability `p` and weights uniform in
/// `(0, 1]`, with at least one edge.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j, 1.0 - rng.random::<f64>()));
                }
            }
        }
        if !edges.is_empty() || n < 2 {
            return Graph::new(n, edges).unwrap();
        }
    }
}

/// Unweighted `G(n, p)` with at least one edge.
pub fn random_unweighted_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j, 1.0));
                }
            }
        }
        if !edges.is_empty() || n < 2 {
            return Graph::new(n, edges).unwrap();
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Every sign vector of length `n`, first entry varying fastest.
pub fn all_sign_vectors(n: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..1u64 << n).map(move |mask| {
        (0..n)
            .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
            .collect()
    })
}
