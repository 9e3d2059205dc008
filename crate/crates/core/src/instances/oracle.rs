//! Exact minimization of `x^T C x` by enumeration, and the random-guess
//! baseline.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{objective, quad_form, CostMatrix, Partition};
use crate::rng::seeded;

pub const BRUTE_FORCE_CAP: usize = 22;

/// Enumerates all sign vectors with `x_0 = +1` (the objective is invariant
/// under a global flip). The search is split across threads by the leading
/// free bits; each block walks a Gray code updating `C x` incrementally.
///
/// Ties are broken towards the lexicographically smallest partition
/// (`-1 < +1`), which makes the result independent of thread scheduling.
pub fn brute_force(cost: &CostMatrix) -> Result<(Partition, f64)> {
    let n = cost.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    if n == 0 {
        return Err(Error::InvalidConfig("empty cost matrix".into()));
    }
    let free = n - 1;
    let split = free.min(6);
    let low = free - split;

    let best = (0..1usize << split)
        .into_par_iter()
        .map(|high| search_block(cost, high, split, low))
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .expect("at least one block");

    let p = Partition::new(best.1).expect("labels are +-1");
    let value = objective(cost, &p)?;
    Ok((p, value))
}

fn better(a: &(f64, Vec<i8>), b: &(f64, Vec<i8>)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.1 < b.1,
    }
}

/// Node 0 is fixed to +1, nodes `1..=low` follow the Gray code, and the
/// remaining `split` nodes take their signs from the bits of `high`.
fn search_block(cost: &CostMatrix, high: usize, split: usize, low: usize) -> (f64, Vec<i8>) {
    let c = cost.matrix();
    let n = cost.n();
    let mut x = vec![1.0f64; n];
    for b in 0..split {
        if high >> b & 1 == 1 {
            x[1 + low + b] = -1.0;
        }
    }
    let mut h: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| c[(i, j)] * x[j]).sum())
        .collect();
    let mut value: f64 = x.iter().zip(&h).map(|(a, b)| a * b).sum();
    let labels =
        |x: &[f64]| -> Vec<i8> { x.iter().map(|&v| if v > 0.0 { 1 } else { -1 }).collect() };
    let mut best = (value, labels(&x));

    for step in 1usize..(1usize << low) {
        let i = 1 + step.trailing_zeros() as usize;
        let xi = x[i];
        value -= 4.0 * xi * (h[i] - c[(i, i)] * xi);
        let col = c.column(i);
        for (hj, &cji) in h.iter_mut().zip(col.iter()) {
            *hj -= 2.0 * cji * xi;
        }
        x[i] = -xi;
        if value <= best.0 {
            let cand = (value, labels(&x));
            if better(&cand, &best) {
                best = cand;
            }
        }
    }
    best
}

/// Best of `guesses` uniformly random sign vectors.
pub fn best_random_guess(cost: &CostMatrix, guesses: usize, seed: u64) -> Result<(Partition, f64)> {
    if guesses == 0 {
        return Err(Error::InvalidConfig("need at least one guess".into()));
    }
    let n = cost.n();
    let mut rng = seeded(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..guesses {
        let x: Vec<f64> = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let v = quad_form(cost.matrix(), &x);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x));
        }
    }
    let (v, x) = best.expect("guesses > 0");
    Ok((Partition::from_signs(&x), v))
}
