#![allow(dead_code)]

use gopt::mopt::MoptProblem;
use gopt::{CostMatrix, DiscreteMeasure, GoptProblem, PenaltyKind};
use ndarray::{Array1, Array2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, m), |_| rng.random_range(lo..hi))
}

pub fn vector(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Array1<f64> {
    Array1::from_shape_fn(n, |_| rng.random_range(lo..hi))
}

pub fn measure(rng: &mut ChaCha8Rng, n: usize) -> DiscreteMeasure {
    DiscreteMeasure::new(vector(rng, n, 0.1, 2.0)).unwrap()
}

/// Costs in [0, 10], lambda in [0, 5], masses in [0.1, 2], sizes up to `max_size`.
pub fn gopt_instance(
    rng: &mut ChaCha8Rng,
    max_size: usize,
    penalty1: PenaltyKind,
    penalty2: PenaltyKind,
) -> GoptProblem {
    let n = rng.random_range(1..=max_size);
    let m = rng.random_range(1..=max_size);
    let c = matrix(rng, n, m, 0.0, 10.0);
    let p = measure(rng, n);
    let q = measure(rng, m);
    let l1 = vector(rng, n, 0.0, 5.0);
    let l2 = vector(rng, m, 0.0, 5.0);
    GoptProblem::new(
        CostMatrix::new(c).unwrap(),
        p,
        q,
        l1,
        l2,
        penalty1,
        penalty2,
    )
    .unwrap()
}

pub fn ptv_instance(rng: &mut ChaCha8Rng, max_size: usize) -> GoptProblem {
    gopt_instance(rng, max_size, PenaltyKind::Ptv, PenaltyKind::Ptv)
}

/// Measures with `sum q <= sum p`.
pub fn dominated_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
) -> (DiscreteMeasure, DiscreteMeasure) {
    let p = vector(rng, n, 0.1, 2.0);
    let mut q = vector(rng, m, 0.1, 2.0);
    if q.sum() > p.sum() {
        q *= p.sum() / q.sum() * rng.random_range(0.5..1.0);
    }
    (
        DiscreteMeasure::new(p).unwrap(),
        DiscreteMeasure::new(q).unwrap(),
    )
}

pub fn mopt_instance(rng: &mut ChaCha8Rng, max_size: usize, cost_hi: f64) -> MoptProblem {
    let n = rng.random_range(1..=max_size);
    let m = rng.random_range(1..=max_size);
    let c = matrix(rng, n, m, 0.0, cost_hi);
    let p = measure(rng, n);
    let q = measure(rng, m);
    let eta = 0.5 * p.mass().min(q.mass());
    MoptProblem::new(CostMatrix::new(c).unwrap(), p, q, eta).unwrap()
}

pub fn max_abs(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}
