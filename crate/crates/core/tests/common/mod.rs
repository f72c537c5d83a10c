//! Shared corpus and independent oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use hankel_core::families::{convex_from_starlike, kfold_koebe, starlike_from_herglotz};
use hankel_core::{HerglotzAtoms, SchlichtFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_4a11;
pub const ORDER: usize = 12;

/// `n` starlike functions from random atomic measures with 1..=4 atoms.
pub fn random_starlike(n: usize, seed: u64) -> Vec<SchlichtFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let k = 1 + i % 4;
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
            let atoms = HerglotzAtoms::from_angles(weights, &angles).unwrap();
            starlike_from_herglotz(&atoms, ORDER)
        })
        .collect()
}

/// Named groups: 100 starlike, their 100 convex transforms, k-fold Koebe
/// for k = 1..=4.
pub fn corpus() -> Vec<(String, Vec<SchlichtFunction>)> {
    let starlike = random_starlike(100, CORPUS_SEED);
    let convex = starlike.iter().map(|g| convex_from_starlike(g, ORDER).unwrap()).collect();
    let kfold = (1..=4).map(|k| kfold_koebe(k, ORDER).unwrap()).collect();
    vec![
        ("herglotz".to_string(), starlike),
        ("convex(herglotz)".to_string(), convex),
        ("kfold_koebe".to_string(), kfold),
    ]
}

pub fn flat_corpus() -> Vec<SchlichtFunction> {
    corpus().into_iter().flat_map(|(_, fs)| fs).collect()
}

fn psi_raw(t: f64, s: f64) -> f64 {
    (1.0 - t * t - 3.0 * s * s).max(0.0).sqrt() + 5f64.sqrt() * t * s
}

fn s_edge(t: f64) -> f64 {
    (1.0 - t * t).max(0.0).sqrt() / 3f64.sqrt()
}

/// Brute-force maximum of `psi`: a 2000 x 2000 grid in domain-adapted
/// coordinates `(t, u * s_edge(t))`, followed by repeated 41 x 41 zooms.
pub fn psi_grid_oracle() -> (f64, f64, f64) {
    let n = 2000;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let edge = s_edge(t);
        for j in 0..n {
            let s = edge * j as f64 / (n - 1) as f64;
            let v = psi_raw(t, s);
            if v > best.0 {
                best = (v, t, s);
            }
        }
    }
    let mut w = 1e-3;
    while w > 1e-13 {
        let (_, bt, bs) = best;
        for a in 0..41 {
            let t = (bt - w + 2.0 * w * a as f64 / 40.0).clamp(0.0, 1.0);
            for b in 0..41 {
                let s = bs - w + 2.0 * w * b as f64 / 40.0;
                if s < 0.0 || s > s_edge(t) {
                    continue;
                }
                let v = psi_raw(t, s);
                if v > best.0 {
                    best = (v, t, s);
                }
            }
        }
        w /= 10.0;
    }
    best
}

/// Frozen output of [`psi_grid_oracle`] (and of an independent numpy run).
pub const PSI_ORACLE_MAX: f64 = 1.0327955589886446;
pub const PSI_ORACLE_ARG: (f64, f64) = (0.447213592, 0.258198887);
