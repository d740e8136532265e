//! Seeded generators for test functions and perturbed measures.
//!
//! On `grid1d` spaces the generators act on the coordinate; elsewhere they
//! act on the distance to randomly drawn anchor points.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{build_graph, lipschitz_constant, MetricSpace, ProbabilityMeasure, ScalarField, SpaceKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinate `k` of every point.
pub fn coordinate(space: &MetricSpace, k: usize) -> Result<Vec<f64>> {
    (0..space.len())
        .map(|x| {
            space
                .coords(x)
                .and_then(|c| c.get(k).copied())
                .ok_or_else(|| Error::Unsupported(format!("point {x} has no coordinate {k}")))
        })
        .collect()
}

fn feature(space: &MetricSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if space.kind() == SpaceKind::Grid1d {
        if let Ok(x) = coordinate(space, 0) {
            return x;
        }
    }
    let anchor = rng.gen_range(0..space.len());
    space.row(anchor).to_vec()
}

/// Connected graph on `n` vertices: a random spanning tree plus `n` random
/// chords, edge lengths uniform in `[0.5, 1.5]`.
pub fn random_graph(n: usize, seed: u64) -> Result<MetricSpace> {
    let mut r = rng(seed);
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|v| (r.gen_range(0..v), v, r.gen_range(0.5..1.5))).collect();
    for _ in 0..n {
        let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
        if u != v {
            edges.push((u, v, r.gen_range(0.5..1.5)));
        }
    }
    build_graph(n, &edges)
}

/// `e^{λ s / q}` for each `λ`, where `s` is a per-point feature.
pub fn exp_family(feature: &[f64], lambdas: &[f64], q: f64) -> Result<Vec<ScalarField>> {
    lambdas
        .iter()
        .map(|l| ScalarField::new(feature.iter().map(|s| (l * s / q).exp()).collect()))
        .collect()
}

/// `count` evenly spaced values in `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// Sums of four sinusoids rescaled to a Lipschitz constant drawn from
/// `[lip_lo, lip_hi]`. Each field uses its own stream `seed + index`.
pub fn random_lipschitz(
    space: &MetricSpace,
    count: usize,
    seed: u64,
    lip_lo: f64,
    lip_hi: f64,
) -> Result<Vec<ScalarField>> {
    (0..count)
        .map(|k| {
            let mut r = rng(seed.wrapping_add(k as u64));
            let mut vals = vec![0.0; space.len()];
            for _ in 0..4 {
                let s = feature(space, &mut r);
                let amp = r.gen_range(-1.0..1.0);
                let omega = r.gen_range(0.5..3.0);
                let phase = r.gen_range(0.0..TAU);
                for (v, x) in vals.iter_mut().zip(&s) {
                    *v += amp * (omega * x + phase).sin();
                }
            }
            let f = ScalarField::new(vals)?;
            let lip = lipschitz_constant(&f, space);
            let target = r.gen_range(lip_lo..=lip_hi);
            if lip > 0.0 {
                f.map(|v| v * target / lip)
            } else {
                Ok(f)
            }
        })
        .collect()
}

/// `ν ∝ μ (1 + Σ a_k sin(ω_k s + φ_k))` with one to three terms,
/// `a_k ∈ [0.2, 0.6]` rescaled so that `Σ a_k <= 0.8`, and `ω_k ∈ [0.5, 3]`.
pub fn trig_perturbations(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    count: usize,
    seed: u64,
) -> Result<Vec<ProbabilityMeasure>> {
    (0..count)
        .map(|k| {
            let mut r = rng(seed.wrapping_add(k as u64));
            let terms = r.gen_range(1..=3);
            let mut amps: Vec<f64> = (0..terms).map(|_| r.gen_range(0.2..0.6)).collect();
            let total: f64 = amps.iter().sum();
            if total > 0.8 {
                amps.iter_mut().for_each(|a| *a *= 0.8 / total);
            }
            let mut density = vec![1.0; space.len()];
            for a in amps {
                let s = feature(space, &mut r);
                let omega = r.gen_range(0.5..3.0);
                let phase = r.gen_range(0.0..TAU);
                for (d, x) in density.iter_mut().zip(&s) {
                    *d += a * (omega * x + phase).sin();
                }
            }
            mu.reweighted(&density)
        })
        .collect()
}

/// `ν ∝ μ e^{λ s}` for each `λ`.
pub fn exponential_tilts(mu: &ProbabilityMeasure, feature: &[f64], lambdas: &[f64]) -> Result<Vec<ProbabilityMeasure>> {
    lambdas
        .iter()
        .map(|l| {
            let logs: Vec<f64> = mu
                .weights()
                .iter()
                .zip(feature)
                .map(|(w, s)| if *w > 0.0 { w.ln() + l * s } else { f64::NEG_INFINITY })
                .collect();
            ProbabilityMeasure::from_log_masses(&logs)
        })
        .collect()
}

/// Pairs of Gaussians with centers in `[-1.5, 1.5]` and widths in
/// `[0.6, 1.2]`, for geodesic convexity audits on a line grid.
pub fn gaussian_endpoint_pairs(
    space: &MetricSpace,
    count: usize,
    seed: u64,
) -> Result<Vec<(ProbabilityMeasure, ProbabilityMeasure)>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let mut draw = || -> Result<ProbabilityMeasure> {
                let c = r.gen_range(-1.5..1.5);
                let s = r.gen_range(0.6..1.2);
                crate::space::gaussian_measure(space, s, &[c])
            };
            Ok((draw()?, draw()?))
        })
        .collect()
}
