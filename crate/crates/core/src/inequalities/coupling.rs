use serde::Serialize;

use super::require_talagrand_p;
use crate::error::{invalid, Result};
use crate::hamiltonian::conjugate_exponent;
use crate::numeric;
use crate::report::{CheckReport, InputDigest};
use crate::space::{check_len, metric_subgradient, MetricSpace, Neighborhood, ProbabilityMeasure, ScalarField};
use crate::transport::{entropy, wasserstein_p};

/// Relative tolerance on the coupling bounds, covering the one-sided
/// difference quotients.
pub const HWI_RTOL: f64 = 0.05;

/// Entropy bound along the optimal coupling `π` of `(ν, μ)`, `ν = f μ / ∫ f dμ`:
///
/// `U_μ(ν) <= ∬ (|∇⁻f| / f)(x₀) d(x₀, x₁) dπ` and its Hölder form
/// `U_μ(ν) <= p^{1/p} W_p(μ, ν) (∫ |∇⁻f|^q / f^{q-1} dμ)^{1/q}`.
///
/// The report compares `U_μ(ν)` with the smaller right-hand side, so it passes
/// exactly when both bounds hold within `5% rhs + 1e-10`.
pub fn hwi_coupling_check(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    f: &ScalarField,
    p: f64,
) -> Result<CheckReport> {
    check_len(space.len(), f.len())?;
    if !(p > 1.0) {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    for (x, (w, v)) in mu.weights().iter().zip(f.values()).enumerate() {
        if *w > 0.0 && !(*v > 0.0) {
            return Err(invalid(format!("density must be positive on the support; f({x}) = {v}")));
        }
    }
    let q = conjugate_exponent(p);
    let mass = mu.integrate(f.values());
    let density = f.map(|v| v / mass)?;
    let nu = mu.reweighted(density.values())?;
    let u = entropy(mu, &density)?;
    let grad = metric_subgradient(&density, space, Neighborhood::Edges)?;
    let ratio: Vec<f64> = grad
        .values()
        .iter()
        .zip(density.values())
        .map(|(g, d)| if *d > 0.0 { g / d } else { 0.0 })
        .collect();
    let plan = wasserstein_p(&nu, mu, space, p)?;
    let coupling = numeric::sum(
        plan.triplets().into_iter().map(|(x0, x1, m)| m * ratio[x0] * space.dist(x0, x1)),
    );
    let fisher: Vec<f64> = grad
        .values()
        .iter()
        .zip(density.values())
        .map(|(g, d)| if *d > 0.0 { numeric::pow(*g, q) / d.powf(q - 1.0) } else { 0.0 })
        .collect();
    let holder = p.powf(1.0 / p) * plan.distance() * mu.integrate(&fisher).powf(1.0 / q);
    let rhs = coupling.min(holder);
    Ok(CheckReport::new("hwi_coupling", u, rhs, HWI_RTOL * rhs + 1e-10)
        .constant("p", p)
        .constant("q", q)
        .detail("coupling_rhs", coupling)
        .detail("holder_rhs", holder)
        .detail("w_p", plan.distance())
        .digest(InputDigest::new("hwi").values(space.distances()).values(mu.weights()).values(f.values()).scalar(p).finish()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingProbe {
    pub slope_ent: f64,
    pub slope_wp: f64,
    pub eps: Vec<f64>,
    pub entropy: Vec<f64>,
    /// `W_p(ν_ε, μ)^p` with the `1/p` cost.
    pub wp_pow: Vec<f64>,
}

/// Log-log slopes of `Ent_μ(1 + ε g̃)` and `W_p(ν_ε, μ)^p` against `ε`, where
/// `g̃ = g - ∫ g dμ` and `ν_ε = (1 + ε g̃) μ`.
pub fn scaling_exponent_probe(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    g: &ScalarField,
    p: f64,
    eps_list: &[f64],
) -> Result<ScalingProbe> {
    require_talagrand_p(p)?;
    check_len(space.len(), g.len())?;
    if eps_list.len() < 2 || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(invalid("need at least two positive perturbation sizes"));
    }
    let mean = mu.integrate(g.values());
    let centered = g.map(|v| v - mean)?;
    let spread = mu
        .weights()
        .iter()
        .zip(centered.values())
        .filter(|(w, _)| **w > 0.0)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    if spread < 1e-14 {
        return Err(invalid("g is constant on the support; there is no perturbation"));
    }
    let mut entropy_v = Vec::with_capacity(eps_list.len());
    let mut wp = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let density = centered.map(|v| 1.0 + eps * v)?;
        if mu.weights().iter().zip(density.values()).any(|(w, d)| *w > 0.0 && !(*d > 0.0)) {
            return Err(invalid(format!("density 1 + eps g is not positive for eps = {eps}")));
        }
        let nu = mu.reweighted(density.values())?;
        entropy_v.push(entropy(mu, &density)?);
        wp.push(wasserstein_p(&nu, mu, space, p)?.value());
    }
    let le: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let slope_ent = numeric::ls_slope(&le, &entropy_v.iter().map(|v| v.ln()).collect::<Vec<_>>());
    let slope_wp = numeric::ls_slope(&le, &wp.iter().map(|v| v.ln()).collect::<Vec<_>>());
    Ok(ScalingProbe { slope_ent, slope_wp, eps: eps_list.to_vec(), entropy: entropy_v, wp_pow: wp })
}
