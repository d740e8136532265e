use serde::Serialize;

use super::{lsi_terms_weighted, require_positive, require_q};
use crate::error::{invalid, Result};
use crate::hamiltonian::{conjugate_exponent, ConvexOneDim};
use crate::hopf_lax::hopf_lax;
use crate::numeric;
use crate::report::{CheckReport, InputDigest};
use crate::space::{MetricSpace, ProbabilityMeasure, ScalarField};

/// Sampled curve `(t, value)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
}

fn require_ascending(ts: &[f64]) -> Result<()> {
    if ts.is_empty() || ts[0] <= 0.0 || ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("times must be positive and strictly ascending"));
    }
    Ok(())
}

fn digest(tag: &str, space: &MetricSpace, mu: &ProbabilityMeasure, f: &ScalarField, params: &[f64]) -> String {
    InputDigest::new(tag)
        .values(space.distances())
        .values(mu.weights())
        .values(f.values())
        .values(params)
        .finish()
}

/// `log ‖e^{Q_t f}‖_λ = (1/λ) log ∫ e^{λ Q_t f} dμ`; `t = 0` means `f` itself.
fn log_norm(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    f: &ScalarField,
    l: &ConvexOneDim,
    t: f64,
    lambda: f64,
) -> Result<f64> {
    let u = if t == 0.0 { f.clone() } else { hopf_lax(space, f, t, l)?.u };
    // Shifting by the maximum keeps constant inputs exact.
    let top = mu
        .weights()
        .iter()
        .zip(u.values())
        .filter(|(w, _)| **w > 0.0)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = u.values().iter().map(|v| lambda * (v - top)).collect();
    Ok(top + numeric::log_mean_exp(mu.weights(), &scaled) / lambda)
}

/// Hypercontractivity `F(t) = ‖e^{Q_t f}‖_{a + ρ t}` along `ts`.
///
/// `lhs` is the largest increase of `log F` between consecutive samples, or
/// from `t = 0` to the last sample; it is compared with `0` under a relative
/// slack of `1e-6`. The returned curve holds `F(t)` for `t = 0` and `ts`.
pub fn hypercontractivity_curve(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    f: &ScalarField,
    a: f64,
    rho: f64,
    q: f64,
    ts: &[f64],
) -> Result<(CheckReport, Curve)> {
    require_q(q)?;
    require_ascending(ts)?;
    let l = ConvexOneDim::power(conjugate_exponent(q))?;
    let mut times = vec![0.0];
    times.extend_from_slice(ts);
    let mut logs = Vec::with_capacity(times.len());
    for &t in &times {
        let lambda = a + rho * t;
        if !(lambda > 0.0) {
            return Err(invalid(format!("exponent a + rho t = {lambda} must be positive at t = {t}")));
        }
        logs.push(log_norm(space, mu, f, &l, t, lambda)?);
    }
    let mut worst = logs[logs.len() - 1] - logs[0];
    for k in 1..logs.len() - 1 {
        worst = worst.max(logs[k + 1] - logs[k]);
    }
    let report = CheckReport::new("hypercontractivity", worst, 0.0, (1e-6f64).ln_1p())
        .constant("a", a)
        .constant("rho", rho)
        .constant("q", q)
        .detail("log_space", true)
        .digest(digest("hypercontractivity", space, mu, f, &[&[a, rho, q][..], ts].concat()));
    Ok((report, Curve { t: times, value: logs.iter().map(|v| v.exp()).collect() }))
}

/// The `t = 0` derivative of the hypercontractive norm:
/// `ρ Ent_μ(e^{a f}) <= a² ∫ e^{a f} |∇⁻f|^q / q dμ`. Also returns the constant
/// `K₀ = (ρ (q-1) / a^{2-q})^{1/(q-1)}` that makes the constant relation an
/// equality.
pub fn hc_to_lsi(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    f: &ScalarField,
    a: f64,
    rho: f64,
    q: f64,
) -> Result<(CheckReport, f64)> {
    require_q(q)?;
    require_positive("a", a)?;
    require_positive("rho", rho)?;
    let (ent, weighted_energy) = lsi_terms_weighted(space, mu, f, a, q)?;
    let lhs = rho * ent;
    let rhs = a * a * weighted_energy / q;
    let k0 = (rho * (q - 1.0) / a.powf(2.0 - q)).powf(1.0 / (q - 1.0));
    let report = CheckReport::new("hc_to_lsi", lhs, rhs, 1e-9 * rhs + 1e-12)
        .constant("a", a)
        .constant("rho", rho)
        .constant("q", q)
        .constant("K0", k0)
        .digest(digest("hc_to_lsi", space, mu, f, &[a, rho, q]));
    Ok((report, k0))
}

/// `φ(t) = (1 / (K t^n)) log ∫ e^{K t^n Q_t f} dμ`, `n = 1/(q-1)`, sampled on
/// `ts` and always at `t = 1`.
///
/// `lhs` is the larger of the worst relative increase between consecutive
/// samples and `φ(1) - ∫ f dμ`; both are compared with `0` within `1e-6`.
pub fn phi_monitor(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    f: &ScalarField,
    k: f64,
    q: f64,
    ts: &[f64],
) -> Result<(CheckReport, Curve)> {
    require_q(q)?;
    require_positive("K", k)?;
    require_ascending(ts)?;
    if ts[ts.len() - 1] > 1.0 {
        return Err(invalid("phi is sampled on (0, 1]"));
    }
    let n = 1.0 / (q - 1.0);
    let l = ConvexOneDim::power(conjugate_exponent(q))?;
    let mut times = ts.to_vec();
    if times[times.len() - 1] != 1.0 {
        times.push(1.0);
    }
    let phis = times
        .iter()
        .map(|&t| log_norm(space, mu, f, &l, t, k * t.powf(n)))
        .collect::<Result<Vec<f64>>>()?;
    let mean = mu.integrate(f.values());
    let mut worst = phis[phis.len() - 1] - mean;
    for w in phis.windows(2) {
        worst = worst.max((w[1] - w[0]) / w[0].abs().max(1.0));
    }
    let report = CheckReport::new("phi_monitor", worst, 0.0, 1e-6)
        .constant("K", k)
        .constant("q", q)
        .constant("n", n)
        .detail("mean_f", mean)
        .digest(digest("phi_monitor", space, mu, f, &[&[k, q][..], ts].concat()));
    Ok((report, Curve { t: times, value: phis }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_1d, gaussian_measure};

    #[test]
    fn constant_function_gives_constant_curves() {
        let s = build_grid_1d(-4.0, 4.0, 81).unwrap();
        let mu = gaussian_measure(&s, 1.0, &[0.0]).unwrap();
        let f = ScalarField::constant(81, 0.8).unwrap();
        let ts: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let (r, curve) = hypercontractivity_curve(&s, &mu, &f, 1.0, 1.0, 2.0, &ts).unwrap();
        assert!(r.pass);
        assert!(curve.value.iter().all(|v| *v == curve.value[0]));
        let (r, curve) = phi_monitor(&s, &mu, &f, 1.0, 2.0, &ts).unwrap();
        assert!(r.pass);
        assert!(curve.value.iter().all(|v| (*v - 0.8).abs() < 1e-15));
        let (r, _) = hc_to_lsi(&s, &mu, &f, 1.0, 1.0, 2.0).unwrap();
        assert!(r.pass && r.lhs.abs() < 1e-15 && r.rhs == 0.0);
    }

    #[test]
    fn recovered_constants() {
        let s = build_grid_1d(-1.0, 1.0, 5).unwrap();
        let mu = ProbabilityMeasure::uniform(5).unwrap();
        let f = ScalarField::constant(5, 0.0).unwrap();
        let (_, k) = hc_to_lsi(&s, &mu, &f, 1.0, 1.0, 2.0).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        let (_, k) = hc_to_lsi(&s, &mu, &f, 1.0, 1.0, 1.5).unwrap();
        assert!((k - 0.25).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_exponent_is_rejected() {
        let s = build_grid_1d(-1.0, 1.0, 5).unwrap();
        let mu = ProbabilityMeasure::uniform(5).unwrap();
        let f = ScalarField::constant(5, 0.0).unwrap();
        assert!(hypercontractivity_curve(&s, &mu, &f, -1.0, 0.5, 2.0, &[0.5, 1.0]).is_err());
    }
}
