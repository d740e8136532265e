//! Log-Sobolev, Talagrand and hypercontractivity checks.
//!
//! Every check returns a [`CheckReport`] whose pass flag is recomputable from
//! its `lhs`, `rhs` and `tolerance`. Gradients are edge subgradients and all
//! exponential integrals are evaluated in log space.

mod coupling;
mod semigroup;
mod suites;

pub use coupling::{hwi_coupling_check, scaling_exponent_probe, ScalingProbe};
pub use semigroup::{hc_to_lsi, hypercontractivity_curve, phi_monitor, Curve};
pub use suites::{lsi_implies_talagrand_suite, talagrand_implies_lsi_suite};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::ConvexOneDim;
use crate::hopf_lax::hopf_lax;
use crate::numeric;
use crate::report::{CheckReport, InputDigest};
use crate::space::{check_len, metric_subgradient, MetricSpace, Neighborhood, ProbabilityMeasure, ScalarField};
use crate::transport::{entropy, relative_entropy, wasserstein_p};

/// Entropies below this carry no information about the constant.
pub const ENTROPY_FLOOR: f64 = 1e-14;

pub(crate) fn require_q(q: f64) -> Result<()> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(invalid(format!(
            "q must lie in (1, 2]; no q-log-Sobolev inequality holds for q > 2, got {q}"
        )));
    }
    Ok(())
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `(Ent_μ(|f|^q), ∫ |∇⁻f|^q dμ)`; the entropy of an a.e. vanishing `f` is 0.
fn lsi_terms(space: &MetricSpace, mu: &ProbabilityMeasure, f: &ScalarField, q: f64) -> Result<(f64, f64)> {
    check_len(space.len(), f.len())?;
    check_len(space.len(), mu.len())?;
    let fq = f.map(|v| numeric::pow(v.abs(), q))?;
    let ent = match entropy(mu, &fq) {
        Ok(e) => e,
        Err(Error::UndefinedEntropy) => 0.0,
        Err(e) => return Err(e),
    };
    let grad = metric_subgradient(f, space, Neighborhood::Edges)?;
    let energy = mu.integrate(&grad.values().iter().map(|g| numeric::pow(*g, q)).collect::<Vec<_>>());
    Ok((ent, energy))
}

/// `(Ent_μ(e^{a f}), ∫ e^{a f} |∇⁻f|^q dμ)`.
pub(crate) fn lsi_terms_weighted(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    f: &ScalarField,
    a: f64,
    q: f64,
) -> Result<(f64, f64)> {
    check_len(space.len(), f.len())?;
    check_len(space.len(), mu.len())?;
    let e = f.map(|v| (a * v).exp())?;
    let ent = entropy(mu, &e)?;
    let grad = metric_subgradient(f, space, Neighborhood::Edges)?;
    let weighted: Vec<f64> = e.values().iter().zip(grad.values()).map(|(w, g)| w * numeric::pow(*g, q)).collect();
    Ok((ent, mu.integrate(&weighted)))
}

pub(crate) fn lsi_rhs_factor(q: f64, k: f64) -> f64 {
    (q - 1.0) * (q / k).powf(q - 1.0)
}

/// `Ent_μ(|f|^q) <= (q-1) (q/K)^{q-1} ∫ |∇⁻f|^q dμ`.
pub fn lsi_check(space: &MetricSpace, mu: &ProbabilityMeasure, f: &ScalarField, q: f64, k: f64) -> Result<CheckReport> {
    require_q(q)?;
    require_positive("K", k)?;
    let (ent, energy) = lsi_terms(space, mu, f, q)?;
    let rhs = lsi_rhs_factor(q, k) * energy;
    Ok(CheckReport::new("lsi", ent, rhs, 1e-9 * rhs + 1e-12)
        .constant("q", q)
        .constant("K", k)
        .detail("gradient_energy", energy)
        .digest(InputDigest::new("lsi").values(space.distances()).values(mu.weights()).values(f.values()).finish()))
}

/// Largest `K` for which every family member satisfies the q-LSI:
/// `min_f q ((q-1) ∫|∇⁻f|^q dμ / Ent_μ(|f|^q))^{1/(q-1)}`, skipping members
/// with entropy below [`ENTROPY_FLOOR`].
pub fn lsi_constant_estimate(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    family: &[ScalarField],
    q: f64,
) -> Result<f64> {
    require_q(q)?;
    let mut best = f64::INFINITY;
    for f in family {
        let (ent, energy) = lsi_terms(space, mu, f, q)?;
        if ent < ENTROPY_FLOOR {
            continue;
        }
        best = best.min(q * ((q - 1.0) * energy / ent).powf(1.0 / (q - 1.0)));
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NoInformation("every family member has negligible entropy".into()))
    }
}

pub(crate) fn require_talagrand_p(p: f64) -> Result<()> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(invalid(format!("the p-Talagrand inequality is defined for p >= 2, got {p}")));
    }
    Ok(())
}

/// `W_p(ν, μ)^p <= Ent_μ(dν/dμ) / K`, with the `1/p` inside the cost.
pub fn talagrand_check(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
    p: f64,
    k: f64,
) -> Result<CheckReport> {
    require_talagrand_p(p)?;
    require_positive("K", k)?;
    let ent = relative_entropy(nu, mu)?;
    let plan = wasserstein_p(nu, mu, space, p)?;
    Ok(CheckReport::new("talagrand", plan.value(), ent / k, 1e-10)
        .constant("p", p)
        .constant("K", k)
        .detail("entropy", ent)
        .detail("duality_gap", plan.duality_gap())
        .digest(InputDigest::new("talagrand").values(space.distances()).values(mu.weights()).values(nu.weights()).finish()))
}

/// `∫ e^{K Q_1 f} dμ <= e^{K ∫ f dμ}` with `L(u) = u^p / p`, compared in log
/// space: `lhs = log ∫ e^{K Q_1 f} dμ`, `rhs = K ∫ f dμ`.
pub fn talagrand_dual_check(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    f: &ScalarField,
    p: f64,
    k: f64,
) -> Result<CheckReport> {
    if !(p > 1.0) {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    require_positive("K", k)?;
    let q1 = hopf_lax(space, f, 1.0, &ConvexOneDim::power(p)?)?;
    let scaled: Vec<f64> = q1.u.values().iter().map(|v| k * v).collect();
    let lhs = numeric::log_mean_exp(mu.weights(), &scaled);
    let rhs = k * mu.integrate(f.values());
    Ok(CheckReport::new("talagrand_dual", lhs, rhs, (1e-9f64).ln_1p())
        .constant("p", p)
        .constant("K", k)
        .detail("log_space", true)
        .digest(InputDigest::new("talagrand_dual").values(space.distances()).values(mu.weights()).values(f.values()).finish()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{coordinate, exp_family, linspace};
    use crate::space::{build_grid_1d, gaussian_measure};

    fn gaussian_grid(n: usize) -> (MetricSpace, ProbabilityMeasure) {
        let s = build_grid_1d(-6.0, 6.0, n).unwrap();
        let mu = gaussian_measure(&s, 1.0, &[0.0]).unwrap();
        (s, mu)
    }

    #[test]
    fn constant_function_passes_trivially() {
        let (s, mu) = gaussian_grid(121);
        let r = lsi_check(&s, &mu, &ScalarField::constant(121, 2.0).unwrap(), 2.0, 1.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
    }

    #[test]
    fn q_above_two_is_rejected() {
        let (s, mu) = gaussian_grid(21);
        let f = ScalarField::constant(21, 1.0).unwrap();
        assert!(matches!(lsi_check(&s, &mu, &f, 2.5, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exponential_saturates_gaussian_lsi() {
        let (s, mu) = gaussian_grid(601);
        let f = ScalarField::from_coord(&s, |x| (x / 2.0).exp()).unwrap();
        let target = 0.5f64.exp() / 2.0;
        let r = lsi_check(&s, &mu, &f, 2.0, 1.0).unwrap();
        assert!((r.lhs / target - 1.0).abs() <= 0.02);
        assert!((r.rhs / target - 1.0).abs() <= 0.02);
        let r2 = lsi_check(&s, &mu, &f, 2.0, 2.0).unwrap();
        assert!(!r2.pass);
    }

    #[test]
    fn estimator_is_consistent_with_the_check() {
        let (s, mu) = gaussian_grid(301);
        let x = coordinate(&s, 0).unwrap();
        for q in [1.5, 2.0] {
            let fam = exp_family(&x, &linspace(0.2, 1.0, 5), q).unwrap();
            let k = lsi_constant_estimate(&s, &mu, &fam, q).unwrap();
            for f in &fam {
                let r = lsi_check(&s, &mu, f, q, k).unwrap();
                assert!(r.margin >= -1e-12 * r.rhs.max(1.0), "q={q}: {r:?}");
            }
        }
    }

    #[test]
    fn estimator_without_information_errors() {
        let (s, mu) = gaussian_grid(21);
        let fam = vec![ScalarField::constant(21, 3.0).unwrap()];
        assert!(matches!(lsi_constant_estimate(&s, &mu, &fam, 2.0), Err(Error::NoInformation(_))));
    }

    #[test]
    fn talagrand_basics() {
        let (s, mu) = gaussian_grid(121);
        let r = talagrand_check(&s, &mu, &mu, 2.0, 1.0).unwrap();
        assert!(r.pass && r.lhs == 0.0);
        assert!(matches!(talagrand_check(&s, &mu, &mu, 1.5, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dual_constant_is_equality() {
        let (s, mu) = gaussian_grid(121);
        let f = ScalarField::constant(121, 0.7).unwrap();
        let r = talagrand_dual_check(&s, &mu, &f, 2.0, 1.0).unwrap();
        assert!(r.pass);
        assert!((r.lhs - r.rhs).abs() < 1e-15);
    }
}
