//! Relative entropy and exact optimal transport with the cost `d(x, y)^p / p`.
//!
//! The cost carries the `1/p` factor, so for two point masses at distance `r`
//! the distance is `W_p = r / p^{1/p}`, not `r`.

mod line;
mod simplex;

pub use line::{displacement_interpolate_1d, entropy_along_geodesic, wasserstein_1d};

use crate::error::{invalid, Error, Result};
use crate::numeric;
use crate::report::{CheckReport, InputDigest};
use crate::space::{check_len, MetricSpace, ProbabilityMeasure, ScalarField};

/// Maximum tolerated duality gap of a returned plan.
pub const GAP_LIMIT: f64 = 1e-8;
/// Tolerance for marginals and dual feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-10;
/// Floor applied to `log 0` in the optimal variational test function.
pub const LOG_FLOOR: f64 = -700.0;

/// `Ent_μ(h) = ∫ h log h dμ - (∫ h dμ) log ∫ h dμ` with `0 log 0 = 0`.
///
/// Evaluated as `Σ μ (h log(h/m) - h + m)`, `m = ∫ h dμ`, whose terms are
/// individually nonnegative.
pub fn entropy(mu: &ProbabilityMeasure, h: &ScalarField) -> Result<f64> {
    check_len(mu.len(), h.len())?;
    if let Some((i, v)) = h.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(invalid(format!("entropy needs h >= 0; h({i}) = {v}")));
    }
    let m = mu.integrate(h.values());
    if !(m > 0.0) {
        return Err(Error::UndefinedEntropy);
    }
    Ok(numeric::sum(mu.weights().iter().zip(h.values()).map(|(w, &x)| {
        let t = if x > 0.0 { x * (x / m).ln() - x + m } else { m };
        w * t
    })))
}

/// `U_μ(ν) = Ent_μ(dν/dμ)`.
pub fn relative_entropy(nu: &ProbabilityMeasure, mu: &ProbabilityMeasure) -> Result<f64> {
    entropy(mu, &mu.density_of(nu)?)
}

/// `ψ* = log(φ / ∫ φ dμ)`, floored at [`LOG_FLOOR`].
pub fn optimal_test_function(mu: &ProbabilityMeasure, phi: &ScalarField) -> Result<ScalarField> {
    let m = mu.integrate(phi.values());
    if !(m > 0.0) {
        return Err(Error::UndefinedEntropy);
    }
    phi.map(|x| if x > 0.0 { (x / m).ln().max(LOG_FLOOR) } else { LOG_FLOOR })
}

/// Variational bound `∫ ψ φ dμ <= Ent_μ(φ)` for `∫ e^ψ dμ <= 1`.
///
/// An infeasible `ψ` yields a failing report flagged `constraint_violation`.
pub fn entropy_variational_bound(
    mu: &ProbabilityMeasure,
    phi: &ScalarField,
    psi: &ScalarField,
) -> Result<CheckReport> {
    check_len(mu.len(), psi.len())?;
    let ent = entropy(mu, phi)?;
    let log_z = numeric::log_mean_exp(mu.weights(), psi.values());
    let feasible = log_z <= (1e-12f64).ln_1p();
    let lhs = mu.integrate(&phi.values().iter().zip(psi.values()).map(|(a, b)| a * b).collect::<Vec<_>>());
    let psi_star = optimal_test_function(mu, phi)?;
    let star = mu.integrate(&phi.values().iter().zip(psi_star.values()).map(|(a, b)| a * b).collect::<Vec<_>>());
    let digest = InputDigest::new("entropy_variational")
        .values(mu.weights())
        .values(phi.values())
        .values(psi.values())
        .finish();
    let report = if feasible {
        CheckReport::new("entropy_variational", lhs, ent, 1e-10)
    } else {
        let mut r = CheckReport::new("entropy_variational", f64::INFINITY, ent, 1e-10);
        r.lhs = lhs;
        r
    };
    Ok(report
        .detail("log_partition", log_z)
        .detail("constraint_violation", !feasible)
        .detail("psi_star_gap", (star - ent).abs())
        .digest(digest))
}

/// Optimal coupling with its dual certificate.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    n: usize,
    plan: Vec<f64>,
    value: f64,
    f: Vec<f64>,
    g: Vec<f64>,
    p: f64,
    gap: f64,
    pivots: usize,
}

/// Measured optimality conditions of a plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub max_marginal_error: f64,
    pub min_entry: f64,
    pub max_dual_violation: f64,
    pub duality_gap: f64,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.max_marginal_error <= FEASIBILITY_TOL
            && self.min_entry >= 0.0
            && self.max_dual_violation <= FEASIBILITY_TOL
            && self.duality_gap <= GAP_LIMIT
    }
}

impl TransportPlan {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Dense `n x n` plan, row-major, rows indexed by the source measure.
    pub fn plan(&self) -> &[f64] {
        &self.plan
    }

    pub fn mass(&self, x: usize, y: usize) -> f64 {
        self.plan[x * self.n + y]
    }

    /// `∬ d^p / p dπ`, i.e. `W_p^p`.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// `W_p`.
    pub fn distance(&self) -> f64 {
        self.value.max(0.0).powf(1.0 / self.p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `(f, g)` with `g(y) - f(x) <= d(x, y)^p / p`; dual value `∫ g dν - ∫ f dμ`.
    pub fn potentials(&self) -> (&[f64], &[f64]) {
        (&self.f, &self.g)
    }

    pub fn duality_gap(&self) -> f64 {
        self.gap
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    /// Nonzero entries as `(source, target, mass)`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                let m = self.plan[x * self.n + y];
                if m > 0.0 {
                    out.push((x, y, m));
                }
            }
        }
        out
    }

    /// Recomputes marginals, nonnegativity, dual feasibility and the gap.
    pub fn certify(&self, mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, space: &MetricSpace) -> Certificate {
        let n = self.n;
        let mut max_marginal_error = 0.0f64;
        for x in 0..n {
            let row = numeric::sum(self.plan[x * n..(x + 1) * n].iter().copied());
            max_marginal_error = max_marginal_error.max((row - mu.weights()[x]).abs());
        }
        for y in 0..n {
            let col = numeric::sum((0..n).map(|x| self.plan[x * n + y]));
            max_marginal_error = max_marginal_error.max((col - nu.weights()[y]).abs());
        }
        let min_entry = self.plan.iter().copied().fold(f64::INFINITY, f64::min);
        let mut max_dual_violation = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                let c = numeric::pow(space.dist(x, y), self.p) / self.p;
                max_dual_violation = max_dual_violation.max(self.g[y] - self.f[x] - c);
            }
        }
        let primal = numeric::sum((0..n * n).map(|k| {
            self.plan[k] * numeric::pow(space.dist(k / n, k % n), self.p) / self.p
        }));
        let dual = mu_nu_dual(mu, nu, &self.f, &self.g);
        Certificate { max_marginal_error, min_entry, max_dual_violation, duality_gap: (primal - dual).abs() }
    }
}

fn mu_nu_dual(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, f: &[f64], g: &[f64]) -> f64 {
    nu.integrate(g) - mu.integrate(f)
}

/// Exact `W_p` between two measures on the same space, with cost `d^p / p`.
pub fn wasserstein_p(
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
    space: &MetricSpace,
    p: f64,
) -> Result<TransportPlan> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must be at least 1, got {p}")));
    }
    let n = space.len();
    check_len(n, mu.len())?;
    check_len(n, nu.len())?;
    let src: Vec<usize> = (0..n).filter(|&x| mu.weights()[x] > 0.0).collect();
    let tgt: Vec<usize> = (0..n).filter(|&y| nu.weights()[y] > 0.0).collect();
    let a: Vec<f64> = src.iter().map(|&x| mu.weights()[x]).collect();
    let b: Vec<f64> = tgt.iter().map(|&y| nu.weights()[y]).collect();
    let cost_of = |x: usize, y: usize| numeric::pow(space.dist(x, y), p) / p;
    let mut cost = Vec::with_capacity(src.len() * tgt.len());
    for &x in &src {
        for &y in &tgt {
            cost.push(cost_of(x, y));
        }
    }
    let max_pivots = 10_000_000usize.max(200 * (src.len() + tgt.len()));
    let sol = simplex::solve(&a, &b, &cost, max_pivots);

    let mut plan = vec![0.0; n * n];
    for &(i, j, flow) in &sol.flows {
        plan[src[i] * n + tgt[j]] += flow;
    }
    let value = numeric::sum(sol.flows.iter().map(|&(i, j, flow)| flow * cost[i * tgt.len() + j]));

    // Dual polish by a c-transform over the support, then extension to
    // zero-mass points so that feasibility holds on the whole space.
    let nt = tgt.len();
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    for (i, &x) in src.iter().enumerate() {
        f[x] = sol.source_pot[i];
    }
    for (j, &y) in tgt.iter().enumerate() {
        g[y] = (0..src.len())
            .map(|i| sol.source_pot[i] + cost[i * nt + j])
            .fold(f64::INFINITY, f64::min);
    }
    let in_src: Vec<bool> = (0..n).map(|x| mu.weights()[x] > 0.0).collect();
    let in_tgt: Vec<bool> = (0..n).map(|y| nu.weights()[y] > 0.0).collect();
    for x in (0..n).filter(|&x| !in_src[x]) {
        f[x] = tgt.iter().map(|&y| g[y] - cost_of(x, y)).fold(f64::NEG_INFINITY, f64::max);
    }
    for y in (0..n).filter(|&y| !in_tgt[y]) {
        g[y] = (0..n).map(|x| f[x] + cost_of(x, y)).fold(f64::INFINITY, f64::min);
    }
    let gap = (value - mu_nu_dual(mu, nu, &f, &g)).abs();
    if !sol.converged || gap > GAP_LIMIT {
        return Err(Error::CertificationFailure { gap, limit: GAP_LIMIT });
    }
    Ok(TransportPlan { n, plan, value, f, g, p, gap, pivots: sol.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_grid_1d;
    use approx::assert_abs_diff_eq;

    #[test]
    fn entropy_of_constant_is_zero() {
        let mu = ProbabilityMeasure::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(entropy(&mu, &ScalarField::constant(3, 4.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn entropy_two_point() {
        let mu = ProbabilityMeasure::uniform(2).unwrap();
        let e = entropy(&mu, &ScalarField::new(vec![2.0, 0.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(e, 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn entropy_errors() {
        let mu = ProbabilityMeasure::uniform(2).unwrap();
        assert!(matches!(entropy(&mu, &ScalarField::new(vec![1.0, -1.0]).unwrap()), Err(Error::InvalidArgument(_))));
        assert!(matches!(entropy(&mu, &ScalarField::new(vec![0.0, 0.0]).unwrap()), Err(Error::UndefinedEntropy)));
    }

    #[test]
    fn variational_bound_two_point() {
        let mu = ProbabilityMeasure::uniform(2).unwrap();
        let phi = ScalarField::new(vec![2.0, 0.0]).unwrap();
        let psi = optimal_test_function(&mu, &phi).unwrap();
        assert_eq!(psi.values()[1], LOG_FLOOR);
        let r = entropy_variational_bound(&mu, &phi, &psi).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.lhs, 2f64.ln(), epsilon = 1e-12);
        let zero = entropy_variational_bound(&mu, &phi, &ScalarField::constant(2, 0.0).unwrap()).unwrap();
        assert!(zero.pass && zero.lhs == 0.0);
        let bad = entropy_variational_bound(&mu, &phi, &ScalarField::constant(2, 1.0).unwrap()).unwrap();
        assert!(!bad.pass);
        assert_eq!(bad.details["constraint_violation"], serde_json::json!(true));
    }

    #[test]
    fn identical_measures_cost_nothing() {
        let s = build_grid_1d(0.0, 1.0, 11).unwrap();
        let mu = ProbabilityMeasure::uniform(11).unwrap();
        let plan = wasserstein_p(&mu, &mu, &s, 2.0).unwrap();
        assert_eq!(plan.value(), 0.0);
        assert!(plan.certify(&mu, &mu, &s).holds());
    }

    #[test]
    fn point_masses_carry_the_one_over_p_factor() {
        let s = build_grid_1d(0.0, 2.0, 5).unwrap();
        let a = ProbabilityMeasure::dirac(5, 0).unwrap();
        let b = ProbabilityMeasure::dirac(5, 4).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let plan = wasserstein_p(&a, &b, &s, p).unwrap();
            assert_abs_diff_eq!(plan.distance(), 2.0 / p.powf(1.0 / p), epsilon = 1e-12);
            assert!(plan.certify(&a, &b, &s).holds());
        }
    }
}
