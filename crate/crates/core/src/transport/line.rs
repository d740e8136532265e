//! Monotone transport on a uniform line grid.

use crate::error::{invalid, Error, Result};
use crate::numeric;
use crate::report::{CheckReport, InputDigest};
use crate::space::{check_len, MetricSpace, ProbabilityMeasure, SpaceKind};

use super::relative_entropy;

fn require_line(space: &MetricSpace) -> Result<()> {
    if space.kind() != SpaceKind::Grid1d {
        return Err(Error::Unsupported(format!(
            "monotone transport needs a grid1d space, got {}",
            space.kind().as_str()
        )));
    }
    Ok(())
}

/// Pieces `(i, j, mass)` of the quantile coupling, in increasing order.
fn quantile_coupling(mu: &[f64], nu: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let (mut ra, mut rb) = (mu[0], nu[0]);
    loop {
        while ra <= 0.0 && i + 1 < mu.len() {
            i += 1;
            ra = mu[i];
        }
        while rb <= 0.0 && j + 1 < nu.len() {
            j += 1;
            rb = nu[j];
        }
        if ra <= 0.0 || rb <= 0.0 {
            break;
        }
        let m = ra.min(rb);
        out.push((i, j, m));
        ra -= m;
        rb -= m;
        if ra <= 0.0 && i + 1 == mu.len() || rb <= 0.0 && j + 1 == nu.len() {
            break;
        }
    }
    out
}

/// `∬ d^p / p dπ` for the monotone (quantile) coupling.
pub fn wasserstein_1d(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, space: &MetricSpace, p: f64) -> Result<f64> {
    require_line(space)?;
    check_len(space.len(), mu.len())?;
    check_len(space.len(), nu.len())?;
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be at least 1, got {p}")));
    }
    Ok(numeric::sum(
        quantile_coupling(mu.weights(), nu.weights())
            .into_iter()
            .map(|(i, j, m)| m * numeric::pow(space.dist(i, j), p) / p),
    ))
}

/// `ν_t`: each coupled piece moves to `(1 - t) i + t j` in index space and is
/// split linearly between the two nearest grid points.
pub fn displacement_interpolate_1d(
    nu0: &ProbabilityMeasure,
    nu1: &ProbabilityMeasure,
    space: &MetricSpace,
    t: f64,
    p: f64,
) -> Result<ProbabilityMeasure> {
    require_line(space)?;
    check_len(space.len(), nu0.len())?;
    check_len(space.len(), nu1.len())?;
    if !(p >= 2.0) {
        return Err(invalid(format!("displacement interpolation uses p >= 2, got {p}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("t must lie in [0, 1], got {t}")));
    }
    if t == 0.0 {
        return Ok(nu0.clone());
    }
    if t == 1.0 {
        return Ok(nu1.clone());
    }
    let n = space.len();
    let mut mass = vec![0.0; n];
    for (i, j, m) in quantile_coupling(nu0.weights(), nu1.weights()) {
        let s = (1.0 - t) * i as f64 + t * j as f64;
        let k = (s.floor() as usize).min(n - 1);
        let frac = s - k as f64;
        if frac > 0.0 && k + 1 < n {
            mass[k] += m * (1.0 - frac);
            mass[k + 1] += m * frac;
        } else {
            mass[k] += m;
        }
    }
    ProbabilityMeasure::normalized(mass)
}

/// Convexity of `t -> U_μ(ν_t)` along the interpolation: reports the largest
/// `U_μ(ν_t) - t U_μ(ν_1) - (1 - t) U_μ(ν_0)` against
/// `10 h max(1, U_μ(ν_0), U_μ(ν_1))`.
pub fn entropy_along_geodesic(
    mu: &ProbabilityMeasure,
    nu0: &ProbabilityMeasure,
    nu1: &ProbabilityMeasure,
    ts: &[f64],
    space: &MetricSpace,
    p: f64,
) -> Result<CheckReport> {
    require_line(space)?;
    let u0 = relative_entropy(nu0, mu)?;
    let u1 = relative_entropy(nu1, mu)?;
    let mut defect = 0.0f64;
    let mut samples = Vec::with_capacity(ts.len());
    for &t in ts {
        let nut = displacement_interpolate_1d(nu0, nu1, space, t, p)?;
        let ut = relative_entropy(&nut, mu)?;
        defect = defect.max(ut - t * u1 - (1.0 - t) * u0);
        samples.push((t, ut));
    }
    let h = space.min_step();
    let tol = 10.0 * h * u0.max(u1).max(1.0);
    let digest = InputDigest::new("geodesic_entropy")
        .values(mu.weights())
        .values(nu0.weights())
        .values(nu1.weights())
        .values(ts)
        .scalar(p)
        .finish();
    Ok(CheckReport::new("geodesic_entropy", defect, tol, 0.0)
        .constant("p", p)
        .constant("h", h)
        .detail("u0", u0)
        .detail("u1", u1)
        .detail("samples", samples)
        .digest(digest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_graph, build_grid_1d, gaussian_measure};

    #[test]
    fn endpoints_are_returned_exactly() {
        let s = build_grid_1d(-1.0, 1.0, 21).unwrap();
        let a = gaussian_measure(&s, 0.3, &[-0.4]).unwrap();
        let b = gaussian_measure(&s, 0.2, &[0.5]).unwrap();
        assert_eq!(displacement_interpolate_1d(&a, &b, &s, 0.0, 2.0).unwrap(), a);
        assert_eq!(displacement_interpolate_1d(&a, &b, &s, 1.0, 2.0).unwrap(), b);
    }

    #[test]
    fn diracs_meet_in_the_middle() {
        let s = build_grid_1d(0.0, 1.0, 11).unwrap();
        let a = ProbabilityMeasure::dirac(11, 2).unwrap();
        let b = ProbabilityMeasure::dirac(11, 6).unwrap();
        let mid = displacement_interpolate_1d(&a, &b, &s, 0.5, 2.0).unwrap();
        assert_eq!(mid.weights()[4], 1.0);
        let b = ProbabilityMeasure::dirac(11, 7).unwrap();
        let mid = displacement_interpolate_1d(&a, &b, &s, 0.5, 2.0).unwrap();
        assert!((mid.weights()[4] - 0.5).abs() < 1e-15 && (mid.weights()[5] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_line_spaces_are_unsupported() {
        let g = build_graph(2, &[(0, 1, 1.0)]).unwrap();
        let m = ProbabilityMeasure::uniform(2).unwrap();
        assert!(matches!(wasserstein_1d(&m, &m, &g, 2.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn identical_endpoints_have_no_defect() {
        let s = build_grid_1d(-3.0, 3.0, 121).unwrap();
        let mu = gaussian_measure(&s, 1.0, &[0.0]).unwrap();
        let a = gaussian_measure(&s, 0.8, &[0.5]).unwrap();
        let r = entropy_along_geodesic(&mu, &a, &a, &[0.0, 0.5, 1.0], &s, 2.0).unwrap();
        assert!(r.pass);
        assert!(r.lhs.abs() <= 1e-12);
    }

    #[test]
    fn absolute_continuity_is_enforced() {
        let s = build_grid_1d(0.0, 1.0, 5).unwrap();
        let mu = ProbabilityMeasure::new(vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let a = ProbabilityMeasure::dirac(5, 0).unwrap();
        let b = ProbabilityMeasure::dirac(5, 4).unwrap();
        assert!(matches!(
            entropy_along_geodesic(&mu, &a, &b, &[0.5], &s, 2.0),
            Err(Error::AbsoluteContinuity { .. })
        ));
    }
}
