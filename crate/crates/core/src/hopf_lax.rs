//! The Hopf–Lax semigroup `Q_t g(x) = min_y [ t L(d(x, y) / t) + g(y) ]` and
//! checks of its structural properties on a finite space.

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{ConvexOneDim, HamiltonianPair};
use crate::par::{map_indices, Exec};
use crate::report::{CheckReport, InputDigest};
use crate::space::{check_len, lipschitz_constant, metric_subgradient, MetricSpace, Neighborhood, ScalarField};

/// Absolute slack for the exact one-sided identities.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HopfLaxResult {
    pub u: ScalarField,
    /// Lowest-id minimizer for each point.
    pub argmin: Vec<usize>,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct HopfLaxOptions {
    pub exec: Exec,
    /// Skip candidates outside the radius where `t L(d/t)` alone exceeds
    /// `g(x) - min g`. Only used for power Lagrangians.
    pub prune: bool,
}

pub fn hopf_lax(space: &MetricSpace, g: &ScalarField, t: f64, l: &ConvexOneDim) -> Result<HopfLaxResult> {
    hopf_lax_with(space, g, t, l, HopfLaxOptions::default())
}

pub fn hopf_lax_with(
    space: &MetricSpace,
    g: &ScalarField,
    t: f64,
    l: &ConvexOneDim,
    opts: HopfLaxOptions,
) -> Result<HopfLaxResult> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("t must be positive, got {t}")));
    }
    check_len(space.len(), g.len())?;
    let gv = g.values();
    let g_min = gv.iter().copied().fold(f64::INFINITY, f64::min);
    let radius = |x: usize| -> f64 {
        match (opts.prune, l.exponent()) {
            // t (r/t)^p / p = g(x) - min g  <=>  r = t (p (g(x) - min g) / t)^{1/p}
            (true, Some(p)) => t * (p * (gv[x] - g_min) / t).powf(1.0 / p) * (1.0 + 1e-12),
            _ => f64::INFINITY,
        }
    };
    let out = map_indices(space.len(), opts.exec, |x| {
        let row = space.row(x);
        let r = radius(x);
        let mut best = f64::INFINITY;
        let mut arg = x;
        for (y, (&d, &gy)) in row.iter().zip(gv).enumerate() {
            if d > r {
                continue;
            }
            let v = t * l.value(d / t) + gy;
            if v < best {
                best = v;
                arg = y;
            }
        }
        (best, arg)
    });
    let (u, argmin): (Vec<f64>, Vec<usize>) = out.into_iter().unzip();
    Ok(HopfLaxResult { u: ScalarField::new(u)?, argmin, t })
}

fn digest(tag: &str, space: &MetricSpace, g: &ScalarField, params: &[f64]) -> String {
    InputDigest::new(tag)
        .text(space.kind().as_str())
        .values(space.distances())
        .values(g.values())
        .values(params)
        .finish()
}

fn max_diff(a: &[f64], b: &[f64]) -> (f64, f64) {
    // (max |a - b|, max (a - b)_+)
    a.iter().zip(b).fold((0.0f64, 0.0f64), |(abs, pos), (x, y)| {
        let d = x - y;
        (abs.max(d.abs()), pos.max(d))
    })
}

/// Compares `Q_t g` with `Q_{t-s}(Q_s g)`.
///
/// Returns the one-sided report (`Q_t g <= Q_{t-s} Q_s g` to [`EXACT_TOL`]) and,
/// on uniform lattices only, a two-sided report with tolerance `5 h`.
pub fn semigroup_check(
    space: &MetricSpace,
    g: &ScalarField,
    s: f64,
    t: f64,
    l: &ConvexOneDim,
) -> Result<Vec<CheckReport>> {
    if !(s > 0.0 && s < t) {
        return Err(invalid(format!("semigroup check needs 0 < s < t, got s={s}, t={t}")));
    }
    let qt = hopf_lax(space, g, t, l)?;
    let qs = hopf_lax(space, g, s, l)?;
    let composed = hopf_lax(space, &qs.u, t - s, l)?;
    let (two_sided, one_sided) = max_diff(qt.u.values(), composed.u.values());
    let dg = digest("semigroup", space, g, &[s, t]);
    let mut reports = vec![CheckReport::new("semigroup_one_sided", one_sided, 0.0, EXACT_TOL)
        .constant("s", s)
        .constant("t", t)
        .detail("two_sided_defect", two_sided)
        .digest(dg.clone())];
    if space.kind().is_geodesic_grid() {
        let h = space.min_step();
        reports.push(
            CheckReport::new("semigroup_two_sided", two_sided, 5.0 * h, 0.0)
                .constant("s", s)
                .constant("t", t)
                .constant("h", h)
                .digest(dg),
        );
    }
    Ok(reports)
}

/// Non-increase of `t -> Q_t g` along `times`, together with `Q_t g <= g`.
pub fn monotonicity_check(
    space: &MetricSpace,
    g: &ScalarField,
    times: &[f64],
    l: &ConvexOneDim,
) -> Result<CheckReport> {
    if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("times must be a nonempty ascending list"));
    }
    let mut worst = 0.0f64;
    let mut prev = g.values().to_vec();
    for &t in times {
        let q = hopf_lax(space, g, t, l)?;
        worst = worst.max(max_diff(q.u.values(), &prev).1);
        prev = q.u.into_values();
    }
    Ok(CheckReport::new("monotonicity", worst, 0.0, EXACT_TOL)
        .detail("times", times)
        .digest(digest("monotonicity", space, g, times)))
}

/// Spatial and temporal Lipschitz bounds of `Q_t g`:
/// `lip(Q_t g) <= lip(g)` and `|Q_t g - Q_{t'} g| <= H(lip g) |t - t'|`,
/// both with relative slack `1e-9`.
pub fn lipschitz_bound_check(
    space: &MetricSpace,
    g: &ScalarField,
    t: f64,
    t_prime: f64,
    pair: &HamiltonianPair,
) -> Result<Vec<CheckReport>> {
    if !(t_prime > 0.0) {
        return Err(invalid(format!("t' must be positive, got {t_prime}")));
    }
    let lip_g = lipschitz_constant(g, space);
    let qt = hopf_lax(space, g, t, &pair.l)?;
    let qt2 = hopf_lax(space, g, t_prime, &pair.l)?;
    let lip_q = lipschitz_constant(&qt.u, space);
    let (sup_diff, _) = max_diff(qt.u.values(), qt2.u.values());
    let time_rhs = pair.h.value(lip_g) * (t - t_prime).abs();
    let dg = digest("lipschitz_bound", space, g, &[t, t_prime]);
    Ok(vec![
        CheckReport::new("lipschitz_space", lip_q, lip_g, 1e-9 * lip_g)
            .constant("t", t)
            .digest(dg.clone()),
        CheckReport::new("lipschitz_time", sup_diff, time_rhs, 1e-9 * time_rhs)
            .constant("t", t)
            .constant("t_prime", t_prime)
            .constant("lip_g", lip_g)
            .digest(dg),
    ])
}

/// Forward difference `(Q_{t+δ} g - Q_t g) / δ`.
pub fn time_derivative(
    space: &MetricSpace,
    g: &ScalarField,
    t: f64,
    delta: f64,
    l: &ConvexOneDim,
) -> Result<ScalarField> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    let a = hopf_lax(space, g, t, l)?;
    let b = hopf_lax(space, g, t + delta, l)?;
    ScalarField::new(a.u.values().iter().zip(b.u.values()).map(|(x, y)| (y - x) / delta).collect())
}

/// Hamilton–Jacobi residual `r = ∂_t Q_t g + H(|∇⁻ Q_t g|)` with a forward
/// time difference and the edge subgradient.
#[derive(Clone, Debug)]
pub struct HjResidual {
    pub residual: ScalarField,
    /// `max |r|` over lattice-interior points.
    pub max_abs_interior: f64,
    pub min_residual: f64,
    pub max_residual: f64,
    pub tol: f64,
    pub delta: f64,
    /// Passes when `r >= -tol` everywhere and, on uniform lattices, `r <= tol`.
    pub report: CheckReport,
}

/// `delta` defaults to the smallest edge length.
pub fn hj_residual(
    space: &MetricSpace,
    g: &ScalarField,
    t: f64,
    pair: &HamiltonianPair,
    delta: Option<f64>,
) -> Result<HjResidual> {
    let h = space.min_step();
    let delta = delta.unwrap_or(h);
    let q = hopf_lax(space, g, t, &pair.l)?;
    let dt = time_derivative(space, g, t, delta, &pair.l)?;
    let grad = metric_subgradient(&q.u, space, Neighborhood::Edges)?;
    let r: Vec<f64> = dt
        .values()
        .iter()
        .zip(grad.values())
        .map(|(d, s)| d + pair.h.value(*s))
        .collect();
    let lip = lipschitz_constant(g, space);
    let tol = lip.max(1.0) * pair.h.derivative(lip).max(1.0) * (h + delta);
    let min_residual = r.iter().copied().fold(f64::INFINITY, f64::min);
    let max_residual = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_abs_interior = (0..r.len())
        .filter(|&x| space.is_interior(x))
        .map(|x| r[x].abs())
        .fold(0.0, f64::max);
    let upper_asserted = space.kind().is_geodesic_grid();
    let lhs = if upper_asserted { (-min_residual).max(max_residual) } else { -min_residual };
    let report = CheckReport::new("hj_residual", lhs, tol, 0.0)
        .constant("t", t)
        .constant("delta", delta)
        .constant("h", h)
        .detail("max_abs_interior", max_abs_interior)
        .detail("min_residual", min_residual)
        .detail("max_residual", max_residual)
        .detail("upper_bound_asserted", upper_asserted)
        .digest(digest("hj_residual", space, g, &[t, delta]));
    Ok(HjResidual {
        residual: ScalarField::new(r)?,
        max_abs_interior,
        min_residual,
        max_residual,
        tol,
        delta,
        report,
    })
}

/// `Q_t(ε g) = ε Q_{ε^{q-1} t} g` for the power pair, to `1e-10`.
pub fn scaling_check(
    space: &MetricSpace,
    g: &ScalarField,
    t: f64,
    eps: f64,
    pair: &HamiltonianPair,
) -> Result<CheckReport> {
    let (q, _) = pair
        .exponents()
        .ok_or_else(|| Error::Unsupported("the scaling identity needs a power Lagrangian".into()))?;
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let scaled = g.map(|v| eps * v)?;
    let left = hopf_lax(space, &scaled, t, &pair.l)?;
    let right = hopf_lax(space, g, eps.powf(q - 1.0) * t, &pair.l)?;
    let right: Vec<f64> = right.u.values().iter().map(|v| eps * v).collect();
    let (dev, _) = max_diff(left.u.values(), &right);
    Ok(CheckReport::new("scaling", dev, 0.0, 1e-10)
        .constant("q", q)
        .constant("t", t)
        .constant("eps", eps)
        .digest(digest("scaling", space, g, &[t, eps, q])))
}
