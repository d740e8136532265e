//! Convex superlinear functions on the half-line and Legendre duality.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric;

/// Slack allowed on tabulated second differences and on `value(0) = 0`.
pub const CONVEXITY_TOL: f64 = 1e-12;

/// Piecewise-linear convex nondecreasing function sampled on `[0, v_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    grid: Vec<f64>,
    values: Vec<f64>,
    slope_bound: f64,
}

impl Tabulated {
    /// Validates the samples. `slope_bound` is the declared superlinearity
    /// witness: `value(v_max) / v_max` must exceed it.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, slope_bound: f64) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(invalid("a tabulated function needs at least two samples with matching lengths"));
        }
        if grid[0] != 0.0 {
            return Err(invalid("tabulated grid must start at 0"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|v| !v.is_finite()) {
            return Err(invalid("tabulated grid must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("tabulated values must be finite"));
        }
        if values[0].abs() > CONVEXITY_TOL {
            return Err(invalid(format!("tabulated value at 0 is {}, not 0", values[0])));
        }
        let slopes: Vec<f64> = (1..grid.len())
            .map(|i| (values[i] - values[i - 1]) / (grid[i] - grid[i - 1]))
            .collect();
        if let Some(i) = slopes.iter().position(|s| *s < -CONVEXITY_TOL) {
            return Err(invalid(format!("tabulated function decreases on segment {i}")));
        }
        for i in 1..slopes.len() {
            // Second difference scaled back to value units.
            let d2 = (slopes[i] - slopes[i - 1]) * (grid[i + 1] - grid[i - 1]) / 2.0;
            if d2 < -CONVEXITY_TOL {
                return Err(invalid(format!("tabulated function is not convex at sample {i}")));
            }
        }
        let v_max = *grid.last().unwrap();
        let mean_slope = values.last().unwrap() / v_max;
        if !(mean_slope > slope_bound) {
            return Err(invalid(format!(
                "superlinearity witness fails: value(v_max)/v_max = {mean_slope} does not exceed {slope_bound}"
            )));
        }
        Ok(Tabulated { grid, values, slope_bound })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slope_bound(&self) -> f64 {
        self.slope_bound
    }

    pub fn v_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    fn segment(&self, v: f64) -> usize {
        let k = self.grid.partition_point(|g| *g <= v);
        k.clamp(1, self.grid.len() - 1) - 1
    }

    fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.grid[i + 1] - self.grid[i])
    }

    /// Linear interpolation, extended linearly past `v_max`.
    pub fn value(&self, v: f64) -> f64 {
        let v = v.max(0.0);
        let i = self.segment(v);
        self.values[i] + self.slope(i) * (v - self.grid[i])
    }

    /// Right derivative.
    pub fn derivative(&self, v: f64) -> f64 {
        self.slope(self.segment(v.max(0.0)))
    }
}

/// A convex nondecreasing function on `[0, ∞)` vanishing at 0.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexOneDim {
    /// `v^r / r`.
    Power { exponent: f64 },
    Tabulated(Tabulated),
}

impl ConvexOneDim {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 1.0) || !exponent.is_finite() {
            return Err(invalid(format!("power exponent must exceed 1, got {exponent}")));
        }
        Ok(ConvexOneDim::Power { exponent })
    }

    #[inline]
    pub fn value(&self, v: f64) -> f64 {
        match self {
            ConvexOneDim::Power { exponent } => numeric::pow(v.max(0.0), *exponent) / exponent,
            ConvexOneDim::Tabulated(t) => t.value(v),
        }
    }

    pub fn derivative(&self, v: f64) -> f64 {
        match self {
            ConvexOneDim::Power { exponent } => numeric::pow(v.max(0.0), exponent - 1.0),
            ConvexOneDim::Tabulated(t) => t.derivative(v),
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            ConvexOneDim::Power { exponent } => Some(*exponent),
            ConvexOneDim::Tabulated(_) => None,
        }
    }
}

/// Conjugate exponent `r / (r - 1)`.
pub fn conjugate_exponent(r: f64) -> f64 {
    r / (r - 1.0)
}

/// Tabulated `g(u) = max_{v in v_grid} (u v - f(v))` on `u_grid`.
///
/// Fails with [`Error::DomainTruncation`] when a maximizer sits at the last
/// sample of `v_grid`. The returned witness slope is the first segment slope.
pub fn legendre(f: &ConvexOneDim, u_grid: &[f64], v_grid: &[f64]) -> Result<ConvexOneDim> {
    if v_grid.len() < 2 || v_grid[0] != 0.0 || v_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("maximization grid must start at 0 and increase strictly"));
    }
    let fv: Vec<f64> = v_grid.iter().map(|v| f.value(*v)).collect();
    let last = v_grid.len() - 1;
    let mut values = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (k, (&v, &fk)) in v_grid.iter().zip(&fv).enumerate() {
            let s = u * v - fk;
            if s > best {
                best = s;
                arg = k;
            }
        }
        if arg == last {
            return Err(Error::DomainTruncation { u });
        }
        values.push(best);
    }
    if let Some(v0) = values.first_mut() {
        if v0.abs() <= CONVEXITY_TOL {
            *v0 = 0.0;
        }
    }
    let first_slope = if u_grid.len() >= 2 { (values[1] - values[0]) / (u_grid[1] - u_grid[0]) } else { 0.0 };
    Ok(ConvexOneDim::Tabulated(Tabulated::new(u_grid.to_vec(), values, first_slope)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedFormDual,
    NumericLegendre,
}

/// Hamiltonian `H` and Lagrangian `L`, Legendre dual to each other.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianPair {
    pub h: ConvexOneDim,
    pub l: ConvexOneDim,
    pub provenance: Provenance,
}

/// Young's inequality statistics on a cross-grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YoungStats {
    /// `max (w v - H(w) - L(v))`, nonpositive up to rounding.
    pub max_violation: f64,
    /// `max_w min_v (H(w) + L(v) - w v)`, the worst equality gap.
    pub max_equality_gap: f64,
}

/// `H(v) = v^q / q` with `L(u) = u^p / p`, `1/p + 1/q = 1`.
pub fn power_pair(q: f64) -> Result<HamiltonianPair> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(invalid(format!(
            "q must lie in (1, 2]; no log-Sobolev inequality of order q > 2 exists, got {q}"
        )));
    }
    Ok(HamiltonianPair {
        h: ConvexOneDim::Power { exponent: q },
        l: ConvexOneDim::Power { exponent: conjugate_exponent(q) },
        provenance: Provenance::ClosedFormDual,
    })
}

impl HamiltonianPair {
    /// Pairs `h` with its numeric conjugate.
    pub fn numeric(h: ConvexOneDim, u_grid: &[f64], v_grid: &[f64]) -> Result<Self> {
        let l = legendre(&h, u_grid, v_grid)?;
        Ok(HamiltonianPair { h, l, provenance: Provenance::NumericLegendre })
    }

    /// `(q, p)` for power pairs.
    pub fn exponents(&self) -> Option<(f64, f64)> {
        Some((self.h.exponent()?, self.l.exponent()?))
    }

    pub fn young(&self, w_grid: &[f64], v_grid: &[f64]) -> YoungStats {
        let hv: Vec<f64> = w_grid.iter().map(|w| self.h.value(*w)).collect();
        let lv: Vec<f64> = v_grid.iter().map(|v| self.l.value(*v)).collect();
        let mut max_violation = f64::NEG_INFINITY;
        let mut max_equality_gap = 0.0f64;
        for (w, hw) in w_grid.iter().zip(&hv) {
            let mut min_gap = f64::INFINITY;
            for (v, lvv) in v_grid.iter().zip(&lv) {
                let gap = hw + lvv - w * v;
                max_violation = max_violation.max(-gap);
                min_gap = min_gap.min(gap);
            }
            max_equality_gap = max_equality_gap.max(min_gap);
        }
        YoungStats { max_violation, max_equality_gap }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn quadratic_pair_is_self_dual() {
        let pair = power_pair(2.0).unwrap();
        assert_eq!(pair.exponents(), Some((2.0, 2.0)));
        assert_eq!(pair.h.value(3.0), 4.5);
        assert_eq!(pair.l.value(3.0), 4.5);
        assert_eq!(pair.h.value(3.0) + pair.l.value(3.0), 3.0 * 3.0);
    }

    #[test]
    fn three_halves_pairs_with_cubic() {
        let pair = power_pair(1.5).unwrap();
        let (q, p) = pair.exponents().unwrap();
        assert_eq!(p, 3.0);
        assert!((1.0 / p + 1.0 / q - 1.0).abs() < 1e-15);
        assert_abs_diff_eq!(pair.l.value(2.0), 8.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn power_pair_rejects_out_of_range_q() {
        for q in [1.0, 0.5, 2.5, f64::NAN] {
            assert!(power_pair(q).is_err());
        }
    }

    #[test]
    fn young_on_cross_grid() {
        for q in [1.25, 1.5, 2.0] {
            let pair = power_pair(q).unwrap();
            let g = linspace(0.0, 3.0, 100);
            let stats = pair.young(&g, &g);
            assert!(stats.max_violation <= 1e-9, "q={q}: {stats:?}");
        }
    }

    #[test]
    fn legendre_of_quadratic() {
        let f = ConvexOneDim::power(2.0).unwrap();
        let u = linspace(0.0, 2.0, 201);
        let v = linspace(0.0, 4.0, 4001);
        let g = legendre(&f, &u, &v).unwrap();
        for &x in &u {
            assert_abs_diff_eq!(g.value(x), x * x / 2.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn legendre_of_cubic_is_three_halves_power() {
        let f = ConvexOneDim::power(3.0).unwrap();
        let u = linspace(0.0, 4.0, 101);
        let v = linspace(0.0, 3.0, 30001);
        let g = legendre(&f, &u, &v).unwrap();
        for &x in &u {
            assert_abs_diff_eq!(g.value(x), (2.0 / 3.0) * x.powf(1.5), epsilon = 1e-7);
        }
    }

    #[test]
    fn legendre_of_shifted_exponential_matches_brute_force() {
        // f(v) = e^v - 1 - v; brute-force sup by a finer independent scan.
        let u = linspace(0.0, 5.0, 51);
        let v = linspace(0.0, 4.0, 40001);
        let fv: Vec<f64> = v.iter().map(|x| x.exp() - 1.0 - x).collect();
        let f = ConvexOneDim::Tabulated(Tabulated::new(v.clone(), fv, 0.0).unwrap());
        let g = legendre(&f, &u, &v).unwrap();
        for &x in &u {
            let fine = (0..=400_000)
                .map(|k| {
                    let y = 4.0 * k as f64 / 400_000.0;
                    x * y - (y.exp() - 1.0 - y)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert_abs_diff_eq!(g.value(x), fine, epsilon = 1e-6);
            // Closed form: (1 + u) log(1 + u) - u.
            assert_abs_diff_eq!(g.value(x), (1.0 + x) * (1.0 + x).ln() - x, epsilon = 1e-6);
        }
    }

    #[test]
    fn legendre_reports_truncation() {
        let f = ConvexOneDim::power(2.0).unwrap();
        let u = linspace(0.0, 3.0, 31);
        let v = linspace(0.0, 2.0, 201);
        match legendre(&f, &u, &v) {
            Err(Error::DomainTruncation { u }) => assert!(u >= 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn biconjugate_recovers_the_function() {
        let f = ConvexOneDim::power(2.0).unwrap();
        let v_out = linspace(0.0, 2.0, 201);
        let u_mid = linspace(0.0, 4.0, 401);
        let v_max = linspace(0.0, 8.0, 801);
        let g = legendre(&f, &u_mid, &v_max).unwrap();
        let ff = legendre(&g, &v_out, &u_mid).unwrap();
        let h = 0.01;
        for &x in &v_out {
            assert!((ff.value(x) - f.value(x)).abs() <= 2.0 * h * h + 1e-12);
        }
    }

    #[test]
    fn legendre_output_is_monotone_and_convex() {
        let f = ConvexOneDim::power(1.5).unwrap();
        let u = linspace(0.0, 2.0, 101);
        let v = linspace(0.0, 6.0, 6001);
        let ConvexOneDim::Tabulated(t) = legendre(&f, &u, &v).unwrap() else { unreachable!() };
        let vals = t.values();
        for i in 1..vals.len() {
            assert!(vals[i] >= vals[i - 1] - 1e-12);
        }
        for i in 1..vals.len() - 1 {
            assert!(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-12);
        }
        assert_eq!(vals[0], 0.0);
    }

    #[test]
    fn numeric_pair_satisfies_young() {
        let h = ConvexOneDim::power(1.5).unwrap();
        let pair = HamiltonianPair::numeric(h, &linspace(0.0, 3.0, 301), &linspace(0.0, 12.0, 12001)).unwrap();
        assert_eq!(pair.provenance, Provenance::NumericLegendre);
        let g = linspace(0.0, 3.0, 100);
        let stats = pair.young(&g, &g);
        assert!(stats.max_violation <= 1e-9, "{stats:?}");
    }

    #[test]
    fn tabulated_rejects_nonconvex_and_nonzero_origin() {
        assert!(Tabulated::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 3.0], 0.0).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0, 2.0], vec![0.1, 1.0, 3.0], 0.0).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 3.0], 2.0).is_err());
        let t = Tabulated::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 3.0], 1.0).unwrap();
        assert_eq!(t.value(3.0), 5.0);
        assert_eq!(t.value(0.5), 0.5);
    }
}
