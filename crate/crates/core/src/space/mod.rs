//! Finite metric measure spaces, probability measures and scalar fields.
//!
//! A [`MetricSpace`] stores a dense symmetric distance matrix together with an
//! edge stencil (used by the discrete subgradient) and, where the construction
//! provides them, geodesic witnesses: interior points lying on a shortest path.

mod graph;
mod heisenberg;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric;
use crate::par::{map_indices, Exec};

pub use graph::build_graph;
pub(crate) use graph::graph_metric;
pub use heisenberg::build_heisenberg_grid;

/// Relative slack of the triangle inequality check.
pub const TRIANGLE_RTOL: f64 = 1e-9;
/// Allowed deviation of a probability measure's total mass from one.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Grid1d,
    Grid2d,
    Graph,
    HeisenbergGrid,
    Custom,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Grid1d => "grid1d",
            SpaceKind::Grid2d => "grid2d",
            SpaceKind::Graph => "graph",
            SpaceKind::HeisenbergGrid => "heisenberg_grid",
            SpaceKind::Custom => "custom",
        }
    }

    /// Uniform lattices where interior points at rational fractions of a
    /// geodesic exist; semigroup equality and the upper HJ bound are asserted
    /// only on these.
    pub fn is_geodesic_grid(self) -> bool {
        matches!(self, SpaceKind::Grid1d | SpaceKind::Grid2d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub(crate) enum Witnesses {
    None,
    /// Every grid point strictly between `i` and `j`.
    Grid1d,
    /// Lattice points on the segment, `nx` points per row.
    Grid2d { nx: usize },
    /// `next[s * n + t]` is the lowest-id first hop on a shortest path s -> t.
    NextHop(Vec<u32>),
}

#[derive(Clone, Debug)]
pub struct MetricSpace {
    kind: SpaceKind,
    points: Vec<Point>,
    dist: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    neighbors: Vec<Vec<usize>>,
    witnesses: Witnesses,
    geo_tol: f64,
    approximate: bool,
}

/// Neighborhood used by [`metric_subgradient`].
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Neighborhood {
    /// Graph or lattice neighbors.
    #[default]
    Edges,
    /// Every other point.
    Global,
    /// Points within the given distance.
    Radius(f64),
}

impl MetricSpace {
    /// Assembles a space from raw parts and validates the metric.
    pub fn from_parts(
        kind: SpaceKind,
        points: Vec<Point>,
        dist: Vec<f64>,
        edges: Vec<(usize, usize, f64)>,
        geo_tol: f64,
    ) -> Result<Self> {
        let n = points.len();
        if dist.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, got: dist.len() });
        }
        let neighbors = neighbors_from_edges(n, &edges)?;
        let witnesses = match kind {
            SpaceKind::Grid1d => Witnesses::Grid1d,
            _ => Witnesses::None,
        };
        let space = MetricSpace {
            kind,
            points,
            dist,
            edges,
            neighbors,
            witnesses,
            geo_tol,
            approximate: kind == SpaceKind::HeisenbergGrid,
        };
        space.validate_metric()?;
        Ok(space)
    }

    pub(crate) fn assemble(
        kind: SpaceKind,
        points: Vec<Point>,
        dist: Vec<f64>,
        edges: Vec<(usize, usize, f64)>,
        witnesses: Witnesses,
        geo_tol: f64,
        approximate: bool,
    ) -> Result<Self> {
        let n = points.len();
        let neighbors = neighbors_from_edges(n, &edges)?;
        Ok(MetricSpace { kind, points, dist, edges, neighbors, witnesses, geo_tol, approximate })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn coords(&self, x: usize) -> Option<&[f64]> {
        self.points[x].coords.as_deref()
    }

    pub fn has_coords(&self) -> bool {
        self.points.iter().all(|p| p.coords.is_some())
    }

    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.points.len() + y]
    }

    /// Row `x` of the distance matrix.
    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        let n = self.points.len();
        &self.dist[x * n..(x + 1) * n]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    pub fn geo_tol(&self) -> f64 {
        self.geo_tol
    }

    /// True for generated spaces whose metric only approximates the modeled
    /// continuum distance (the Heisenberg lattice).
    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest positive distance; the grid step on lattices.
    pub fn min_step(&self) -> f64 {
        self.dist.iter().copied().filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min)
    }

    /// Points away from the lattice boundary. Non-lattice spaces have no
    /// boundary notion and every point counts as interior.
    pub fn is_interior(&self, x: usize) -> bool {
        match self.kind {
            SpaceKind::Grid1d => x > 0 && x + 1 < self.len(),
            SpaceKind::Grid2d => self.neighbors[x].len() == 4,
            _ => true,
        }
    }

    pub fn has_geodesic_witnesses(&self) -> bool {
        !matches!(self.witnesses, Witnesses::None)
    }

    /// Interior points on one shortest path from `x` to `y` (lowest id first
    /// hop on graphs). Empty when the pair is adjacent or no witness data exists.
    pub fn geodesic_witnesses(&self, x: usize, y: usize) -> Vec<usize> {
        if x == y {
            return Vec::new();
        }
        let n = self.len();
        match &self.witnesses {
            Witnesses::None => Vec::new(),
            Witnesses::Grid1d => {
                if x < y {
                    (x + 1..y).collect()
                } else {
                    (y + 1..x).rev().collect()
                }
            }
            Witnesses::Grid2d { nx } => {
                let (xi, xj) = ((x % nx) as i64, (x / nx) as i64);
                let (yi, yj) = ((y % nx) as i64, (y / nx) as i64);
                let (di, dj) = (yi - xi, yj - xj);
                let g = gcd(di.unsigned_abs(), dj.unsigned_abs()) as i64;
                (1..g)
                    .map(|k| {
                        let i = xi + di / g * k;
                        let j = xj + dj / g * k;
                        (j as usize) * nx + i as usize
                    })
                    .collect()
            }
            Witnesses::NextHop(next) => {
                let mut out = Vec::new();
                let mut cur = next[x * n + y] as usize;
                while cur != y {
                    out.push(cur);
                    cur = next[cur * n + y] as usize;
                }
                out
            }
        }
    }

    /// Checks the metric invariants: zero diagonal, exact symmetry, positive
    /// off-diagonal entries and the triangle inequality within
    /// [`TRIANGLE_RTOL`].
    pub fn validate_metric(&self) -> Result<()> {
        let n = self.len();
        for x in 0..n {
            let dxx = self.dist(x, x);
            if dxx != 0.0 {
                return Err(Error::InvalidMetric(format!("d({x},{x}) = {dxx} is not zero")));
            }
            for y in 0..n {
                let d = self.dist(x, y);
                if !d.is_finite() {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) is not finite")));
                }
                if d != self.dist(y, x) {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) != d({y},{x})")));
                }
                if x != y && d <= 0.0 {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) = {d} is not positive")));
                }
            }
        }
        let violations = map_indices(n, Exec::Parallel, |x| {
            let rx = self.row(x);
            for y in 0..n {
                let ry = self.row(y);
                let dxy = rx[y];
                for z in 0..n {
                    if rx[z] > (dxy + ry[z]) * (1.0 + TRIANGLE_RTOL) {
                        return Some((x, y, z));
                    }
                }
            }
            None
        });
        if let Some((x, y, z)) = violations.into_iter().flatten().next() {
            return Err(Error::InvalidMetric(format!(
                "triangle inequality fails: d({x},{z}) > d({x},{y}) + d({y},{z})"
            )));
        }
        Ok(())
    }

    /// Largest geodesic defect `|d(x,w) + d(w,y) - d(x,y)|` over all stored
    /// witnesses, minus the floating-point allowance of a few ulps of `d(x,y)`.
    pub fn max_witness_excess(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for x in 0..n {
            for y in x + 1..n {
                let dxy = self.dist(x, y);
                for w in self.geodesic_witnesses(x, y) {
                    let defect = (self.dist(x, w) + self.dist(w, y) - dxy).abs();
                    worst = worst.max(defect - 4.0 * f64::EPSILON * dxy);
                }
            }
        }
        worst.max(0.0)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn neighbors_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Vec<Vec<usize>>> {
    let mut nb = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        if u >= n || v >= n {
            return Err(invalid(format!("edge ({u},{v}) references a point outside 0..{n}")));
        }
        if u != v {
            nb[u].push(v);
            nb[v].push(u);
        }
    }
    for list in &mut nb {
        list.sort_unstable();
        list.dedup();
    }
    Ok(nb)
}

/// `n` equally spaced points on `[a, b]` with `d(i, j) = h |i - j|`.
pub fn build_grid_1d(a: f64, b: f64, n: usize) -> Result<MetricSpace> {
    if n < 2 {
        return Err(invalid(format!("grid1d needs at least 2 points, got {n}")));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("grid1d needs a < b, got [{a}, {b}]")));
    }
    let h = (b - a) / (n - 1) as f64;
    let points = (0..n)
        .map(|i| Point { id: i, coords: Some(vec![a + h * i as f64]) })
        .collect();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = h * (i as f64 - j as f64).abs();
        }
    }
    let edges = (0..n - 1).map(|i| (i, i + 1, h)).collect();
    MetricSpace::assemble(SpaceKind::Grid1d, points, dist, edges, Witnesses::Grid1d, 0.0, false)
}

/// Tensor lattice on `[ax, bx] x [ay, by]` with the Euclidean metric and a
/// 4-neighbor stencil. Point `i + nx * j` sits at column `i`, row `j`.
pub fn build_grid_2d(ax: f64, bx: f64, nx: usize, ay: f64, by: f64, ny: usize) -> Result<MetricSpace> {
    if nx < 2 || ny < 2 {
        return Err(invalid("grid2d needs at least 2 points per axis"));
    }
    if !(ax < bx) || !(ay < by) {
        return Err(invalid("grid2d needs ax < bx and ay < by"));
    }
    let hx = (bx - ax) / (nx - 1) as f64;
    let hy = (by - ay) / (ny - 1) as f64;
    let n = nx * ny;
    let points = (0..n)
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            Point { id: k, coords: Some(vec![ax + hx * i as f64, ay + hy * j as f64]) }
        })
        .collect();
    let mut dist = vec![0.0; n * n];
    for p in 0..n {
        for q in 0..n {
            let di = (p % nx) as f64 - (q % nx) as f64;
            let dj = (p / nx) as f64 - (q / nx) as f64;
            dist[p * n + q] = (hx * di).hypot(hy * dj);
        }
    }
    let mut edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if i + 1 < nx {
                edges.push((k, k + 1, hx));
            }
            if j + 1 < ny {
                edges.push((k, k + nx, hy));
            }
        }
    }
    MetricSpace::assemble(SpaceKind::Grid2d, points, dist, edges, Witnesses::Grid2d { nx }, 0.0, false)
}

/// Nonnegative per-point weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMeasure {
    weights: Vec<f64>,
}

impl ProbabilityMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("a probability measure needs at least one point"));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(invalid(format!("weight {w} at point {i} is not a finite nonnegative number")));
        }
        let total = numeric::sum(weights.iter().copied());
        if (total - 1.0).abs() > MASS_TOL {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(ProbabilityMeasure { weights })
    }

    /// Normalizes nonnegative masses to total one.
    pub fn normalized(masses: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = masses.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(invalid(format!("mass {w} at point {i} is not a finite nonnegative number")));
        }
        let total = numeric::sum(masses.iter().copied());
        if !(total > 0.0) {
            return Err(invalid("total mass is zero"));
        }
        let mut weights: Vec<f64> = masses.into_iter().map(|m| m / total).collect();
        // One correction pass keeps the compensated total within a few ulps of 1.
        let again = numeric::sum(weights.iter().copied());
        if again != 1.0 {
            for w in &mut weights {
                *w /= again;
            }
        }
        ProbabilityMeasure::new(weights)
    }

    /// Normalizes `exp(log_masses)` with a max shift.
    pub fn from_log_masses(log_masses: &[f64]) -> Result<Self> {
        let max = log_masses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(invalid("log-masses have no finite maximum"));
        }
        ProbabilityMeasure::normalized(log_masses.iter().map(|l| (l - max).exp()).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        ProbabilityMeasure::normalized(vec![1.0; n])
    }

    pub fn dirac(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(invalid(format!("dirac point {at} outside 0..{n}")));
        }
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        ProbabilityMeasure::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        numeric::integrate(&self.weights, f)
    }

    /// Density `ν/μ`, with `0/0 := 0`; errors where `ν > 0` and `μ = 0`.
    pub fn density_of(&self, nu: &ProbabilityMeasure) -> Result<ScalarField> {
        check_len(self.len(), nu.len())?;
        let mut out = Vec::with_capacity(self.len());
        for (i, (m, v)) in self.weights.iter().zip(&nu.weights).enumerate() {
            if *m > 0.0 {
                out.push(v / m);
            } else if *v > 0.0 {
                return Err(Error::AbsoluteContinuity { point: i, mass: *v });
            } else {
                out.push(0.0);
            }
        }
        ScalarField::new(out)
    }

    /// The measure `h μ / ∫ h dμ`.
    pub fn reweighted(&self, h: &[f64]) -> Result<ProbabilityMeasure> {
        check_len(self.len(), h.len())?;
        ProbabilityMeasure::normalized(self.weights.iter().zip(h).map(|(w, h)| w * h).collect())
    }
}

/// Finite per-point values.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("field value {v} at point {i} is not finite")));
        }
        Ok(ScalarField { values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        ScalarField::new(vec![c; n])
    }

    /// Evaluates `f` at every point.
    pub fn from_fn(space: &MetricSpace, f: impl Fn(usize) -> f64) -> Result<Self> {
        ScalarField::new((0..space.len()).map(f).collect())
    }

    /// Evaluates `f` on the first coordinate of every point.
    pub fn from_coord(space: &MetricSpace, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut out = Vec::with_capacity(space.len());
        for x in 0..space.len() {
            let c = space
                .coords(x)
                .ok_or_else(|| Error::Unsupported(format!("point {x} has no coordinates")))?;
            out.push(f(c[0]));
        }
        ScalarField::new(out)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<ScalarField> {
        ScalarField::new(self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::SizeMismatch { expected, got });
    }
    Ok(())
}

/// Gaussian weights `exp(-|x - center|^2 / (2 sigma^2))`, truncated to the
/// points of the space and renormalized.
pub fn gaussian_measure(space: &MetricSpace, sigma: f64, center: &[f64]) -> Result<ProbabilityMeasure> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    let mut logs = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let c = space
            .coords(x)
            .ok_or_else(|| Error::Unsupported(format!("gaussian measure needs coordinates; point {x} has none")))?;
        if c.len() != center.len() {
            return Err(Error::SizeMismatch { expected: c.len(), got: center.len() });
        }
        let r2: f64 = c.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
        logs.push(-r2 / (2.0 * sigma * sigma));
    }
    ProbabilityMeasure::from_log_masses(&logs)
}

/// Gibbs weights `exp(-beta d(base, x)^p)`, renormalized.
pub fn gibbs_measure(space: &MetricSpace, base: usize, beta: f64, p: f64) -> Result<ProbabilityMeasure> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    if !(p >= 2.0) || !p.is_finite() {
        return Err(invalid(format!("gibbs exponent must be at least 2, got {p}")));
    }
    if base >= space.len() {
        return Err(invalid(format!("base point {base} outside the space")));
    }
    let logs: Vec<f64> = space.row(base).iter().map(|d| -beta * numeric::pow(*d, p)).collect();
    ProbabilityMeasure::from_log_masses(&logs)
}

/// `max_{x != y} |f(x) - f(y)| / d(x, y)`.
pub fn lipschitz_constant(f: &ScalarField, space: &MetricSpace) -> f64 {
    lipschitz_constant_with(f, space, Exec::default())
}

pub fn lipschitz_constant_with(f: &ScalarField, space: &MetricSpace, exec: Exec) -> f64 {
    let v = f.values();
    let n = space.len();
    map_indices(n, exec, |x| {
        let row = space.row(x);
        let mut best = 0.0f64;
        for y in x + 1..n {
            best = best.max((v[x] - v[y]).abs() / row[y]);
        }
        best
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Discrete metric subgradient: at each `x`, the largest local decrease
/// `[f(x) - f(y)]_+ / d(x, y)` over the admissible neighbors `y`.
pub fn metric_subgradient(f: &ScalarField, space: &MetricSpace, nb: Neighborhood) -> Result<ScalarField> {
    metric_subgradient_with(f, space, nb, Exec::default())
}

pub fn metric_subgradient_with(
    f: &ScalarField,
    space: &MetricSpace,
    nb: Neighborhood,
    exec: Exec,
) -> Result<ScalarField> {
    check_len(space.len(), f.len())?;
    let v = f.values();
    let n = space.len();
    let out = map_indices(n, exec, |x| {
        let row = space.row(x);
        let decrease = |y: usize| (v[x] - v[y]).max(0.0) / row[y];
        let (best, count) = match nb {
            Neighborhood::Edges => {
                let ns = space.neighbors(x);
                (ns.iter().map(|&y| decrease(y)).fold(0.0, f64::max), ns.len())
            }
            Neighborhood::Global => {
                ((0..n).filter(|&y| y != x).map(decrease).fold(0.0, f64::max), n - 1)
            }
            Neighborhood::Radius(r) => {
                let mut best = 0.0f64;
                let mut count = 0;
                for y in (0..n).filter(|&y| y != x && row[y] <= r) {
                    best = best.max(decrease(y));
                    count += 1;
                }
                (best, count)
            }
        };
        if count == 0 {
            Err(Error::EmptyNeighborhood { point: x })
        } else {
            Ok(best)
        }
    });
    ScalarField::new(out.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Per-point local Lipschitz bound `max_y |f(x) - f(y)| / d(x, y)` over the
/// same neighborhood as the subgradient.
pub fn local_lipschitz(f: &ScalarField, space: &MetricSpace, nb: Neighborhood) -> Result<ScalarField> {
    let neg = f.map(|v| -v)?;
    let a = metric_subgradient(f, space, nb)?;
    let b = metric_subgradient(&neg, space, nb)?;
    ScalarField::new(a.values().iter().zip(b.values()).map(|(x, y)| x.max(*y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid1d_endpoints_only() {
        let s = build_grid_1d(0.0, 1.0, 2).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dist(0, 1), 1.0);
        s.validate_metric().unwrap();
    }

    #[test]
    fn grid1d_uniform_step() {
        let s = build_grid_1d(-2.0, 2.0, 401).unwrap();
        let h = 0.01;
        for (i, j) in [(0, 1), (3, 250), (400, 0), (17, 17)] {
            assert_abs_diff_eq!(s.dist(i, j), h * (i as f64 - j as f64).abs(), epsilon = 1e-12);
        }
        s.validate_metric().unwrap();
    }

    #[test]
    fn grid1d_midpoint_witness() {
        let s = build_grid_1d(0.0, 1.0, 3).unwrap();
        assert_eq!(s.geodesic_witnesses(0, 2), vec![1]);
        assert_eq!(s.dist(0, 1) + s.dist(1, 2) - s.dist(0, 2), 0.0);
        assert_eq!(s.max_witness_excess(), 0.0);
    }

    #[test]
    fn grid1d_rejects_bad_arguments() {
        assert!(matches!(build_grid_1d(0.0, 1.0, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_grid_1d(1.0, 1.0, 5), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_grid_1d(2.0, 1.0, 5), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn grid2d_is_a_metric_with_collinear_witnesses() {
        let s = build_grid_2d(0.0, 1.0, 5, 0.0, 1.0, 5).unwrap();
        s.validate_metric().unwrap();
        // (0,0) -> (4,4) passes through the three diagonal lattice points.
        assert_eq!(s.geodesic_witnesses(0, 24), vec![6, 12, 18]);
        assert!(s.max_witness_excess() <= 0.0);
        assert!(s.is_interior(12));
        assert!(!s.is_interior(0));
    }

    #[test]
    fn gaussian_single_point_has_unit_weight() {
        let s = MetricSpace::from_parts(
            SpaceKind::Custom,
            vec![Point { id: 0, coords: Some(vec![0.3]) }],
            vec![0.0],
            vec![],
            0.0,
        )
        .unwrap();
        let m = gaussian_measure(&s, 1.0, &[0.0]).unwrap();
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn gaussian_is_reflection_symmetric() {
        let s = build_grid_1d(-3.0, 3.0, 61).unwrap();
        let m = gaussian_measure(&s, 0.7, &[0.0]).unwrap();
        let w = m.weights();
        for i in 0..61 {
            assert_abs_diff_eq!(w[i], w[60 - i], epsilon = 1e-15);
        }
    }

    #[test]
    fn gaussian_rejects_nonpositive_sigma() {
        let s = build_grid_1d(-1.0, 1.0, 5).unwrap();
        assert!(gaussian_measure(&s, 0.0, &[0.0]).is_err());
        assert!(gaussian_measure(&s, -1.0, &[0.0]).is_err());
    }

    #[test]
    fn gibbs_two_points() {
        let s = build_grid_1d(0.0, 1.0, 2).unwrap();
        let m = gibbs_measure(&s, 0, 2f64.ln(), 2.0).unwrap();
        assert_abs_diff_eq!(m.weights()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.weights()[1], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn gibbs_rejects_bad_parameters() {
        let s = build_grid_1d(0.0, 1.0, 3).unwrap();
        assert!(gibbs_measure(&s, 0, 0.0, 2.0).is_err());
        assert!(gibbs_measure(&s, 0, 1.0, 1.5).is_err());
        assert!(gibbs_measure(&s, 9, 1.0, 2.0).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let s = build_grid_1d(-2.0, 2.0, 401).unwrap();
        assert_eq!(lipschitz_constant(&ScalarField::constant(401, 3.0).unwrap(), &s), 0.0);
        let id = ScalarField::from_coord(&s, |x| x).unwrap();
        assert_abs_diff_eq!(lipschitz_constant(&id, &s), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn subgradient_of_identity_in_edge_mode() {
        let s = build_grid_1d(0.0, 1.0, 11).unwrap();
        let f = ScalarField::from_coord(&s, |x| x).unwrap();
        let g = metric_subgradient(&f, &s, Neighborhood::Edges).unwrap();
        assert_eq!(g.values()[0], 0.0);
        for i in 1..11 {
            assert_abs_diff_eq!(g.values()[i], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn subgradient_vanishes_at_local_minimum() {
        let s = build_grid_1d(-1.0, 1.0, 21).unwrap();
        let f = ScalarField::from_coord(&s, |x| (x - 0.3).abs()).unwrap();
        let g = metric_subgradient(&f, &s, Neighborhood::Edges).unwrap();
        assert_eq!(g.values()[13], 0.0);
    }

    #[test]
    fn subgradient_radius_mode_reports_empty_neighborhood() {
        let s = build_grid_1d(0.0, 1.0, 3).unwrap();
        let f = ScalarField::constant(3, 1.0).unwrap();
        match metric_subgradient(&f, &s, Neighborhood::Radius(0.1)) {
            Err(Error::EmptyNeighborhood { point }) => assert_eq!(point, 0),
            other => panic!("unexpected {other:?}"),
        }
        let g = metric_subgradient(&f, &s, Neighborhood::Radius(0.5)).unwrap();
        assert!(g.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn measure_validation() {
        assert!(ProbabilityMeasure::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityMeasure::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityMeasure::new(vec![1.5, -0.5]).is_err());
        assert!(ProbabilityMeasure::new(vec![0.0, 1.0]).is_ok());
        assert!(ScalarField::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn density_requires_absolute_continuity() {
        let mu = ProbabilityMeasure::new(vec![0.0, 1.0]).unwrap();
        let nu = ProbabilityMeasure::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(mu.density_of(&nu), Err(Error::AbsoluteContinuity { point: 0, .. })));
        let h = nu.density_of(&ProbabilityMeasure::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(h.values(), &[0.0, 2.0]);
    }
}
