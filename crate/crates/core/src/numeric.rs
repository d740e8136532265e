//! Small numerical helpers shared across modules.

/// Compensated (Neumaier) summation.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// `∫ v dμ` as a compensated sum.
pub fn integrate(weights: &[f64], values: &[f64]) -> f64 {
    sum(weights.iter().zip(values).map(|(w, v)| w * v))
}

/// `log ∫ e^{v} dμ`, normalized by the total mass of `weights`, evaluated with a
/// max shift. Points with zero weight are ignored.
///
/// For a constant `v ≡ c` the result is exactly `c`.
pub fn log_mean_exp(weights: &[f64], values: &[f64]) -> f64 {
    let max = weights
        .iter()
        .zip(values)
        .filter(|(w, _)| **w > 0.0)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let shifted = sum(
        weights
            .iter()
            .zip(values)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, v)| w * (v - max).exp()),
    );
    let total = sum(weights.iter().copied().filter(|w| *w > 0.0));
    max + (shifted.ln() - total.ln())
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = sum(xs.iter().copied()) / n;
    let my = sum(ys.iter().copied()) / n;
    let sxy = sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let sxx = sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    sxy / sxx
}

/// `x^p` with exact fast paths for the small integer exponents used everywhere.
#[inline]
pub fn pow(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else if p == 1.0 {
        x
    } else if p == 3.0 {
        x * x * x
    } else {
        x.powf(p)
    }
}

/// Parses `start:stop:count` into `count` evenly spaced values (inclusive).
pub fn parse_linear_grid(arg: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = arg.split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    let start: f64 = parts[0].trim().parse().ok()?;
    let stop: f64 = parts[1].trim().parse().ok()?;
    let count: usize = parts[2].trim().parse().ok()?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return None;
    }
    if count == 1 {
        return Some(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
    out[count - 1] = stop;
    Some(out)
}

/// `count` log-spaced values from `start` to `stop` inclusive.
pub fn geomspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let (ls, le) = (start.ln(), stop.ln());
    let mut out: Vec<f64> = (0..count)
        .map(|i| (ls + (le - ls) * i as f64 / (count - 1) as f64).exp())
        .collect();
    out[0] = start;
    out[count - 1] = stop;
    out
}
