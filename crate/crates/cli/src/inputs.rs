//! Named measures and sample families.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fikit::families::{coordinate, exp_family, exponential_tilts, random_lipschitz, trig_perturbations};
use fikit::io::read_field;
use fikit::numeric::{geomspace, parse_linear_grid};
use fikit::space::{gaussian_measure, gibbs_measure, MetricSpace, ProbabilityMeasure, ScalarField, SpaceKind};

/// `start:stop:count`, evenly spaced; a `log:` prefix spaces points geometrically.
pub fn parse_grid(arg: &str) -> Result<Vec<f64>> {
    let (log, body) = match arg.strip_prefix("log:") {
        Some(rest) => (true, rest),
        None => (false, arg),
    };
    let lin = parse_linear_grid(body).ok_or_else(|| anyhow!("bad grid {arg:?}; expected start:stop:count"))?;
    if !log {
        return Ok(lin);
    }
    let (a, b) = (lin[0], lin[lin.len() - 1]);
    if !(a > 0.0 && b > 0.0) {
        bail!("log grid {arg:?} needs positive endpoints");
    }
    Ok(geomspace(a, b, lin.len()))
}

pub fn default_measure(space: &MetricSpace) -> &'static str {
    match space.kind() {
        SpaceKind::Grid1d | SpaceKind::Grid2d => "gaussian:1",
        SpaceKind::HeisenbergGrid => "gibbs:1:2",
        _ => "uniform",
    }
}

fn num(part: Option<&str>, default: f64, what: &str) -> Result<f64> {
    match part {
        None => Ok(default),
        Some(s) => s.parse().map_err(|_| anyhow!("bad {what} {s:?}")),
    }
}

/// `uniform`, `gaussian[:sigma]`, `gibbs[:beta[:p[:base]]]` or a
/// `point_id,value` CSV of masses.
pub fn measure(space: &MetricSpace, arg: &str) -> Result<ProbabilityMeasure> {
    let mut parts = arg.split(':');
    let head = parts.next().unwrap_or("");
    let mu = match head {
        "uniform" => ProbabilityMeasure::uniform(space.len())?,
        "gaussian" => {
            let sigma = num(parts.next(), 1.0, "sigma")?;
            let dim = space.coords(0).map(<[f64]>::len).ok_or_else(|| anyhow!("gaussian measure needs coordinates"))?;
            gaussian_measure(space, sigma, &vec![0.0; dim])?
        }
        "gibbs" => {
            let beta = num(parts.next(), 1.0, "beta")?;
            let p = num(parts.next(), 2.0, "exponent")?;
            let base = num(parts.next(), 0.0, "base point")? as usize;
            gibbs_measure(space, base, beta, p)?
        }
        _ => {
            let masses = read_field(Path::new(arg), space.len()).with_context(|| format!("reading measure {arg}"))?;
            ProbabilityMeasure::normalized(masses)?
        }
    };
    Ok(mu)
}

/// Parameters shared by the generated families.
pub struct FamilyParams {
    pub count: usize,
    pub seed: u64,
    pub lambdas: Vec<f64>,
    pub q: f64,
}

fn feature(space: &MetricSpace) -> Vec<f64> {
    coordinate(space, 0).unwrap_or_else(|_| space.row(0).to_vec())
}

/// `exp`, `lipschitz`, `trig` (perturbation densities) or `file:PATH`.
pub fn fields(space: &MetricSpace, mu: &ProbabilityMeasure, arg: &str, fp: &FamilyParams) -> Result<Vec<ScalarField>> {
    Ok(match arg {
        "exp" => exp_family(&feature(space), &fp.lambdas, fp.q)?,
        "lipschitz" => random_lipschitz(space, fp.count, fp.seed, 0.5, 2.0)?,
        "trig" => trig_perturbations(space, mu, fp.count, fp.seed)?
            .iter()
            .map(|nu| mu.density_of(nu))
            .collect::<fikit::Result<_>>()?,
        _ => {
            let path = arg.strip_prefix("file:").ok_or_else(|| anyhow!("unknown family {arg:?}"))?;
            vec![ScalarField::new(read_field(Path::new(path), space.len())?)?]
        }
    })
}

/// `trig`, `exp` (exponential tilts), `lipschitz` (`∝ μ e^f`) or `file:PATH`.
pub fn measures(
    space: &MetricSpace,
    mu: &ProbabilityMeasure,
    arg: &str,
    fp: &FamilyParams,
) -> Result<Vec<ProbabilityMeasure>> {
    Ok(match arg {
        "trig" => trig_perturbations(space, mu, fp.count, fp.seed)?,
        "exp" => exponential_tilts(mu, &feature(space), &fp.lambdas)?,
        "lipschitz" => random_lipschitz(space, fp.count, fp.seed, 0.5, 2.0)?
            .iter()
            .map(|f| exponential_tilts(mu, f.values(), &[1.0]).map(|mut v| v.remove(0)))
            .collect::<fikit::Result<_>>()?,
        _ => {
            let path = arg.strip_prefix("file:").ok_or_else(|| anyhow!("unknown family {arg:?}"))?;
            vec![ProbabilityMeasure::normalized(read_field(Path::new(path), space.len())?)?]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fikit::space::build_grid_1d;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1:1:10").unwrap().len(), 10);
        let g = parse_grid("log:0.01:1:3").unwrap();
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert!(parse_grid("log:0:1:3").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn measure_specs() {
        let s = build_grid_1d(-1.0, 1.0, 5).unwrap();
        assert_eq!(measure(&s, "uniform").unwrap().weights()[0], 0.2);
        let g = measure(&s, "gaussian:0.5").unwrap();
        assert!(g.weights()[2] > g.weights()[0]);
        assert!(measure(&s, "gibbs:1:1").is_err());
        assert!(measure(&s, "no-such-file.csv").is_err());
    }
}
