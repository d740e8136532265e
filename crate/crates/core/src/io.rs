//! File formats: JSON space documents, CSV fields and results, JSON and
//! markdown reports. Every writer replaces its target atomically.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Tabulated;
use crate::hopf_lax::HopfLaxResult;
use crate::inequalities::Curve;
use crate::report::CheckReport;
use crate::space::{graph_metric, MetricSpace, Point, SpaceKind};
use crate::transport::TransportPlan;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricDoc {
    /// Full symmetric matrix; `edges` carries the neighbor stencil, if any.
    Matrix {
        data: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        edges: Vec<(usize, usize, f64)>,
    },
    /// Shortest-path metric of a weighted graph.
    Graph { edges: Vec<(usize, usize, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub kind: SpaceKind,
    pub points: Vec<Point>,
    pub metric: MetricDoc,
    #[serde(default)]
    pub geo_tol: f64,
}

impl SpaceDoc {
    pub fn from_space(space: &MetricSpace) -> Self {
        let metric = match space.kind() {
            SpaceKind::Graph | SpaceKind::HeisenbergGrid => MetricDoc::Graph { edges: space.edges().to_vec() },
            _ => MetricDoc::Matrix {
                data: (0..space.len()).map(|x| space.row(x).to_vec()).collect(),
                edges: space.edges().to_vec(),
            },
        };
        SpaceDoc { kind: space.kind(), points: space.points().to_vec(), metric, geo_tol: space.geo_tol() }
    }

    pub fn into_space(self) -> Result<MetricSpace> {
        for (i, p) in self.points.iter().enumerate() {
            if p.id != i {
                return Err(Error::Parse(format!("point ids must be 0..n in order; found {} at position {i}", p.id)));
            }
        }
        match self.metric {
            MetricDoc::Graph { edges } => {
                graph_metric(self.kind, self.points, &edges, self.kind == SpaceKind::HeisenbergGrid)
            }
            MetricDoc::Matrix { data, edges } => {
                let n = self.points.len();
                if data.len() != n || data.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!("metric matrix must be {n} x {n}")));
                }
                MetricSpace::from_parts(self.kind, self.points, data.concat(), edges, self.geo_tol)
            }
        }
    }
}

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_space(path: &Path, space: &MetricSpace) -> Result<()> {
    write_atomic(path, serde_json::to_string(&SpaceDoc::from_space(space))?.as_bytes())
}

pub fn read_space(path: &Path) -> Result<MetricSpace> {
    let doc: SpaceDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    doc.into_space()
}

/// Shortest decimal that parses back to the same value.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn csv_bytes<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// `point_id,value` CSV.
pub fn write_field(path: &Path, values: &[f64]) -> Result<()> {
    write_atomic(path, &csv_bytes(["point_id", "value"], values.iter().enumerate().map(|(i, v)| [i.to_string(), num(*v)]))?)
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("line {line}: cannot parse {s:?} as a number")))
}

fn read_pairs(text: &str, header: [&str; 2]) -> Result<Vec<(String, f64)>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let got: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if got != header {
        return Err(Error::Parse(format!("expected header {}, got {}", header.join(","), got.join(","))));
    }
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected 2 columns", k + 2)));
        }
        out.push((rec[0].to_string(), parse_num(&rec[1], k + 2)?));
    }
    Ok(out)
}

/// Reads a `point_id,value` CSV; every id in `0..n` must appear once.
pub fn parse_field(text: &str, n: usize) -> Result<Vec<f64>> {
    let mut values = vec![None; n];
    for (k, (id, v)) in read_pairs(text, ["point_id", "value"])?.into_iter().enumerate() {
        let id: usize = id.parse().map_err(|_| Error::Parse(format!("line {}: bad point id {id:?}", k + 2)))?;
        let slot = values
            .get_mut(id)
            .ok_or_else(|| Error::Parse(format!("line {}: point id {id} outside 0..{n}", k + 2)))?;
        if slot.replace(v).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate point id {id}", k + 2)));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing value for point {i}"))))
        .collect()
}

pub fn read_field(path: &Path, n: usize) -> Result<Vec<f64>> {
    parse_field(&std::fs::read_to_string(path)?, n)
}

/// Reads a `u,v,length` edge list.
pub fn read_edges(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != ["u", "v", "length"] {
        return Err(Error::Parse(format!("expected header u,v,length, got {}", header.join(","))));
    }
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let id = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("line {line}: bad vertex {s:?}")));
        if rec.len() != 3 {
            return Err(Error::Parse(format!("line {line}: expected 3 columns")));
        }
        out.push((id(&rec[0])?, id(&rec[1])?, parse_num(&rec[2], line)?));
    }
    Ok(out)
}

/// `point_id,u,argmin_id` CSV.
pub fn write_hopf_lax(path: &Path, result: &HopfLaxResult) -> Result<()> {
    let rows = result
        .u
        .values()
        .iter()
        .zip(&result.argmin)
        .enumerate()
        .map(|(i, (u, a))| [i.to_string(), num(*u), a.to_string()]);
    write_atomic(path, &csv_bytes(["point_id", "u", "argmin_id"], rows)?)
}

/// Sparse `src_id,dst_id,mass` CSV.
pub fn write_plan(path: &Path, plan: &TransportPlan) -> Result<()> {
    let rows = plan.triplets().into_iter().map(|(s, d, m)| [s.to_string(), d.to_string(), num(m)]);
    write_atomic(path, &csv_bytes(["src_id", "dst_id", "mass"], rows)?)
}

/// `point_id,f,g` CSV.
pub fn write_potentials(path: &Path, plan: &TransportPlan) -> Result<()> {
    let (f, g) = plan.potentials();
    let rows = f.iter().zip(g).enumerate().map(|(i, (a, b))| [i.to_string(), num(*a), num(*b)]);
    write_atomic(path, &csv_bytes(["point_id", "f", "g"], rows)?)
}

/// `v,value` CSV of a tabulated function.
pub fn write_tabulated(path: &Path, tab: &Tabulated) -> Result<()> {
    let rows = tab.grid().iter().zip(tab.values()).map(|(v, y)| [num(*v), num(*y)]);
    write_atomic(path, &csv_bytes(["v", "value"], rows)?)
}

/// Reads a `v,value` CSV; `slope_bound` bounds the growth past the last sample.
pub fn read_tabulated(path: &Path, slope_bound: f64) -> Result<Tabulated> {
    let text = std::fs::read_to_string(path)?;
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (k, (v, y)) in read_pairs(&text, ["v", "value"])?.into_iter().enumerate() {
        grid.push(parse_num(&v, k + 2)?);
        values.push(y);
    }
    Tabulated::new(grid, values, slope_bound)
}

/// `t,value` CSV.
pub fn write_curve(path: &Path, curve: &Curve) -> Result<()> {
    let rows = curve.t.iter().zip(&curve.value).map(|(t, v)| [num(*t), num(*v)]);
    write_atomic(path, &csv_bytes(["t", "value"], rows)?)
}

/// Writes `<stem>.json` and `<stem>.md` into `dir`.
pub fn write_report(dir: &Path, stem: &str, report: &CheckReport) -> Result<()> {
    write_atomic(&dir.join(format!("{stem}.json")), report.to_json().as_bytes())?;
    write_atomic(&dir.join(format!("{stem}.md")), report.to_markdown().as_bytes())
}

pub fn read_report(path: &Path) -> Result<CheckReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_graph, build_grid_1d, build_grid_2d, build_heisenberg_grid};

    #[test]
    fn spaces_survive_serialization() {
        let spaces = vec![
            build_grid_1d(-1.0, 1.0, 7).unwrap(),
            build_grid_2d(0.0, 1.0, 3, 0.0, 2.0, 4).unwrap(),
            build_graph(4, &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0), (0, 3, 1.5)]).unwrap(),
            build_heisenberg_grid(2, 0.5).unwrap(),
        ];
        for s in spaces {
            let text = serde_json::to_string(&SpaceDoc::from_space(&s)).unwrap();
            let back = serde_json::from_str::<SpaceDoc>(&text).unwrap().into_space().unwrap();
            assert_eq!(back.kind(), s.kind());
            assert_eq!(back.distances(), s.distances());
            assert_eq!(back.edges(), s.edges());
            assert_eq!(back.is_approximate(), s.is_approximate());
        }
    }

    #[test]
    fn matrix_document_shape() {
        let doc = SpaceDoc::from_space(&build_grid_1d(0.0, 1.0, 2).unwrap());
        let v = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["kind"], "grid1d");
        assert_eq!(v["metric"]["type"], "matrix");
        assert_eq!(v["metric"]["data"][0][1], 1.0);
    }

    #[test]
    fn field_parsing_rejects_gaps_and_duplicates() {
        assert_eq!(parse_field("point_id,value\n1,2.5\n0,-1\n", 2).unwrap(), vec![-1.0, 2.5]);
        assert!(matches!(parse_field("point_id,value\n0,1\n", 2), Err(Error::Parse(_))));
        assert!(matches!(parse_field("point_id,value\n0,1\n0,2\n", 2), Err(Error::Parse(_))));
        assert!(matches!(parse_field("id,value\n0,1\n", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_field("point_id,value\n0,abc\n", 1), Err(Error::Parse(_))));
    }

    #[test]
    fn atomic_write_round_trips_a_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let values = vec![0.1, 1e-300, -3.0, 2.0f64.sqrt()];
        write_field(&path, &values).unwrap();
        assert_eq!(read_field(&path, 4).unwrap(), values);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("point_id,value\n0,0.1\n") && !text.contains('\r'));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
