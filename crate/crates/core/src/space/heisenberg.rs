//! Lattice ball of the first Heisenberg group generated by horizontal moves.
//!
//! Points are stored as integer triples `(a, b, c)` standing for
//! `(a s, b s, c s^2 / 2)` under the group law
//! `(x, y, z)(x', y', z') = (x + x', y + y', z + z' + (x y' - y x') / 2)`.
//! Right-multiplying by `(±s, 0, 0)` or `(0, ±s, 0)` keeps `c` an integer.

use std::collections::{HashMap, VecDeque};

use super::graph::graph_metric;
use super::{MetricSpace, Point, SpaceKind};
use crate::error::{invalid, Result};

type Cell = (i64, i64, i64);

fn moves(p: Cell) -> [Cell; 4] {
    let (a, b, c) = p;
    [
        (a + 1, b, c - b),
        (a - 1, b, c + b),
        (a, b + 1, c + a),
        (a, b - 1, c - a),
    ]
}

/// All lattice points within `levels` horizontal moves of the identity; the
/// metric is the hop distance times `step` inside the generated set.
pub fn build_heisenberg_grid(levels: usize, step: f64) -> Result<MetricSpace> {
    if levels < 1 {
        return Err(invalid("heisenberg grid needs levels >= 1"));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(invalid(format!("heisenberg step must be positive, got {step}")));
    }
    let mut index: HashMap<Cell, usize> = HashMap::new();
    let mut cells: Vec<Cell> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert((0, 0, 0), 0);
    cells.push((0, 0, 0));
    queue.push_back(((0, 0, 0), 0usize));
    while let Some((p, depth)) = queue.pop_front() {
        if depth == levels {
            continue;
        }
        for q in moves(p) {
            if !index.contains_key(&q) {
                index.insert(q, cells.len());
                cells.push(q);
                queue.push_back((q, depth + 1));
            }
        }
    }

    let mut edges = Vec::new();
    for (i, &p) in cells.iter().enumerate() {
        for q in moves(p) {
            if let Some(&j) = index.get(&q) {
                if i < j {
                    edges.push((i, j, step));
                }
            }
        }
    }
    let points = cells
        .iter()
        .enumerate()
        .map(|(id, &(a, b, c))| Point {
            id,
            coords: Some(vec![a as f64 * step, b as f64 * step, c as f64 * step * step / 2.0]),
        })
        .collect();
    graph_metric(SpaceKind::HeisenbergGrid, points, &edges, true)
}
