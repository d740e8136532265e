use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{MetricSpace, Point, SpaceKind, Witnesses};
use crate::error::{invalid, Error, Result};
use crate::par::{map_indices, Exec};

#[derive(Clone, Copy, PartialEq)]
struct Item {
    dist: f64,
    node: usize,
}

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance, then on node id.
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Item { dist: 0.0, node: source });
    while let Some(Item { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Item { dist: nd, node: next });
            }
        }
    }
    dist
}

/// Shortest-path metric of a connected weighted graph.
pub fn build_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<MetricSpace> {
    let points = (0..n).map(|id| Point { id, coords: None }).collect();
    graph_metric(SpaceKind::Graph, points, edges, false)
}

pub(crate) fn graph_metric(
    kind: SpaceKind,
    points: Vec<Point>,
    edges: &[(usize, usize, f64)],
    approximate: bool,
) -> Result<MetricSpace> {
    let n = points.len();
    if n == 0 {
        return Err(invalid("a graph needs at least one vertex"));
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in edges {
        if u >= n || v >= n {
            return Err(invalid(format!("edge ({u},{v}) references a vertex outside 0..{n}")));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(invalid(format!("edge ({u},{v}) has non-positive length {w}")));
        }
        if u == v {
            continue;
        }
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    for list in &mut adj {
        list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }

    let rows = map_indices(n, Exec::Parallel, |s| dijkstra(&adj, s));
    let mut dist = vec![0.0; n * n];
    for (s, row) in rows.iter().enumerate() {
        for (t, d) in row.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::MetricUndefined(format!(
                    "graph is disconnected: no path from {s} to {t}"
                )));
            }
            dist[s * n + t] = *d;
        }
    }
    // Force exact symmetry; the two Dijkstra runs may round differently.
    for s in 0..n {
        for t in s + 1..n {
            let d = dist[s * n + t].min(dist[t * n + s]);
            dist[s * n + t] = d;
            dist[t * n + s] = d;
        }
    }

    let next: Vec<u32> = map_indices(n, Exec::Parallel, |s| {
        let row = &dist[s * n..(s + 1) * n];
        (0..n)
            .map(|t| {
                if s == t {
                    return s as u32;
                }
                let target = row[t];
                adj[s]
                    .iter()
                    .find(|&&(v, w)| w + dist[v * n + t] <= target * (1.0 + 1e-12))
                    .map(|&(v, _)| v as u32)
                    .expect("a shortest path always leaves through some neighbor")
            })
            .collect::<Vec<u32>>()
    })
    .into_iter()
    .flatten()
    .collect();

    let mut stencil: Vec<(usize, usize, f64)> = edges
        .iter()
        .filter(|e| e.0 != e.1)
        .map(|&(u, v, w)| (u.min(v), u.max(v), w))
        .collect();
    // Parallel edges collapse to the shortest one.
    stencil.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    stencil.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);

    let space = MetricSpace::assemble(
        kind,
        points,
        dist,
        stencil,
        Witnesses::NextHop(next),
        0.0,
        approximate,
    )?;
    space.validate_metric()?;
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_triangle() {
        let s = build_graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(s.dist(x, y), if x == y { 0.0 } else { 1.0 });
            }
        }
        assert!(s.geodesic_witnesses(0, 2).is_empty());
    }

    #[test]
    fn path_graph_witness() {
        let s = build_graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(s.dist(0, 2), 2.0);
        assert_eq!(s.geodesic_witnesses(0, 2), vec![1]);
    }

    #[test]
    fn four_cycle_keeps_lowest_id_witness() {
        let s = build_graph(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        assert_eq!(s.dist(0, 2), 2.0);
        assert_eq!(s.dist(1, 3), 2.0);
        // Brute force: both 1 and 3 lie on a shortest 0-2 path; 0 and 2 on a 1-3 path.
        assert_eq!(s.geodesic_witnesses(0, 2), vec![1]);
        assert_eq!(s.geodesic_witnesses(2, 0), vec![1]);
        assert_eq!(s.geodesic_witnesses(1, 3), vec![0]);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        match build_graph(4, &[(0, 1, 1.0), (2, 3, 1.0)]) {
            Err(Error::MetricUndefined(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_lengths_are_rejected() {
        assert!(build_graph(2, &[(0, 1, 0.0)]).is_err());
        assert!(build_graph(2, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn shortcut_edges_are_bypassed() {
        // The direct 0-2 edge is longer than the path through 1.
        let s = build_graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        assert_eq!(s.dist(0, 2), 2.0);
        assert_eq!(s.geodesic_witnesses(0, 2), vec![1]);
    }
}
