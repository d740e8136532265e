//! Primal network simplex for the dense balanced transportation problem.
//!
//! Nodes `0..m` are sources and `m..m+n` targets; every arc runs from a source
//! to a target and is uncapacitated. The spanning tree is rooted at source 0
//! and stored through parent links, so the tree arc of a non-root node `v` is
//! the arc between `v` and `parent[v]`. Dual variables satisfy
//! `pi[m+j] - pi[i] = c[i][j]` on tree arcs; an arc may enter when its reduced
//! cost `c[i][j] + pi[i] - pi[m+j]` is negative.

const NONE: usize = usize::MAX;

pub(crate) struct Solution {
    /// `(source, target, flow)` for every tree arc.
    pub flows: Vec<(usize, usize, f64)>,
    pub source_pot: Vec<f64>,
    pub pivots: usize,
    pub converged: bool,
}

struct Tree<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    parent: Vec<usize>,
    flow: Vec<f64>,
    depth: Vec<usize>,
    pi: Vec<f64>,
    children: Vec<Vec<usize>>,
}

impl<'a> Tree<'a> {
    #[inline]
    fn arc_cost(&self, v: usize, w: usize) -> f64 {
        if v < self.m {
            self.cost[v * self.n + (w - self.m)]
        } else {
            self.cost[w * self.n + (v - self.m)]
        }
    }

    /// Potential of `v` from its parent's potential.
    #[inline]
    fn pot_from_parent(&self, v: usize) -> f64 {
        let w = self.parent[v];
        let c = self.arc_cost(v, w);
        if v < self.m {
            self.pi[w] - c
        } else {
            self.pi[w] + c
        }
    }

    fn refresh_subtree(&mut self, root: usize) {
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let w = self.parent[v];
            self.depth[v] = self.depth[w] + 1;
            self.pi[v] = self.pot_from_parent(v);
            stack.extend_from_slice(&self.children[v]);
        }
    }

    fn detach(&mut self, v: usize) {
        let p = self.parent[v];
        let list = &mut self.children[p];
        let pos = list.iter().position(|&c| c == v).expect("child listed under its parent");
        list.swap_remove(pos);
    }

    /// North-west corner start. Ties advance the column, which leaves the
    /// degenerate arc pointing away from the root.
    fn north_west(m: usize, n: usize, a: &[f64], b: &[f64], cost: &'a [f64]) -> Self {
        let mut arcs = Vec::with_capacity(m + n - 1);
        let (mut ra, mut rb) = (a[0], b[0]);
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let f = ra.min(rb);
            arcs.push((i, j, f));
            ra -= f;
            rb -= f;
            if i == m - 1 && j == n - 1 {
                break;
            }
            let next_row = if i == m - 1 {
                false
            } else if j == n - 1 {
                true
            } else {
                ra < rb
            };
            if next_row {
                i += 1;
                ra = a[i];
            } else {
                j += 1;
                rb = b[j];
            }
        }
        let total = m + n;
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); total];
        for &(i, j, f) in &arcs {
            adj[i].push((m + j, f));
            adj[m + j].push((i, f));
        }
        let mut tree = Tree {
            m,
            n,
            cost,
            parent: vec![NONE; total],
            flow: vec![0.0; total],
            depth: vec![0; total],
            pi: vec![0.0; total],
            children: vec![Vec::new(); total],
        };
        let mut seen = vec![false; total];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(w, f) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree.parent[w] = v;
                    tree.flow[w] = f;
                    tree.children[v].push(w);
                    tree.depth[w] = tree.depth[v] + 1;
                    tree.pi[w] = tree.pot_from_parent(w);
                    queue.push_back(w);
                }
            }
        }
        tree
    }

    fn pivot(&mut self, si: usize, tj: usize) {
        // Join of the two endpoints.
        let (mut x, mut y) = (si, tj);
        while x != y {
            if self.depth[x] > self.depth[y] {
                x = self.parent[x];
            } else if self.depth[y] > self.depth[x] {
                y = self.parent[y];
            } else {
                x = self.parent[x];
                y = self.parent[y];
            }
        }
        let join = x;

        // Leaving arc: last blocking arc along the cycle oriented by the
        // entering arc si -> tj, starting from the join.
        let mut delta = f64::INFINITY;
        let mut out = NONE;
        let mut out_first = false;
        let mut v = si;
        while v != join {
            if v < self.m && self.flow[v] < delta {
                delta = self.flow[v];
                out = v;
                out_first = true;
            }
            v = self.parent[v];
        }
        let mut v = tj;
        while v != join {
            if v >= self.m && self.flow[v] <= delta {
                delta = self.flow[v];
                out = v;
                out_first = false;
            }
            v = self.parent[v];
        }

        if delta > 0.0 {
            let mut v = si;
            while v != join {
                if v < self.m {
                    self.flow[v] -= delta;
                } else {
                    self.flow[v] += delta;
                }
                v = self.parent[v];
            }
            let mut v = tj;
            while v != join {
                if v >= self.m {
                    self.flow[v] -= delta;
                } else {
                    self.flow[v] += delta;
                }
                v = self.parent[v];
            }
        }

        // Re-hang the detached subtree below the other endpoint.
        let (u_in, new_parent) = if out_first { (si, tj) } else { (tj, si) };
        let mut prev = new_parent;
        let mut prev_flow = delta;
        let mut v = u_in;
        loop {
            let old_parent = self.parent[v];
            let old_flow = self.flow[v];
            self.detach(v);
            self.parent[v] = prev;
            self.flow[v] = prev_flow;
            self.children[prev].push(v);
            if v == out {
                break;
            }
            prev = v;
            prev_flow = old_flow;
            v = old_parent;
        }
        self.refresh_subtree(u_in);
    }
}

/// Solves `min Σ c_ij x_ij` subject to row sums `a`, column sums `b`, `x >= 0`.
/// All entries of `a` and `b` must be positive.
pub(crate) fn solve(a: &[f64], b: &[f64], cost: &[f64], max_pivots: usize) -> Solution {
    let (m, n) = (a.len(), b.len());
    debug_assert_eq!(cost.len(), m * n);
    let mut tree = Tree::north_west(m, n, a, b, cost);
    let cmax = cost.iter().copied().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let eps = 1e-12 * cmax.max(1.0);
    let total = m * n;
    let block = ((total as f64).sqrt().ceil() as usize).clamp(1, total);
    let mut next_arc = 0usize;
    let mut pivots = 0usize;
    let mut converged = false;
    while pivots < max_pivots {
        let mut best = -eps;
        let mut enter = NONE;
        let mut scanned = 0;
        while scanned < total {
            let end = (scanned + block).min(total);
            for k in scanned..end {
                let mut arc = next_arc + k;
                if arc >= total {
                    arc -= total;
                }
                let (i, j) = (arc / n, arc % n);
                let rc = cost[arc] + tree.pi[i] - tree.pi[m + j];
                if rc < best {
                    best = rc;
                    enter = arc;
                }
            }
            scanned = end;
            if enter != NONE {
                break;
            }
        }
        if enter == NONE {
            converged = true;
            break;
        }
        next_arc = (next_arc + scanned) % total;
        tree.pivot(enter / n, m + enter % n);
        pivots += 1;
    }

    let mut flows = Vec::with_capacity(m + n - 1);
    for v in 1..m + n {
        let w = tree.parent[v];
        let (s, t) = if v < m { (v, w - m) } else { (w, v - m) };
        flows.push((s, t, tree.flow[v]));
    }
    Solution {
        flows,
        source_pot: tree.pi[..m].to_vec(),
        pivots,
        converged,
    }
}
