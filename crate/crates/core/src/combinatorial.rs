//! Discrete kernels behind the oracles: DAG topological sorting, single-pair
//! shortest path on a DAG, and the Hungarian assignment algorithm.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};
use crate::numerics::{all_finite, Matrix};

/// Single-source single-sink directed acyclic graph in topologically
/// relabeled form: vertex 0 is the source, vertex `vertex_count - 1` the
/// sink, and every edge points from a smaller to a larger vertex index.
///
/// Edge order is preserved by the relabeling, so edge `i` of the input is
/// edge `i` here; flow vectors are indexed by that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    relabeling: Vec<usize>,
}

impl Dag {
    /// Validates a raw edge list (0-based vertex labels) and relabels the
    /// vertices topologically. Fails on cycles, on out-of-range endpoints,
    /// and unless there is exactly one source and one sink.
    pub fn topo_sort(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count < 2 {
            return Err(Error::InvalidParameter("a DAG needs at least two vertices"));
        }
        let mut in_deg = vec![0usize; vertex_count];
        let mut out_deg = vec![0usize; vertex_count];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
        for &(tail, head) in edges {
            if tail >= vertex_count || head >= vertex_count {
                return Err(Error::InvalidParameter("edge endpoint out of range"));
            }
            if tail == head {
                return Err(Error::CycleDetected);
            }
            in_deg[head] += 1;
            out_deg[tail] += 1;
            adj[tail].push(head);
        }
        // Kahn's algorithm, smallest original index first, so the
        // relabeling is deterministic. Cycles are diagnosed before the
        // source/sink count so a strongly connected input reports as a
        // cycle rather than as a missing source.
        let mut ready: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
        let mut remaining = in_deg.clone();
        for (v, &d) in remaining.iter().enumerate() {
            if d == 0 {
                ready.push(Reverse(v));
            }
        }
        let mut relabeling = vec![usize::MAX; vertex_count];
        let mut next_label = 0usize;
        while let Some(Reverse(v)) = ready.pop() {
            relabeling[v] = next_label;
            next_label += 1;
            for &h in &adj[v] {
                remaining[h] -= 1;
                if remaining[h] == 0 {
                    ready.push(Reverse(h));
                }
            }
        }
        if next_label != vertex_count {
            return Err(Error::CycleDetected);
        }
        let sources = in_deg.iter().filter(|&&d| d == 0).count();
        let sinks = out_deg.iter().filter(|&&d| d == 0).count();
        if sources != 1 || sinks != 1 {
            return Err(Error::BadSourceSink { sources, sinks });
        }

        let edges = edges
            .iter()
            .map(|&(t, h)| (relabeling[t], relabeling[h]))
            .collect();
        Ok(Self {
            vertex_count,
            edges,
            relabeling,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Relabeled edges; every `(tail, head)` satisfies `tail < head`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Map from original vertex label to topological label.
    pub fn relabeling(&self) -> &[usize] {
        &self.relabeling
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.vertex_count - 1
    }
}

/// Indicator vector (0/1 entries, one per edge) of a minimum-weight
/// source-to-sink path. Weights may be negative; a single relaxation pass in
/// topological order is exact on a DAG. Ties are resolved toward the
/// smallest predecessor vertex and then the smallest edge index, so the
/// output is deterministic.
pub fn dag_shortest_path(dag: &Dag, weights: &[f64]) -> Result<Vec<f64>> {
    let n = dag.edge_count();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if !all_finite(weights) {
        return Err(Error::NonFinite("edge weights"));
    }
    let m = dag.vertex_count();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (e, &(tail, _)) in dag.edges().iter().enumerate() {
        out_edges[tail].push(e);
    }

    let mut dist = vec![f64::INFINITY; m];
    let mut pred_edge: Vec<Option<usize>> = vec![None; m];
    dist[dag.source()] = 0.0;
    for v in 0..m {
        if dist[v].is_infinite() {
            continue;
        }
        for &e in &out_edges[v] {
            let (_, head) = dag.edges()[e];
            let cand = dist[v] + weights[e];
            // Strict improvement only: the first vertex (in topological
            // order) reaching the minimum keeps the tie.
            if cand < dist[head] {
                dist[head] = cand;
                pred_edge[head] = Some(e);
            }
        }
    }
    if dist[dag.sink()].is_infinite() {
        return Err(Error::SinkUnreachable);
    }

    let mut flow = vec![0.0; n];
    let mut v = dag.sink();
    while v != dag.source() {
        let e = pred_edge[v].expect("predecessor exists on reached vertex");
        flow[e] = 1.0;
        v = dag.edges()[e].0;
    }
    Ok(flow)
}

/// A minimum-cost assignment: row `i` is matched to column `perm[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub cost: f64,
}

/// Exact minimum-cost assignment by the O(n³) potentials / augmenting-path
/// form of the Hungarian algorithm. The implementation is fully
/// deterministic: columns are scanned in index order.
pub fn hungarian(cost: &Matrix) -> Result<Assignment> {
    if cost.rows() != cost.cols() {
        return Err(Error::NotSquare {
            rows: cost.rows(),
            cols: cost.cols(),
        });
    }
    if !all_finite(cost.data()) {
        return Err(Error::NonFinite("cost matrix"));
    }
    let n = cost.rows();
    if n == 0 {
        return Ok(Assignment {
            perm: Vec::new(),
            cost: 0.0,
        });
    }

    // 1-based working arrays; column 0 is the virtual unmatched column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1]; // row matched to each column, 0 = free
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        // Augment along the alternating path back to the virtual column.
        while j0 != 0 {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[row_of[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| cost.get(i, perm[i])).sum();
    Ok(Assignment { perm, cost: total })
}
