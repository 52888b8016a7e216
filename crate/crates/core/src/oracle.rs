//! Ground truth: the explicit disk graph and textbook Dijkstra.

use thiserror::Error;

use crate::exec::Execution;
use crate::keys::MinHeap;
use crate::model::{is_edge, DiskInstance, SsspResult, VertexId};

pub const DEFAULT_VERTEX_CAP: usize = 20_000;
pub const DEFAULT_EDGE_CAP: usize = 40_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: DEFAULT_VERTEX_CAP,
            max_edges: DEFAULT_EDGE_CAP,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("refusing to materialize {n} vertices (cap {cap})")]
    TooManyVertices { n: usize, cap: usize },
    #[error("refusing to materialize more than {cap} edges")]
    TooManyEdges { cap: usize },
}

/// Adjacency lists of the disk graph with edge weights `|uv|`.
#[derive(Clone, Debug)]
pub struct ExplicitGraph {
    adj: Vec<Vec<(VertexId, f64)>>,
    edges: usize,
}

impl ExplicitGraph {
    pub fn materialize(
        inst: &DiskInstance,
        limits: OracleLimits,
        exec: Execution,
    ) -> Result<Self, OracleError> {
        let n = inst.len();
        if n > limits.max_vertices {
            return Err(OracleError::TooManyVertices {
                n,
                cap: limits.max_vertices,
            });
        }
        let rows: Vec<usize> = (0..n).collect();
        let vs = inst.vertices();
        let adj: Vec<Vec<(VertexId, f64)>> = exec.map(&rows, |&i| {
            let u = &vs[i];
            (0..n)
                .filter(|&j| j != i && is_edge(u, &vs[j]))
                .map(|j| {
                    (
                        VertexId::from_index(j),
                        inst.dist(VertexId::from_index(i), VertexId::from_index(j)),
                    )
                })
                .collect()
        });
        let degree_sum: usize = adj.iter().map(Vec::len).sum();
        let edges = degree_sum / 2;
        if edges > limits.max_edges {
            return Err(OracleError::TooManyEdges {
                cap: limits.max_edges,
            });
        }
        Ok(ExplicitGraph { adj, edges })
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adj[v.index()]
    }

    /// Dijkstra from `s`. A vertex's predecessor minimizes
    /// `(dist(u) + |uv|, u)`.
    pub fn dijkstra(&self, s: VertexId) -> SsspResult {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<VertexId>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = MinHeap::new();
        dist[s.index()] = 0.0;
        heap.push(0.0, s);
        while let Some((d, u)) = heap.pop() {
            if done[u.index()] || d != dist[u.index()] {
                continue;
            }
            done[u.index()] = true;
            for &(v, w) in &self.adj[u.index()] {
                if done[v.index()] {
                    continue;
                }
                let nd = d + w;
                let better = nd < dist[v.index()]
                    || (nd == dist[v.index()] && prev[v.index()].is_some_and(|p| u < p));
                if better {
                    if nd < dist[v.index()] {
                        heap.push(nd, v);
                    }
                    dist[v.index()] = nd;
                    prev[v.index()] = Some(u);
                }
            }
        }
        SsspResult { dist, prev }
    }
}

pub fn solve_oracle_with(
    inst: &DiskInstance,
    limits: OracleLimits,
    exec: Execution,
) -> Result<SsspResult, OracleError> {
    Ok(ExplicitGraph::materialize(inst, limits, exec)?.dijkstra(inst.source()))
}

pub fn solve_oracle(inst: &DiskInstance) -> Result<SsspResult, OracleError> {
    solve_oracle_with(inst, OracleLimits::default(), Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_result, EdgeCheck, Vertex};

    fn inst(points: &[(f64, f64, f64)], source: usize) -> DiskInstance {
        DiskInstance::new(
            points
                .iter()
                .map(|&(x, y, r)| Vertex::new(x, y, r))
                .collect(),
            source,
        )
        .unwrap()
    }

    #[test]
    fn path_has_two_edges() {
        let i = inst(&[(0.0, 0.0, 1.0), (1.5, 0.0, 1.0), (3.0, 0.0, 1.0)], 0);
        let g =
            ExplicitGraph::materialize(&i, OracleLimits::default(), Execution::Sequential).unwrap();
        assert_eq!(g.edge_count(), 2);
        let res = g.dijkstra(i.source());
        assert_eq!(res.dist, vec![0.0, 1.5, 3.0]);
        assert!(validate_result(&i, &res, EdgeCheck::Full).is_empty());
    }

    #[test]
    fn triangle_of_unit_disks() {
        let h = 3f64.sqrt() / 2.0;
        let i = inst(&[(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (0.5, h, 1.0)], 0);
        let g =
            ExplicitGraph::materialize(&i, OracleLimits::default(), Execution::Sequential).unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn disconnected_vertex_is_unreached() {
        let res = solve_oracle(&inst(&[(0.0, 0.0, 1.0), (10.0, 0.0, 1.0)], 0)).unwrap();
        assert_eq!(res.dist[1], f64::INFINITY);
        assert_eq!(res.prev[1], None);
    }

    #[test]
    fn star_leaves_get_direct_distances() {
        let pts: Vec<(f64, f64, f64)> = std::iter::once((0.0, 0.0, 5.0))
            .chain((0..8).map(|k| {
                let a = k as f64 * std::f64::consts::TAU / 8.0;
                (4.0 * a.cos(), 4.0 * a.sin(), 1.0)
            }))
            .collect();
        let i = inst(&pts, 0);
        let res = solve_oracle(&i).unwrap();
        for k in 1..pts.len() {
            assert_eq!(res.dist[k], i.dist(VertexId(0), VertexId(k as u32)));
        }
    }

    #[test]
    fn caps_are_enforced() {
        let i = inst(&[(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (2.0, 0.0, 1.0)], 0);
        let tight = OracleLimits {
            max_vertices: 2,
            max_edges: 10,
        };
        assert_eq!(
            solve_oracle_with(&i, tight, Execution::Sequential),
            Err(OracleError::TooManyVertices { n: 3, cap: 2 })
        );
        let few_edges = OracleLimits {
            max_vertices: 10,
            max_edges: 1,
        };
        assert_eq!(
            solve_oracle_with(&i, few_edges, Execution::Sequential),
            Err(OracleError::TooManyEdges { cap: 1 })
        );
    }
}
