//! Solver for instances with a bounded radius ratio.
//!
//! Vertices are processed a whole `P_mid(c)` at a time in Dijkstra order.
//! Edges to comparable radii are relaxed through `⊞_c`; relaxations from a
//! small vertex into a larger cell are deferred behind the cell's alarm and
//! executed in one batch when the alarm value becomes the global minimum.

use crate::exec::Execution;
use crate::grid::{CellId, GridIndex};
use crate::keys::MinHeap;
use crate::model::{DiskInstance, SsspResult, VertexId};
use crate::update::{update, DistStore, LabeledVertex, UpdateStrategy};

#[derive(Clone, Copy, Debug, Default)]
pub struct BoundedConfig {
    pub strategy: UpdateStrategy,
    pub exec: Execution,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundedStats {
    pub rounds: usize,
    pub case1_rounds: usize,
    pub case2_rounds: usize,
    pub cells: usize,
    pub max_firings_per_cell: usize,
    /// Rounds whose `k` was smaller than the previous round's.
    pub k_decreases: usize,
}

/// The next round the solver would execute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Round {
    Vertex { v: VertexId, k: f64 },
    Alarm { cell: CellId, k: f64 },
}

impl Round {
    pub fn k(&self) -> f64 {
        match *self {
            Round::Vertex { k, .. } | Round::Alarm { k, .. } => k,
        }
    }
}

pub struct BoundedSolver<'a> {
    inst: &'a DiskInstance,
    grid: GridIndex,
    l: Vec<Vec<CellId>>,
    cfg: BoundedConfig,
    dist: Vec<f64>,
    prev: Vec<Option<VertexId>>,
    in_r: Vec<bool>,
    remaining: usize,
    alarm: Vec<f64>,
    firings: Vec<usize>,
    vertex_queue: MinHeap<VertexId>,
    alarm_queue: MinHeap<CellId>,
    stamp: Vec<u32>,
    epoch: u32,
    last_k: f64,
    stats: BoundedStats,
}

impl<'a> BoundedSolver<'a> {
    /// Builds the grid, computes `L(c)` and relaxes the source's neighbours.
    pub fn new(inst: &'a DiskInstance, cfg: BoundedConfig) -> Self {
        let n = inst.len();
        let grid = GridIndex::build(inst);
        let l = grid.compute_l(inst, cfg.exec);
        let cells = grid.len();
        let mut solver = BoundedSolver {
            inst,
            l,
            cfg,
            dist: vec![f64::INFINITY; n],
            prev: vec![None; n],
            in_r: vec![true; n],
            remaining: n,
            alarm: vec![f64::INFINITY; cells],
            firings: vec![0; cells],
            vertex_queue: MinHeap::new(),
            alarm_queue: MinHeap::new(),
            stamp: vec![0; n],
            epoch: 0,
            last_k: f64::NEG_INFINITY,
            stats: BoundedStats {
                cells,
                ..Default::default()
            },
            grid,
        };
        let s = inst.source();
        solver.dist[s.index()] = 0.0;
        solver.vertex_queue.push(0.0, s);
        let sp = *inst.vertex(s);
        for (i, v) in inst.vertices().iter().enumerate() {
            let id = VertexId::from_index(i);
            if id != s && crate::model::is_edge(&sp, v) {
                solver.dist[i] = inst.dist(s, id);
                solver.prev[i] = Some(s);
                solver.vertex_queue.push(solver.dist[i], id);
            }
        }
        solver
    }

    pub fn grid(&self) -> &GridIndex {
        &self.grid
    }

    pub fn l_sets(&self) -> &[Vec<CellId>] {
        &self.l
    }

    pub fn dist(&self) -> &[f64] {
        &self.dist
    }

    pub fn alarm(&self, c: CellId) -> f64 {
        self.alarm[c.index()]
    }

    pub fn is_processed(&self, v: VertexId) -> bool {
        !self.in_r[v.index()]
    }

    pub fn stats(&self) -> &BoundedStats {
        &self.stats
    }

    /// The round that `step` would run next, or `None` once no finite
    /// value remains.
    pub fn peek_round(&mut self) -> Option<Round> {
        if self.remaining == 0 {
            return None;
        }
        let (dist, in_r, alarm) = (&self.dist, &self.in_r, &self.alarm);
        let vtop = self
            .vertex_queue
            .peek_valid(|k, v| in_r[v.index()] && dist[v.index()] == k);
        let atop = self.alarm_queue.peek_valid(|k, c| alarm[c.index()] == k);
        match (vtop, atop) {
            (None, None) => None,
            (Some((k, v)), None) => Some(Round::Vertex { v, k }),
            (None, Some((k, cell))) => Some(Round::Alarm { cell, k }),
            (Some((kv, v)), Some((ka, cell))) => {
                if ka <= kv {
                    Some(Round::Alarm { cell, k: ka })
                } else {
                    Some(Round::Vertex { v, k: kv })
                }
            }
        }
    }

    /// Runs one round; returns it, or `None` when the solver is done.
    pub fn step(&mut self) -> Option<Round> {
        let round = self.peek_round()?;
        if round.k() < self.last_k {
            self.stats.k_decreases += 1;
        }
        self.last_k = round.k();
        match round {
            Round::Vertex { v, .. } => self.round_case1(v),
            Round::Alarm { cell, .. } => self.round_case2(cell),
        }
        Some(round)
    }

    fn labeled(&self, ids: impl IntoIterator<Item = VertexId>) -> Vec<LabeledVertex> {
        ids.into_iter()
            .filter(|v| self.dist[v.index()].is_finite())
            .map(|v| LabeledVertex::of(self.inst, v, self.dist[v.index()]))
            .collect()
    }

    fn relax(&mut self, sources: &[LabeledVertex], targets: &[VertexId]) {
        let changed = update(
            self.inst,
            sources,
            targets,
            &mut DistStore {
                dist: &mut self.dist,
                prev: &mut self.prev,
            },
            self.cfg.strategy,
            self.cfg.exec,
        );
        for v in changed {
            self.vertex_queue.push(self.dist[v.index()], v);
        }
    }

    fn fresh_epoch(&mut self) -> u32 {
        self.epoch += 1;
        self.epoch
    }

    /// Case 1: process `P_mid(c_v)`.
    pub fn round_case1(&mut self, v: VertexId) {
        self.stats.rounds += 1;
        self.stats.case1_rounds += 1;
        let k = self.dist[v.index()];
        let c = self.grid.mid_cell(v);
        let around = self.grid.boxplus(c);
        let mid_c: Vec<VertexId> = self.grid.record(c).mid.clone();

        let sources = self.labeled(
            around
                .iter()
                .flat_map(|&b| self.grid.record(b).mid.iter().copied()),
        );
        let targets: Vec<VertexId> = mid_c
            .iter()
            .copied()
            .filter(|u| self.in_r[u.index()])
            .collect();
        self.relax(&sources, &targets);

        let sources = self.labeled(mid_c.iter().copied());
        let epoch = self.fresh_epoch();
        let mut targets = Vec::new();
        for &b in &around {
            let rec = self.grid.record(b);
            for &u in rec.mid.iter().chain(rec.small.iter()) {
                if self.in_r[u.index()] && self.stamp[u.index()] != epoch {
                    self.stamp[u.index()] = epoch;
                    targets.push(u);
                }
            }
        }
        self.relax(&sources, &targets);

        for &other in &self.l[c.index()] {
            if self.alarm[other.index()] == f64::INFINITY {
                let a = k + 2.0 * self.grid.cell(other).diameter();
                self.alarm[other.index()] = a;
                self.alarm_queue.push(a, other);
            }
        }
        for u in mid_c {
            if self.in_r[u.index()] {
                self.in_r[u.index()] = false;
                self.remaining -= 1;
            }
        }
    }

    /// Case 2: the alarm of `c` fires.
    pub fn round_case2(&mut self, c: CellId) {
        self.stats.rounds += 1;
        self.stats.case2_rounds += 1;
        let around = self.grid.boxplus(c);
        let epoch = self.fresh_epoch();
        let mut small = Vec::new();
        for &b in &around {
            for &u in &self.grid.record(b).small {
                if self.stamp[u.index()] != epoch {
                    self.stamp[u.index()] = epoch;
                    small.push(u);
                }
            }
        }
        let sources = self.labeled(small);
        let targets: Vec<VertexId> = self
            .grid
            .record(c)
            .mid
            .iter()
            .copied()
            .filter(|u| self.in_r[u.index()])
            .collect();
        self.relax(&sources, &targets);
        self.alarm[c.index()] = f64::INFINITY;
        self.firings[c.index()] += 1;
        self.stats.max_firings_per_cell =
            self.stats.max_firings_per_cell.max(self.firings[c.index()]);
    }

    pub fn run(&mut self) {
        while self.step().is_some() {}
    }

    pub fn into_result(self) -> (SsspResult, BoundedStats) {
        (
            SsspResult {
                dist: self.dist,
                prev: self.prev,
            },
            self.stats,
        )
    }
}

pub fn solve_bounded_with(inst: &DiskInstance, cfg: BoundedConfig) -> (SsspResult, BoundedStats) {
    let mut solver = BoundedSolver::new(inst, cfg);
    solver.run();
    solver.into_result()
}

pub fn solve_bounded(inst: &DiskInstance) -> SsspResult {
    solve_bounded_with(inst, BoundedConfig::default()).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vertex;

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
    fn single_vertex() {
        assert_eq!(solve_bounded(&inst(&[(1.0, 2.0, 3.0)], 0)).dist, vec![0.0]);
    }

    #[test]
    fn three_vertex_path() {
        let res = solve_bounded(&inst(
            &[(0.0, 0.0, 1.0), (1.5, 0.0, 1.0), (3.0, 0.0, 1.0)],
            0,
        ));
        assert_eq!(res.dist, vec![0.0, 1.5, 3.0]);
        assert_eq!(res.prev, vec![None, Some(VertexId(0)), Some(VertexId(1))]);
    }

    #[test]
    fn large_neighbour_of_the_source_cell_is_reached() {
        let res = solve_bounded(&inst(
            &[(0.0, 0.0, 8.0), (0.5, 0.0, 15.0), (50.0, 0.0, 40.0)],
            0,
        ));
        assert_eq!(res.dist, vec![0.0, 0.5, 50.0]);
    }

    #[test]
    fn alarm_is_set_from_the_round_value() {
        // u small (level 0), w large (level 3); u is not adjacent to the source.
        let i = inst(&[(-20.0, 0.0, 8.0), (-5.0, 0.0, 8.0), (60.0, 0.0, 64.0)], 0);
        let mut s = BoundedSolver::new(&i, BoundedConfig::default());
        let cw = s.grid().mid_cell(VertexId(2));
        assert_eq!(
            s.step(),
            Some(Round::Vertex {
                v: VertexId(0),
                k: 0.0
            })
        );
        assert_eq!(s.alarm(cw), f64::INFINITY);
        assert_eq!(
            s.step(),
            Some(Round::Vertex {
                v: VertexId(1),
                k: 15.0
            })
        );
        assert_eq!(s.alarm(cw), 15.0 + 2.0 * 8.0);
        assert_eq!(s.step(), Some(Round::Alarm { cell: cw, k: 31.0 }));
        assert_eq!(s.dist()[2], 80.0);
        assert_eq!(s.alarm(cw), f64::INFINITY);
        s.run();
        assert_eq!(s.stats().k_decreases, 0);
    }
}
