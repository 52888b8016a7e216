//! Solver for instances with an arbitrary radius ratio.
//!
//! Rounds come in three kinds:
//!
//! * a vertex round processes `P_mid(c_v)` and relaxes edges between
//!   vertices of comparable radius inside `⊞_{c_v}`;
//! * an alarm-up round of a group `λ` pushes distances from the small
//!   vertices processed since the previous such round into a radius window
//!   of `P_large(λ)`;
//! * an alarm-down round of `λ` pulls distances from the processed large
//!   vertices of `λ` into the small vertices adjacent to a large vertex no
//!   bigger than the one popped from the group's queue.
//!
//! Edges from `P_post(λ)` into `P_small(λ)` are relaxed once at the end.

use std::f64::consts::SQRT_2;

use crate::exec::Execution;
use crate::keys::MinHeap;
use crate::lambda::{ArbParams, LambdaId, LambdaStats, Lambdas};
use crate::model::{is_edge, DiskInstance, SsspResult, VertexId};
use crate::quadtree::NodeId;
use crate::rindex::{Region, RegionIndex};
use crate::update::{update, DistStore, IncrementalUpdate, LabeledVertex, UpdateStrategy};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArbitraryConfig {
    pub strategy: UpdateStrategy,
    pub exec: Execution,
    pub params: ArbParams,
    /// Bound the alarm-up window by the radii seen two rounds earlier.
    pub window_cap: bool,
}

impl Default for ArbitraryConfig {
    fn default() -> Self {
        ArbitraryConfig {
            strategy: UpdateStrategy::default(),
            exec: Execution::default(),
            params: ArbParams::default(),
            window_cap: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArbitraryStats {
    pub rounds: usize,
    pub vertex_rounds: usize,
    pub alarm_up_rounds: usize,
    pub alarm_down_rounds: usize,
    pub k_decreases: usize,
    /// Total size of the source sets of alarm-up rounds.
    pub up_sources: usize,
    /// Total size of the target windows of alarm-up rounds.
    pub up_targets: usize,
    pub down_targets: usize,
    pub post_pairs: usize,
    pub mid_sources: usize,
    pub mid_targets: usize,
    pub lambda: LambdaStats,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArbRound {
    Vertex { v: VertexId, k: f64 },
    AlarmUp { lambda: LambdaId, k: f64 },
    AlarmDown { lambda: LambdaId, k: f64 },
}

impl ArbRound {
    pub fn k(&self) -> f64 {
        match *self {
            ArbRound::Vertex { k, .. }
            | ArbRound::AlarmUp { k, .. }
            | ArbRound::AlarmDown { k, .. } => k,
        }
    }
}

#[derive(Clone, Debug, Default)]
struct GroupState {
    alarm_up: f64,
    alarm_down: f64,
    pending: Vec<(VertexId, f64)>,
    /// Running minimum of the window radius after each alarm-up round.
    window_history: Vec<f64>,
    queue: MinHeap<VertexId>,
    inc: IncrementalUpdate,
    cursor: usize,
}

pub struct ArbitrarySolver<'a> {
    inst: &'a DiskInstance,
    lam: Lambdas,
    index: RegionIndex,
    cfg: ArbitraryConfig,
    mid_of: Vec<Vec<VertexId>>,
    dist: Vec<f64>,
    prev: Vec<Option<VertexId>>,
    in_r: Vec<bool>,
    remaining: usize,
    groups: Vec<GroupState>,
    vertex_queue: MinHeap<VertexId>,
    up_queue: MinHeap<LambdaId>,
    down_queue: MinHeap<LambdaId>,
    stamp: Vec<u32>,
    epoch: u32,
    last_k: f64,
    post_done: bool,
    stats: ArbitraryStats,
}

impl<'a> ArbitrarySolver<'a> {
    pub fn new(inst: &'a DiskInstance, cfg: ArbitraryConfig) -> Self {
        let n = inst.len();
        let lam = Lambdas::build(inst, cfg.params, cfg.exec);
        let index = RegionIndex::build(inst, &lam.tree);
        let mut mid_of = vec![Vec::new(); lam.tree.len()];
        for v in inst.ids() {
            mid_of[lam.tree.vertex_node(v).index()].push(v);
        }
        let groups = (0..lam.len())
            .map(|_| GroupState {
                alarm_up: f64::INFINITY,
                alarm_down: f64::INFINITY,
                ..Default::default()
            })
            .collect();
        let stats = ArbitraryStats {
            lambda: lam.stats().clone(),
            ..Default::default()
        };
        let mut solver = ArbitrarySolver {
            inst,
            lam,
            index,
            cfg,
            mid_of,
            dist: vec![f64::INFINITY; n],
            prev: vec![None; n],
            in_r: vec![true; n],
            remaining: n,
            groups,
            vertex_queue: MinHeap::new(),
            up_queue: MinHeap::new(),
            down_queue: MinHeap::new(),
            stamp: vec![0; n],
            epoch: 0,
            last_k: f64::NEG_INFINITY,
            post_done: false,
            stats,
        };
        let s = inst.source();
        solver.set_dist(s, 0.0, None);
        let sp = *inst.vertex(s);
        for (i, v) in inst.vertices().iter().enumerate() {
            let id = VertexId::from_index(i);
            if id != s && is_edge(&sp, v) {
                solver.set_dist(id, inst.dist(s, id), Some(s));
            }
        }
        solver
    }

    fn set_dist(&mut self, v: VertexId, d: f64, pred: Option<VertexId>) {
        self.dist[v.index()] = d;
        self.prev[v.index()] = pred;
        self.vertex_queue.push(d, v);
        self.index.set(v, d, true);
    }

    pub fn lambdas(&self) -> &Lambdas {
        &self.lam
    }

    pub fn dist(&self) -> &[f64] {
        &self.dist
    }

    pub fn is_processed(&self, v: VertexId) -> bool {
        !self.in_r[v.index()]
    }

    pub fn alarm_up(&self, l: LambdaId) -> f64 {
        self.groups[l.index()].alarm_up
    }

    pub fn alarm_down(&self, l: LambdaId) -> f64 {
        self.groups[l.index()].alarm_down
    }

    pub fn stats(&self) -> &ArbitraryStats {
        &self.stats
    }

    pub fn peek_round(&mut self) -> Option<ArbRound> {
        if self.remaining == 0 {
            return None;
        }
        let (dist, in_r, groups) = (&self.dist, &self.in_r, &self.groups);
        let down = self
            .down_queue
            .peek_valid(|k, l| groups[l.index()].alarm_down == k);
        let up = self
            .up_queue
            .peek_valid(|k, l| groups[l.index()].alarm_up == k);
        let vert = self
            .vertex_queue
            .peek_valid(|k, v| in_r[v.index()] && dist[v.index()] == k);
        let mut best: Option<ArbRound> = down.map(|(k, lambda)| ArbRound::AlarmDown { lambda, k });
        if let Some((k, lambda)) = up {
            if best.is_none_or(|b| k < b.k()) {
                best = Some(ArbRound::AlarmUp { lambda, k });
            }
        }
        if let Some((k, v)) = vert {
            if best.is_none_or(|b| k < b.k()) {
                best = Some(ArbRound::Vertex { v, k });
            }
        }
        best
    }

    pub fn step(&mut self) -> Option<ArbRound> {
        let round = self.peek_round()?;
        if round.k() < self.last_k {
            self.stats.k_decreases += 1;
        }
        self.last_k = round.k();
        self.stats.rounds += 1;
        match round {
            ArbRound::Vertex { v, k } => self.vertex_round(v, k),
            ArbRound::AlarmUp { lambda, .. } => self.alarm_up_round(lambda),
            ArbRound::AlarmDown { lambda, .. } => self.alarm_down_round(lambda),
        }
        Some(round)
    }

    fn labeled(&self, ids: impl IntoIterator<Item = VertexId>) -> Vec<LabeledVertex> {
        ids.into_iter()
            .filter(|v| self.dist[v.index()].is_finite())
            .map(|v| LabeledVertex::of(self.inst, v, self.dist[v.index()]))
            .collect()
    }

    fn after_change(&mut self, changed: Vec<VertexId>) {
        for v in changed {
            let d = self.dist[v.index()];
            let open = self.in_r[v.index()];
            if open {
                self.vertex_queue.push(d, v);
            }
            self.index.set(v, d, open);
        }
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
        self.after_change(changed);
    }

    fn region(&self, c: NodeId) -> Region {
        let cell = self.lam.tree.cell(c);
        let (cx, cy) = cell.center();
        let h = self.cfg.params.h();
        let hl = self.cfg.params.h_log2;
        Region {
            cx,
            cy,
            half: 2.0 * SQRT_2 * h * h * cell.diameter(),
            min_level: cell.level - hl,
            max_level: cell.level + hl,
        }
    }

    fn vertex_round(&mut self, v: VertexId, k: f64) {
        self.stats.vertex_rounds += 1;
        let c = self.lam.tree.vertex_node(v);
        let cell = self.lam.tree.cell(c);
        let region = self.region(c);
        let mid: Vec<VertexId> = self.mid_of[c.index()].clone();

        // Processed vertices already pushed along every edge of this kind.
        let open = self
            .index
            .open_sources(&region, &cell, k + 2.0 * cell.diameter());
        let sources = self.labeled(open);
        self.stats.mid_sources += sources.len();
        self.relax(&sources, &mid);

        let sources = self.labeled(mid.iter().copied());
        let found: Vec<Vec<VertexId>> = self.cfg.exec.map(&sources, |u| {
            let mut out = Vec::new();
            self.index
                .improvable_targets(self.inst, &region, u.id, u.dist, &mut out);
            out
        });
        self.epoch += 1;
        let mut targets = Vec::new();
        for w in found.into_iter().flatten() {
            if self.stamp[w.index()] != self.epoch {
                self.stamp[w.index()] = self.epoch;
                targets.push(w);
            }
        }
        targets.sort_unstable();
        self.stats.mid_targets += targets.len();
        self.relax(&sources, &targets);

        for &x in &mid {
            let dx = self.dist[x.index()];
            for &(l, r) in self.lam.l1(x) {
                let g = &mut self.groups[l.index()];
                g.pending.push((x, r));
                let a = dx + r / 4.0;
                if a < g.alarm_up {
                    g.alarm_up = a;
                    self.up_queue.push(a, l);
                }
            }
        }
        for &u in &mid {
            let du = self.dist[u.index()];
            let ru = self.inst.vertex(u).r;
            let lv = LabeledVertex::of(self.inst, u, du);
            for &l in self.lam.l2(u) {
                let low = self.lam.get(l).low_diameter;
                let g = &mut self.groups[l.index()];
                g.queue.push(du + ru - 6.0 * low, u);
                g.inc
                    .insert(lv, self.cfg.exec)
                    .expect("each vertex is processed once");
                let top = g.queue.peek().map_or(f64::INFINITY, |(p, _)| p);
                if top != g.alarm_down {
                    g.alarm_down = top;
                    self.down_queue.push(top, l);
                }
            }
        }
        for &u in &mid {
            if self.in_r[u.index()] {
                self.in_r[u.index()] = false;
                self.remaining -= 1;
                self.index.set(u, self.dist[u.index()], false);
            }
        }
    }

    fn alarm_up_round(&mut self, l: LambdaId) {
        self.stats.alarm_up_rounds += 1;
        let g = &mut self.groups[l.index()];
        g.alarm_up = f64::INFINITY;
        let batch = std::mem::take(&mut g.pending);
        if batch.is_empty() {
            return;
        }
        let r1 = batch.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
        let j = g.window_history.len();
        let r2 = if self.cfg.window_cap && j >= 2 {
            g.window_history[j - 2]
        } else {
            f64::INFINITY
        };
        let running = g.window_history.last().map_or(r1, |&m| m.min(r1));
        g.window_history.push(running);

        let large = &self.lam.get(l).large;
        let radius = |u: &VertexId| self.inst.vertex(*u).r;
        let start = large.partition_point(|u| radius(u) < r1);
        let end = large.partition_point(|u| radius(u) <= r2);
        let targets: Vec<VertexId> = large[start..end.max(start)].to_vec();
        let sources = self.labeled(batch.iter().map(|&(x, _)| x));
        self.stats.up_sources += sources.len();
        self.stats.up_targets += targets.len();
        self.relax(&sources, &targets);
    }

    fn alarm_down_round(&mut self, l: LambdaId) {
        self.stats.alarm_down_rounds += 1;
        let lam = self.lam.get(l);
        let g = &mut self.groups[l.index()];
        let Some((_, top)) = g.queue.pop() else {
            g.alarm_down = f64::INFINITY;
            return;
        };
        let limit = self.inst.vertex(top).r;
        let begin = g.cursor;
        while g.cursor < lam.armed.len() && lam.armed[g.cursor].0 <= limit {
            g.cursor += 1;
        }
        let targets: Vec<VertexId> = lam.armed[begin..g.cursor].iter().map(|&(_, x)| x).collect();
        g.alarm_down = g.queue.peek().map_or(f64::INFINITY, |(p, _)| p);
        if g.alarm_down.is_finite() {
            self.down_queue.push(g.alarm_down, l);
        }
        self.stats.down_targets += targets.len();
        let changed = g.inc.query(
            self.inst,
            &targets,
            &mut DistStore {
                dist: &mut self.dist,
                prev: &mut self.prev,
            },
            self.cfg.exec,
        );
        self.after_change(changed);
    }

    /// Relaxes every edge from `P_post(λ)` into `P_small(λ)`.
    pub fn post_process(&mut self) {
        if self.post_done {
            return;
        }
        self.post_done = true;
        for i in 0..self.lam.len() {
            let l = LambdaId(i as u32);
            if self.lam.get(l).post.is_empty() {
                continue;
            }
            let sources = self.labeled(self.lam.get(l).post.iter().copied());
            let targets = self.lam.small(l).to_vec();
            self.stats.post_pairs += sources.len() * targets.len();
            self.relax(&sources, &targets);
        }
    }

    pub fn run(&mut self) {
        while self.step().is_some() {}
        self.post_process();
    }

    pub fn into_result(self) -> (SsspResult, ArbitraryStats) {
        (
            SsspResult {
                dist: self.dist,
                prev: self.prev,
            },
            self.stats,
        )
    }
}

pub fn solve_arbitrary_with(
    inst: &DiskInstance,
    cfg: ArbitraryConfig,
) -> (SsspResult, ArbitraryStats) {
    let mut solver = ArbitrarySolver::new(inst, cfg);
    solver.run();
    solver.into_result()
}

pub fn solve_arbitrary(inst: &DiskInstance) -> SsspResult {
    solve_arbitrary_with(inst, ArbitraryConfig::default()).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vertex;
    use crate::oracle::solve_oracle;

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
        assert_eq!(
            solve_arbitrary(&inst(&[(0.0, 0.0, 1.0)], 0)).dist,
            vec![0.0]
        );
    }

    #[test]
    fn three_vertex_path() {
        let res = solve_arbitrary(&inst(
            &[(0.0, 0.0, 1.0), (1.5, 0.0, 1.0), (3.0, 0.0, 1.0)],
            0,
        ));
        assert_eq!(res.dist, vec![0.0, 1.5, 3.0]);
    }

    #[test]
    fn tiny_disks_linked_through_a_huge_one() {
        let big = 1e8;
        let pts = [
            (0.0, 0.0, 1.0),
            (big + 0.5, 0.0, big),
            (2.0 * big + 1.0, 0.0, 1.0),
            (-1.5, 0.0, 1.0),
        ];
        let i = inst(&pts, 3);
        let res = solve_arbitrary(&i);
        let want = solve_oracle(&i).unwrap();
        assert_eq!(res.dist, want.dist);
    }
}
