//! Batched relaxation `Update(U, V)` and its insert-only variant.
//!
//! For every `v` in `V`, `Update` lowers `dist(v)` to the minimum of
//! `dist(u) + |uv|` over adjacent `u` in `U`, with the predecessor chosen by
//! the smallest `(value, id)`. The tree implementation sorts `U` by
//! `k1 = dist + r`; the first adjacent leaf in that order is found by a
//! descent on adjacency queries, and the answer is the weighted nearest
//! neighbour (weights `dist`) over the suffix starting at that leaf.

use std::collections::HashSet;

use thiserror::Error;

use crate::exec::Execution;
use crate::model::{euclid, DiskInstance, VertexId};
use crate::weighted_nn::{Nearest, Site, WeightedSiteSet};

/// Nodes with at most this many leaves are scanned instead of indexed.
const SCAN_LIMIT: usize = 24;
/// `Auto` uses the double loop when `|U| * |V|` is at most this.
const NAIVE_WORK_LIMIT: usize = 4096;

/// A vertex of `U` with its distance frozen at build time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledVertex {
    pub id: VertexId,
    pub x: f64,
    pub y: f64,
    pub r: f64,
    pub dist: f64,
}

impl LabeledVertex {
    pub fn of(inst: &DiskInstance, id: VertexId, dist: f64) -> Self {
        let v = inst.vertex(id);
        LabeledVertex {
            id,
            x: v.x,
            y: v.y,
            r: v.r,
            dist,
        }
    }

    #[inline]
    pub fn k1(&self) -> f64 {
        self.dist + self.r
    }

    #[inline]
    pub fn k2(&self) -> f64 {
        -self.r
    }

    #[inline]
    pub fn k3(&self) -> f64 {
        self.dist
    }
}

/// A candidate `(dist(u) + |uv|, u)` for some target `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Relaxation {
    pub value: f64,
    pub pred: VertexId,
}

impl Relaxation {
    #[inline]
    fn beats(&self, other: &Option<Relaxation>) -> bool {
        match other {
            None => true,
            Some(o) => self.value < o.value || (self.value == o.value && self.pred < o.pred),
        }
    }
}

#[derive(Clone, Debug)]
struct SegNode {
    lo: usize,
    hi: usize,
    left: usize,
    right: usize,
    index: Option<WeightedSiteSet>,
}

impl SegNode {
    fn is_leaf(&self) -> bool {
        self.hi - self.lo == 1
    }
}

/// Static tree over a labelled set `U`.
#[derive(Clone, Debug)]
pub struct UpdateTree {
    leaves: Vec<LabeledVertex>,
    nodes: Vec<SegNode>,
}

impl UpdateTree {
    /// Builds the tree. Vertices with infinite distance can never improve
    /// anything and are dropped.
    pub fn build(mut labeled: Vec<LabeledVertex>, exec: Execution) -> Self {
        labeled.retain(|u| u.dist.is_finite());
        labeled.sort_by(|a, b| a.k1().total_cmp(&b.k1()).then(a.id.cmp(&b.id)));
        let mut nodes = Vec::with_capacity(2 * labeled.len());
        if !labeled.is_empty() {
            build_nodes(&mut nodes, 0, labeled.len());
        }
        let indexed: Vec<usize> = (0..nodes.len())
            .filter(|&i| nodes[i].hi - nodes[i].lo > SCAN_LIMIT)
            .collect();
        let leaves = labeled;
        let built = exec.map(&indexed, |&i| {
            let sites: Vec<Site> = leaves[nodes[i].lo..nodes[i].hi]
                .iter()
                .map(|u| Site::disk(u.id.0, u.x, u.y, u.r, u.dist))
                .collect();
            WeightedSiteSet::build(&sites)
        });
        for (i, set) in indexed.into_iter().zip(built) {
            nodes[i].index = Some(set);
        }
        UpdateTree { leaves, nodes }
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Leaves in ascending `(k1, id)` order.
    pub fn leaves(&self) -> &[LabeledVertex] {
        &self.leaves
    }

    pub fn into_leaves(self) -> Vec<LabeledVertex> {
        self.leaves
    }

    #[inline]
    fn adjacent_leaf(&self, i: usize, x: f64, y: f64, r: f64) -> bool {
        let u = &self.leaves[i];
        euclid(x, y, u.x, u.y) <= r + u.r
    }

    fn node_has_adjacent(&self, ni: usize, x: f64, y: f64, r: f64) -> bool {
        let node = &self.nodes[ni];
        match &node.index {
            Some(set) => set.any_adjacent(x, y, r),
            None => (node.lo..node.hi).any(|i| self.adjacent_leaf(i, x, y, r)),
        }
    }

    /// Position of the first leaf (in `k1` order) adjacent to the disk.
    pub fn leftmost_adjacent(&self, x: f64, y: f64, r: f64) -> Option<usize> {
        if self.leaves.is_empty() || !self.node_has_adjacent(0, x, y, r) {
            return None;
        }
        let mut ni = 0;
        loop {
            let node = &self.nodes[ni];
            if node.is_leaf() {
                return Some(node.lo);
            }
            if node.index.is_none() {
                return (node.lo..node.hi).find(|&i| self.adjacent_leaf(i, x, y, r));
            }
            ni = if self.node_has_adjacent(node.left, x, y, r) {
                node.left
            } else {
                node.right
            };
        }
    }

    fn suffix_nearest(&self, ni: usize, from: usize, x: f64, y: f64, best: &mut Nearest) {
        let node = &self.nodes[ni];
        if node.hi <= from {
            return;
        }
        if node.lo >= from {
            match &node.index {
                Some(set) => set.nearest_improving(x, y, best),
                None => {
                    for u in &self.leaves[node.lo..node.hi] {
                        let cand = Nearest {
                            id: u.id.0,
                            value: euclid(x, y, u.x, u.y) + u.dist,
                        };
                        if cand.value < best.value
                            || (cand.value == best.value && cand.id < best.id)
                        {
                            *best = cand;
                        }
                    }
                }
            }
            return;
        }
        if node.is_leaf() {
            return;
        }
        self.suffix_nearest(node.left, from, x, y, best);
        self.suffix_nearest(node.right, from, x, y, best);
    }

    /// The best adjacent `u` for the disk `(x, y, r)`, ignoring the current
    /// distance of the target.
    pub fn best_adjacent(&self, x: f64, y: f64, r: f64) -> Option<Relaxation> {
        let first = self.leftmost_adjacent(x, y, r)?;
        let mut best = Nearest::NONE;
        self.suffix_nearest(0, first, x, y, &mut best);
        let pos = self.leaves[first..].iter().position(|u| u.id.0 == best.id);
        match pos {
            Some(p) if self.adjacent_leaf(first + p, x, y, r) => Some(Relaxation {
                value: best.value,
                pred: VertexId(best.id),
            }),
            // Rounding can make the suffix minimum land on a non-adjacent
            // leaf at an exact tie; fall back to an explicit scan.
            _ => self.scan_adjacent(first, x, y, r),
        }
    }

    fn scan_adjacent(&self, from: usize, x: f64, y: f64, r: f64) -> Option<Relaxation> {
        let mut best: Option<Relaxation> = None;
        for (i, u) in self.leaves.iter().enumerate().skip(from) {
            if self.adjacent_leaf(i, x, y, r) {
                let cand = Relaxation {
                    value: u.dist + euclid(x, y, u.x, u.y),
                    pred: u.id,
                };
                if cand.beats(&best) {
                    best = Some(cand);
                }
            }
        }
        best
    }

    /// The relaxation of `v` through this tree, if it improves `current`.
    pub fn relax_one(&self, inst: &DiskInstance, v: VertexId, current: f64) -> Option<Relaxation> {
        let p = inst.vertex(v);
        self.best_adjacent(p.x, p.y, p.r)
            .filter(|c| c.value < current)
    }
}

fn build_nodes(nodes: &mut Vec<SegNode>, lo: usize, hi: usize) -> usize {
    let idx = nodes.len();
    nodes.push(SegNode {
        lo,
        hi,
        left: usize::MAX,
        right: usize::MAX,
        index: None,
    });
    if hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let l = build_nodes(nodes, lo, mid);
        let r = build_nodes(nodes, mid, hi);
        nodes[idx].left = l;
        nodes[idx].right = r;
    }
    idx
}

/// How `update` evaluates the batch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpdateStrategy {
    /// Double loop for small batches, tree otherwise.
    #[default]
    Auto,
    Tree,
    Naive,
}

/// Mutable distance and predecessor arrays owned by a solver.
pub struct DistStore<'a> {
    pub dist: &'a mut [f64],
    pub prev: &'a mut [Option<VertexId>],
}

/// `Update(U, V)`: returns the targets whose distance decreased, in the
/// order they appear in `targets`.
pub fn update(
    inst: &DiskInstance,
    sources: &[LabeledVertex],
    targets: &[VertexId],
    store: &mut DistStore<'_>,
    strategy: UpdateStrategy,
    exec: Execution,
) -> Vec<VertexId> {
    if sources.is_empty() || targets.is_empty() {
        return Vec::new();
    }
    let naive = match strategy {
        UpdateStrategy::Naive => true,
        UpdateStrategy::Tree => false,
        UpdateStrategy::Auto => sources.len().saturating_mul(targets.len()) <= NAIVE_WORK_LIMIT,
    };
    let candidates: Vec<Option<Relaxation>> = if naive {
        let mut sorted = sources.to_vec();
        sorted.sort_by_key(|u| u.id);
        let dist: &[f64] = store.dist;
        exec.map(targets, |&v| {
            naive_best(inst, &sorted, v).filter(|c| c.value < dist[v.index()])
        })
    } else {
        let tree = UpdateTree::build(sources.to_vec(), exec);
        let dist: &[f64] = store.dist;
        map_in_space_order(inst, targets, exec, |v| {
            tree.relax_one(inst, v, dist[v.index()])
        })
    };
    apply(targets, candidates, store)
}

/// Evaluates `f` on the targets in Morton order of their centres, so that
/// consecutive queries touch the same index nodes, and returns the results
/// in input order.
fn map_in_space_order<R, F>(
    inst: &DiskInstance,
    targets: &[VertexId],
    exec: Execution,
    f: F,
) -> Vec<R>
where
    R: Send,
    F: Fn(VertexId) -> R + Sync + Send,
{
    if targets.len() < 64 {
        return exec.map(targets, |&v| f(v));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for &v in targets {
        let p = inst.vertex(v);
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let quant = |a: f64, lo: f64, hi: f64| -> u32 {
        if hi > lo {
            (((a - lo) / (hi - lo)) * 65535.0) as u32
        } else {
            0
        }
    };
    let mut order: Vec<(u32, u32)> = targets
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let p = inst.vertex(v);
            (
                interleave(quant(p.x, x0, x1)) | interleave(quant(p.y, y0, y1)) << 1,
                i as u32,
            )
        })
        .collect();
    order.sort_unstable();
    let results = exec.map(&order, |&(_, i)| f(targets[i as usize]));
    let mut slots: Vec<Option<R>> = (0..targets.len()).map(|_| None).collect();
    for ((_, i), r) in order.into_iter().zip(results) {
        slots[i as usize] = Some(r);
    }
    slots
        .into_iter()
        .map(|r| r.expect("every target evaluated"))
        .collect()
}

fn interleave(v: u32) -> u32 {
    let mut x = v & 0xffff;
    x = (x | (x << 8)) & 0x00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333;
    (x | (x << 1)) & 0x5555_5555
}

fn apply(
    targets: &[VertexId],
    candidates: Vec<Option<Relaxation>>,
    store: &mut DistStore<'_>,
) -> Vec<VertexId> {
    let mut changed = Vec::new();
    for (&v, cand) in targets.iter().zip(candidates) {
        if let Some(c) = cand {
            if c.value < store.dist[v.index()] {
                store.dist[v.index()] = c.value;
                store.prev[v.index()] = Some(c.pred);
                changed.push(v);
            }
        }
    }
    changed
}

fn naive_best(
    inst: &DiskInstance,
    sources_by_id: &[LabeledVertex],
    v: VertexId,
) -> Option<Relaxation> {
    let p = inst.vertex(v);
    let mut best: Option<Relaxation> = None;
    for u in sources_by_id {
        if !u.dist.is_finite() {
            continue;
        }
        let w = euclid(p.x, p.y, u.x, u.y);
        if w <= p.r + u.r {
            let cand = Relaxation {
                value: u.dist + w,
                pred: u.id,
            };
            if cand.beats(&best) {
                best = Some(cand);
            }
        }
    }
    best
}

/// The batched relaxation as a literal double loop. Ground truth for the tree.
pub fn naive_update(
    inst: &DiskInstance,
    sources: &[LabeledVertex],
    targets: &[VertexId],
    store: &mut DistStore<'_>,
) -> Vec<VertexId> {
    let mut sorted = sources.to_vec();
    sorted.sort_by_key(|u| u.id);
    let mut changed = Vec::new();
    for &v in targets {
        let p = *inst.vertex(v);
        let mut improved = false;
        for u in &sorted {
            let w = euclid(p.x, p.y, u.x, u.y);
            if w <= p.r + u.r && u.dist + w < store.dist[v.index()] {
                store.dist[v.index()] = u.dist + w;
                store.prev[v.index()] = Some(u.id);
                improved = true;
            }
        }
        if improved {
            changed.push(v);
        }
    }
    changed
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UpdateError {
    #[error("vertex {0} was already inserted")]
    DuplicateInsert(VertexId),
}

/// Insert-only `Update` structure: a binary counter of [`UpdateTree`]s whose
/// sizes are distinct powers of two.
#[derive(Clone, Debug, Default)]
pub struct IncrementalUpdate {
    slots: Vec<Option<UpdateTree>>,
    inserted: HashSet<VertexId>,
    rebuilt_leaves: u64,
}

impl IncrementalUpdate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inserted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inserted.is_empty()
    }

    /// Sizes of the trees currently held, largest first.
    pub fn tree_sizes(&self) -> Vec<usize> {
        self.slots
            .iter()
            .rev()
            .flatten()
            .map(UpdateTree::len)
            .collect()
    }

    /// Total number of leaves placed into merged trees so far.
    pub fn rebuilt_leaves(&self) -> u64 {
        self.rebuilt_leaves
    }

    pub fn insert(&mut self, v: LabeledVertex, exec: Execution) -> Result<(), UpdateError> {
        if !self.inserted.insert(v.id) {
            return Err(UpdateError::DuplicateInsert(v.id));
        }
        let mut carry = vec![v];
        let mut level = 0;
        loop {
            if level == self.slots.len() {
                self.slots.push(None);
            }
            match self.slots[level].take() {
                Some(tree) => {
                    carry.extend(tree.into_leaves());
                    level += 1;
                }
                None => break,
            }
        }
        if level > 0 {
            self.rebuilt_leaves += carry.len() as u64;
        }
        self.slots[level] = Some(UpdateTree::build(carry, exec));
        Ok(())
    }

    /// Best adjacent inserted vertex for the disk `(x, y, r)`.
    pub fn best_adjacent(&self, x: f64, y: f64, r: f64) -> Option<Relaxation> {
        let mut best: Option<Relaxation> = None;
        for tree in self.slots.iter().flatten() {
            if let Some(c) = tree.best_adjacent(x, y, r) {
                if c.beats(&best) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// `Update(inserted, targets)`.
    pub fn query(
        &self,
        inst: &DiskInstance,
        targets: &[VertexId],
        store: &mut DistStore<'_>,
        exec: Execution,
    ) -> Vec<VertexId> {
        if self.inserted.is_empty() || targets.is_empty() {
            return Vec::new();
        }
        let dist: &[f64] = store.dist;
        let candidates = map_in_space_order(inst, targets, exec, |v| {
            let p = inst.vertex(v);
            self.best_adjacent(p.x, p.y, p.r)
                .filter(|c| c.value < dist[v.index()])
        });
        apply(targets, candidates, store)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vertex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lv(id: u32, x: f64, y: f64, r: f64, dist: f64) -> LabeledVertex {
        LabeledVertex {
            id: VertexId(id),
            x,
            y,
            r,
            dist,
        }
    }

    fn instance(points: &[(f64, f64, f64)]) -> DiskInstance {
        DiskInstance::new(
            points
                .iter()
                .map(|&(x, y, r)| Vertex::new(x, y, r))
                .collect(),
            0,
        )
        .unwrap()
    }

    #[test]
    fn keys_follow_dist_and_radius() {
        let u = lv(0, 0.0, 0.0, 2.0, 5.0);
        assert_eq!((u.k1(), u.k2(), u.k3()), (7.0, -2.0, 5.0));
    }

    #[test]
    fn leaves_are_sorted_by_k1() {
        let tree = UpdateTree::build(
            vec![
                lv(0, 0.0, 0.0, 1.0, 2.0),
                lv(1, 0.0, 0.0, 1.0, 0.0),
                lv(2, 0.0, 0.0, 1.0, 1.0),
            ],
            Execution::Sequential,
        );
        let order: Vec<u32> = tree.leaves().iter().map(|u| u.id.0).collect();
        assert_eq!(order, vec![1, 2, 0]);
    }

    #[test]
    fn relax_one_examples() {
        // vertices: 0 = u1, 1 = u2, 2 = v
        let inst = instance(&[
            (0.0, 0.0, 1.0),
            (3.0, 0.0, 1.0),
            (1.5, 0.0, 1.0),
            (3.0, 0.0, 1.0),
        ]);
        let single = UpdateTree::build(vec![lv(0, 0.0, 0.0, 1.0, 0.0)], Execution::Sequential);
        assert_eq!(
            single.relax_one(&inst, VertexId(2), f64::INFINITY),
            Some(Relaxation {
                value: 1.5,
                pred: VertexId(0)
            })
        );
        assert_eq!(single.relax_one(&inst, VertexId(3), f64::INFINITY), None);

        let pair = UpdateTree::build(
            vec![lv(0, 0.0, 0.0, 1.0, 0.0), lv(1, 3.0, 0.0, 1.0, 0.5)],
            Execution::Sequential,
        );
        assert_eq!(
            pair.relax_one(&inst, VertexId(2), f64::INFINITY),
            Some(Relaxation {
                value: 1.5,
                pred: VertexId(0)
            })
        );
        assert_eq!(pair.relax_one(&inst, VertexId(2), 1.5), None);
    }

    fn random_case(
        rng: &mut ChaCha8Rng,
        nu: usize,
        nv: usize,
    ) -> (DiskInstance, Vec<LabeledVertex>, Vec<VertexId>, Vec<f64>) {
        let n = nu + nv;
        let pts: Vec<(f64, f64, f64)> = (0..n)
            .map(|_| {
                let r = 2f64.powf(rng.random_range(0.0..6.0));
                (
                    rng.random_range(0.0..120.0),
                    rng.random_range(0.0..120.0),
                    r,
                )
            })
            .collect();
        let inst = instance(&pts);
        let sources: Vec<LabeledVertex> = (0..nu)
            .map(|i| LabeledVertex::of(&inst, VertexId(i as u32), rng.random_range(0.0..200.0)))
            .collect();
        let targets: Vec<VertexId> = (nu..n).map(|i| VertexId(i as u32)).collect();
        let dist: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    f64::INFINITY
                } else {
                    rng.random_range(0.0..300.0)
                }
            })
            .collect();
        (inst, sources, targets, dist)
    }

    #[test]
    fn tree_update_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let nu = rng.random_range(1..300);
            let nv = rng.random_range(1..300);
            let (inst, sources, targets, dist0) = random_case(&mut rng, nu, nv);
            let (mut d1, mut p1) = (dist0.clone(), vec![None; dist0.len()]);
            let (mut d2, mut p2) = (dist0.clone(), vec![None; dist0.len()]);
            let c1 = update(
                &inst,
                &sources,
                &targets,
                &mut DistStore {
                    dist: &mut d1,
                    prev: &mut p1,
                },
                UpdateStrategy::Tree,
                Execution::Parallel,
            );
            let c2 = naive_update(
                &inst,
                &sources,
                &targets,
                &mut DistStore {
                    dist: &mut d2,
                    prev: &mut p2,
                },
            );
            assert_eq!(d1, d2);
            assert_eq!(p1, p2);
            assert_eq!(c1, c2);
        }
    }

    #[test]
    fn update_without_edges_is_a_no_op() {
        let inst = instance(&[(0.0, 0.0, 1.0), (100.0, 0.0, 1.0)]);
        let mut dist = vec![0.0, f64::INFINITY];
        let mut prev = vec![None; 2];
        let changed = update(
            &inst,
            &[LabeledVertex::of(&inst, VertexId(0), 0.0)],
            &[VertexId(1)],
            &mut DistStore {
                dist: &mut dist,
                prev: &mut prev,
            },
            UpdateStrategy::Tree,
            Execution::Sequential,
        );
        assert!(changed.is_empty());
        assert_eq!(dist[1], f64::INFINITY);
    }

    #[test]
    fn binary_counter_sizes() {
        let inst = instance(&(0..8).map(|i| (i as f64, 0.0, 1.0)).collect::<Vec<_>>());
        let mut inc = IncrementalUpdate::new();
        inc.insert(
            LabeledVertex::of(&inst, VertexId(0), 0.0),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(inc.tree_sizes(), vec![1]);
        inc.insert(
            LabeledVertex::of(&inst, VertexId(1), 1.0),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(inc.tree_sizes(), vec![2]);
        for i in 2..7 {
            inc.insert(
                LabeledVertex::of(&inst, VertexId(i), i as f64),
                Execution::Sequential,
            )
            .unwrap();
        }
        assert_eq!(inc.tree_sizes(), vec![4, 2, 1]);
        assert_eq!(
            inc.insert(
                LabeledVertex::of(&inst, VertexId(3), 0.0),
                Execution::Sequential
            ),
            Err(UpdateError::DuplicateInsert(VertexId(3)))
        );
    }

    #[test]
    fn incremental_query_replays_naive_update() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (inst, sources, targets, dist0) = random_case(&mut rng, 200, 150);
        let mut inc = IncrementalUpdate::new();
        let mut inserted = Vec::new();
        let (mut d1, mut p1) = (dist0.clone(), vec![None; dist0.len()]);
        let (mut d2, mut p2) = (dist0.clone(), vec![None; dist0.len()]);
        for (step, u) in sources.iter().enumerate() {
            inc.insert(*u, Execution::Sequential).unwrap();
            inserted.push(*u);
            if step % 9 == 0 {
                let lo = rng.random_range(0..targets.len());
                let batch = &targets[lo..(lo + 20).min(targets.len())];
                inc.query(
                    &inst,
                    batch,
                    &mut DistStore {
                        dist: &mut d1,
                        prev: &mut p1,
                    },
                    Execution::Sequential,
                );
                naive_update(
                    &inst,
                    &inserted,
                    batch,
                    &mut DistStore {
                        dist: &mut d2,
                        prev: &mut p2,
                    },
                );
                assert_eq!(d1, d2);
                assert_eq!(p1, p2);
            }
        }
        let m = inserted.len() as u64;
        assert!(inc.rebuilt_leaves() <= m * (64 - (m - 1).leading_zeros()) as u64);
    }
}
