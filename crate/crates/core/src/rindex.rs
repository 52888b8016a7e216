//! Kd-tree over all vertices with aggregates that follow the solver state.
//!
//! Every node stores its bounding box (in the quadtree's shifted frame), its
//! level range and largest radius, plus two dynamic values: the smallest
//! distance among its unprocessed vertices and the largest distance among
//! all of them. The solver reports every change with [`RegionIndex::set`].

use crate::grid::GridCell;
use crate::lambda::slack;
use crate::model::{euclid, is_edge, DiskInstance, VertexId};
use crate::quadtree::Quadtree;

const BUCKET: usize = 8;
const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Rect {
    fn gap(&self, o: &Rect) -> f64 {
        let dx = (self.x0 - o.x1).max(o.x0 - self.x1).max(0.0);
        let dy = (self.y0 - o.y1).max(o.y0 - self.y1).max(0.0);
        euclid(0.0, 0.0, dx, dy)
    }

    fn point_gap(&self, x: f64, y: f64) -> f64 {
        let dx = (self.x0 - x).max(x - self.x1).max(0.0);
        let dy = (self.y0 - y).max(y - self.y1).max(0.0);
        euclid(0.0, 0.0, dx, dy)
    }

    fn of_cell(c: &GridCell) -> Rect {
        let (x0, y0, x1, y1) = c.rect();
        Rect { x0, y0, x1, y1 }
    }
}

#[derive(Clone, Debug)]
struct Node {
    bbox: Rect,
    lo: u32,
    hi: u32,
    left: u32,
    right: u32,
    parent: u32,
    min_level: i32,
    max_level: i32,
    max_r: f64,
    min_open: f64,
    max_dist: f64,
}

/// The region `⊞_c`: cells within a level window inside a square.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub cx: f64,
    pub cy: f64,
    pub half: f64,
    pub min_level: i32,
    pub max_level: i32,
}

impl Region {
    fn meets(&self, b: &Rect) -> bool {
        let h = slack(self.half);
        b.x1 >= self.cx - h && b.x0 <= self.cx + h && b.y1 >= self.cy - h && b.y0 <= self.cy + h
    }

    pub fn contains(&self, c: &GridCell) -> bool {
        (self.min_level..=self.max_level).contains(&c.level)
            && c.inside_square(self.cx, self.cy, self.half)
    }
}

#[derive(Clone, Debug)]
pub struct RegionIndex {
    nodes: Vec<Node>,
    order: Vec<VertexId>,
    leaf_of: Vec<u32>,
    coords: Vec<(f64, f64)>,
    cells: Vec<GridCell>,
    radius: Vec<f64>,
    dist: Vec<f64>,
    open: Vec<bool>,
}

impl RegionIndex {
    /// All vertices start open with infinite distance.
    pub fn build(inst: &DiskInstance, tree: &Quadtree) -> Self {
        let n = inst.len();
        let coords: Vec<(f64, f64)> = inst.ids().map(|v| tree.coords(v)).collect();
        let cells: Vec<GridCell> = inst.ids().map(|v| tree.cell(tree.vertex_node(v))).collect();
        let radius: Vec<f64> = inst.vertices().iter().map(|v| v.r).collect();
        let mut idx = RegionIndex {
            nodes: Vec::new(),
            order: inst.ids().collect(),
            leaf_of: vec![NONE; n],
            coords,
            cells,
            radius,
            dist: vec![f64::INFINITY; n],
            open: vec![true; n],
        };
        if n > 0 {
            idx.build_rec(0, n, NONE);
        }
        idx
    }

    fn build_rec(&mut self, lo: usize, hi: usize, parent: u32) -> u32 {
        let id = self.nodes.len() as u32;
        let mut bbox = Rect {
            x0: f64::INFINITY,
            y0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y1: f64::NEG_INFINITY,
        };
        let (mut min_level, mut max_level, mut max_r) = (i32::MAX, i32::MIN, 0f64);
        for v in &self.order[lo..hi] {
            let (x, y) = self.coords[v.index()];
            bbox.x0 = bbox.x0.min(x);
            bbox.y0 = bbox.y0.min(y);
            bbox.x1 = bbox.x1.max(x);
            bbox.y1 = bbox.y1.max(y);
            min_level = min_level.min(self.cells[v.index()].level);
            max_level = max_level.max(self.cells[v.index()].level);
            max_r = max_r.max(self.radius[v.index()]);
        }
        self.nodes.push(Node {
            bbox,
            lo: lo as u32,
            hi: hi as u32,
            left: NONE,
            right: NONE,
            parent,
            min_level,
            max_level,
            max_r,
            min_open: f64::INFINITY,
            max_dist: f64::INFINITY,
        });
        if hi - lo <= BUCKET {
            for v in &self.order[lo..hi] {
                self.leaf_of[v.index()] = id;
            }
            return id;
        }
        let by_x = bbox.x1 - bbox.x0 >= bbox.y1 - bbox.y0;
        let mid = (lo + hi) / 2;
        let coords = &self.coords;
        self.order[lo..hi].select_nth_unstable_by(mid - lo, |a, b| {
            let (pa, pb) = (coords[a.index()], coords[b.index()]);
            let (ka, kb) = if by_x { (pa.0, pb.0) } else { (pa.1, pb.1) };
            ka.total_cmp(&kb).then(a.cmp(b))
        });
        let left = self.build_rec(lo, mid, id);
        let right = self.build_rec(mid, hi, id);
        self.nodes[id as usize].left = left;
        self.nodes[id as usize].right = right;
        id
    }

    pub fn dist(&self, v: VertexId) -> f64 {
        self.dist[v.index()]
    }

    pub fn is_open(&self, v: VertexId) -> bool {
        self.open[v.index()]
    }

    /// Records the distance and open flag of `v` and refreshes aggregates.
    pub fn set(&mut self, v: VertexId, dist: f64, open: bool) {
        if self.dist[v.index()] == dist && self.open[v.index()] == open {
            return;
        }
        self.dist[v.index()] = dist;
        self.open[v.index()] = open;
        let mut cur = self.leaf_of[v.index()];
        let mut leaf = true;
        while cur != NONE {
            let (min_open, max_dist) = if leaf {
                let n = &self.nodes[cur as usize];
                let mut a = (f64::INFINITY, f64::NEG_INFINITY);
                for w in &self.order[n.lo as usize..n.hi as usize] {
                    if self.open[w.index()] {
                        a.0 = a.0.min(self.dist[w.index()]);
                    }
                    a.1 = a.1.max(self.dist[w.index()]);
                }
                a
            } else {
                let n = &self.nodes[cur as usize];
                let (l, r) = (&self.nodes[n.left as usize], &self.nodes[n.right as usize]);
                (l.min_open.min(r.min_open), l.max_dist.max(r.max_dist))
            };
            let node = &mut self.nodes[cur as usize];
            if !leaf && node.min_open == min_open && node.max_dist == max_dist {
                break;
            }
            node.min_open = min_open;
            node.max_dist = max_dist;
            cur = node.parent;
            leaf = false;
        }
    }

    /// Open vertices `w` with `c_w` in `region` and
    /// `dist(w) + d(w, cell) <= bound`, in ascending id order.
    pub fn open_sources(&self, region: &Region, cell: &GridCell, bound: f64) -> Vec<VertexId> {
        let mut out = Vec::new();
        if self.nodes.is_empty() || !bound.is_finite() {
            return out;
        }
        let target = Rect::of_cell(cell);
        let loose = slack(bound);
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let n = &self.nodes[ni as usize];
            if n.max_level < region.min_level
                || n.min_level > region.max_level
                || !region.meets(&n.bbox)
                || n.min_open + n.bbox.gap(&target) > loose
            {
                continue;
            }
            if n.left == NONE {
                for &w in &self.order[n.lo as usize..n.hi as usize] {
                    let (x, y) = self.coords[w.index()];
                    if self.open[w.index()]
                        && self.dist[w.index()] + cell.point_distance(x, y) <= bound
                        && region.contains(&self.cells[w.index()])
                    {
                        out.push(w);
                    }
                }
            } else {
                stack.push(n.left);
                stack.push(n.right);
            }
        }
        out.sort_unstable();
        out
    }

    /// Vertices `w` with `c_w` in `region`, adjacent to `u`, whose distance
    /// `u` would lower when its own distance is `du`.
    pub fn improvable_targets(
        &self,
        inst: &DiskInstance,
        region: &Region,
        u: VertexId,
        du: f64,
        out: &mut Vec<VertexId>,
    ) {
        if self.nodes.is_empty() || !du.is_finite() {
            return;
        }
        let (ux, uy) = self.coords[u.index()];
        let ru = self.radius[u.index()];
        let up = inst.vertex(u);
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let n = &self.nodes[ni as usize];
            if n.max_level < region.min_level
                || n.min_level > region.max_level
                || !region.meets(&n.bbox)
            {
                continue;
            }
            let gap = n.bbox.point_gap(ux, uy);
            if gap > slack(ru + n.max_r) {
                continue;
            }
            let floor = du + gap;
            if n.max_dist <= floor - 1e-9 * (1.0 + floor.abs()) {
                continue;
            }
            if n.left == NONE {
                for &w in &self.order[n.lo as usize..n.hi as usize] {
                    let wp = inst.vertex(w);
                    if w != u
                        && is_edge(up, wp)
                        && self.dist[w.index()] > du + euclid(up.x, up.y, wp.x, wp.y)
                        && region.contains(&self.cells[w.index()])
                    {
                        out.push(w);
                    }
                }
            } else {
                stack.push(n.left);
                stack.push(n.right);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vertex;
    use crate::quadtree::{Extension, H_LOG2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn queries_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vs: Vec<Vertex> = (0..400)
            .map(|_| {
                Vertex::new(
                    rng.random_range(0.0..50.0),
                    rng.random_range(0.0..50.0),
                    rng.random_range(1.0..8.0),
                )
            })
            .collect();
        let inst = DiskInstance::new(vs, 0).unwrap();
        let tree = Quadtree::build(&inst, H_LOG2, Extension::Base);
        let mut idx = RegionIndex::build(&inst, &tree);
        let mut dist = vec![f64::INFINITY; inst.len()];
        let mut open = vec![true; inst.len()];
        for v in inst.ids() {
            let d = rng.random_range(0.0..100.0);
            let o = rng.random_bool(0.7);
            dist[v.index()] = d;
            open[v.index()] = o;
            idx.set(v, d, o);
        }
        let cell = tree.cell(tree.vertex_node(VertexId(7)));
        let (cx, cy) = cell.center();
        let region = Region {
            cx,
            cy,
            half: 20.0,
            min_level: cell.level - 1,
            max_level: cell.level + 1,
        };
        let bound = 60.0;
        let got = idx.open_sources(&region, &cell, bound);
        let want: Vec<VertexId> = inst
            .ids()
            .filter(|&w| {
                let (x, y) = tree.coords(w);
                open[w.index()]
                    && dist[w.index()] + cell.point_distance(x, y) <= bound
                    && region.contains(&tree.cell(tree.vertex_node(w)))
            })
            .collect();
        assert_eq!(got, want);

        let u = VertexId(11);
        let du = 10.0;
        let mut got = Vec::new();
        idx.improvable_targets(&inst, &region, u, du, &mut got);
        got.sort_unstable();
        let up = inst.vertex(u);
        let want: Vec<VertexId> = inst
            .ids()
            .filter(|&w| {
                let wp = inst.vertex(w);
                w != u
                    && is_edge(up, wp)
                    && dist[w.index()] > du + euclid(up.x, up.y, wp.x, wp.y)
                    && region.contains(&tree.cell(tree.vertex_node(w)))
            })
            .collect();
        assert_eq!(got, want);
    }
}
