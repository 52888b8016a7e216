//! Compressed quadtree, heavy paths and canonical paths.
//!
//! Cells reuse [`GridCell`] addressing in a frame shifted so that every
//! centre has nonnegative coordinates; then any two cells have a common
//! ancestor and the tree has a single root.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use crate::grid::{floor_log2, GridCell};
use crate::model::{DiskInstance, VertexId};

/// `log2(h)` with `h = 2^10`.
pub const H_LOG2: i32 = 10;

/// Level of the cell `c_v` with `r_v in [h|c|, 2h|c|)`.
#[inline]
pub fn arb_level(r: f64, h_log2: i32) -> i32 {
    floor_log2(r) - h_log2
}

/// Level at which two cells first share an ancestor.
pub fn lca_level(a: &GridCell, b: &GridCell) -> i32 {
    let m = a.level.max(b.level);
    let (ax, ay) = (a.ix >> (m - a.level), a.iy >> (m - a.level));
    let (bx, by) = (b.ix >> (m - b.level), b.iy >> (m - b.level));
    let diff = ((ax ^ bx) | (ay ^ by)) as u64;
    m + (64 - diff.leading_zeros()) as i32
}

pub fn lca(a: &GridCell, b: &GridCell) -> GridCell {
    a.ancestor(lca_level(a, b))
}

pub fn is_ancestor_or_self(a: &GridCell, b: &GridCell) -> bool {
    a.level >= b.level && b.ancestor(a.level) == *a
}

/// Preorder of the infinite quadtree: ancestors first, then siblings by
/// quadrant `(iy bit, ix bit)`.
pub fn preorder(a: &GridCell, b: &GridCell) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let l = lca_level(a, b);
    if l == a.level {
        return Ordering::Less;
    }
    if l == b.level {
        return Ordering::Greater;
    }
    let ca = a.ancestor(l - 1);
    let cb = b.ancestor(l - 1);
    (ca.iy & 1, ca.ix & 1).cmp(&(cb.iy & 1, cb.ix & 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathId(pub u32);

impl PathId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct QNode {
    pub cell: GridCell,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub subtree_size: u32,
    pub heavy_path: u32,
    pub pos: u32,
}

#[derive(Clone, Debug)]
pub struct HeavyPath {
    /// Nodes from the top of the path downwards.
    pub nodes: Vec<NodeId>,
    pub biased_root: PathId,
}

/// A contiguous piece `nodes[lo..=hi]` of a heavy path; the pieces form a
/// weight-balanced binary tree per heavy path.
#[derive(Clone, Debug)]
pub struct CanonicalPath {
    pub heavy: u32,
    pub lo: u32,
    pub hi: u32,
    pub children: Option<(PathId, PathId)>,
}

/// Translation that makes every coordinate nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub ox: f64,
    pub oy: f64,
}

impl Frame {
    pub fn of(inst: &DiskInstance) -> Self {
        let ox = inst
            .vertices()
            .iter()
            .map(|v| v.x)
            .fold(f64::INFINITY, f64::min);
        let oy = inst
            .vertices()
            .iter()
            .map(|v| v.y)
            .fold(f64::INFINITY, f64::min);
        Frame { ox, oy }
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (x - self.ox, y - self.oy)
    }
}

/// Which cells besides `c_v` the tree must contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// Only the cells `c_v`.
    Base,
    /// Also `c̄_v` and the ancestor of `v` at every occupied level at least
    /// `h` times above `c_v`.
    Full,
}

#[derive(Clone, Debug)]
pub struct Quadtree {
    pub h_log2: i32,
    pub frame: Frame,
    nodes: Vec<QNode>,
    root: NodeId,
    lookup: HashMap<GridCell, NodeId>,
    coords: Vec<(f64, f64)>,
    levels: Vec<i32>,
    vertex_node: Vec<NodeId>,
    bar_node: Vec<Option<NodeId>>,
    heavy: Vec<HeavyPath>,
    canonical: Vec<CanonicalPath>,
}

impl Quadtree {
    pub fn build(inst: &DiskInstance, h_log2: i32, extension: Extension) -> Self {
        let frame = Frame::of(inst);
        let coords: Vec<(f64, f64)> = inst
            .vertices()
            .iter()
            .map(|v| frame.apply(v.x, v.y))
            .collect();
        let levels: Vec<i32> = inst
            .vertices()
            .iter()
            .map(|v| arb_level(v.r, h_log2))
            .collect();
        let base: Vec<GridCell> = coords
            .iter()
            .zip(&levels)
            .map(|(&(x, y), &l)| GridCell::containing(l, x, y))
            .collect();

        let mut required: Vec<GridCell> = base.clone();
        if extension == Extension::Full {
            let occupied: BTreeSet<i32> = levels.iter().copied().collect();
            for (c, &l) in base.iter().zip(&levels) {
                required.push(c.ancestor(l + h_log2));
                for &other in occupied.range(l + h_log2..) {
                    required.push(c.ancestor(other));
                }
            }
        }
        required.sort_by(preorder);
        required.dedup();
        let lcas: Vec<GridCell> = required.windows(2).map(|w| lca(&w[0], &w[1])).collect();
        required.extend(lcas);
        required.sort_by(preorder);
        required.dedup();

        let mut nodes: Vec<QNode> = Vec::with_capacity(required.len());
        let mut lookup = HashMap::with_capacity(required.len());
        let mut stack: Vec<NodeId> = Vec::new();
        for cell in required {
            while let Some(&top) = stack.last() {
                if is_ancestor_or_self(&nodes[top.index()].cell, &cell) {
                    break;
                }
                stack.pop();
            }
            let id = NodeId(nodes.len() as u32);
            let parent = stack.last().copied();
            if let Some(p) = parent {
                nodes[p.index()].children.push(id);
            }
            nodes.push(QNode {
                cell,
                parent,
                children: Vec::new(),
                subtree_size: 1,
                heavy_path: 0,
                pos: 0,
            });
            lookup.insert(cell, id);
            stack.push(id);
        }
        debug_assert!(nodes[1..].iter().all(|n| n.parent.is_some()));

        let vertex_node: Vec<NodeId> = base.iter().map(|c| lookup[c]).collect();
        let bar_node: Vec<Option<NodeId>> = base
            .iter()
            .zip(&levels)
            .map(|(c, &l)| lookup.get(&c.ancestor(l + h_log2)).copied())
            .collect();

        let mut tree = Quadtree {
            h_log2,
            frame,
            nodes,
            root: NodeId(0),
            lookup,
            coords,
            levels,
            vertex_node,
            bar_node,
            heavy: Vec::new(),
            canonical: Vec::new(),
        };
        tree.decompose();
        tree
    }

    fn decompose(&mut self) {
        // Nodes are stored in preorder, so children follow their parent.
        for i in (0..self.nodes.len()).rev() {
            let size: u32 = 1 + self.nodes[i]
                .children
                .iter()
                .map(|c| self.nodes[c.index()].subtree_size)
                .sum::<u32>();
            self.nodes[i].subtree_size = size;
        }
        let mut tops = vec![self.root];
        while let Some(top) = tops.pop() {
            let hp = self.heavy.len() as u32;
            let mut path = Vec::new();
            let mut cur = Some(top);
            while let Some(node) = cur {
                self.nodes[node.index()].heavy_path = hp;
                self.nodes[node.index()].pos = path.len() as u32;
                path.push(node);
                let children = &self.nodes[node.index()].children;
                let heavy_child = self.heavy_child(node);
                for &c in children.iter().rev() {
                    if Some(c) != heavy_child {
                        tops.push(c);
                    }
                }
                cur = heavy_child;
            }
            let weights: Vec<u64> = path
                .iter()
                .map(|&node| {
                    let heavy = self
                        .heavy_child(node)
                        .map_or(0, |c| self.nodes[c.index()].subtree_size);
                    (self.nodes[node.index()].subtree_size - heavy) as u64
                })
                .collect();
            let mut prefix = vec![0u64; weights.len() + 1];
            for (i, w) in weights.iter().enumerate() {
                prefix[i + 1] = prefix[i] + w;
            }
            let root = self.build_biased(hp, &prefix, 0, path.len() as u32 - 1);
            self.heavy.push(HeavyPath {
                nodes: path,
                biased_root: root,
            });
        }
    }

    fn build_biased(&mut self, hp: u32, prefix: &[u64], lo: u32, hi: u32) -> PathId {
        let id = PathId(self.canonical.len() as u32);
        self.canonical.push(CanonicalPath {
            heavy: hp,
            lo,
            hi,
            children: None,
        });
        if lo < hi {
            let (a, b) = (prefix[lo as usize], prefix[hi as usize + 1]);
            let half = a + (b - a).div_ceil(2);
            // first split point whose left part reaches half the weight
            let mut mid = lo;
            while mid + 1 < hi && prefix[mid as usize + 1] < half {
                mid += 1;
            }
            let left = self.build_biased(hp, prefix, lo, mid);
            let right = self.build_biased(hp, prefix, mid + 1, hi);
            self.canonical[id.index()].children = Some((left, right));
        }
        id
    }

    /// Child with the largest subtree, earliest in child order on ties.
    pub fn heavy_child(&self, node: NodeId) -> Option<NodeId> {
        let mut best: Option<NodeId> = None;
        for &c in &self.nodes[node.index()].children {
            if best.is_none_or(|b| {
                self.nodes[c.index()].subtree_size > self.nodes[b.index()].subtree_size
            }) {
                best = Some(c);
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &QNode {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[QNode] {
        &self.nodes
    }

    pub fn find(&self, cell: &GridCell) -> Option<NodeId> {
        self.lookup.get(cell).copied()
    }

    pub fn cell(&self, id: NodeId) -> GridCell {
        self.nodes[id.index()].cell
    }

    /// Position of `v` in the shifted frame.
    pub fn coords(&self, v: VertexId) -> (f64, f64) {
        self.coords[v.index()]
    }

    pub fn level(&self, v: VertexId) -> i32 {
        self.levels[v.index()]
    }

    /// `c_v`.
    pub fn vertex_node(&self, v: VertexId) -> NodeId {
        self.vertex_node[v.index()]
    }

    /// `c̄_v`, present in trees built with [`Extension::Full`].
    pub fn bar_node(&self, v: VertexId) -> Option<NodeId> {
        self.bar_node[v.index()]
    }

    pub fn heavy_paths(&self) -> &[HeavyPath] {
        &self.heavy
    }

    pub fn canonical_paths(&self) -> &[CanonicalPath] {
        &self.canonical
    }

    pub fn canonical(&self, p: PathId) -> &CanonicalPath {
        &self.canonical[p.index()]
    }

    /// `c_π`, the lowest node of a canonical path.
    pub fn lowest(&self, p: PathId) -> NodeId {
        let cp = &self.canonical[p.index()];
        self.heavy[cp.heavy as usize].nodes[cp.hi as usize]
    }

    /// `π_t`, the topmost node of a canonical path.
    pub fn topmost(&self, p: PathId) -> NodeId {
        let cp = &self.canonical[p.index()];
        self.heavy[cp.heavy as usize].nodes[cp.lo as usize]
    }

    pub fn path_nodes(&self, p: PathId) -> &[NodeId] {
        let cp = &self.canonical[p.index()];
        &self.heavy[cp.heavy as usize].nodes[cp.lo as usize..=cp.hi as usize]
    }

    /// Canonical paths containing `node`, from the largest piece down.
    pub fn paths_containing(&self, node: NodeId) -> Vec<PathId> {
        let n = &self.nodes[node.index()];
        let mut out = Vec::new();
        let mut cur = self.heavy[n.heavy_path as usize].biased_root;
        loop {
            out.push(cur);
            match self.canonical[cur.index()].children {
                None => return out,
                Some((l, r)) => {
                    cur = if n.pos <= self.canonical[l.index()].hi {
                        l
                    } else {
                        r
                    };
                }
            }
        }
    }

    /// Disjoint canonical paths whose union is the root-to-`node` path,
    /// listed from the root downwards.
    pub fn decompose_root_path(&self, node: NodeId) -> Vec<PathId> {
        let mut segments: Vec<(u32, u32)> = Vec::new();
        let mut cur = Some(node);
        while let Some(x) = cur {
            let n = &self.nodes[x.index()];
            segments.push((n.heavy_path, n.pos));
            let top = self.heavy[n.heavy_path as usize].nodes[0];
            cur = self.nodes[top.index()].parent;
        }
        let mut out = Vec::new();
        for &(hp, exit) in segments.iter().rev() {
            let mut cur = self.heavy[hp as usize].biased_root;
            loop {
                let cp = &self.canonical[cur.index()];
                if cp.hi <= exit {
                    out.push(cur);
                    break;
                }
                let (l, r) = cp.children.expect("a leaf piece always fits the prefix");
                if exit <= self.canonical[l.index()].hi {
                    cur = l;
                } else {
                    out.push(l);
                    cur = r;
                }
            }
        }
        out
    }

    /// `Π_v`: the canonical pieces of the root-to-`c̄_v` path.
    pub fn pi(&self, v: VertexId) -> Vec<PathId> {
        self.bar_node(v)
            .map(|b| self.decompose_root_path(b))
            .unwrap_or_default()
    }

    /// Nodes that are ancestors of (or equal to) some `c̄_v`.
    pub fn upper_marks(&self) -> Vec<bool> {
        let mut upper = vec![false; self.nodes.len()];
        for b in self.bar_node.iter().flatten() {
            let mut cur = Some(*b);
            while let Some(x) = cur {
                if upper[x.index()] {
                    break;
                }
                upper[x.index()] = true;
                cur = self.nodes[x.index()].parent;
            }
        }
        upper
    }

    /// Largest number of canonical pieces over all root-to-node paths.
    pub fn max_decomposition_len(&self) -> usize {
        (0..self.nodes.len())
            .map(|i| self.decompose_root_path(NodeId(i as u32)).len())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vertex;

    fn inst(points: &[(f64, f64, f64)]) -> DiskInstance {
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
    fn preorder_puts_ancestors_first() {
        let a = GridCell {
            level: 3,
            ix: 1,
            iy: 0,
        };
        let b = GridCell {
            level: 0,
            ix: 9,
            iy: 2,
        };
        assert!(is_ancestor_or_self(&a, &b));
        assert_eq!(preorder(&a, &b), Ordering::Less);
        assert_eq!(lca(&a, &b), a);
        let c = GridCell {
            level: 0,
            ix: 0,
            iy: 0,
        };
        assert_eq!(lca_level(&b, &c), 4);
    }

    #[test]
    fn single_vertex_tree_is_a_leaf() {
        let q = Quadtree::build(&inst(&[(5.0, 5.0, 3.0)]), H_LOG2, Extension::Base);
        assert_eq!(q.len(), 1);
        assert!(q.node(q.root()).children.is_empty());
    }

    #[test]
    fn four_corners_give_four_children() {
        // radius 1024 puts every point at level 0 (side ~0.707)
        let pts = [
            (0.1, 0.1, 1024.0),
            (1.2, 0.1, 1024.0),
            (0.1, 1.2, 1024.0),
            (1.2, 1.2, 1024.0),
        ];
        let q = Quadtree::build(&inst(&pts), H_LOG2, Extension::Base);
        assert_eq!(q.len(), 5);
        assert_eq!(q.node(q.root()).children.len(), 4);
        assert_eq!(q.cell(q.root()).level, 1);
    }

    #[test]
    fn far_point_compresses_chain() {
        let pts = [
            (0.1, 0.1, 1024.0),
            (1.2, 0.1, 1024.0),
            (1000.0, 1000.0, 1024.0),
        ];
        let q = Quadtree::build(&inst(&pts), H_LOG2, Extension::Base);
        assert_eq!(q.len(), 5);
        let root = q.node(q.root());
        assert_eq!(root.children.len(), 2);
        let inner = root
            .children
            .iter()
            .find(|c| !q.node(**c).children.is_empty())
            .unwrap();
        assert!(root.cell.level - q.cell(*inner).level > 1);
    }

    #[test]
    fn path_shaped_tree_has_one_heavy_path() {
        // nested cells at decreasing levels along a single chain
        let pts = [
            (0.01, 0.01, 1024.0 * 64.0),
            (0.01, 0.01, 1024.0 * 8.0),
            (0.01, 0.01, 1024.0),
        ];
        let q = Quadtree::build(&inst(&pts), H_LOG2, Extension::Base);
        assert_eq!(q.len(), 3);
        assert_eq!(q.heavy_paths().len(), 1);
    }

    #[test]
    fn star_ties_pick_first_child() {
        let pts = [
            (0.1, 0.1, 1024.0),
            (1.2, 0.1, 1024.0),
            (0.1, 1.2, 1024.0),
            (1.2, 1.2, 1024.0),
        ];
        let q = Quadtree::build(&inst(&pts), H_LOG2, Extension::Base);
        let first = q.node(q.root()).children[0];
        assert_eq!(q.heavy_child(q.root()), Some(first));
    }

    #[test]
    fn root_paths_decompose_into_contiguous_pieces() {
        let pts: Vec<(f64, f64, f64)> = (0..200)
            .map(|i| {
                (
                    (i * 37 % 101) as f64 * 3.1,
                    (i * 53 % 97) as f64 * 2.7,
                    1.0 + (i % 13) as f64 * 50.0,
                )
            })
            .collect();
        let q = Quadtree::build(&inst(&pts), H_LOG2, Extension::Full);
        for i in 0..q.len() {
            let node = NodeId(i as u32);
            let pieces = q.decompose_root_path(node);
            let nodes: Vec<NodeId> = pieces
                .iter()
                .flat_map(|&p| q.path_nodes(p).iter().copied())
                .collect();
            let mut expected = Vec::new();
            let mut cur = Some(node);
            while let Some(x) = cur {
                expected.push(x);
                cur = q.node(x).parent;
            }
            expected.reverse();
            assert_eq!(nodes, expected);
            for p in q.paths_containing(node) {
                assert!(q.path_nodes(p).contains(&node));
            }
        }
        let bound = 2 * (q.len() as f64).log2().ceil() as usize + 2;
        assert!(q.max_decomposition_len() <= bound);
    }
}
