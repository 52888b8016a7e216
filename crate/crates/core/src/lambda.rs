//! Vertex groups for irregular edges.
//!
//! A group `λ = (π, C)` pairs a canonical path `π` of the quadtree with one
//! of `α` angular sectors `C` around the centre of its lowest cell `c_π`.
//! `P_small(λ)` holds the vertices whose root-to-`c̄_v` path uses `π`;
//! `P_large(λ)` and `P_post(λ)` hold vertices of sector `C` whose radius
//! fits the path's level range and whose disk boundary passes close to
//! `c_π` (large) or encloses it with room to spare (post).

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use crate::exec::Execution;
use crate::grid::{pow2, GridCell};
use crate::model::{euclid, DiskInstance, VertexId};
use crate::quadtree::{Extension, NodeId, PathId, Quadtree, H_LOG2};
use crate::update::{LabeledVertex, UpdateTree};
use crate::weighted_nn::{Site, WeightedSiteSet};

/// Number of angular sectors per canonical path.
pub const ALPHA: u32 = 629;

/// Relative slack added to geometric pruning bounds so that rounding in the
/// shifted frame never discards a candidate.
#[inline]
pub(crate) fn slack(bound: f64) -> f64 {
    bound + 1e-9 * (1.0 + bound.abs())
}

/// Tunable constants. Values other than the defaults void the correctness
/// guarantees and exist for experiments only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArbParams {
    pub h_log2: i32,
    pub alpha: u32,
}

impl Default for ArbParams {
    fn default() -> Self {
        ArbParams {
            h_log2: H_LOG2,
            alpha: ALPHA,
        }
    }
}

impl ArbParams {
    pub fn h(&self) -> f64 {
        pow2(self.h_log2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaId(pub u32);

impl LambdaId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Large,
    Post,
}

#[derive(Clone, Debug)]
pub struct Lambda {
    pub path: PathId,
    pub sector: u32,
    /// `|c_π|`.
    pub low_diameter: f64,
    /// Sorted by `(r, id)`.
    pub large: Vec<VertexId>,
    pub post: Vec<VertexId>,
    /// Small members adjacent to some large member, with the radius of
    /// `v(λ)`, sorted by `(radius, id)`.
    pub armed: Vec<(f64, VertexId)>,
}

/// Size counters used by the complexity checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LambdaStats {
    pub quadtree_nodes: usize,
    pub canonical_paths: usize,
    pub max_pi: usize,
    pub lambdas: usize,
    pub sum_small: usize,
    pub sum_large: usize,
    pub sum_post: usize,
    pub sum_l1: usize,
    pub sum_l2: usize,
}

/// Per group: small members armed with `r_{v(λ)}`, and large members with a small neighbour.
type Links = (Vec<(f64, VertexId)>, Vec<VertexId>);

#[derive(Clone, Debug)]
pub struct Lambdas {
    pub params: ArbParams,
    pub tree: Quadtree,
    lambdas: Vec<Lambda>,
    small: HashMap<PathId, Vec<VertexId>>,
    l1: Vec<Vec<(LambdaId, f64)>>,
    l2: Vec<Vec<LambdaId>>,
    stats: LambdaStats,
}

/// Where a vertex sits relative to a canonical path, if anywhere.
pub fn classify(
    tree: &Quadtree,
    params: &ArbParams,
    v: VertexId,
    r: f64,
    path: PathId,
) -> Option<(Role, u32)> {
    let h = params.h();
    let low = tree.cell(tree.lowest(path));
    let top = tree.cell(tree.topmost(path));
    let (cd, td) = (low.diameter(), top.diameter());
    if !(r >= h * cd && r < 2.0 * h * td) {
        return None;
    }
    let (px, py) = low.center();
    let (vx, vy) = tree.coords(v);
    let d = euclid(vx, vy, px, py);
    if d > 3.0 * h * td {
        return None;
    }
    let role = if (r - d).abs() < 5.0 * cd {
        Role::Large
    } else if r - d >= 5.0 * cd {
        Role::Post
    } else {
        return None;
    };
    Some((role, sector(vx - px, vy - py, params.alpha)))
}

/// Sector index of a direction; the zero vector maps to sector 0.
pub fn sector(dx: f64, dy: f64, alpha: u32) -> u32 {
    if dx == 0.0 && dy == 0.0 {
        return 0;
    }
    let a = dy.atan2(dx).rem_euclid(TAU);
    ((a / (TAU / alpha as f64)).floor() as u32).min(alpha - 1)
}

impl Lambdas {
    pub fn build(inst: &DiskInstance, params: ArbParams, exec: Execution) -> Self {
        let tree = Quadtree::build(inst, params.h_log2, Extension::Full);
        let ids: Vec<VertexId> = inst.ids().collect();

        let pis: Vec<Vec<PathId>> = exec.map(&ids, |&v| tree.pi(v));
        let max_pi = pis.iter().map(Vec::len).max().unwrap_or(0);
        let mut small: HashMap<PathId, Vec<VertexId>> = HashMap::new();
        for (&v, pi) in ids.iter().zip(&pis) {
            for &p in pi {
                small.entry(p).or_default().push(v);
            }
        }

        let upper = tree.upper_marks();
        let roles: Vec<Vec<(PathId, Role, u32)>> = exec.map(&ids, |&v| {
            let r = inst.vertex(v).r;
            let level = tree.level(v);
            let mut out = Vec::new();
            for node in nodes_at_level(&tree, &upper, v, level, r) {
                for p in tree.paths_containing(node) {
                    if !small.contains_key(&p) {
                        continue;
                    }
                    if let Some((role, sec)) = classify(&tree, &params, v, r, p) {
                        out.push((p, role, sec));
                    }
                }
            }
            out
        });

        let mut groups: BTreeMap<(PathId, u32), (Vec<VertexId>, Vec<VertexId>)> = BTreeMap::new();
        for (&v, list) in ids.iter().zip(&roles) {
            for &(p, role, sec) in list {
                let entry = groups.entry((p, sec)).or_default();
                match role {
                    Role::Large => entry.0.push(v),
                    Role::Post => entry.1.push(v),
                }
            }
        }
        let mut lambdas: Vec<Lambda> = groups
            .into_iter()
            .map(|((path, sector), (mut large, post))| {
                large.sort_by(|a, b| {
                    inst.vertex(*a)
                        .r
                        .total_cmp(&inst.vertex(*b).r)
                        .then(a.cmp(b))
                });
                Lambda {
                    path,
                    sector,
                    low_diameter: tree.cell(tree.lowest(path)).diameter(),
                    large,
                    post,
                    armed: Vec::new(),
                }
            })
            .collect();

        let small_sets: HashMap<PathId, WeightedSiteSet> = small
            .iter()
            .map(|(&p, members)| {
                let sites: Vec<Site> = members
                    .iter()
                    .map(|&x| {
                        let q = inst.vertex(x);
                        Site::disk(x.0, q.x, q.y, q.r, 0.0)
                    })
                    .collect();
                (p, WeightedSiteSet::build(&sites))
            })
            .collect();

        let per_lambda: Vec<Links> = exec.map_coarse(&lambdas, |lam| {
            if lam.large.is_empty() {
                return (Vec::new(), Vec::new());
            }
            let by_radius = UpdateTree::build(
                lam.large
                    .iter()
                    .map(|&u| LabeledVertex::of(inst, u, 0.0))
                    .collect(),
                Execution::Sequential,
            );
            let mut armed: Vec<(f64, VertexId)> = small[&lam.path]
                .iter()
                .filter_map(|&x| {
                    let q = inst.vertex(x);
                    by_radius
                        .leftmost_adjacent(q.x, q.y, q.r)
                        .map(|i| (by_radius.leaves()[i].r, x))
                })
                .collect();
            armed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let set = &small_sets[&lam.path];
            let linked: Vec<VertexId> = lam
                .large
                .iter()
                .copied()
                .filter(|&u| {
                    let q = inst.vertex(u);
                    set.any_adjacent(q.x, q.y, q.r)
                })
                .collect();
            (armed, linked)
        });

        let n = inst.len();
        let mut l1: Vec<Vec<(LambdaId, f64)>> = vec![Vec::new(); n];
        let mut l2: Vec<Vec<LambdaId>> = vec![Vec::new(); n];
        for (i, (lam, (armed, linked))) in lambdas.iter_mut().zip(per_lambda).enumerate() {
            let id = LambdaId(i as u32);
            for &(r, x) in &armed {
                l1[x.index()].push((id, r));
            }
            for u in linked {
                l2[u.index()].push(id);
            }
            lam.armed = armed;
        }

        let stats = LambdaStats {
            quadtree_nodes: tree.len(),
            canonical_paths: tree.canonical_paths().len(),
            max_pi,
            lambdas: lambdas.len(),
            sum_small: lambdas.iter().map(|l| small[&l.path].len()).sum(),
            sum_large: lambdas.iter().map(|l| l.large.len()).sum(),
            sum_post: lambdas.iter().map(|l| l.post.len()).sum(),
            sum_l1: l1.iter().map(Vec::len).sum(),
            sum_l2: l2.iter().map(Vec::len).sum(),
        };
        Lambdas {
            params,
            tree,
            lambdas,
            small,
            l1,
            l2,
            stats,
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[Lambda] {
        &self.lambdas
    }

    pub fn get(&self, id: LambdaId) -> &Lambda {
        &self.lambdas[id.index()]
    }

    /// `P_small(λ)`.
    pub fn small(&self, id: LambdaId) -> &[VertexId] {
        &self.small[&self.lambdas[id.index()].path]
    }

    /// Small members of the canonical path `p`.
    pub fn small_of_path(&self, p: PathId) -> &[VertexId] {
        self.small.get(&p).map_or(&[], Vec::as_slice)
    }

    /// `L₁(v)` with the radius of `v(λ)` for each group.
    pub fn l1(&self, v: VertexId) -> &[(LambdaId, f64)] {
        &self.l1[v.index()]
    }

    /// `L₂(v)`.
    pub fn l2(&self, v: VertexId) -> &[LambdaId] {
        &self.l2[v.index()]
    }

    pub fn stats(&self) -> &LambdaStats {
        &self.stats
    }
}

/// Quadtree nodes at exactly `level` that are ancestors of some `c̄` and lie
/// close enough to `v` to be crossed by its disk boundary.
fn nodes_at_level(tree: &Quadtree, upper: &[bool], v: VertexId, level: i32, r: f64) -> Vec<NodeId> {
    let (vx, vy) = tree.coords(v);
    let reach = slack(r + 6.0 * pow2(level));
    let near = |cell: &GridCell| cell.point_distance(vx, vy) <= reach;
    let mut out = Vec::new();
    let root = tree.root();
    if !upper[root.index()] || tree.cell(root).level < level || !near(&tree.cell(root)) {
        return out;
    }
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let cell = tree.cell(node);
        if cell.level == level {
            out.push(node);
            continue;
        }
        for &c in &tree.node(node).children {
            let cc = tree.cell(c);
            if upper[c.index()] && cc.level >= level && near(&cc) {
                stack.push(c);
            }
        }
    }
    out.sort();
    out
}
