//! Brute-force checks of the structural lemmas the solvers rely on.
//!
//! Every check enumerates pairs of vertices directly, so these functions are
//! quadratic and meant for instances of a few hundred vertices. Distances and
//! predecessors come from the oracle.

use std::collections::{HashMap, HashSet};
use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{CellId, GridIndex};
use crate::lambda::{LambdaId, Lambdas};
use crate::model::{DiskInstance, SsspResult, VertexId};
use crate::rindex::Region;

/// How many violation messages a report keeps.
const KEPT_MESSAGES: usize = 8;

/// Outcome of one lemma check.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LemmaReport {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Checks that held only up to an exact geometric tie.
    pub ties: usize,
    pub examples: Vec<String>,
}

impl LemmaReport {
    fn new(name: &'static str) -> Self {
        LemmaReport {
            name,
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < KEPT_MESSAGES {
                self.examples.push(message());
            }
        }
    }

    /// Adds the counts of `other`, which must be a report of the same lemma.
    pub fn absorb(&mut self, other: LemmaReport) {
        debug_assert_eq!(self.name, other.name);
        self.checked += other.checked;
        self.violations += other.violations;
        self.ties += other.ties;
        for m in other.examples {
            if self.examples.len() < KEPT_MESSAGES {
                self.examples.push(m);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn tol(x: f64) -> f64 {
    1e-9 * (1.0 + x.abs())
}

fn edges(inst: &DiskInstance) -> Vec<(VertexId, VertexId)> {
    let n = inst.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (u, v) = (VertexId::from_index(i), VertexId::from_index(j));
            if inst.adjacent(u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Orders an edge as `(smaller radius, larger radius)`.
fn by_radius(inst: &DiskInstance, (a, b): (VertexId, VertexId)) -> (VertexId, VertexId) {
    if inst.vertex(a).r <= inst.vertex(b).r {
        (a, b)
    } else {
        (b, a)
    }
}

/// The cells whose `P_small` contains `u`.
fn small_cells(grid: &GridIndex, u: VertexId) -> Vec<CellId> {
    let base = grid.cell(grid.mid_cell(u));
    let (_, top) = grid.level_range();
    (base.level + 1..=top)
        .filter_map(|l| grid.find(&base.ancestor(l)))
        .collect()
}

/// Regular edges (ratio below 2) connect cells that lie in each other's `⊞`.
pub fn edge_regular(inst: &DiskInstance, grid: &GridIndex) -> LemmaReport {
    let mut rep = LemmaReport::new("edge-regular");
    let mut cache: HashMap<CellId, HashSet<CellId>> = HashMap::new();
    for e in edges(inst) {
        let (u, v) = by_radius(inst, e);
        if inst.vertex(v).r >= 2.0 * inst.vertex(u).r {
            continue;
        }
        let (cu, cv) = (grid.mid_cell(u), grid.mid_cell(v));
        let in_v = cache
            .entry(cv)
            .or_insert_with(|| grid.boxplus(cv).into_iter().collect())
            .contains(&cu);
        let in_u = cache
            .entry(cu)
            .or_insert_with(|| grid.boxplus(cu).into_iter().collect())
            .contains(&cv);
        rep.check(in_u && in_v, || format!("regular edge {u}-{v} misses a ⊞"));
    }
    rep
}

/// For an irregular edge with small endpoint `u`, some cell of `⊞_{c_v}`
/// has `u` in its `P_small`.
pub fn edge_irregular(inst: &DiskInstance, grid: &GridIndex) -> LemmaReport {
    let mut rep = LemmaReport::new("edge-irregular");
    for e in edges(inst) {
        let (u, v) = by_radius(inst, e);
        if 2.0 * inst.vertex(u).r > inst.vertex(v).r {
            continue;
        }
        let around: HashSet<CellId> = grid.boxplus(grid.mid_cell(v)).into_iter().collect();
        let ok = small_cells(grid, u).iter().any(|c| around.contains(c));
        rep.check(ok, || {
            format!("irregular edge {u}-{v}: no cell of ⊞ holds {u} as small")
        });
    }
    rep
}

/// If `P_mid(c)` contains a small neighbour of `c'`, then `c' ∈ L(c)`.
pub fn bounded_lc(inst: &DiskInstance, grid: &GridIndex, l: &[Vec<CellId>]) -> LemmaReport {
    let mut rep = LemmaReport::new("bounded-lc");
    for e in edges(inst) {
        let (w, u) = by_radius(inst, e);
        if 2.0 * inst.vertex(w).r > inst.vertex(u).r {
            continue;
        }
        let (cw, cu) = (grid.mid_cell(w), grid.mid_cell(u));
        rep.check(l[cw.index()].contains(&cu), || {
            format!("edge {w}-{u}: cell of {u} missing from L(c_{w})")
        });
    }
    rep
}

/// Reachable small neighbours of a cell have distances within `65|c|`.
pub fn distance_difference(
    inst: &DiskInstance,
    grid: &GridIndex,
    oracle: &SsspResult,
) -> LemmaReport {
    let mut rep = LemmaReport::new("distance-difference");
    let mut span: HashMap<CellId, (f64, f64)> = HashMap::new();
    for e in edges(inst) {
        let (w, u) = by_radius(inst, e);
        let dw = oracle.dist[w.index()];
        if 2.0 * inst.vertex(w).r > inst.vertex(u).r || !dw.is_finite() {
            continue;
        }
        let s = span
            .entry(grid.mid_cell(u))
            .or_insert((f64::INFINITY, f64::NEG_INFINITY));
        s.0 = s.0.min(dw);
        s.1 = s.1.max(dw);
    }
    let mut cells: Vec<_> = span.into_iter().collect();
    cells.sort_unstable_by_key(|&(c, _)| c);
    for (c, (lo, hi)) in cells {
        let bound = 65.0 * grid.cell(c).diameter();
        rep.check(hi - lo <= bound + tol(hi), || {
            format!("cell {c:?}: small-neighbour span {} > {bound}", hi - lo)
        });
    }
    rep
}

/// For every non-source tree edge `uv` with `u = prev(v)`:
/// `|uv| >= |r_v - r_u|` unless `r_v < r_u` and `v` is a leaf.
///
/// The rule rests on a strict triangle inequality. With nearly collinear
/// centres the bypassing edge can tie the tree path exactly, so an edge is
/// a violation only when the bypass is shorter by more than the tolerance;
/// tied edges are counted in `ties`.
pub fn smalltolarge(inst: &DiskInstance, tree: &SsspResult) -> LemmaReport {
    let mut rep = LemmaReport::new("smalltolarge");
    let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); inst.len()];
    for v in inst.ids() {
        if let Some(p) = tree.prev[v.index()] {
            children[p.index()].push(v);
        }
    }
    for v in inst.ids() {
        let Some(u) = tree.prev[v.index()] else {
            continue;
        };
        if u == inst.source() {
            continue;
        }
        let (ru, rv) = (inst.vertex(u).r, inst.vertex(v).r);
        let uv = inst.dist(u, v);
        if uv >= (rv - ru).abs() - tol(ru.max(rv)) || (rv < ru && children[v.index()].is_empty()) {
            rep.check(true, String::new);
            continue;
        }
        // The widest bypass: prev(u) -> v when v is the larger disk, else u -> w for a child w of v.
        let slack = if rv > ru {
            let p = tree.prev[u.index()].expect("non-source vertex has a predecessor");
            inst.dist(p, u) + uv - inst.dist(p, v)
        } else {
            children[v.index()]
                .iter()
                .map(|&w| uv + inst.dist(v, w) - inst.dist(u, w))
                .fold(0.0, f64::max)
        };
        if slack <= tol(tree.dist[v.index()]) {
            rep.ties += 1;
            rep.check(true, String::new);
        } else {
            rep.check(false, || {
                format!(
                    "tree edge {u}->{v}: |uv|={uv} < |r_v-r_u|={}, bypass shorter by {slack}",
                    (rv - ru).abs()
                )
            });
        }
    }
    rep
}

/// Edges with radius ratio below `h` join cells lying in each other's `⊞`.
pub fn arbi_regular(inst: &DiskInstance, lam: &Lambdas) -> LemmaReport {
    let mut rep = LemmaReport::new("arbi-regular");
    let h = lam.params.h();
    let tree = &lam.tree;
    let region = |v: VertexId| {
        let cell = tree.cell(tree.vertex_node(v));
        let (cx, cy) = cell.center();
        let hl = lam.params.h_log2;
        Region {
            cx,
            cy,
            half: 2.0 * SQRT_2 * h * h * cell.diameter(),
            min_level: cell.level - hl,
            max_level: cell.level + hl,
        }
    };
    for e in edges(inst) {
        let (u, v) = by_radius(inst, e);
        if inst.vertex(v).r >= h * inst.vertex(u).r {
            continue;
        }
        let cu = tree.cell(tree.vertex_node(u));
        let cv = tree.cell(tree.vertex_node(v));
        rep.check(region(v).contains(&cu) && region(u).contains(&cv), || {
            format!("regular edge {u}-{v} misses a ⊞")
        });
    }
    rep
}

/// For each vertex, the groups holding it as a small member.
fn small_groups(inst: &DiskInstance, lam: &Lambdas) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); inst.len()];
    for i in 0..lam.len() {
        for &v in lam.small(LambdaId(i as u32)) {
            out[v.index()].push(i);
        }
    }
    out
}

/// For every irregular edge with small endpoint `v` and large endpoint `u`
/// some `λ` has `v ∈ P_small(λ)` and `u ∈ P_large(λ) ∪ P_post(λ)`, and
/// `u ∈ P_large(λ)` when the edge is not redundant.
pub fn arbi_irregular(inst: &DiskInstance, lam: &Lambdas) -> LemmaReport {
    let mut rep = LemmaReport::new("arbi-irregular");
    let h = lam.params.h();
    let holding = small_groups(inst, lam);
    let large: Vec<HashSet<VertexId>> = lam
        .lambdas()
        .iter()
        .map(|l| l.large.iter().copied().collect())
        .collect();
    let post: Vec<HashSet<VertexId>> = lam
        .lambdas()
        .iter()
        .map(|l| l.post.iter().copied().collect())
        .collect();
    for e in edges(inst) {
        let (v, u) = by_radius(inst, e);
        let (rv, ru) = (inst.vertex(v).r, inst.vertex(u).r);
        if ru < h * rv {
            continue;
        }
        let groups = &holding[v.index()];
        let any = groups
            .iter()
            .any(|&i| large[i].contains(&u) || post[i].contains(&u));
        rep.check(any, || format!("irregular edge {v}-{u}: no λ pairs them"));
        if inst.dist(u, v) >= ru - rv {
            let as_large = groups.iter().any(|&i| large[i].contains(&u));
            rep.check(as_large, || {
                format!("non-redundant edge {v}-{u}: {u} never large")
            });
        }
    }
    rep
}

/// Sampled pairs of every `P_large(λ)` are edges.
pub fn arbi_clique(
    inst: &DiskInstance,
    lam: &Lambdas,
    pairs_per_group: usize,
    seed: u64,
) -> LemmaReport {
    let mut rep = LemmaReport::new("arbi-clique");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for l in lam.lambdas() {
        let large = &l.large;
        let k = large.len();
        if k < 2 {
            continue;
        }
        if k * (k - 1) / 2 <= pairs_per_group {
            for i in 0..k {
                for j in i + 1..k {
                    let (a, b) = (large[i], large[j]);
                    rep.check(inst.adjacent(a, b), || {
                        format!("P_large pair {a}-{b} not adjacent")
                    });
                }
            }
        } else {
            for _ in 0..pairs_per_group {
                let i = rng.random_range(0..k);
                let j = (i + rng.random_range(1..k)) % k;
                let (a, b) = (large[i], large[j]);
                rep.check(inst.adjacent(a, b), || {
                    format!("P_large pair {a}-{b} not adjacent")
                });
            }
        }
    }
    rep
}

/// With `v, v' ∈ P_large(λ)`, `r_v > r_v'`, `u, u' ∈ P_small(λ)`,
/// `prev(u) = v`, `v'u'` an edge and `w = prev(u') ∈ P_large(λ)`:
/// `d(w) < d(v) + r_v - 6|c|`.
pub fn arbi_alarm_down(inst: &DiskInstance, lam: &Lambdas, oracle: &SsspResult) -> LemmaReport {
    let mut rep = LemmaReport::new("arbi-alarm-down");
    for (i, l) in lam.lambdas().iter().enumerate() {
        if l.large.len() < 2 {
            continue;
        }
        let large: HashSet<VertexId> = l.large.iter().copied().collect();
        let small = lam.small(LambdaId(i as u32));
        let fed: Vec<(VertexId, VertexId)> = small
            .iter()
            .filter_map(|&u| {
                oracle.prev[u.index()]
                    .filter(|p| large.contains(p))
                    .map(|p| (u, p))
            })
            .collect();
        if fed.is_empty() {
            continue;
        }
        let c = l.low_diameter;
        for &(_, v) in &fed {
            let rv = inst.vertex(v).r;
            let bound = oracle.dist[v.index()] + rv - 6.0 * c;
            for &(u2, w) in &fed {
                let linked = l
                    .large
                    .iter()
                    .any(|&v2| inst.vertex(v2).r < rv && inst.adjacent(v2, u2));
                if !linked {
                    continue;
                }
                let dw = oracle.dist[w.index()];
                rep.check(dw < bound + tol(bound), || {
                    format!("λ{i}: d({w})={dw} not below {bound} (v={v}, u'={u2})")
                });
            }
        }
    }
    rep
}

/// Runs every bounded-radius check.
pub fn bounded_suite(inst: &DiskInstance, oracle: &SsspResult) -> Vec<LemmaReport> {
    let grid = GridIndex::build(inst);
    let l = grid.compute_l(inst, crate::exec::Execution::Sequential);
    vec![
        edge_regular(inst, &grid),
        edge_irregular(inst, &grid),
        bounded_lc(inst, &grid, &l),
        distance_difference(inst, &grid, oracle),
        smalltolarge(inst, oracle),
    ]
}

/// Runs every arbitrary-radius check.
pub fn arbitrary_suite(
    inst: &DiskInstance,
    lam: &Lambdas,
    oracle: &SsspResult,
    seed: u64,
) -> Vec<LemmaReport> {
    vec![
        arbi_regular(inst, lam),
        arbi_irregular(inst, lam),
        arbi_clique(inst, lam, 1000, seed),
        arbi_alarm_down(inst, lam, oracle),
        smalltolarge(inst, oracle),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::lambda::ArbParams;
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
    fn redundant_leaf_edge_is_allowed() {
        // 2 sits inside 1 and hangs off it as a leaf.
        let i = inst(&[(0.0, 0.0, 1.0), (20.0, 0.0, 19.5), (21.0, 0.0, 1.0)], 0);
        let tree = solve_oracle(&i).unwrap();
        assert!(smalltolarge(&i, &tree).passed());
    }

    #[test]
    fn a_planted_violation_is_reported() {
        // The big disk 2 contains 1, yet the tree routes 0 -> 1 -> 2.
        let i = inst(&[(0.0, 0.0, 1.0), (1.5, 0.5, 1.0), (2.0, 0.0, 8.0)], 0);
        let d1 = 1.5f64.hypot(0.5);
        let tree = SsspResult {
            dist: vec![0.0, d1, d1 + 0.5f64.hypot(0.5)],
            prev: vec![None, Some(VertexId(0)), Some(VertexId(1))],
        };
        let rep = smalltolarge(&i, &tree);
        assert_eq!((rep.checked, rep.violations, rep.ties), (1, 1, 0));
    }

    #[test]
    fn a_collinear_tie_is_not_a_violation() {
        let i = inst(&[(0.0, 0.0, 1.0), (1.5, 0.0, 1.0), (2.0, 0.0, 8.0)], 0);
        let tree = SsspResult {
            dist: vec![0.0, 1.5, 2.0],
            prev: vec![None, Some(VertexId(0)), Some(VertexId(1))],
        };
        let rep = smalltolarge(&i, &tree);
        assert_eq!((rep.checked, rep.violations, rep.ties), (1, 0, 1));
    }

    #[test]
    fn huge_and_tiny_overlap_is_paired() {
        let big = 2f64.powi(20);
        let i = inst(
            &[(0.0, 0.0, 1.0), (big + 0.5, 0.0, big), (3.0, 0.0, 1.0)],
            0,
        );
        let lam = Lambdas::build(&i, ArbParams::default(), Execution::Sequential);
        let rep = arbi_irregular(&i, &lam);
        assert!(rep.checked >= 2);
        assert!(rep.passed(), "{:?}", rep.examples);
    }

    #[test]
    fn bounded_checks_hold_on_a_mixed_instance() {
        let pts: Vec<(f64, f64, f64)> = (0..40)
            .map(|i| {
                (
                    (i * 7 % 23) as f64 * 3.0,
                    (i * 11 % 17) as f64 * 3.0,
                    1.0 + (i % 5) as f64 * 1.7,
                )
            })
            .collect();
        let i = inst(&pts, 0);
        let tree = solve_oracle(&i).unwrap();
        for rep in bounded_suite(&i, &tree) {
            assert!(rep.passed(), "{}: {:?}", rep.name, rep.examples);
        }
    }
}
