//! Exact additively weighted nearest-neighbour queries.
//!
//! A site set answers `argmin_s |q s| + w(s)` (ties to the smaller id) and
//! "is some disk of the set intersecting the disk at `q`?". The index is a
//! kd-tree whose nodes carry their bounding box, the minimum weight, the
//! maximum radius and the minimum id of their sites, plus a plane fitted to
//! the weights. A node's lower bound is the larger of the box bound
//! `gap(q, box) + min w` and the plane bound
//! `w_c - eps + |q c| - rho |g - unit(q - c)|`, where the plane `w_c + g (u - c)`
//! overestimates every weight by at most `eps` and `rho` is the node radius
//! around `c`. The plane bound is reduced by a relative safety margin, so
//! answers are identical to a linear scan.

use crate::model::euclid;

const BUCKET: usize = 8;
const NO_CHILD: u32 = u32::MAX;

/// A weighted site. `r` is only used by adjacency queries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Site {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub r: f64,
}

impl Site {
    pub const fn weighted(id: u32, x: f64, y: f64, w: f64) -> Self {
        Site {
            id,
            x,
            y,
            w,
            r: 0.0,
        }
    }

    pub const fn disk(id: u32, x: f64, y: f64, r: f64, w: f64) -> Self {
        Site { id, x, y, w, r }
    }
}

/// Answer of a nearest-neighbour query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nearest {
    pub id: u32,
    pub value: f64,
}

impl Nearest {
    pub const NONE: Nearest = Nearest {
        id: u32::MAX,
        value: f64::INFINITY,
    };

    #[inline]
    fn beats(self, other: Nearest) -> bool {
        self.value < other.value || (self.value == other.value && self.id < other.id)
    }

    pub fn is_some(&self) -> bool {
        self.id != u32::MAX
    }
}

#[derive(Clone, Debug)]
struct KdNode {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
    min_w: f64,
    max_r: f64,
    min_id: u32,
    plane: Plane,
    lo: u32,
    hi: u32,
    left: u32,
    right: u32,
}

/// Weights of a node bounded below by `wc + g (u - c) - eps` within radius `rho` of `c`.
#[derive(Clone, Copy, Debug)]
struct Plane {
    cx: f64,
    cy: f64,
    gx: f64,
    gy: f64,
    wc: f64,
    eps: f64,
    rho: f64,
}

const PLANE_MARGIN: f64 = 1e-11;

impl Plane {
    const NONE: Plane = Plane {
        cx: 0.0,
        cy: 0.0,
        gx: 0.0,
        gy: 0.0,
        wc: 0.0,
        eps: f64::INFINITY,
        rho: 0.0,
    };

    fn fit(sites: &[Site]) -> Plane {
        let n = sites.len() as f64;
        if sites.len() < 2 || sites.iter().any(|s| !s.w.is_finite()) {
            return Plane::NONE;
        }
        let cx = sites.iter().map(|s| s.x).sum::<f64>() / n;
        let cy = sites.iter().map(|s| s.y).sum::<f64>() / n;
        let wm = sites.iter().map(|s| s.w).sum::<f64>() / n;
        let (mut sxx, mut sxy, mut syy, mut sxw, mut syw) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for s in sites {
            let (dx, dy, dw) = (s.x - cx, s.y - cy, s.w - wm);
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
            sxw += dx * dw;
            syw += dy * dw;
        }
        let det = sxx * syy - sxy * sxy;
        let (gx, gy) = if det > 1e-12 * (sxx * syy).max(f64::MIN_POSITIVE) {
            ((sxw * syy - syw * sxy) / det, (syw * sxx - sxw * sxy) / det)
        } else {
            (0.0, 0.0)
        };
        let mut eps = f64::NEG_INFINITY;
        let mut rho: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for s in sites {
            let (dx, dy) = (s.x - cx, s.y - cy);
            let lin = wm + gx * dx + gy * dy;
            eps = eps.max(lin - s.w);
            rho = rho.max((dx * dx + dy * dy).sqrt());
            scale = scale.max(s.w.abs() + (gx.abs() + gy.abs()) * (dx.abs() + dy.abs()));
        }
        Plane {
            cx,
            cy,
            gx,
            gy,
            wc: wm,
            eps: eps.max(0.0) + PLANE_MARGIN * (scale + 1.0),
            rho,
        }
    }

    #[inline]
    fn bound(&self, qx: f64, qy: f64) -> f64 {
        let (px, py) = (qx - self.cx, qy - self.cy);
        let len = (px * px + py * py).sqrt();
        let (ux, uy) = if len > 0.0 {
            (px / len, py / len)
        } else {
            (1.0, 0.0)
        };
        let tilt = ((self.gx - ux).powi(2) + (self.gy - uy).powi(2)).sqrt();
        let raw = self.wc - self.eps + len - self.rho * tilt;
        raw - PLANE_MARGIN * (self.wc.abs() + len + self.rho * (tilt + 1.0) + 1.0)
    }
}

impl KdNode {
    #[inline]
    fn lower_bound(&self, qx: f64, qy: f64) -> f64 {
        let boxed = self.box_dist(qx, qy) + self.min_w;
        if self.plane.eps.is_finite() {
            boxed.max(self.plane.bound(qx, qy))
        } else {
            boxed
        }
    }

    #[inline]
    fn box_dist(&self, qx: f64, qy: f64) -> f64 {
        let dx = (self.min_x - qx).max(qx - self.max_x).max(0.0);
        let dy = (self.min_y - qy).max(qy - self.max_y).max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    #[inline]
    fn is_leaf(&self) -> bool {
        self.left == NO_CHILD
    }
}

/// Static site set with exact weighted nearest-neighbour and adjacency queries.
#[derive(Clone, Debug)]
pub struct WeightedSiteSet {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ws: Vec<f64>,
    rs: Vec<f64>,
    ids: Vec<u32>,
    nodes: Vec<KdNode>,
}

impl WeightedSiteSet {
    /// Builds the index. An empty site list yields a set that answers
    /// every query with "nothing".
    pub fn build(sites: &[Site]) -> Self {
        let mut order: Vec<Site> = sites.to_vec();
        let mut nodes = Vec::with_capacity(2 * sites.len() / BUCKET + 1);
        if !order.is_empty() {
            build_rec(&mut order, 0, &mut nodes);
        }
        WeightedSiteSet {
            xs: order.iter().map(|s| s.x).collect(),
            ys: order.iter().map(|s| s.y).collect(),
            ws: order.iter().map(|s| s.w).collect(),
            rs: order.iter().map(|s| s.r).collect(),
            ids: order.iter().map(|s| s.id).collect(),
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// The site minimising `|q s| + w(s)`, ties to the smallest id.
    pub fn nearest(&self, qx: f64, qy: f64) -> Option<Nearest> {
        let mut best = Nearest::NONE;
        self.nearest_improving(qx, qy, &mut best);
        best.is_some().then_some(best)
    }

    /// Lowers `best` to the best site of this set if that site beats it.
    /// Used to chain queries over several sets.
    pub fn nearest_improving(&self, qx: f64, qy: f64, best: &mut Nearest) {
        if self.ids.is_empty() {
            return;
        }
        if cfg!(feature = "linear-scan-nn") {
            self.scan_nearest(0, self.ids.len(), qx, qy, best);
        } else {
            self.search(0, qx, qy, best, None);
        }
    }

    /// True iff some site disk intersects the disk of radius `rq` at `q`
    /// under the closed predicate `|q s| <= rq + r_s`.
    pub fn any_adjacent(&self, qx: f64, qy: f64, rq: f64) -> bool {
        if self.ids.is_empty() {
            return false;
        }
        if cfg!(feature = "linear-scan-nn") {
            return (0..self.ids.len()).any(|i| self.adjacent_at(i, qx, qy, rq));
        }
        self.any_rec(0, qx, qy, rq)
    }

    /// Runs a nearest query and counts pruned subtrees whose true minimum
    /// would have beaten the incumbent at the moment of pruning.
    pub fn pruning_audit(&self, qx: f64, qy: f64) -> usize {
        let mut best = Nearest::NONE;
        let mut violations = 0;
        if !self.ids.is_empty() {
            self.search(0, qx, qy, &mut best, Some(&mut violations));
        }
        violations
    }

    #[inline]
    fn adjacent_at(&self, i: usize, qx: f64, qy: f64, rq: f64) -> bool {
        euclid(qx, qy, self.xs[i], self.ys[i]) <= rq + self.rs[i]
    }

    #[inline]
    fn scan_nearest(&self, lo: usize, hi: usize, qx: f64, qy: f64, best: &mut Nearest) {
        for i in lo..hi {
            let cand = Nearest {
                id: self.ids[i],
                value: euclid(qx, qy, self.xs[i], self.ys[i]) + self.ws[i],
            };
            if cand.beats(*best) {
                *best = cand;
            }
        }
    }

    fn search(
        &self,
        ni: usize,
        qx: f64,
        qy: f64,
        best: &mut Nearest,
        mut audit: Option<&mut usize>,
    ) {
        let node = &self.nodes[ni];
        if node.is_leaf() {
            self.scan_nearest(node.lo as usize, node.hi as usize, qx, qy, best);
            return;
        }
        let (a, b) = (node.left as usize, node.right as usize);
        let la = self.nodes[a].lower_bound(qx, qy);
        let lb = self.nodes[b].lower_bound(qx, qy);
        let order = if lb < la {
            [(b, lb), (a, la)]
        } else {
            [(a, la), (b, lb)]
        };
        for (child, bound) in order {
            let c = &self.nodes[child];
            let pruned = bound > best.value || (bound == best.value && c.min_id >= best.id);
            if pruned {
                if let Some(count) = audit.as_deref_mut() {
                    let mut local = *best;
                    self.scan_nearest(c.lo as usize, c.hi as usize, qx, qy, &mut local);
                    if local.beats(*best) {
                        *count += 1;
                    }
                }
            } else {
                self.search(child, qx, qy, best, audit.as_deref_mut());
            }
        }
    }

    fn any_rec(&self, ni: usize, qx: f64, qy: f64, rq: f64) -> bool {
        let node = &self.nodes[ni];
        if node.box_dist(qx, qy) > rq + node.max_r {
            return false;
        }
        if node.is_leaf() {
            return (node.lo as usize..node.hi as usize).any(|i| self.adjacent_at(i, qx, qy, rq));
        }
        self.any_rec(node.left as usize, qx, qy, rq)
            || self.any_rec(node.right as usize, qx, qy, rq)
    }
}

fn build_rec(sites: &mut [Site], offset: usize, nodes: &mut Vec<KdNode>) -> u32 {
    let mut node = KdNode {
        min_x: f64::INFINITY,
        min_y: f64::INFINITY,
        max_x: f64::NEG_INFINITY,
        max_y: f64::NEG_INFINITY,
        min_w: f64::INFINITY,
        max_r: f64::NEG_INFINITY,
        min_id: u32::MAX,
        plane: if sites.len() > BUCKET {
            Plane::fit(sites)
        } else {
            Plane::NONE
        },
        lo: offset as u32,
        hi: (offset + sites.len()) as u32,
        left: NO_CHILD,
        right: NO_CHILD,
    };
    for s in sites.iter() {
        node.min_x = node.min_x.min(s.x);
        node.min_y = node.min_y.min(s.y);
        node.max_x = node.max_x.max(s.x);
        node.max_y = node.max_y.max(s.y);
        node.min_w = node.min_w.min(s.w);
        node.max_r = node.max_r.max(s.r);
        node.min_id = node.min_id.min(s.id);
    }
    let idx = nodes.len();
    let split_x = node.max_x - node.min_x >= node.max_y - node.min_y;
    nodes.push(node);
    if sites.len() <= BUCKET {
        return idx as u32;
    }
    let mid = sites.len() / 2;
    if split_x {
        sites.select_nth_unstable_by(mid, |a, b| a.x.total_cmp(&b.x).then(a.id.cmp(&b.id)));
    } else {
        sites.select_nth_unstable_by(mid, |a, b| a.y.total_cmp(&b.y).then(a.id.cmp(&b.id)));
    }
    let (left, right) = sites.split_at_mut(mid);
    let l = build_rec(left, offset, nodes);
    let r = build_rec(right, offset + mid, nodes);
    nodes[idx].left = l;
    nodes[idx].right = r;
    idx as u32
}

/// Ground-truth linear scan for [`WeightedSiteSet::nearest`].
pub fn linear_nearest(sites: &[Site], qx: f64, qy: f64) -> Option<Nearest> {
    let mut best = Nearest::NONE;
    for s in sites {
        let cand = Nearest {
            id: s.id,
            value: euclid(qx, qy, s.x, s.y) + s.w,
        };
        if cand.beats(best) {
            best = cand;
        }
    }
    best.is_some().then_some(best)
}

/// Ground-truth linear scan for [`WeightedSiteSet::any_adjacent`].
pub fn linear_any_adjacent(sites: &[Site], qx: f64, qy: f64, rq: f64) -> bool {
    sites.iter().any(|s| euclid(qx, qy, s.x, s.y) <= rq + s.r)
}
