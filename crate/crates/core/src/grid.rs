//! Hierarchical grid for the bounded-ratio solver.
//!
//! A cell of level `i` has diameter `|c| = 2^i` and side `2^i / sqrt(2)`; the
//! cell containing a point is found by flooring. A vertex belongs to
//! `P_mid(c)` for the unique cell `c` with `r in [8|c|, 16|c|)` and to
//! `P_small(c)` for every cell above that level that contains it.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::exec::Execution;
use crate::model::{euclid, DiskInstance, VertexId};
use crate::weighted_nn::{Site, WeightedSiteSet};

/// Half-side of the square `□_c`, in units of `|c|`.
///
/// Two vertices joined by a regular edge lie within `48|c|` of each other
/// when the larger one has level `i + 1`; adding half a diameter for the
/// centre offset and a full level-`i + 1` diameter gives `50.5|c|`.
pub const BOX_HALF_SIDE: f64 = 51.0;

/// `floor(log2(x))` for positive normal `x`, read from the exponent bits.
#[inline]
pub fn floor_log2(x: f64) -> i32 {
    debug_assert!(x.is_normal() && x > 0.0);
    (((x.to_bits() >> 52) & 0x7ff) as i32) - 1023
}

/// Level of the cell whose `P_mid` band `[8|c|, 16|c|)` contains `r`.
#[inline]
pub fn mid_level(r: f64) -> i32 {
    floor_log2(r / 8.0)
}

#[inline]
pub fn pow2(level: i32) -> f64 {
    2f64.powi(level)
}

/// A square cell addressed by `(level, ix, iy)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCell {
    pub level: i32,
    pub ix: i64,
    pub iy: i64,
}

impl GridCell {
    #[inline]
    pub fn side_at(level: i32) -> f64 {
        FRAC_1_SQRT_2 * pow2(level)
    }

    pub fn containing(level: i32, x: f64, y: f64) -> Self {
        let s = Self::side_at(level);
        GridCell {
            level,
            ix: (x / s).floor() as i64,
            iy: (y / s).floor() as i64,
        }
    }

    #[inline]
    pub fn diameter(&self) -> f64 {
        pow2(self.level)
    }

    #[inline]
    pub fn side(&self) -> f64 {
        Self::side_at(self.level)
    }

    pub fn center(&self) -> (f64, f64) {
        let s = self.side();
        ((self.ix as f64 + 0.5) * s, (self.iy as f64 + 0.5) * s)
    }

    /// `(x0, y0, x1, y1)`; the cell is the half-open square `[x0, x1) x [y0, y1)`.
    pub fn rect(&self) -> (f64, f64, f64, f64) {
        let s = self.side();
        (
            self.ix as f64 * s,
            self.iy as f64 * s,
            (self.ix + 1) as f64 * s,
            (self.iy + 1) as f64 * s,
        )
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        Self::containing(self.level, x, y) == *self
    }

    /// The cell at `level >= self.level` that contains this one.
    pub fn ancestor(&self, level: i32) -> Self {
        debug_assert!(level >= self.level);
        let k = (level - self.level) as u32;
        GridCell {
            level,
            ix: self.ix >> k,
            iy: self.iy >> k,
        }
    }

    /// Whether this cell lies inside the axis-parallel square with the given
    /// centre and half-side.
    pub fn inside_square(&self, cx: f64, cy: f64, half: f64) -> bool {
        let (x0, y0, x1, y1) = self.rect();
        x0 >= cx - half && x1 <= cx + half && y0 >= cy - half && y1 <= cy + half
    }

    /// Whether this cell lies inside `□_other`.
    pub fn inside_box_of(&self, other: &GridCell) -> bool {
        let (cx, cy) = other.center();
        self.inside_square(cx, cy, BOX_HALF_SIDE * other.diameter())
    }

    /// Smallest distance from a point to the closed cell.
    pub fn point_distance(&self, x: f64, y: f64) -> f64 {
        let (x0, y0, x1, y1) = self.rect();
        let dx = (x0 - x).max(0.0).max(x - x1);
        let dy = (y0 - y).max(0.0).max(y - y1);
        euclid(0.0, 0.0, dx, dy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub u32);

impl CellId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct CellRecord {
    pub cell: GridCell,
    pub mid: Vec<VertexId>,
    pub small: Vec<VertexId>,
}

/// Spatial lookup of materialized cells: per level, per column, sorted rows.
#[derive(Clone, Debug, Default)]
pub struct CellLocator {
    columns: HashMap<(i32, i64), Vec<(i64, CellId)>>,
    per_level: HashMap<i32, Vec<CellId>>,
}

impl CellLocator {
    pub fn build(cells: impl Iterator<Item = (CellId, GridCell)>) -> Self {
        let mut loc = CellLocator::default();
        for (id, c) in cells {
            loc.columns
                .entry((c.level, c.ix))
                .or_default()
                .push((c.iy, id));
            loc.per_level.entry(c.level).or_default().push(id);
        }
        for col in loc.columns.values_mut() {
            col.sort_unstable();
        }
        for list in loc.per_level.values_mut() {
            list.sort_unstable();
        }
        loc
    }

    pub fn level_len(&self, level: i32) -> usize {
        self.per_level.get(&level).map_or(0, Vec::len)
    }

    /// Calls `f` for every materialized cell of `level` whose indices fall in
    /// the inclusive ranges, plus possibly others from the level list that
    /// the caller must filter. `cell_of` maps ids back to cells.
    pub fn for_each_candidate(
        &self,
        level: i32,
        ix: (i64, i64),
        iy: (i64, i64),
        cell_of: impl Fn(CellId) -> GridCell,
        mut f: impl FnMut(CellId),
    ) {
        let Some(list) = self.per_level.get(&level) else {
            return;
        };
        if ix.1 < ix.0 || iy.1 < iy.0 {
            return;
        }
        let width = (ix.1 - ix.0 + 1) as u64;
        if (list.len() as u64) <= width {
            for &id in list {
                let c = cell_of(id);
                if (ix.0..=ix.1).contains(&c.ix) && (iy.0..=iy.1).contains(&c.iy) {
                    f(id);
                }
            }
            return;
        }
        for x in ix.0..=ix.1 {
            if let Some(col) = self.columns.get(&(level, x)) {
                let start = col.partition_point(|&(y, _)| y < iy.0);
                for &(y, id) in &col[start..] {
                    if y > iy.1 {
                        break;
                    }
                    f(id);
                }
            }
        }
    }
}

/// Index range `[floor(lo / s), floor(hi / s)]`.
#[inline]
fn index_range(lo: f64, hi: f64, s: f64) -> (i64, i64) {
    ((lo / s).floor() as i64, (hi / s).floor() as i64)
}

/// Upper bound on `|⊞_c|` for a fully populated grid.
pub fn boxplus_capacity() -> usize {
    (-1..=1)
        .map(|d: i32| {
            let per_side = (2.0 * BOX_HALF_SIDE / GridCell::side_at(d)).floor() as usize + 2;
            per_side * per_side
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct GridIndex {
    cells: Vec<CellRecord>,
    lookup: HashMap<GridCell, CellId>,
    locator: CellLocator,
    mid_cell_of: Vec<CellId>,
    min_level: i32,
    max_mid_level: i32,
}

impl GridIndex {
    pub fn build(inst: &DiskInstance) -> Self {
        let levels: Vec<i32> = inst.vertices().iter().map(|v| mid_level(v.r)).collect();
        let min_level = *levels.iter().min().expect("instance is nonempty");
        let max_mid_level = *levels.iter().max().expect("instance is nonempty");
        let small_top = max_mid_level;

        let mut cells: Vec<CellRecord> = Vec::new();
        let mut lookup: HashMap<GridCell, CellId> = HashMap::new();
        let mut intern = |c: GridCell, cells: &mut Vec<CellRecord>| -> CellId {
            *lookup.entry(c).or_insert_with(|| {
                cells.push(CellRecord {
                    cell: c,
                    mid: Vec::new(),
                    small: Vec::new(),
                });
                CellId((cells.len() - 1) as u32)
            })
        };
        let mut mid_cell_of = Vec::with_capacity(inst.len());
        for (i, v) in inst.vertices().iter().enumerate() {
            let id = VertexId::from_index(i);
            let lv = levels[i];
            let base = GridCell::containing(lv, v.x, v.y);
            let c = intern(base, &mut cells);
            cells[c.index()].mid.push(id);
            mid_cell_of.push(c);
            for level in lv + 1..=small_top {
                let s = intern(base.ancestor(level), &mut cells);
                cells[s.index()].small.push(id);
            }
        }
        let locator = CellLocator::build(
            cells
                .iter()
                .enumerate()
                .map(|(i, r)| (CellId(i as u32), r.cell)),
        );
        GridIndex {
            cells,
            lookup,
            locator,
            mid_cell_of,
            min_level,
            max_mid_level,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn level_range(&self) -> (i32, i32) {
        (self.min_level, self.max_mid_level)
    }

    pub fn cells(&self) -> &[CellRecord] {
        &self.cells
    }

    pub fn record(&self, c: CellId) -> &CellRecord {
        &self.cells[c.index()]
    }

    pub fn cell(&self, c: CellId) -> GridCell {
        self.cells[c.index()].cell
    }

    pub fn find(&self, cell: &GridCell) -> Option<CellId> {
        self.lookup.get(cell).copied()
    }

    /// `c_v`, the cell whose `P_mid` contains `v`.
    pub fn mid_cell(&self, v: VertexId) -> CellId {
        self.mid_cell_of[v.index()]
    }

    pub fn mid_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cells.len())
            .map(|i| CellId(i as u32))
            .filter(|&c| !self.cells[c.index()].mid.is_empty())
    }

    /// `⊞_c`: materialized cells of levels `i - 1`, `i`, `i + 1` inside `□_c`.
    pub fn boxplus(&self, c: CellId) -> Vec<CellId> {
        let cell = self.cell(c);
        let (cx, cy) = cell.center();
        let half = BOX_HALF_SIDE * cell.diameter();
        let mut out = Vec::new();
        for level in cell.level - 1..=cell.level + 1 {
            let s = GridCell::side_at(level);
            let ix = index_range(cx - half, cx + half, s);
            let iy = index_range(cy - half, cy + half, s);
            self.locator.for_each_candidate(
                level,
                ix,
                iy,
                |id| self.cell(id),
                |id| {
                    if self.cell(id).inside_square(cx, cy, half) {
                        out.push(id);
                    }
                },
            );
        }
        out.sort_unstable();
        out
    }

    /// Materialized cells `c'` with nonempty `P_mid`, `2|c| <= |c'|` and
    /// `c ⊂ □_{c'}`.
    pub fn candidate_parents(&self, c: CellId) -> Vec<CellId> {
        let cell = self.cell(c);
        let (x0, y0, x1, y1) = cell.rect();
        let mut out = Vec::new();
        for level in cell.level + 1..=self.max_mid_level {
            let half = BOX_HALF_SIDE * pow2(level);
            let s = GridCell::side_at(level);
            let ix = index_range(x1 - half, x0 + half, s);
            let iy = index_range(y1 - half, y0 + half, s);
            self.locator.for_each_candidate(
                level,
                ix,
                iy,
                |id| self.cell(id),
                |id| {
                    let rec = self.record(id);
                    if !rec.mid.is_empty() && cell.inside_box_of(&rec.cell) {
                        out.push(id);
                    }
                },
            );
        }
        out.sort_unstable();
        out
    }

    /// `L(c)` for every cell: the cells of larger diameter whose `P_mid`
    /// has an edge to `P_mid(c)`. Empty for cells without mid vertices.
    pub fn compute_l(&self, inst: &DiskInstance, exec: Execution) -> Vec<Vec<CellId>> {
        let sets: Vec<Option<WeightedSiteSet>> = exec.map(&self.cells, |rec| {
            (rec.mid.len() > 8).then(|| {
                let sites: Vec<Site> = rec
                    .mid
                    .iter()
                    .map(|&u| {
                        let p = inst.vertex(u);
                        Site::disk(u.0, p.x, p.y, p.r, -p.r)
                    })
                    .collect();
                WeightedSiteSet::build(&sites)
            })
        });
        let ids: Vec<CellId> = (0..self.cells.len() as u32).map(CellId).collect();
        exec.map(&ids, |&c| {
            let rec = self.record(c);
            if rec.mid.is_empty() {
                return Vec::new();
            }
            self.candidate_parents(c)
                .into_iter()
                .filter(|&other| {
                    let targets = &self.record(other).mid;
                    rec.mid.iter().any(|&v| {
                        let p = inst.vertex(v);
                        match &sets[other.index()] {
                            Some(set) => set.any_adjacent(p.x, p.y, p.r),
                            None => targets.iter().any(|&u| inst.adjacent(u, v)),
                        }
                    })
                })
                .collect()
        })
    }
}
