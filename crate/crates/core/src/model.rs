//! Disk-graph instances, the edge predicate and shortest-path results.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Index of a vertex inside its [`DiskInstance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        VertexId(i as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disk centred at `(x, y)` with radius `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl Vertex {
    pub const fn new(x: f64, y: f64, r: f64) -> Self {
        Vertex { x, y, r }
    }
}

/// Euclidean distance between two points.
///
/// Every component computes distances through this function so that
/// repeated evaluations of the same pair are bit-identical.
#[inline]
pub fn euclid(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let dx = ax - bx;
    let dy = ay - by;
    (dx * dx + dy * dy).sqrt()
}

/// Closed intersection predicate: tangent disks are adjacent.
#[inline]
pub fn is_edge(u: &Vertex, v: &Vertex) -> bool {
    euclid(u.x, u.y, v.x, v.y) <= u.r + v.r
}

/// Weight of the edge `uv`, the distance between the centres.
#[inline]
pub fn edge_weight(u: &Vertex, v: &Vertex) -> f64 {
    euclid(u.x, u.y, v.x, v.y)
}

/// Relative tolerance used when validating distances.
#[inline]
pub fn eps_dist(d: f64) -> f64 {
    1e-9 * (1.0 + d.abs())
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance must contain at least one vertex")]
    Empty,
    #[error("source {source_id} out of range for {n} vertices")]
    SourceOutOfRange { source_id: usize, n: usize },
    #[error("vertex {id}: coordinates and radius must be finite")]
    NonFinite { id: usize },
    #[error("vertex {id}: radius {r} is below 1")]
    RadiusBelowOne { id: usize, r: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An immutable set of disks together with a source vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskInstance {
    vertices: Vec<Vertex>,
    source: VertexId,
}

impl DiskInstance {
    pub fn new(vertices: Vec<Vertex>, source: usize) -> Result<Self, InstanceError> {
        if vertices.is_empty() {
            return Err(InstanceError::Empty);
        }
        if source >= vertices.len() {
            return Err(InstanceError::SourceOutOfRange {
                source_id: source,
                n: vertices.len(),
            });
        }
        for (id, v) in vertices.iter().enumerate() {
            if !(v.x.is_finite() && v.y.is_finite() && v.r.is_finite()) {
                return Err(InstanceError::NonFinite { id });
            }
            if v.r < 1.0 {
                return Err(InstanceError::RadiusBelowOne { id, r: v.r });
            }
        }
        Ok(DiskInstance {
            vertices,
            source: VertexId::from_index(source),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn source(&self) -> VertexId {
        self.source
    }

    #[inline]
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    #[inline]
    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId::from_index)
    }

    /// Ratio between the largest and the smallest radius.
    pub fn psi(&self) -> f64 {
        let (lo, hi) = self
            .vertices
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
                (lo.min(v.r), hi.max(v.r))
            });
        hi / lo
    }

    #[inline]
    pub fn dist(&self, u: VertexId, v: VertexId) -> f64 {
        edge_weight(self.vertex(u), self.vertex(v))
    }

    #[inline]
    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        is_edge(self.vertex(u), self.vertex(v))
    }

    /// Parses the text format: a header line `n source` followed by `n`
    /// lines `x y r`. Anything after `#` on a line is ignored.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut header: Option<(usize, usize)> = None;
        let mut vertices = Vec::new();
        let mut last_line = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(parse_err(line, "expected header `n source_index`"));
                    }
                    let n = parse_field::<usize>(fields[0], line, "vertex count")?;
                    let s = parse_field::<usize>(fields[1], line, "source index")?;
                    header = Some((n, s));
                    vertices.reserve(n);
                }
                Some((n, _)) => {
                    if vertices.len() == n {
                        return Err(parse_err(line, "more vertex lines than announced"));
                    }
                    if fields.len() != 3 {
                        return Err(parse_err(line, "expected `x y r`"));
                    }
                    let x = parse_field::<f64>(fields[0], line, "x")?;
                    let y = parse_field::<f64>(fields[1], line, "y")?;
                    let r = parse_field::<f64>(fields[2], line, "r")?;
                    vertices.push(Vertex::new(x, y, r));
                }
            }
        }
        let (n, s) = header.ok_or_else(|| parse_err(last_line.max(1), "missing header"))?;
        if vertices.len() != n {
            return Err(parse_err(
                last_line.max(1),
                &format!("expected {n} vertex lines, found {}", vertices.len()),
            ));
        }
        DiskInstance::new(vertices, s)
    }

    /// Serialises to the text format, using shortest round-trip decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.vertices.len() * 32 + 16);
        out.push_str(&format!("{} {}\n", self.vertices.len(), self.source.0));
        for v in &self.vertices {
            out.push_str(&format!("{} {} {}\n", v.x, v.y, v.r));
        }
        out
    }
}

fn parse_err(line: usize, message: &str) -> InstanceError {
    InstanceError::Parse {
        line,
        message: message.to_string(),
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, InstanceError> {
    s.parse::<T>()
        .map_err(|_| parse_err(line, &format!("invalid {what} `{s}`")))
}

/// Distances and predecessors of a shortest-path tree.
#[derive(Clone, Debug, PartialEq)]
pub struct SsspResult {
    pub dist: Vec<f64>,
    pub prev: Vec<Option<VertexId>>,
}

impl SsspResult {
    pub fn unreached(n: usize) -> Self {
        SsspResult {
            dist: vec![f64::INFINITY; n],
            prev: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// One line per vertex: `id dist prev`, with `inf` and `-1` sentinels.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.dist.len() * 24);
        for (i, (d, p)) in self.dist.iter().zip(&self.prev).enumerate() {
            let p = p.map_or(-1i64, |p| p.0 as i64);
            if d.is_finite() {
                out.push_str(&format!("{i} {d} {p}\n"));
            } else {
                out.push_str(&format!("{i} inf {p}\n"));
            }
        }
        out
    }

    /// True when every vertex distance agrees with `other` within tolerance.
    pub fn dist_matches(&self, other: &SsspResult) -> bool {
        self.first_dist_mismatch(other).is_none()
    }

    pub fn first_dist_mismatch(&self, other: &SsspResult) -> Option<usize> {
        if self.dist.len() != other.dist.len() {
            return Some(self.dist.len().min(other.dist.len()));
        }
        self.dist
            .iter()
            .zip(&other.dist)
            .position(|(&a, &b)| !dist_close(a, b))
    }
}

/// Tolerant comparison of two distance values.
pub fn dist_close(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= eps_dist(a.max(b))
}

/// A broken invariant found by [`validate_result`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    LengthMismatch { expected: usize, found: usize },
    SourceDistNonzero,
    SourceHasPrev,
    MissingPrev(usize),
    PrevOnUnreached(usize),
    PrevNotAdjacent { v: usize, prev: usize },
    PrevUnreached { v: usize, prev: usize },
    PrevDistMismatch { v: usize, prev: usize },
    Cycle(usize),
    Triangle { u: usize, v: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch { expected, found } => {
                write!(f, "result has {found} entries, instance has {expected}")
            }
            Violation::SourceDistNonzero => write!(f, "source dist nonzero"),
            Violation::SourceHasPrev => write!(f, "source has a predecessor"),
            Violation::MissingPrev(v) => write!(f, "vertex {v} is reached but has no predecessor"),
            Violation::PrevOnUnreached(v) => {
                write!(f, "vertex {v} is unreached but has a predecessor")
            }
            Violation::PrevNotAdjacent { v, prev } => {
                write!(f, "predecessor {prev} of vertex {v} is not adjacent")
            }
            Violation::PrevUnreached { v, prev } => {
                write!(f, "predecessor {prev} of vertex {v} is unreached")
            }
            Violation::PrevDistMismatch { v, prev } => {
                write!(
                    f,
                    "dist of vertex {v} differs from dist of {prev} plus the edge weight"
                )
            }
            Violation::Cycle(v) => write!(
                f,
                "predecessor chain from vertex {v} does not reach the source"
            ),
            Violation::Triangle { u, v } => {
                write!(f, "edge ({u},{v}) violates dist[v] <= dist[u] + |uv|")
            }
        }
    }
}

/// How many edges [`validate_result`] inspects for triangle consistency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeCheck {
    None,
    /// Draw this many random vertex pairs and check those that are edges.
    Sampled {
        pairs: usize,
        seed: u64,
    },
    /// Check every pair; quadratic.
    Full,
}

/// Checks the shortest-path-tree invariants of `res` against `inst`.
pub fn validate_result(inst: &DiskInstance, res: &SsspResult, edges: EdgeCheck) -> Vec<Violation> {
    let n = inst.len();
    let mut out = Vec::new();
    if res.dist.len() != n || res.prev.len() != n {
        out.push(Violation::LengthMismatch {
            expected: n,
            found: res.dist.len().min(res.prev.len()),
        });
        return out;
    }
    let s = inst.source().index();
    if res.dist[s] != 0.0 {
        out.push(Violation::SourceDistNonzero);
    }
    if res.prev[s].is_some() {
        out.push(Violation::SourceHasPrev);
    }
    for v in 0..n {
        if v == s {
            continue;
        }
        let d = res.dist[v];
        match res.prev[v] {
            None if d.is_finite() => out.push(Violation::MissingPrev(v)),
            None => {}
            Some(_) if !d.is_finite() => out.push(Violation::PrevOnUnreached(v)),
            Some(p) => {
                let p = p.index();
                if p >= n {
                    out.push(Violation::PrevNotAdjacent { v, prev: p });
                    continue;
                }
                let (pv, vv) = (&inst.vertices()[p], &inst.vertices()[v]);
                if !is_edge(pv, vv) {
                    out.push(Violation::PrevNotAdjacent { v, prev: p });
                }
                if !res.dist[p].is_finite() {
                    out.push(Violation::PrevUnreached { v, prev: p });
                } else if !dist_close(d, res.dist[p] + edge_weight(pv, vv)) {
                    out.push(Violation::PrevDistMismatch { v, prev: p });
                }
            }
        }
    }
    check_acyclic(res, s, &mut out);
    let check_pair = |u: usize, v: usize, out: &mut Vec<Violation>| {
        let (a, b) = (&inst.vertices()[u], &inst.vertices()[v]);
        if u != v && is_edge(a, b) {
            let w = edge_weight(a, b);
            if res.dist[v] > res.dist[u] + w + eps_dist(res.dist[u] + w) {
                out.push(Violation::Triangle { u, v });
            }
            if res.dist[u] > res.dist[v] + w + eps_dist(res.dist[v] + w) {
                out.push(Violation::Triangle { u: v, v: u });
            }
        }
    };
    match edges {
        EdgeCheck::None => {}
        EdgeCheck::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pairs {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                check_pair(u, v, &mut out);
            }
        }
        EdgeCheck::Full => {
            for u in 0..n {
                for v in u + 1..n {
                    check_pair(u, v, &mut out);
                }
            }
        }
    }
    out
}

fn check_acyclic(res: &SsspResult, s: usize, out: &mut Vec<Violation>) {
    // 0 = unvisited, 1 = on the current chain, 2 = known to reach the source
    let n = res.dist.len();
    let mut state = vec![0u8; n];
    state[s] = 2;
    let mut chain = Vec::new();
    for start in 0..n {
        if state[start] != 0 || res.prev[start].is_none() {
            continue;
        }
        chain.clear();
        let mut cur = start;
        let ok = loop {
            match state[cur] {
                2 => break true,
                1 => break false,
                _ => {}
            }
            state[cur] = 1;
            chain.push(cur);
            match res.prev[cur] {
                Some(p) if p.index() < n => cur = p.index(),
                _ => break false,
            }
        };
        if !ok {
            out.push(Violation::Cycle(start));
        }
        for &c in &chain {
            state[c] = 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> DiskInstance {
        DiskInstance::new(
            vec![
                Vertex::new(0.0, 0.0, 1.0),
                Vertex::new(1.5, 0.0, 1.0),
                Vertex::new(3.0, 0.0, 1.0),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn edge_predicate_examples() {
        let o = Vertex::new(0.0, 0.0, 1.0);
        assert!(is_edge(&o, &Vertex::new(1.9, 0.0, 1.0)));
        assert!(!is_edge(&o, &Vertex::new(2.1, 0.0, 1.0)));
        assert!(!is_edge(
            &Vertex::new(0.0, 0.0, 3.0),
            &Vertex::new(3.0, 4.0, 1.0)
        ));
        assert!(is_edge(&o, &Vertex::new(2.0, 0.0, 1.0)), "tangency counts");
    }

    #[test]
    fn edge_weight_examples() {
        assert_eq!(
            edge_weight(&Vertex::new(0.0, 0.0, 2.0), &Vertex::new(3.0, 0.0, 2.0)),
            3.0
        );
        assert_eq!(
            edge_weight(&Vertex::new(0.0, 0.0, 5.0), &Vertex::new(3.0, 4.0, 5.0)),
            5.0
        );
        assert_eq!(
            edge_weight(&Vertex::new(1.0, 1.0, 2.0), &Vertex::new(1.0, 1.5, 2.0)),
            0.5
        );
    }

    #[test]
    fn validate_examples() {
        let one = DiskInstance::new(vec![Vertex::new(0.0, 0.0, 1.0)], 0).unwrap();
        let res = SsspResult {
            dist: vec![0.0],
            prev: vec![None],
        };
        assert!(validate_result(&one, &res, EdgeCheck::Full).is_empty());

        let bad = SsspResult {
            dist: vec![1.0],
            prev: vec![None],
        };
        let v = validate_result(&one, &bad, EdgeCheck::Full);
        assert_eq!(
            v.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            vec!["source dist nonzero"]
        );

        let inst = path3();
        let res = SsspResult {
            dist: vec![0.0, 1.5, 3.0],
            prev: vec![None, Some(VertexId(0)), Some(VertexId(1))],
        };
        assert!(validate_result(&inst, &res, EdgeCheck::Full).is_empty());
    }

    #[test]
    fn validate_detects_cycle_and_bad_prev() {
        let inst = path3();
        let res = SsspResult {
            dist: vec![0.0, 1.5, 3.0],
            prev: vec![None, Some(VertexId(2)), Some(VertexId(1))],
        };
        let v = validate_result(&inst, &res, EdgeCheck::None);
        assert!(v.iter().any(|x| matches!(x, Violation::Cycle(_))));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::PrevDistMismatch { v: 1, .. })));

        let res = SsspResult {
            dist: vec![0.0, 1.5, 3.0],
            prev: vec![None, Some(VertexId(0)), Some(VertexId(0))],
        };
        let v = validate_result(&inst, &res, EdgeCheck::None);
        assert!(v.contains(&Violation::PrevNotAdjacent { v: 2, prev: 0 }));
    }

    #[test]
    fn parse_and_format_round_trip() {
        let text = "# three disks\n3 0\n0 0 1\n1.5 0 1 # middle\n\n3 0 1\n";
        let inst = DiskInstance::parse(text).unwrap();
        assert_eq!(inst, path3());
        assert_eq!(inst.to_text(), "3 0\n0 0 1\n1.5 0 1\n3 0 1\n");
        assert_eq!(DiskInstance::parse(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            DiskInstance::parse(""),
            Err(InstanceError::Parse { .. })
        ));
        assert!(matches!(
            DiskInstance::parse("2 0\n0 0 1\n"),
            Err(InstanceError::Parse { .. })
        ));
        assert!(matches!(
            DiskInstance::parse("1 0\n0 zero 1\n"),
            Err(InstanceError::Parse { line: 2, .. })
        ));
        assert_eq!(
            DiskInstance::parse("1 3\n0 0 1\n"),
            Err(InstanceError::SourceOutOfRange { source_id: 3, n: 1 })
        );
        assert!(matches!(
            DiskInstance::parse("1 0\n0 0 0.5\n"),
            Err(InstanceError::RadiusBelowOne { .. })
        ));
        assert_eq!(DiskInstance::new(vec![], 0), Err(InstanceError::Empty));
    }

    #[test]
    fn result_text_uses_sentinels() {
        let res = SsspResult {
            dist: vec![0.0, 1.5, 3.0, f64::INFINITY],
            prev: vec![None, Some(VertexId(0)), Some(VertexId(1)), None],
        };
        assert_eq!(res.to_text(), "0 0 -1\n1 1.5 0\n2 3 1\n3 inf -1\n");
    }

    #[test]
    fn psi_is_radius_ratio() {
        let inst = DiskInstance::new(
            vec![Vertex::new(0.0, 0.0, 2.0), Vertex::new(9.0, 0.0, 8.0)],
            1,
        )
        .unwrap();
        assert_eq!(inst.psi(), 4.0);
    }
}
