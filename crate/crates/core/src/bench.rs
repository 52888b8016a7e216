//! Benchmark harness: algorithm selection, suite files, CSV records and the
//! dist-array checksum.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arbitrary::{solve_arbitrary_with, ArbitraryConfig};
use crate::bounded::{solve_bounded_with, BoundedConfig};
use crate::exec::Execution;
use crate::generate::{generate, GenError, GenKind, GeneratorSpec};
use crate::lambda::LambdaStats;
use crate::model::{DiskInstance, SsspResult};
use crate::oracle::{ExplicitGraph, OracleError, OracleLimits};

/// CSV header written before the first record of a new file.
pub const CSV_HEADER: [&str; 7] = ["algo", "n", "psi", "seed", "ms", "edges", "checksum"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Bounded,
    Arbitrary,
    Oracle,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Bounded, Algo::Arbitrary, Algo::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Bounded => "bounded",
            Algo::Arbitrary => "arbitrary",
            Algo::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown algorithm {0:?}; expected bounded, arbitrary or oracle")]
pub struct UnknownAlgo(pub String);

impl FromStr for Algo {
    type Err = UnknownAlgo;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlgo(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reading suite {path}: {source}")]
    SuiteIo {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing suite: {0}")]
    SuiteParse(#[from] toml::de::Error),
    #[error("suite case {index}: {message}")]
    SuiteCase { index: usize, message: String },
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing csv: {0}")]
    Io(#[from] std::io::Error),
}

/// 64-bit FNV-1a over the dist array. Finite values contribute
/// `round(d * 1e6)` as little-endian `i64`, infinite ones the bytes `inf`.
pub fn checksum(dist: &[f64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    for &d in dist {
        if d.is_finite() {
            feed(&((d * 1e6).round() as i64).to_le_bytes());
        } else {
            feed(b"inf");
        }
    }
    h
}

/// Everything one solver invocation reports.
#[derive(Clone, Debug)]
pub struct Run {
    pub algo: Algo,
    pub result: SsspResult,
    pub ms: f64,
    /// Edge count, known only when the graph was materialized.
    pub edges: Option<usize>,
    pub rounds: usize,
    pub lambda: Option<LambdaStats>,
    pub max_case2_firings: Option<usize>,
}

/// Runs `algo` on `inst`, timing everything after parsing.
pub fn run_algo(inst: &DiskInstance, algo: Algo, exec: Execution) -> Result<Run, BenchError> {
    let start = Instant::now();
    let mut run = match algo {
        Algo::Bounded => {
            let cfg = BoundedConfig {
                exec,
                ..Default::default()
            };
            let (result, stats) = solve_bounded_with(inst, cfg);
            Run {
                algo,
                result,
                ms: 0.0,
                edges: None,
                rounds: stats.rounds,
                lambda: None,
                max_case2_firings: Some(stats.max_firings_per_cell),
            }
        }
        Algo::Arbitrary => {
            let cfg = ArbitraryConfig {
                exec,
                ..Default::default()
            };
            let (result, stats) = solve_arbitrary_with(inst, cfg);
            Run {
                algo,
                result,
                ms: 0.0,
                edges: None,
                rounds: stats.rounds,
                lambda: Some(stats.lambda),
                max_case2_firings: None,
            }
        }
        Algo::Oracle => {
            let graph = ExplicitGraph::materialize(inst, OracleLimits::default(), exec)?;
            let result = graph.dijkstra(inst.source());
            Run {
                algo,
                result,
                ms: 0.0,
                edges: Some(graph.edge_count()),
                rounds: inst.len(),
                lambda: None,
                max_case2_firings: None,
            }
        }
    };
    run.ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(run)
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub algo: Algo,
    pub n: usize,
    pub psi: f64,
    pub seed: u64,
    pub ms: f64,
    pub edges: Option<usize>,
    pub checksum: String,
    /// Not part of the CSV schema.
    #[serde(skip)]
    pub rounds: usize,
}

impl BenchRecord {
    pub fn of(run: &Run, n: usize, psi: f64, seed: u64) -> Self {
        BenchRecord {
            algo: run.algo,
            n,
            psi,
            seed,
            ms: (run.ms * 1e3).round() / 1e3,
            edges: run.edges,
            checksum: format!("{:016x}", checksum(&run.result.dist)),
            rounds: run.rounds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteCase {
    pub kind: GenKind,
    pub n: Vec<usize>,
    pub psi: f64,
    pub seeds: Vec<u64>,
    pub algos: Vec<Algo>,
    pub side: Option<f64>,
}

/// A benchmark suite: a list of `[[case]]` tables.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(rename = "case")]
    pub cases: Vec<SuiteCase>,
}

impl Suite {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let suite: Suite = toml::from_str(text)?;
        for (index, c) in suite.cases.iter().enumerate() {
            let fail = |message: &str| {
                Err(BenchError::SuiteCase {
                    index,
                    message: message.to_string(),
                })
            };
            if c.n.is_empty() || c.n.contains(&0) {
                return fail("n must be a nonempty list of positive sizes");
            }
            if c.seeds.is_empty() {
                return fail("seeds must not be empty");
            }
            if c.algos.is_empty() {
                return fail("algos must not be empty");
            }
        }
        Ok(suite)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::SuiteIo {
            path: path.display().to_string(),
            source,
        })?;
        Suite::parse(&text)
    }
}

/// Fits the smallest `C` with `count <= C * n * log2(n)` over all samples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SizeFit {
    pub c_small: f64,
    pub c_large_post: f64,
    pub max_case2_firings: usize,
    pub samples: usize,
}

impl SizeFit {
    pub fn add(&mut self, run: &Run, n: usize) {
        if let Some(f) = run.max_case2_firings {
            self.max_case2_firings = self.max_case2_firings.max(f);
        }
        let Some(l) = &run.lambda else { return };
        let scale = n as f64 * (n.max(2) as f64).log2();
        self.c_small = self.c_small.max(l.sum_small as f64 / scale);
        self.c_large_post = self
            .c_large_post
            .max((l.sum_large + l.sum_post) as f64 / scale);
        self.samples += 1;
    }

    /// The single constant covering both sums.
    pub fn c(&self) -> f64 {
        self.c_small.max(self.c_large_post)
    }

    pub fn comment_lines(&self) -> Vec<String> {
        vec![
            format!("# fitted_c={:.6} samples={}", self.c(), self.samples),
            format!(
                "# fitted_c_small={:.6} fitted_c_large_post={:.6}",
                self.c_small, self.c_large_post
            ),
            format!("# max_case2_firings={}", self.max_case2_firings),
        ]
    }
}

/// Result of running a whole suite.
#[derive(Clone, Debug, Default)]
pub struct SuiteOutcome {
    pub records: Vec<BenchRecord>,
    pub fit: SizeFit,
    /// Instances on which two algorithms' distances differ beyond the
    /// validation tolerance. Checksums alone can differ on huge distances.
    pub disagreements: Vec<String>,
    /// Oracle runs skipped because the instance exceeds the cap.
    pub refused: usize,
}

/// Runs every case of `suite`, instances one after another.
pub fn run_suite(suite: &Suite, exec: Execution) -> Result<SuiteOutcome, BenchError> {
    let mut out = SuiteOutcome::default();
    for case in &suite.cases {
        for &n in &case.n {
            for &seed in &case.seeds {
                let mut spec = GeneratorSpec::new(case.kind, n, case.psi, seed);
                if let Some(side) = case.side {
                    spec = spec.with_side(side);
                }
                let inst = generate(&spec)?;
                let mut first: Option<Run> = None;
                for &algo in &case.algos {
                    let run = match run_algo(&inst, algo, exec) {
                        Ok(run) => run,
                        Err(BenchError::Oracle(_)) if algo == Algo::Oracle => {
                            out.refused += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    out.fit.add(&run, n);
                    out.records.push(BenchRecord::of(&run, n, case.psi, seed));
                    match &first {
                        None => first = Some(run),
                        Some(f) => {
                            if let Some(i) = run.result.first_dist_mismatch(&f.result) {
                                out.disagreements.push(format!(
                                    "{} n={n} psi={} seed={seed}: {} and {} differ at vertex {i}",
                                    case.kind, case.psi, f.algo, run.algo
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Appends records to `path`, writing the header first when the file is
/// new or empty, followed by the fitted-constant comment lines.
pub fn append_csv(path: &Path, outcome: &SuiteOutcome) -> Result<(), BenchError> {
    let fresh = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    if fresh {
        w.write_record(CSV_HEADER)?;
    }
    for r in &outcome.records {
        w.serialize(r)?;
    }
    let mut file = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    for line in outcome.fit.comment_lines() {
        writeln!(file, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_tolerates_last_ulp_noise() {
        let a = [0.0, 1.5, 3.0, f64::INFINITY];
        let b = [0.0, 1.5 + 1e-15, 3.0 - 4e-16, f64::INFINITY];
        assert_eq!(checksum(&a), checksum(&b));
        assert_ne!(checksum(&a), checksum(&[0.0, 1.5, 3.000001, f64::INFINITY]));
        assert_ne!(checksum(&[f64::INFINITY]), checksum(&[0.0]));
    }

    #[test]
    fn empty_checksum_is_the_offset_basis() {
        assert_eq!(checksum(&[]), 0xcbf2_9ce4_8422_2325);
    }

    #[test]
    fn suite_parses_and_rejects_bad_cases() {
        let good = r#"
            [[case]]
            kind = "clique"
            n = [16, 32]
            psi = 1.0
            seeds = [1, 2]
            algos = ["bounded", "oracle"]
        "#;
        let s = Suite::parse(good).unwrap();
        assert_eq!(s.cases[0].kind, GenKind::Clique);
        assert_eq!(s.cases[0].algos, vec![Algo::Bounded, Algo::Oracle]);
        assert!(Suite::parse(&good.replace("[16, 32]", "[0]")).is_err());
        assert!(Suite::parse(&good.replace("bounded", "fast")).is_err());
    }

    #[test]
    fn small_suite_agrees_across_algorithms() {
        let suite = Suite {
            cases: vec![SuiteCase {
                kind: GenKind::UniformSquare,
                n: vec![40, 80],
                psi: 4.0,
                seeds: vec![3, 4],
                algos: Algo::ALL.to_vec(),
                side: None,
            }],
        };
        let out = run_suite(&suite, Execution::Sequential).unwrap();
        assert_eq!(out.records.len(), 12);
        assert!(out.disagreements.is_empty(), "{:?}", out.disagreements);
        assert_eq!(out.fit.samples, 4);
    }

    #[test]
    fn csv_gets_one_header_and_fit_comments() {
        let dir = std::env::temp_dir().join(format!("disk-sssp-bench-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        let _ = std::fs::remove_file(&path);
        let inst = generate(&GeneratorSpec::new(GenKind::PathChain, 5, 1.0, 1)).unwrap();
        let run = run_algo(&inst, Algo::Oracle, Execution::Sequential).unwrap();
        let outcome = SuiteOutcome {
            records: vec![BenchRecord::of(&run, 5, 1.0, 1)],
            ..Default::default()
        };
        append_csv(&path, &outcome).unwrap();
        append_csv(&path, &outcome).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "algo,n,psi,seed,ms,edges,checksum");
        assert_eq!(lines.iter().filter(|l| l.starts_with("algo,")).count(), 1);
        assert!(lines[1].starts_with("oracle,5,1.0,1,"));
        assert!(lines.iter().any(|l| l.starts_with("# fitted_c=")));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
