//! Seeded random instance generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DiskInstance, Vertex};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "DISK_SSSP_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    UniformSquare,
    Clustered,
    Clique,
    PathChain,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::UniformSquare,
        GenKind::Clustered,
        GenKind::Clique,
        GenKind::PathChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::UniformSquare => "uniform-square",
            GenKind::Clustered => "clustered",
            GenKind::Clique => "clique",
            GenKind::PathChain => "path-chain",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GenError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("unknown generator kind {0:?}")]
    UnknownKind(String),
    #[error("n must be at least 1")]
    EmptyInstance,
    #[error("psi must be a finite number >= 1, got {0}")]
    BadPsi(f64),
    #[error("side must be a finite positive number, got {0}")]
    BadSide(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GenKind,
    pub n: usize,
    pub psi: f64,
    /// Side of the placement square; a kind-specific default when absent.
    pub side: Option<f64>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GenKind, n: usize, psi: f64, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            n,
            psi,
            side: None,
            seed,
        }
    }

    pub fn with_side(mut self, side: f64) -> Self {
        self.side = Some(side);
        self
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::EmptyInstance);
        }
        if !(self.psi.is_finite() && self.psi >= 1.0) {
            return Err(GenError::BadPsi(self.psi));
        }
        if let Some(side) = self.side {
            if !(side.is_finite() && side > 0.0) {
                return Err(GenError::BadSide(side));
            }
        }
        Ok(())
    }

    pub fn default_side(&self) -> f64 {
        2.0 * (self.n as f64).sqrt() * self.psi.sqrt()
    }
}

/// The seed from `DISK_SSSP_SEED`, or `fallback` when unset or unparsable.
pub fn default_seed(fallback: u64) -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(fallback)
}

fn log_uniform(rng: &mut ChaCha8Rng, psi: f64) -> f64 {
    if psi == 1.0 {
        1.0
    } else {
        (rng.random::<f64>() * psi.ln()).exp().clamp(1.0, psi)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<DiskInstance, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let side = spec.side.unwrap_or_else(|| spec.default_side());
    let vertices: Vec<Vertex> = match spec.kind {
        GenKind::UniformSquare => (0..n)
            .map(|_| {
                let r = log_uniform(&mut rng, spec.psi);
                Vertex::new(rng.random_range(0.0..side), rng.random_range(0.0..side), r)
            })
            .collect(),
        GenKind::Clustered => {
            let clusters = (((n as f64).sqrt() / 2.0).ceil() as usize).max(1);
            let centres: Vec<(f64, f64)> = (0..clusters)
                .map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side)))
                .collect();
            let spread = Normal::new(0.0, side / (4.0 * (clusters as f64).sqrt()))
                .expect("positive deviation");
            (0..n)
                .map(|_| {
                    let (cx, cy) = centres[rng.random_range(0..clusters)];
                    let r = log_uniform(&mut rng, spec.psi);
                    Vertex::new(
                        cx + spread.sample(&mut rng),
                        cy + spread.sample(&mut rng),
                        r,
                    )
                })
                .collect()
        }
        GenKind::Clique => {
            let box_side = spec.side.unwrap_or(1.0);
            (0..n)
                .map(|_| {
                    let r = 10.0 * log_uniform(&mut rng, spec.psi);
                    Vertex::new(
                        rng.random_range(0.0..box_side),
                        rng.random_range(0.0..box_side),
                        r,
                    )
                })
                .collect()
        }
        GenKind::PathChain => {
            let mut out: Vec<Vertex> = Vec::with_capacity(n);
            for _ in 0..n {
                let r = log_uniform(&mut rng, spec.psi);
                let y = rng.random_range(-0.1..0.1);
                let x = match out.last() {
                    None => 0.0,
                    Some(p) => p.x + (p.r + r) * rng.random_range(0.3..0.95),
                };
                out.push(Vertex::new(x, y, r));
            }
            out
        }
    };
    let source = rng.random_range(0..n);
    Ok(DiskInstance::new(vertices, source).expect("generated instances are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_edge;

    #[test]
    fn clique_example_has_all_edges() {
        let inst = generate(&GeneratorSpec::new(GenKind::Clique, 4, 1.0, 3)).unwrap();
        assert!(inst.vertices().iter().all(|v| v.r == 10.0));
        let vs = inst.vertices();
        let m = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .filter(|&(i, j)| is_edge(&vs[i], &vs[j]))
            .count();
        assert_eq!(m, 6);
    }

    #[test]
    fn unit_psi_gives_unit_radii() {
        for kind in GenKind::ALL {
            if kind == GenKind::Clique {
                continue;
            }
            let inst = generate(&GeneratorSpec::new(kind, 50, 1.0, 1)).unwrap();
            assert!(inst.vertices().iter().all(|v| v.r == 1.0), "{kind}");
        }
    }

    #[test]
    fn same_seed_same_text() {
        for kind in GenKind::ALL {
            let spec = GeneratorSpec::new(kind, 40, 64.0, 99);
            assert_eq!(
                generate(&spec).unwrap().to_text(),
                generate(&spec).unwrap().to_text()
            );
        }
    }

    #[test]
    fn radii_stay_in_range() {
        let inst = generate(&GeneratorSpec::new(GenKind::UniformSquare, 500, 1024.0, 5)).unwrap();
        assert!(inst
            .vertices()
            .iter()
            .all(|v| (1.0..=1024.0).contains(&v.r)));
    }

    #[test]
    fn chain_neighbours_touch() {
        let inst = generate(&GeneratorSpec::new(GenKind::PathChain, 100, 16.0, 8)).unwrap();
        let vs = inst.vertices();
        assert!(vs.windows(2).all(|w| is_edge(&w[0], &w[1])));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert_eq!(
            generate(&GeneratorSpec::new(GenKind::Clique, 0, 1.0, 0)),
            Err(GenError::EmptyInstance)
        );
        assert_eq!(
            generate(&GeneratorSpec::new(GenKind::Clique, 3, 0.5, 0)),
            Err(GenError::BadPsi(0.5))
        );
        assert_eq!(
            "ring".parse::<GenKind>(),
            Err(GenError::UnknownKind("ring".into()))
        );
        assert_eq!("path-chain".parse::<GenKind>(), Ok(GenKind::PathChain));
    }
}
