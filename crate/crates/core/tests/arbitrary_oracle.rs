use disk_sssp::arbitrary::{solve_arbitrary_with, ArbitraryConfig};
use disk_sssp::generate::{generate, GenKind, GeneratorSpec};
use disk_sssp::model::{validate_result, DiskInstance, EdgeCheck, Vertex};
use disk_sssp::oracle::solve_oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small disks scattered around the rims of a few huge disks, so that most
/// edges between scales are irregular and many are tangent-like.
fn rim_instance(n: usize, seed: u64) -> DiskInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hubs = 1 + n / 40;
    let mut vs = Vec::with_capacity(n);
    let mut rims = Vec::new();
    for _ in 0..hubs {
        let r = 2f64.powf(rng.random_range(12.0..30.0));
        let (x, y) = (rng.random_range(-1e3..1e3), rng.random_range(-1e3..1e3));
        rims.push((x, y, r));
        vs.push(Vertex::new(x, y, r));
    }
    while vs.len() < n {
        let (x, y, r) = rims[rng.random_range(0..rims.len())];
        let a = rng.random_range(0.0..std::f64::consts::TAU);
        let off = rng.random_range(-6.0..6.0);
        let small = 2f64.powf(rng.random_range(0.0..3.0));
        vs.push(Vertex::new(
            x + (r + off) * a.cos(),
            y + (r + off) * a.sin(),
            small,
        ));
        // occasionally a chain step so that small disks link up
        if rng.random_bool(0.5) && vs.len() < n {
            let last = *vs.last().unwrap();
            let b = rng.random_range(0.0..std::f64::consts::TAU);
            vs.push(Vertex::new(
                last.x + 1.5 * last.r * b.cos(),
                last.y + 1.5 * last.r * b.sin(),
                last.r,
            ));
        }
    }
    let source = rng.random_range(0..n);
    DiskInstance::new(vs, source).unwrap()
}

fn check(inst: &DiskInstance, label: &str) {
    let (res, stats) = solve_arbitrary_with(inst, ArbitraryConfig::default());
    let want = solve_oracle(inst).unwrap();
    if let Some(i) = res.first_dist_mismatch(&want) {
        panic!(
            "{label}: vertex {i} got {} want {}",
            res.dist[i], want.dist[i]
        );
    }
    assert!(
        validate_result(inst, &res, EdgeCheck::Full).is_empty(),
        "{label}"
    );
    assert_eq!(stats.k_decreases, 0, "{label}");
}

#[test]
fn arbitrary_matches_oracle_on_generated_instances() {
    let mut seed = 1000u64;
    for &psi in &[1.0, 1024.0, 1048576.0, 1073741824.0] {
        for kind in GenKind::ALL {
            for n in [2usize, 19, 150, 300] {
                seed += 1;
                let inst = generate(&GeneratorSpec::new(kind, n, psi, seed)).unwrap();
                check(&inst, &format!("{kind} n={n} psi={psi} seed={seed}"));
            }
        }
    }
}

#[test]
fn arbitrary_matches_oracle_on_rim_instances() {
    for seed in 0..40u64 {
        let n = 20 + (seed as usize * 7) % 280;
        check(&rim_instance(n, seed), &format!("rim n={n} seed={seed}"));
    }
}

/// Each new disk hangs off a random earlier one: tangent, internally
/// tangent or overlapping, at a radius up to 2^12 times larger or smaller.
fn multi_scale(n: usize, seed: u64) -> DiskInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vs: Vec<Vertex> = vec![Vertex::new(0.0, 0.0, 1.0)];
    while vs.len() < n {
        let base = vs[rng.random_range(0..vs.len())];
        let a = rng.random_range(0.0..std::f64::consts::TAU);
        let e = rng.random_range(-12.0..12.0f64);
        let r = (base.r * 2f64.powf(e)).clamp(1.0, 2f64.powi(30));
        let d = match rng.random_range(0..3) {
            0 => (base.r + r) * rng.random_range(0.9..1.0),
            1 => (base.r - r).abs() + rng.random_range(-3.0..3.0),
            _ => rng.random_range(0.0..(base.r + r)),
        };
        vs.push(Vertex::new(base.x + d * a.cos(), base.y + d * a.sin(), r));
    }
    DiskInstance::new(vs, rng.random_range(0..n)).unwrap()
}

#[test]
fn arbitrary_matches_oracle_on_multi_scale_instances() {
    for seed in 0..150u64 {
        let n = 2 + (seed as usize * 13) % 299;
        check(
            &multi_scale(n, seed),
            &format!("multi-scale n={n} seed={seed}"),
        );
    }
}
