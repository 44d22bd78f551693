//! Statistical and determinism properties of simulated kernels.

use segeo::{
    build_affinity, load_kernel, prepare_kernel, save_kernel, simulate_kernel, GridSpec, KernelGrid, KernelParams,
    LiftedPoint, Polarity, Stimulus,
};

fn l1(a: &KernelGrid, b: &KernelGrid) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum::<f64>() * a.bin_volume()
}

#[test]
fn monte_carlo_error_shrinks_with_paths() {
    let spec = GridSpec::covering(20.0);
    let pair = |paths: u64| {
        let p = KernelParams::fokker_planck(20).with_paths(paths);
        let a = simulate_kernel(&p, &spec).unwrap();
        let b = simulate_kernel(&p.with_seed(p.seed + 100), &spec).unwrap();
        l1(&a, &b)
    };
    let (coarse, fine) = (pair(250_000), pair(1_000_000));
    // 1/sqrt(n) scaling predicts a ratio near one half
    assert!(fine < 2.0 * coarse, "L1 {fine} at 1e6 paths vs {coarse} at 2.5e5");
    assert!(fine < coarse, "L1 {fine} at 1e6 paths vs {coarse} at 2.5e5");
}

#[test]
fn identical_params_give_identical_bits_on_any_pool() {
    let p = KernelParams::sub_riemannian(15).with_paths(30_000);
    let spec = GridSpec::covering(15.0);
    let on = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_kernel(&p, &spec).unwrap())
    };
    let one = on(1);
    for threads in [2, 3, 7] {
        let other = on(threads);
        assert!(one.values.iter().zip(&other.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

/// Replicates of the isotropic kernel's planar marginal, as
/// `[replicate][ix][iy]`.
fn isotropic_replicates(replicates: u64, paths: u64) -> (usize, Vec<Vec<Vec<f64>>>) {
    let spec = GridSpec::covering(30.0);
    let n = spec.nx;
    let reps = (0..replicates)
        .map(|r| {
            let p = KernelParams::isotropic(30).with_paths(paths).with_seed(1000 + r);
            let g = simulate_kernel(&p, &spec).unwrap();
            let mut m = vec![vec![0.0; n]; n];
            for (k, (_, _, mass)) in g.xy_marginal().into_iter().enumerate() {
                m[k / spec.ny][k % spec.ny] = mass;
            }
            m
        })
        .collect();
    (n, reps)
}

#[test]
fn isotropic_marginal_has_the_square_symmetries() {
    let r = 20;
    let (n, reps) = isotropic_replicates(r, 50_000);
    let (mut compared, mut outside) = (0usize, 0usize);
    let mut check = |a: (usize, usize), b: (usize, usize)| {
        let d: Vec<f64> = reps.iter().map(|m| m[a.0][a.1] - m[b.0][b.1]).collect();
        let mean = d.iter().sum::<f64>() / r as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
        let se = (var / r as f64).sqrt();
        if reps.iter().all(|m| m[a.0][a.1] == 0.0 && m[b.0][b.1] == 0.0) {
            return;
        }
        compared += 1;
        if mean.abs() > 3.0 * se {
            outside += 1;
        }
    };
    for ix in 0..n {
        for iy in 0..n {
            if ix < n - 1 - ix {
                check((ix, iy), (n - 1 - ix, iy));
            }
            if ix < iy {
                check((ix, iy), (iy, ix));
            }
        }
    }
    // a correct kernel leaves well under 1% of pairs beyond three standard
    // errors of the replicate spread; 2% allows for the t tails
    assert!(compared > 100, "only {compared} bin pairs carry mass");
    assert!(
        (outside as f64) <= 0.02 * compared as f64,
        "{outside} of {compared} mirrored bin pairs differ by more than 3 standard errors"
    );
}

#[test]
fn collinear_affinity_is_monotone_in_distance() {
    let grid = prepare_kernel(&KernelParams::fokker_planck(45).with_paths(200_000)).unwrap();
    let affinity = |d: f64| {
        let s = Stimulus::new(
            vec![LiftedPoint::new(0.0, 0.0, 0.0), LiftedPoint::new(d, 0.0, 0.0)],
            Polarity::Polarized,
        )
        .unwrap();
        build_affinity(&s, &grid).unwrap().get(0, 1)
    };
    let values: Vec<f64> = [5.0, 10.0, 20.0, 40.0].iter().map(|&d| affinity(d)).collect();
    assert!(values[0] > 0.0);
    assert!(values.windows(2).all(|w| w[1] <= w[0]), "{values:?}");
}

#[test]
fn saved_kernels_reload_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = KernelParams::fokker_planck(10).with_paths(20_000);
    let (a, b) = (dir.path().join("a.sgk"), dir.path().join("b.sgk"));
    save_kernel(&prepare_kernel(&p).unwrap(), &a).unwrap();
    save_kernel(&prepare_kernel(&p).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let g = load_kernel(&a).unwrap();
    assert_eq!(g.params, p);
    assert!(g.symmetrized);
}
