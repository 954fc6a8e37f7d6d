//! Property suites: rank bound, singular-value product inequality, RWF
//! gradient, determinism.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use risense::harness::*;
use risense::linalg::{sigma_min, CMatrix, CVector};
use risense::reconstruction::{rwf_gradient, rwf_loss, rwf_weights};
use risense::spectral::{rank_bound, spectral_report, RankLayout, DEFAULT_RANK_TOL};

fn complex_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

fn scenario_from(seed: u64) -> Scenario {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Scenario::with_sources(vec![SourceSpec::Point {
        pixel: [0, 0],
        amplitude: [1.0, 0.0],
    }]);
    s.seed = seed;
    s.roi = RoiSpec::Cartesian {
        origin: [-4.0, -4.0],
        pixel: [1.0, 1.0],
        counts: [r.random_range(1..=7), r.random_range(1..=7)],
        z: 0.0,
    };
    s.mode = if r.random_bool(0.5) {
        ReceiverMode::Dedicated
    } else {
        ReceiverMode::Shared
    };
    let mut ids: Vec<&str> = LANDMARK_IDS.to_vec();
    let k = r.random_range(1..=5);
    let shared_t = r.random_range(1..=60);
    s.panels = (0..k)
        .map(|_| {
            let id = ids.remove(r.random_range(0..ids.len()));
            let mut p = PanelSpec::at_landmark(id);
            p.elements = r.random_range(1..=16);
            p.rows = r.random_range(1..=3);
            p.spacing = 0.005;
            p.snapshots = if s.mode == ReceiverMode::Shared {
                shared_t
            } else {
                r.random_range(1..=30)
            };
            p
        })
        .collect();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn measured_rank_never_exceeds_bound(seed in any::<u64>()) {
        let s = scenario_from(seed);
        s.validate().unwrap();
        let dep = deploy(&s).unwrap();
        let rep = spectral_report(&dep.operator, DEFAULT_RANK_TOL).unwrap();
        let m = dep.operator.cols();
        let layout = match s.mode {
            ReceiverMode::Dedicated => RankLayout::Dedicated(
                s.panels.iter().map(|p| (p.snapshots, p.rows * p.elements)).collect(),
            ),
            ReceiverMode::Shared => RankLayout::Shared {
                snapshots: s.panels[0].snapshots,
                elements: s.panels.iter().map(|p| p.rows * p.elements).collect(),
            },
        };
        prop_assert_eq!(rep.rank_bound, rank_bound(m, &layout).unwrap());
        prop_assert!(rep.rank <= rep.rank_bound, "rank {} > bound {}", rep.rank, rep.rank_bound);
    }

    #[test]
    fn sigma_min_of_product(seed in any::<u64>(), m in 1usize..6, extra_k in 0usize..5, extra_n in 0usize..5) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k = m + extra_k;
        let n = k + extra_n;
        let a = complex_matrix(&mut r, n, k);
        let b = complex_matrix(&mut r, k, m);
        let lhs = sigma_min(&(&a * &b));
        let rhs = sigma_min(&a) * sigma_min(&b);
        prop_assert!(lhs >= rhs * (1.0 - 1e-12) - 1e-14, "{lhs} < {rhs}");
    }

    #[test]
    fn wirtinger_gradient_matches_finite_differences(seed in any::<u64>(), t in 3usize..20, n in 1usize..6) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let h = complex_matrix(&mut r, t, n);
        let y: Vec<f64> = (0..t).map(|_| r.random_range(0.1..2.0)).collect();
        let z = CVector::from_fn(n, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let w = rwf_weights(&h, &y, &z, 1e-3);
        let g = rwf_gradient(&h, &y, &z, &w);
        let eps = 1e-6;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for (dir, analytic) in [(Complex64::new(eps, 0.0), 2.0 * g[i].re), (Complex64::new(0.0, eps), 2.0 * g[i].im)] {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[i] += dir;
                zm[i] -= dir;
                let fd = (rwf_loss(&h, &y, &zp, &w) - rwf_loss(&h, &y, &zm, &w)) / (2.0 * eps);
                num += (fd - analytic).powi(2);
                den += analytic.powi(2);
            }
        }
        prop_assert!(num.sqrt() <= 1e-5 * den.sqrt().max(1e-12), "relative error {}", num.sqrt() / den.sqrt());
    }
}

fn small_table(seed: u64) -> Scenario {
    let mut s = Scenario::table_one();
    s.seed = seed;
    s.noise.snr_db = Some(15.0);
    for p in &mut s.panels {
        p.elements = 20;
        p.snapshots = 30;
    }
    s
}

#[test]
fn reruns_produce_identical_artifacts() {
    for seed in [0, 7, 42] {
        let s = small_table(seed);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let x = emit_outputs(&run_scenario(&s).unwrap(), a.path()).unwrap();
        let y = emit_outputs(&run_scenario(&s).unwrap(), b.path()).unwrap();
        for (p, q) in [
            (&x.field_csv, &y.field_csv),
            (&x.field_pgm, &y.field_pgm),
            (&x.spectrum_csv, &y.spectrum_csv),
            (&x.metrics_json, &y.metrics_json),
            (&x.scenario_toml, &y.scenario_toml),
        ] {
            assert_eq!(std::fs::read(p).unwrap(), std::fs::read(q).unwrap(), "{}", p.display());
        }
    }
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let s = small_table(3);
    let values = [10.0, 20.0, 30.0];
    let wide = run_sweep(&s, SweepKind::Measurements, &values, 3).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let narrow = pool.install(|| run_sweep(&s, SweepKind::Measurements, &values, 3).unwrap());
    assert_eq!(wide, narrow);
}

#[test]
fn different_seeds_give_different_noise() {
    let a = run_scenario(&small_table(1)).unwrap();
    let b = run_scenario(&small_table(2)).unwrap();
    assert_ne!(a.measurements.values, b.measurements.values);
}

const SMALL_DOA: &str = r#"
seed = 9
frequency_hz = 5.8e9

[roi]
kind = "angular"
start = -0.5
stop = 0.5
step = 0.05

[phases]
quantization = { bits = 1 }

[noise]
snr_db = 20.0

[solver]
method = "rwf"
magnitude_only = true

[solver.rwf]
max_iters = 200

[[panels]]
elements = 8
spacing = 0.025
snapshots = 60

[[sources]]
shape = "direction"
angle = 0.1
"#;

#[test]
fn magnitude_only_runs_are_deterministic() {
    let s = Scenario::from_toml(SMALL_DOA).unwrap();
    let a = run_doa(&s).unwrap();
    let b = run_doa(&s).unwrap();
    assert_eq!(a.estimate, b.estimate);
    assert_eq!(a.metrics, b.metrics);
}
