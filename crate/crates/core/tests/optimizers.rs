use std::sync::Mutex;

use hywave::ensemble::*;
use hywave::optimizers::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Wraps an objective and keeps every point it is asked to evaluate.
struct Recorder<O> {
    inner: O,
    seen: Mutex<Vec<Vec<f64>>>,
}

impl<O: Objective> Recorder<O> {
    fn new(inner: O) -> Self {
        Self { inner, seen: Mutex::new(Vec::new()) }
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.seen.lock().unwrap().clone()
    }
}

impl<O: Objective> Objective for Recorder<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.seen.lock().unwrap().push(x.to_vec());
        self.inner.evaluate(x)
    }
}

fn algorithms() -> impl Strategy<Value = AlgorithmId> {
    prop::sample::select(AlgorithmId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn runs_spend_exactly_the_budget_inside_bounds(
        algo in algorithms(),
        dim in 1usize..6,
        pop in 4usize..16,
        extra in 0usize..300,
        seed in any::<u64>(),
    ) {
        let budget = pop + extra;
        let bounds = Bounds::uniform(dim, -3.0, 2.0).unwrap();
        let obj = Recorder::new(Rastrigin::new(dim));
        let trace = minimize(algo, &obj, &bounds, pop, budget, seed).unwrap();
        prop_assert_eq!(trace.len(), budget);
        let points = obj.points();
        prop_assert_eq!(points.len(), budget);
        prop_assert!(points.iter().all(|x| bounds.contains(x)));
        prop_assert!(bounds.contains(&trace.best_position));
        let best = trace.best_so_far();
        prop_assert!(best.windows(2).all(|w| w[1] <= w[0]));
        let min = trace.records.iter().map(|r| r.fitness).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(trace.best_fitness, min);
        prop_assert_eq!(obj.inner.evaluate(&trace.best_position), trace.best_fitness);
        for (i, r) in trace.records.iter().enumerate() {
            prop_assert_eq!(r.eval_index, i);
        }
    }

    #[test]
    fn runs_are_deterministic(algo in algorithms(), seed in any::<u64>()) {
        let bounds = Bounds::uniform(3, -5.0, 5.0).unwrap();
        let a = minimize(algo, &Sphere::new(3), &bounds, 8, 200, seed).unwrap();
        let b = minimize(algo, &Sphere::new(3), &bounds, 8, 200, seed).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert_eq!(a.best_position, b.best_position);
    }

    #[test]
    fn novelty_matches_brute_force(
        points in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 1..40),
        x in prop::collection::vec(-10.0f64..10.0, 3),
        k in 1usize..10,
    ) {
        let mut d: Vec<f64> = points
            .iter()
            .map(|p| p.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .collect();
        d.sort_by(f64::total_cmp);
        let kk = k.min(d.len());
        let expected = d[..kk].iter().sum::<f64>() / kk as f64;
        prop_assert!((novelty(&x, &points, k) - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn archive_keeps_most_recent(cap in 1usize..20, n in 0usize..60) {
        let mut a = NoveltyArchive::new(cap);
        a.extend((0..n).map(|i| vec![i as f64]));
        prop_assert_eq!(a.len(), n.min(cap));
        let kept: Vec<f64> = a.iter().map(|p| p[0]).collect();
        let expected: Vec<f64> = (n.saturating_sub(cap)..n).map(|i| i as f64).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn log_codec_round_trips(v in 1e-6f64..1e12) {
        let e = encode_log(v).unwrap();
        prop_assert!((decode_log(e) - v).abs() <= 1e-12 * v);
    }

    #[test]
    fn snapping_is_idempotent(v in -20.0f64..20.0, step in prop::sample::select(vec![0.25, 0.5, 1.0])) {
        let s = snap_value(v, step);
        prop_assert!((s - v).abs() <= step / 2.0 + 1e-12);
        prop_assert_eq!(snap_value(s, step), s);
    }

    #[test]
    fn stagnation_never_flags_large_progress(start in 1.0f64..1e6, ratio in 0.0f64..0.9) {
        prop_assert!(!detect_stagnation(&[start, start * ratio], 1e-6));
        prop_assert!(detect_stagnation(&[start, start], 1e-6));
    }
}

#[test]
fn cma_covariance_stays_positive_definite_on_rosenbrock() {
    let n = 6;
    let bounds = Bounds::uniform(n, -5.0, 5.0).unwrap();
    let f = Rosenbrock::new(n);
    let mut state = CmaState::new(vec![-3.0; n], &bounds, 12, CmaParams::default());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut best = f64::INFINITY;
    for _ in 0..500 {
        let mut xs = state.sample(&mut rng, &bounds);
        xs.sort_by(|a, b| f.evaluate(a).total_cmp(&f.evaluate(b)));
        best = best.min(f.evaluate(&xs[0]));
        state.update(&xs);
        assert!(state.min_eigenvalue() > 0.0);
        assert!(state.sigma.is_finite() && state.sigma > 0.0);
        let asym = (&state.cov - state.cov.transpose()).abs().max();
        assert!(asym <= 1e-12 * state.cov.abs().max());
    }
    assert!(best < 1e-6, "best {best}");
}

#[test]
fn cma_sample_covariance_matches_distribution() {
    // Unequal ranges give C0 = diag(1, 0.25); sigma = 2 makes sigma^2 C = diag(4, 1).
    let bounds = Bounds::new(vec![-2e6, -1e6], vec![2e6, 1e6]).unwrap();
    let mut state = CmaState::new(vec![0.0, 0.0], &bounds, 100_000, CmaParams::default());
    state.sigma = 2.0;
    let xs = state.sample(&mut ChaCha8Rng::seed_from_u64(1), &bounds);
    let n = xs.len() as f64;
    let moment = |i: usize, j: usize| xs.iter().map(|x| x[i] * x[j]).sum::<f64>() / n;
    assert!((moment(0, 0) - 4.0).abs() / 4.0 < 0.05);
    assert!((moment(1, 1) - 1.0).abs() < 0.05);
    assert!(moment(0, 1).abs() < 0.05);
}

#[test]
fn eea_reduces_to_woa_with_full_woa_share() {
    let cfg = EnsembleConfig {
        woa_fraction: 1.0,
        aha_fraction: 0.0,
        omega: 0.0,
        novelty: false,
        grid_step: 0.0,
        ..EnsembleConfig::default()
    };
    let bounds = Bounds::uniform(4, -5.12, 5.12).unwrap();
    for seed in 0..3 {
        let eea = minimize_with(AlgorithmId::Eea, &Rastrigin::new(4), &bounds, 10, 510, seed, &cfg).unwrap();
        let woa = minimize(AlgorithmId::Woa, &Rastrigin::new(4), &bounds, 10, 510, seed).unwrap();
        assert_eq!(eea.to_csv(), woa.to_csv());
        assert_eq!(eea.best_position, woa.best_position);
    }
}

#[test]
fn eea_visits_all_three_stages_in_order() {
    let bounds = Bounds::uniform(5, -5.12, 5.12).unwrap();
    let trace = minimize(AlgorithmId::Eea, &Rastrigin::new(5), &bounds, 20, 4000, 9).unwrap();
    let blocks = trace.stage_blocks();
    assert_eq!(&blocks[..3], &["woa", "aha", "cma"]);
    for w in blocks.windows(2) {
        let next = match w[0] {
            "woa" => "aha",
            "aha" => "cma",
            _ => "woa",
        };
        assert_eq!(w[1], next);
    }
}

#[test]
fn cma_converges_on_ten_dimensional_sphere() {
    let bounds = Bounds::uniform(10, -5.0, 5.0).unwrap();
    for seed in 0..3 {
        let t = minimize(AlgorithmId::Cmaes, &Sphere::new(10), &bounds, 25, 20_000, seed).unwrap();
        assert!(t.best_fitness < 1e-8, "seed {seed}: {}", t.best_fitness);
    }
}
