mod common;

use common::rel_err;
use hywave::dynamics::*;
use hywave::environment::*;
use hywave::objectives::*;
use hywave::optimizers::Objective;
use proptest::prelude::*;

fn model(site: &str) -> SiteModel {
    SiteModel::new(
        PhysicsConfig::default(),
        FrequencyGrid::uniform(0.1, 3.0, 60).unwrap(),
        bundled_site(site).unwrap(),
        LinearizeOptions::default(),
    )
    .unwrap()
}

fn varied_design(n: usize) -> DesignVector {
    let pto = (0..n)
        .map(|i| PtoSetting::new(10f64.powf(2.0 + 0.3 * i as f64), 10f64.powf(5.0 + 0.1 * i as f64)).unwrap())
        .collect();
    DesignVector {
        distance: 27.0,
        radius: 5.0,
        pto,
    }
}

#[test]
fn annual_power_matches_brute_force_sum() {
    let m = model("sydney");
    let d = varied_design(m.n_states());
    let cfg = m.context().config().clone();
    let sys = m.context().system(Geometry::new(d.distance, d.radius, &cfg).unwrap()).unwrap();
    let mut expected = 0.0;
    for (state, pto) in m.site().states().iter().zip(&d.pto) {
        let spectra = m.context().spectra(state);
        let stats = linearize(&sys, pto, &spectra, &LinearizeOptions::default()).unwrap().stats;
        let p: f64 = stats.sigma_relvel.iter().map(|v| pto.b_pto * v * v).sum();
        expected += state.occurrence * p;
    }
    let got = m.annual_power(&d).unwrap();
    assert!(rel_err(got, expected) < 1e-12, "{got} vs {expected}");
}

#[test]
fn annual_nacelle_matches_brute_force_sum() {
    let m = model("gippsland");
    let d = varied_design(m.n_states());
    let cfg = m.context().config().clone();
    let sys = m.context().system(Geometry::new(d.distance, d.radius, &cfg).unwrap()).unwrap();
    let expected: f64 = m
        .site()
        .states()
        .iter()
        .zip(&d.pto)
        .map(|(s, pto)| {
            let lin = linearize(&sys, pto, &m.context().spectra(s), &LinearizeOptions::default()).unwrap();
            s.occurrence * lin.stats.sigma_nacelle
        })
        .sum();
    assert!(rel_err(m.annual_nacelle(&d).unwrap(), expected) < 1e-12);
}

#[test]
fn composite_objectives_follow_their_definitions() {
    let m = model("port_lincoln");
    let d = DesignVector::uniform(25.0, 5.0, PtoSetting::new(1e4, 8e5).unwrap(), m.n_states());
    let hybrid = m.annual_power(&d).unwrap();
    let isolated = m.isolated_power(&d).unwrap();
    let log = m.power_loss(&d, LossForm::Log).unwrap();
    let ratio = m.power_loss(&d, LossForm::Ratio).unwrap();
    assert!((log - (isolated / hybrid).log10()).abs() < 1e-12);
    assert!(rel_err(ratio, isolated / hybrid) < 1e-12);
    assert!(rel_err(10f64.powf(log), ratio) < 1e-10);

    let nacelle = m.annual_nacelle(&d).unwrap();
    let iso: f64 = m
        .site()
        .states()
        .iter()
        .zip(m.isolated_platform())
        .map(|(s, l)| s.occurrence * l.stats.sigma_nacelle)
        .sum();
    assert!(rel_err(m.nacelle_ratio(&d).unwrap(), nacelle / iso) < 1e-12);
}

#[test]
fn isolated_power_is_three_independent_spheres() {
    let m = model("cliff_head");
    let d = varied_design(m.n_states());
    let cfg = m.context().config().clone();
    let sys = m.context().system(Geometry::new(d.distance, d.radius, &cfg).unwrap()).unwrap();
    let expected: f64 = m
        .site()
        .states()
        .iter()
        .zip(&d.pto)
        .map(|(s, pto)| {
            let w = isolated_wec(&sys, pto, &m.context().spectra(s), &LinearizeOptions::default()).unwrap();
            3.0 * s.occurrence * w.power
        })
        .sum();
    assert!(rel_err(m.isolated_power(&d).unwrap(), expected) < 1e-12);
}

#[test]
fn drag_free_nacelle_ratio_is_exact_at_zero_pto() {
    let m = SiteModel::new(
        PhysicsConfig::default().without_drag(),
        FrequencyGrid::uniform(0.1, 3.0, 60).unwrap(),
        bundled_site("sydney").unwrap(),
        LinearizeOptions::default(),
    )
    .unwrap();
    let d = DesignVector::uniform(30.0, 5.0, PtoSetting { k_pto: 0.0, b_pto: 0.0 }, m.n_states());
    assert!(rel_err(m.nacelle_ratio(&d).unwrap(), 1.0) < 1e-12);
}

#[test]
fn annual_power_has_interior_damping_optimum() {
    let m = model("sydney");
    let powers: Vec<f64> = (0..19)
        .map(|i| {
            let b = 10f64.powf(1.0 + 0.5 * i as f64);
            let d = DesignVector::uniform(20.0, 5.0, PtoSetting::new(1e4, b).unwrap(), m.n_states());
            m.annual_power(&d).unwrap()
        })
        .collect();
    let best = (0..powers.len()).max_by(|&a, &b| powers[a].total_cmp(&powers[b])).unwrap();
    assert!(best > 0 && best < powers.len() - 1);
}

#[test]
fn evaluate_counts_calls_and_is_deterministic() {
    let m = model("sydney");
    let d = varied_design(m.n_states());
    let a = m.evaluate(&d, ObjectiveKind::AnnualPower).unwrap();
    let b = m.evaluate(&d, ObjectiveKind::AnnualPower).unwrap();
    assert_eq!(m.evaluations(), 2);
    assert_eq!((a.index, b.index), (0, 1));
    assert_eq!(a.fitness.to_bits(), b.fitness.to_bits());
    assert_eq!(a.state_power, b.state_power);
    assert!(!a.failed);
    assert!(rel_err(-a.fitness, m.annual_power(&d).unwrap()) < 1e-15);
    let n = m.evaluate(&d, ObjectiveKind::NacelleAccel).unwrap();
    assert!(n.fitness > 0.0);
}

#[test]
fn evaluate_rejects_invalid_designs() {
    let m = model("sydney");
    let mut d = varied_design(m.n_states());
    d.distance = 6.0;
    assert!(m.evaluate(&d, ObjectiveKind::AnnualPower).is_err());
    let short = DesignVector::uniform(20.0, 5.0, PtoSetting::new(1e4, 1e6).unwrap(), 3);
    assert!(m.evaluate(&short, ObjectiveKind::AnnualPower).is_err());
}

#[test]
fn design_problem_decodes_log_genes() {
    let m = model("sydney");
    let space = DesignSpace::new(RadiusMode::Fixed, PtoMode::PerState, m.n_states(), m.context().config().clearance);
    let problem = DesignProblem::new(&m, space.clone(), ObjectiveKind::AnnualPower).unwrap();
    assert_eq!(problem.dim(), 1 + 2 * m.n_states());
    let mut x = vec![30.0];
    x.extend(std::iter::repeat(4.0).take(m.n_states()));
    x.extend(std::iter::repeat(6.0).take(m.n_states()));
    let d = DesignVector::uniform(30.0, DEFAULT_RADIUS, PtoSetting::new(1e4, 1e6).unwrap(), m.n_states());
    let f = problem.evaluate(&x);
    assert!(rel_err(-f, m.annual_power(&d).unwrap()) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn encode_decode_round_trip(
        free in any::<bool>(),
        shared in any::<bool>(),
        genes in prop::collection::vec(0.0f64..1.0, 42),
    ) {
        let n = 20;
        let radius = if free { RadiusMode::Free } else { RadiusMode::Fixed };
        let pto = if shared { PtoMode::Shared } else { PtoMode::PerState };
        let space = DesignSpace::new(radius, pto, n, 0.0);
        let b = space.bounds();
        let x: Vec<f64> = (0..space.dim()).map(|i| b.lower()[i] + genes[i] * b.range(i)).collect();
        let d = space.decode(&x);
        prop_assert!(space.validate(&d).is_ok());
        let again = space.decode(&space.encode(&d).unwrap());
        prop_assert!(rel_err(again.distance, d.distance) < 1e-12);
        prop_assert!(rel_err(again.radius, d.radius) < 1e-12);
        for (p, q) in again.pto.iter().zip(&d.pto) {
            prop_assert!(rel_err(p.k_pto, q.k_pto) < 1e-12 && rel_err(p.b_pto, q.b_pto) < 1e-12);
        }
    }

    #[test]
    fn weighted_sum_is_linear(values in prop::collection::vec(0.0f64..1e6, 1..30), scale in 0.1f64..10.0) {
        let w = vec![1.0 / values.len() as f64; values.len()];
        let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let a = weighted_sum(&w, &values) * scale;
        let b = weighted_sum(&w, &scaled);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
