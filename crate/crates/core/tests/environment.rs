use hywave::environment::*;
use proptest::prelude::*;

fn wide() -> FrequencyGrid {
    FrequencyGrid::uniform(0.1, 6.0, 400).unwrap()
}

#[test]
fn jonswap_variance_on_dense_grid() {
    let cfg = PhysicsConfig::default();
    let s = SeaState::new(2.0, 8.0, 0.0, 1.0).unwrap();
    let m0 = wide().integrate(&jonswap_spectrum(&s, &wide(), &cfg));
    assert!((m0 - 0.25).abs() / 0.25 < 0.01);
}

#[test]
fn kaimal_variance_matches_turbulence_intensity() {
    let cfg = PhysicsConfig::default();
    let s = SeaState::new(1.0, 8.0, 10.0, 1.0).unwrap();
    let grid = FrequencyGrid::log_spaced(1e-4, 50.0, 4000).unwrap();
    let var = grid.integrate(&kaimal_spectrum(&s, &grid, &cfg));
    let expected = (cfg.turbulence_intensity * 10.0f64).powi(2);
    assert!((var - expected).abs() / expected < 0.02, "{var} vs {expected}");
}

#[test]
fn bundled_sites_are_normalised_and_round_trip() {
    for p in BUNDLED_SITES.iter() {
        let site = bundled_site(p.name).unwrap();
        let total: f64 = site.states().iter().map(|s| s.occurrence).sum();
        assert!((total - 1.0).abs() < 0.01);
        assert!(site.states().iter().all(|s| s.validate().is_ok()));
        let again = parse_site(p.name, &site_to_csv(&site)).unwrap();
        assert_eq!(again.states(), site.states());
        assert_eq!(generate_site(p).states(), site.states());
    }
}

#[test]
fn malformed_site_tables_are_rejected() {
    assert!(parse_site("x", "hs,tp,uw,occurrence\n1.0,8.0,5.0\n").is_err());
    assert!(parse_site("x", "hs,tp,uw,occurrence\n1.0,8.0,5.0,0.4\n").is_err());
    assert!(parse_site("x", "hs,tp,uw,occurrence\n-1.0,8.0,5.0,1.0\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn spectra_are_non_negative(hs in 0.0f64..8.0, tp in 3.0f64..20.0, uw in 0.0f64..30.0) {
        let cfg = PhysicsConfig::default();
        let s = SeaState::new(hs, tp, uw, 1.0).unwrap();
        let g = wide();
        prop_assert!(jonswap_spectrum(&s, &g, &cfg).iter().all(|v| *v >= 0.0 && v.is_finite()));
        prop_assert!(kaimal_spectrum(&s, &g, &cfg).iter().all(|v| *v >= 0.0 && v.is_finite()));
    }

    #[test]
    fn jonswap_variance_identity(hs in 0.2f64..6.0, tp in 5.0f64..16.0) {
        let cfg = PhysicsConfig::default();
        let s = SeaState::new(hs, tp, 0.0, 1.0).unwrap();
        let m0 = wide().integrate(&jonswap_spectrum(&s, &wide(), &cfg));
        let expected = hs * hs / 16.0;
        prop_assert!((m0 - expected).abs() / expected < 0.01);
    }

    #[test]
    fn trapezoid_integrates_linear_functions_exactly(a in -5.0f64..5.0, b in -5.0f64..5.0, n in 2usize..50) {
        let g = FrequencyGrid::uniform(0.5, 2.5, n).unwrap();
        let v: Vec<f64> = g.omegas().iter().map(|w| a + b * w).collect();
        let exact = a * 2.0 + b * (2.5f64.powi(2) - 0.25) / 2.0;
        prop_assert!((g.integrate(&v) - exact).abs() < 1e-10);
    }
}
