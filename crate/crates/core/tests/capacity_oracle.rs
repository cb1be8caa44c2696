use actisim_core::ee::{average_capacity, dbm_to_w, ee_sweep, sample_channel, CircuitMode, EeApplication, EeConfig, EeParams};
use actisim_core::testing::gamma_log2_expectation;

#[test]
fn monte_carlo_matches_quadrature() {
    for nt in [1usize, 2] {
        let samples = sample_channel(nt, 1_000_000, 42);
        let params = EeParams::normalized(1.0, nt);
        for snr_db in [-10.0f64, 0.0, 10.0, 20.0, 30.0] {
            let snr = 10f64.powf(snr_db / 10.0);
            let mc = average_capacity(&params, snr, &samples).unwrap();
            let exact = gamma_log2_expectation(nt as u32, snr / nt as f64);
            let rel = (mc - exact).abs() / exact;
            assert!(rel < 0.01, "nt {nt}, {snr_db} dB: {mc} vs {exact}");
        }
    }
}

#[test]
fn circuit_power_lowers_efficiency_and_fades_at_high_power() {
    let apps: Vec<EeApplication> = [(3.0, 122.72), (5.0, 163.30), (10.0, 196.22), (20.0, 222.11)]
        .iter()
        .enumerate()
        .map(|(i, &(mhz, mw))| EeApplication {
            id: format!("app{}", i + 1),
            w_hz: mhz * 1e6,
            p_circuit_mw: mw,
        })
        .collect();
    let pt: Vec<f64> = (0..=10).map(|i| i as f64 * 5.0).collect();
    let config = EeConfig {
        n_samples: 20_000,
        ..EeConfig::default()
    };
    let curves = ee_sweep(&apps, &pt, &config, 5).unwrap();
    for pair in curves.chunks(2) {
        assert_eq!(pair[0].mode, CircuitMode::WithoutCircuit);
        assert_eq!(pair[1].mode, CircuitMode::WithCircuit);
        for (a, b) in pair[0].points.iter().zip(&pair[1].points) {
            assert!(b.ee_bit_per_joule < a.ee_bit_per_joule);
        }
        let last = pt.len() - 1;
        let ratio = pair[1].points[last].ee_bit_per_joule / pair[0].points[last].ee_bit_per_joule;
        assert!(ratio > 0.99, "{ratio}");
        let first_ratio = pair[1].points[0].ee_bit_per_joule / pair[0].points[0].ee_bit_per_joule;
        assert!(first_ratio < ratio);
    }
    let at_top = |app: &str| {
        curves
            .iter()
            .find(|c| c.application == app && c.mode == CircuitMode::WithCircuit)
            .unwrap()
            .at(50.0)
            .unwrap()
            .ee_bit_per_joule
    };
    for app in ["app1", "app2", "app3"] {
        assert!(at_top("app4") > at_top(app));
    }
    assert!((dbm_to_w(50.0) - 100.0).abs() < 1e-12);
}
