use std::time::Instant;

use actisim_core::lte::{derive_ofdm_params, ofdm_params_for_fft, reference_topology, ChainConfig, CpMode};
use actisim_core::sim::{activity_coefficients, build_system, simulate, BlockRegistry, Payload, SimulationResult};
use num_complex::Complex64;

fn run(cfg: &ChainConfig, subframes: u64) -> SimulationResult {
    let m = build_system(&reference_topology(cfg), &BlockRegistry::with_builtin(), None).unwrap();
    simulate(&m, cfg.stop_for_subframes(subframes)).unwrap()
}

fn samples(r: &SimulationResult, sink: &str) -> Vec<Complex64> {
    r.outputs[sink]
        .iter()
        .flat_map(|p| match p {
            Payload::Samples(s) => s.clone(),
            other => panic!("unexpected payload {other:?}"),
        })
        .collect()
}

#[test]
fn five_subframes_sample_count() {
    for n in [256usize, 512, 1024, 2048] {
        let cfg = ChainConfig::new(ofdm_params_for_fft(n).unwrap(), 50.0);
        let t0 = Instant::now();
        let r = run(&cfg, 5);
        let elapsed = t0.elapsed().as_secs_f64();
        for dac in ["dac_0", "dac_1"] {
            assert_eq!(samples(&r, dac).len(), 5 * 2 * 15360 * n / 2048, "N={n} {dac}");
            let lens: Vec<usize> = r.outputs[dac].iter().map(Payload::len).collect();
            assert_eq!(lens[0], n + 160 * n / 2048);
            assert_eq!(lens[1], n + 144 * n / 2048);
            assert_eq!(lens[7], n + 160 * n / 2048);
        }
        // Paced by the converters: the run spans about 5 ms of 50 MHz cycles.
        let t_ms = r.trace.t_sim_cycles as f64 / 50e3;
        assert!((5.0..5.5).contains(&t_ms), "N={n}: {t_ms} ms");
        let alpha = activity_coefficients(&r.trace).unwrap();
        for a in alpha.values() {
            assert!((0.0..=1.0).contains(a));
        }
        assert!(alpha["ifft_0"] > alpha["grid_0"] || n < 1024, "N={n}: {alpha:?}");
        eprintln!("N={n}: t_sim {} cycles, {elapsed:.3} s", r.trace.t_sim_cycles);
    }
}

#[test]
fn extended_prefix_sample_count() {
    let p = derive_ofdm_params(5.0).unwrap().with_cp_mode(CpMode::Extended);
    let cfg = ChainConfig::new(p, 50.0);
    let r = run(&cfg, 2);
    assert_eq!(r.outputs["dac_0"].len(), 24);
    assert_eq!(samples(&r, "dac_0").len(), 2 * 2 * 15360 * 512 / 2048);
    assert!(r.outputs["dac_0"].iter().all(|p| p.len() == 512 + 128));
}

#[test]
fn every_symbol_carries_full_data_column() {
    // Pilots off: each body (prefix removed) holds one full column of
    // unit-modulus QPSK symbols, so its energy is the subcarrier count.
    let mut cfg = ChainConfig::new(ofdm_params_for_fft(128).unwrap(), 50.0);
    cfg.pilot_spacing = None;
    let r = run(&cfg, 1);
    for dac in ["dac_0", "dac_1"] {
        for (l, p) in r.outputs[dac].iter().enumerate() {
            let Payload::Samples(s) = p else { panic!() };
            let body = &s[s.len() - 128..];
            let e: f64 = body.iter().map(|x| x.norm_sqr()).sum();
            assert!((e - 72.0).abs() < 1e-9, "{dac} symbol {l}: {e}");
        }
    }
}

#[test]
fn fixed_point_chain_tracks_double_chain() {
    let mut max_c = 0.0f64;
    for n in [256usize, 2048] {
        let double = ChainConfig::new(ofdm_params_for_fft(n).unwrap(), 50.0);
        let mut fixed = double.clone();
        fixed.quantization_bits = Some(14);
        let rd = run(&double, 1);
        let rf = run(&fixed, 1);
        let lsb = 2f64.powi(-14);
        let rescale = 1.0 / (n as f64).sqrt();
        for dac in ["dac_0", "dac_1"] {
            let d = samples(&rd, dac);
            let f = samples(&rf, dac);
            assert_eq!(d.len(), f.len());
            for (x, y) in d.iter().zip(&f) {
                let e = x * rescale - y;
                max_c = max_c.max(e.re.abs().max(e.im.abs()) / lsb);
            }
        }
    }
    eprintln!("measured error constant c = {max_c:.3}");
    assert!(max_c <= 8.0, "c = {max_c}");
    assert!(max_c > 0.0);
}

#[test]
fn simulation_is_deterministic() {
    let cfg = ChainConfig::new(ofdm_params_for_fft(512).unwrap(), 50.0);
    assert!(run(&cfg, 1).same_outcome(&run(&cfg, 1)));
}
