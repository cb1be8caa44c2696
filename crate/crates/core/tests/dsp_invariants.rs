use actisim_core::lte::{
    alamouti_stream, derive_ofdm_params, map_qam, quantize, subcarrier_bin, IfftScaling, Modulation,
    OfdmModulator, Quantizer,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

fn random_column(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(Complex64::norm_sqr).sum()
}

#[test]
fn ifft_round_trip_and_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for bw in [1.4, 3.0, 5.0, 10.0, 15.0, 20.0] {
        let params = derive_ofdm_params(bw).unwrap();
        let n = params.fft_size;
        let mut modulator = OfdmModulator::new(params, IfftScaling::Unitary);
        let fft = FftPlanner::new().plan_fft_forward(n);
        for _ in 0..100 {
            let column = random_column(&mut rng, params.used_subcarriers);
            let body = modulator.body(&column).unwrap();
            let e_in = energy(&column);
            assert!((energy(&body) - e_in).abs() <= 1e-9 * e_in, "N = {n}");

            let mut spectrum = body.clone();
            fft.process(&mut spectrum);
            let scale = 1.0 / (n as f64).sqrt();
            let back: Vec<Complex64> = (0..column.len())
                .map(|k| spectrum[subcarrier_bin(k, column.len(), n)] * scale)
                .collect();
            let err: f64 = back.iter().zip(&column).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(err.sqrt() <= 1e-9 * e_in.sqrt(), "N = {n}");
            assert!(spectrum[0].norm() <= 1e-9 * e_in.sqrt(), "DC must stay empty");
        }
    }
}

#[test]
fn alamouti_columns_are_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bits: Vec<u8> = (0..4000).map(|_| rng.random_range(0..2)).collect();
    for modulation in [Modulation::Qpsk, Modulation::Qam16] {
        let symbols = map_qam(&bits, modulation).unwrap();
        let (a1, a2) = alamouti_stream(&symbols).unwrap();
        for k in (0..symbols.len()).step_by(2) {
            let (s1, s2) = (symbols[k], symbols[k + 1]);
            // Rows are antennas, columns symbol periods.
            let c = [[a1[k], a1[k + 1]], [a2[k], a2[k + 1]]];
            let power = s1.norm_sqr() + s2.norm_sqr();
            for i in 0..2 {
                for j in 0..2 {
                    let g: Complex64 = (0..2).map(|t| c[i][t] * c[j][t].conj()).sum();
                    let want = if i == j { power } else { 0.0 };
                    assert!((g - want).norm() <= 1e-12, "{i},{j}: {g}");
                }
            }
        }
    }
}

#[test]
fn quantization_error_within_half_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in 8..=16 {
        let qz = Quantizer::new(q).unwrap();
        let lim = qz.max_value();
        let x: Vec<Complex64> = (0..5000)
            .map(|_| Complex64::new(rng.random_range(-lim..lim), rng.random_range(-lim..lim)))
            .collect();
        let (y, stats) = quantize(&x, q).unwrap();
        assert_eq!(stats.saturated, 0);
        let half = qz.step() / 2.0;
        for (a, b) in x.iter().zip(&y) {
            assert!((a.re - b.re).abs() <= half + 1e-15 && (a.im - b.im).abs() <= half + 1e-15);
        }
    }
}

#[test]
fn quantization_saturates_out_of_range_values() {
    let (y, stats) = quantize(&[Complex64::new(3.0, -3.0)], 8).unwrap();
    let max = Quantizer::new(8).unwrap().max_value();
    assert_eq!(y[0], Complex64::new(max, -max));
    assert_eq!(stats.saturated, 2);
}
