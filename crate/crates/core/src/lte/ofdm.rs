//! OFDM symbol generation: DC-centered subcarrier mapping, inverse FFT and
//! cyclic prefix insertion.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::params::OfdmParams;
use super::DspError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfftScaling {
    /// `1/√N`, energy preserving.
    Unitary,
    /// `1/N`, used by the fixed-point path so outputs stay in range.
    OneOverN,
}

impl IfftScaling {
    fn factor(self, n: usize) -> f64 {
        match self {
            IfftScaling::Unitary => 1.0 / (n as f64).sqrt(),
            IfftScaling::OneOverN => 1.0 / n as f64,
        }
    }
}

/// FFT bin of grid row `k`: the lower half of the used band sits on negative
/// frequencies, the upper half on positive ones, and DC stays empty.
pub fn subcarrier_bin(k: usize, used: usize, fft_size: usize) -> usize {
    let half = used / 2;
    if k < half {
        fft_size - half + k
    } else {
        k - half + 1
    }
}

pub struct OfdmModulator {
    params: OfdmParams,
    scaling: IfftScaling,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl OfdmModulator {
    pub fn new(params: OfdmParams, scaling: IfftScaling) -> Self {
        let ifft = FftPlanner::new().plan_fft_inverse(params.fft_size);
        let scratch = vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()];
        Self {
            params,
            scaling,
            ifft,
            scratch,
        }
    }

    pub fn params(&self) -> &OfdmParams {
        &self.params
    }

    /// Frequency-domain vector of length N for one grid column.
    pub fn map_subcarriers(&self, column: &[Complex64]) -> Result<Vec<Complex64>, DspError> {
        let (n, used) = (self.params.fft_size, self.params.used_subcarriers);
        if column.len() != used {
            return Err(DspError::WrongColumnLength {
                expected: used,
                got: column.len(),
            });
        }
        let mut bins = vec![Complex64::new(0.0, 0.0); n];
        for (k, &x) in column.iter().enumerate() {
            bins[subcarrier_bin(k, used, n)] = x;
        }
        Ok(bins)
    }

    /// Time-domain symbol body without prefix.
    pub fn body(&mut self, column: &[Complex64]) -> Result<Vec<Complex64>, DspError> {
        let mut buf = self.map_subcarriers(column)?;
        self.ifft.process_with_scratch(&mut buf, &mut self.scratch);
        let scale = self.scaling.factor(self.params.fft_size);
        for x in &mut buf {
            *x *= scale;
        }
        Ok(buf)
    }

    pub fn modulate(
        &mut self,
        column: &[Complex64],
        symbol_in_slot: usize,
    ) -> Result<Vec<Complex64>, DspError> {
        let body = self.body(column)?;
        Ok(add_cyclic_prefix(&body, self.params.cp_len(symbol_in_slot)))
    }
}

pub fn add_cyclic_prefix(body: &[Complex64], cp_len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(body.len() + cp_len);
    out.extend_from_slice(&body[body.len() - cp_len..]);
    out.extend_from_slice(body);
    out
}

/// Modulates one grid column with unitary scaling.
pub fn ofdm_modulate(
    column: &[Complex64],
    params: &OfdmParams,
    symbol_index_in_slot: usize,
) -> Result<Vec<Complex64>, DspError> {
    OfdmModulator::new(*params, IfftScaling::Unitary).modulate(column, symbol_index_in_slot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lte::params::{derive_ofdm_params, CpMode};
    use std::f64::consts::PI;

    fn column(used: usize, seed: u64) -> Vec<Complex64> {
        let mut prbs = crate::lte::coding::Prbs23::new(seed as u32 + 1);
        let bits = prbs.take_bits(2 * used);
        crate::lte::qam::map_qam(&bits, crate::lte::qam::Modulation::Qpsk).unwrap()
    }

    #[test]
    fn first_symbol_length_2048() {
        let p = derive_ofdm_params(20.0).unwrap();
        let out = ofdm_modulate(&column(1200, 1), &p, 0).unwrap();
        assert_eq!(out.len(), 2208);
        let out = ofdm_modulate(&column(1200, 1), &p, 3).unwrap();
        assert_eq!(out.len(), 2048 + 144);
        let e = p.with_cp_mode(CpMode::Extended);
        assert_eq!(ofdm_modulate(&column(1200, 1), &e, 0).unwrap().len(), 2048 + 512);
    }

    #[test]
    fn zero_column() {
        let p = derive_ofdm_params(5.0).unwrap();
        let out = ofdm_modulate(&vec![Complex64::new(0.0, 0.0); 300], &p, 1).unwrap();
        assert_eq!(out.len(), 512 + 36);
        assert!(out.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn prefix_is_copy_of_tail() {
        let p = derive_ofdm_params(10.0).unwrap();
        let out = ofdm_modulate(&column(600, 2), &p, 0).unwrap();
        let cp = p.cp_len(0);
        assert_eq!(&out[..cp], &out[out.len() - cp..]);
    }

    #[test]
    fn wrong_length() {
        let p = derive_ofdm_params(10.0).unwrap();
        assert!(matches!(
            ofdm_modulate(&column(300, 2), &p, 0),
            Err(DspError::WrongColumnLength { expected: 600, got: 300 })
        ));
    }

    #[test]
    fn bins_are_distinct_and_skip_dc() {
        for (used, n) in [(72, 128), (1200, 2048), (900, 1536)] {
            let mut bins: Vec<usize> = (0..used).map(|k| subcarrier_bin(k, used, n)).collect();
            assert!(!bins.contains(&0));
            bins.sort_unstable();
            bins.dedup();
            assert_eq!(bins.len(), used);
        }
    }

    #[test]
    fn matches_direct_dft() {
        // Direct evaluation of the inverse DFT sum as an independent check of
        // the FFT-based body.
        let p = derive_ofdm_params(1.4).unwrap();
        let col = column(72, 9);
        let mut m = OfdmModulator::new(p, IfftScaling::Unitary);
        let body = m.body(&col).unwrap();
        let bins = m.map_subcarriers(&col).unwrap();
        let n = p.fft_size;
        for (t, &x) in body.iter().enumerate() {
            let direct: Complex64 = bins
                .iter()
                .enumerate()
                .map(|(k, &b)| b * Complex64::from_polar(1.0, 2.0 * PI * (k * t) as f64 / n as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt();
            assert!((direct - x).norm() < 1e-12);
        }
    }
}
