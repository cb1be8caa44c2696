//! Signed fractional fixed-point quantization.
//!
//! A `q`-bit word represents values `k·2^-(q-1)` for
//! `k ∈ [-2^(q-1), 2^(q-1) - 1]`. Positive saturation is symmetric with the
//! negative side, so magnitudes never exceed `1 - 2^-(q-1)`.

use num_complex::Complex64;

use super::DspError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantizer {
    q_bits: u32,
}

/// Counts of components that hit the format bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SaturationStats {
    pub components: u64,
    pub saturated: u64,
}

impl Quantizer {
    pub fn new(q_bits: u32) -> Result<Self, DspError> {
        if !(2..=32).contains(&q_bits) {
            return Err(DspError::BadQuantization(q_bits));
        }
        Ok(Self { q_bits })
    }

    pub fn q_bits(&self) -> u32 {
        self.q_bits
    }

    pub fn step(&self) -> f64 {
        (2.0f64).powi(-(self.q_bits as i32 - 1))
    }

    pub fn max_value(&self) -> f64 {
        1.0 - self.step()
    }

    /// Integer code of one component.
    pub fn code(&self, x: f64, stats: &mut SaturationStats) -> i64 {
        let limit = (1i64 << (self.q_bits - 1)) - 1;
        let k = (x / self.step()).round();
        stats.components += 1;
        if k > limit as f64 {
            stats.saturated += 1;
            limit
        } else if k < -(limit as f64) {
            stats.saturated += 1;
            -limit
        } else {
            k as i64
        }
    }

    pub fn component(&self, x: f64, stats: &mut SaturationStats) -> f64 {
        self.code(x, stats) as f64 * self.step()
    }

    pub fn sample(&self, x: Complex64, stats: &mut SaturationStats) -> Complex64 {
        Complex64::new(self.component(x.re, stats), self.component(x.im, stats))
    }
}

/// Round-to-nearest quantization with silent saturation.
pub fn quantize(x: &[Complex64], q_bits: u32) -> Result<(Vec<Complex64>, SaturationStats), DspError> {
    let q = Quantizer::new(q_bits)?;
    let mut stats = SaturationStats::default();
    let out = x.iter().map(|&s| q.sample(s, &mut stats)).collect();
    Ok((out, stats))
}

/// Scales a block by the largest power of two that keeps every component
/// below one, returning the shift applied.
pub fn block_floating(x: &mut [Complex64]) -> i32 {
    let peak = x
        .iter()
        .map(|s| s.re.abs().max(s.im.abs()))
        .fold(0.0f64, f64::max);
    if peak == 0.0 {
        return 0;
    }
    let mut shift = 0;
    while peak * 2f64.powi(shift + 1) < 1.0 && shift < 62 {
        shift += 1;
    }
    let scale = 2f64.powi(shift);
    for s in x.iter_mut() {
        *s *= scale;
    }
    shift
}
