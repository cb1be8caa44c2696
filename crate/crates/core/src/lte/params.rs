use serde::{Deserialize, Serialize};

use super::DspError;

pub const SUBCARRIER_SPACING_HZ: u64 = 15_000;

/// `(bandwidth_mhz, fft_size, used_subcarriers, resource_blocks)` for each
/// LTE downlink channel bandwidth.
pub const BANDWIDTH_TABLE: [(f64, usize, usize, usize); 6] = [
    (1.4, 128, 72, 6),
    (3.0, 256, 180, 12),
    (5.0, 512, 300, 25),
    (10.0, 1024, 600, 50),
    (15.0, 1536, 900, 75),
    (20.0, 2048, 1200, 100),
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpMode {
    #[default]
    Normal,
    Extended,
}

impl CpMode {
    pub fn symbols_per_slot(self) -> usize {
        match self {
            CpMode::Normal => 7,
            CpMode::Extended => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CpMode::Normal => "normal",
            CpMode::Extended => "extended",
        }
    }

    pub fn parse(text: &str) -> Result<CpMode, DspError> {
        match text.to_ascii_lowercase().as_str() {
            "normal" => Ok(CpMode::Normal),
            "extended" => Ok(CpMode::Extended),
            other => Err(DspError::Unsupported(format!("cyclic prefix mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfdmParams {
    pub bandwidth_mhz: f64,
    pub fft_size: usize,
    pub used_subcarriers: usize,
    pub resource_blocks: usize,
    pub subcarrier_spacing_khz: u32,
    pub cp_mode: CpMode,
    pub sampling_rate_hz: u64,
}

impl OfdmParams {
    fn from_row(row: (f64, usize, usize, usize), cp_mode: CpMode) -> Self {
        let (bandwidth_mhz, fft_size, used_subcarriers, resource_blocks) = row;
        Self {
            bandwidth_mhz,
            fft_size,
            used_subcarriers,
            resource_blocks,
            subcarrier_spacing_khz: (SUBCARRIER_SPACING_HZ / 1000) as u32,
            cp_mode,
            sampling_rate_hz: fft_size as u64 * SUBCARRIER_SPACING_HZ,
        }
    }

    pub fn with_cp_mode(mut self, cp_mode: CpMode) -> Self {
        self.cp_mode = cp_mode;
        self
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_mhz * 1e6
    }

    /// Cyclic prefix length in samples of symbol `l` within its slot.
    pub fn cp_len(&self, symbol_in_slot: usize) -> usize {
        let n = self.fft_size;
        match self.cp_mode {
            CpMode::Normal if symbol_in_slot.is_multiple_of(7) => 160 * n / 2048,
            CpMode::Normal => 144 * n / 2048,
            CpMode::Extended => 512 * n / 2048,
        }
    }

    pub fn symbols_per_slot(&self) -> usize {
        self.cp_mode.symbols_per_slot()
    }

    /// Samples in one 0.5 ms slot.
    pub fn samples_per_slot(&self) -> usize {
        (0..self.symbols_per_slot())
            .map(|l| self.fft_size + self.cp_len(l))
            .sum()
    }

    /// Useful symbol duration without the prefix.
    pub fn symbol_duration_s(&self) -> f64 {
        self.fft_size as f64 / self.sampling_rate_hz as f64
    }

    pub fn cp_duration_s(&self, symbol_in_slot: usize) -> f64 {
        self.cp_len(symbol_in_slot) as f64 / self.sampling_rate_hz as f64
    }
}

/// Table lookup by channel bandwidth (normal cyclic prefix).
pub fn derive_ofdm_params(bandwidth_mhz: f64) -> Result<OfdmParams, DspError> {
    BANDWIDTH_TABLE
        .iter()
        .find(|row| (row.0 - bandwidth_mhz).abs() < 1e-9)
        .map(|&row| OfdmParams::from_row(row, CpMode::Normal))
        .ok_or(DspError::UnsupportedBandwidth(bandwidth_mhz))
}

/// Inverse table lookup by (I)FFT size (normal cyclic prefix).
pub fn ofdm_params_for_fft(fft_size: usize) -> Result<OfdmParams, DspError> {
    BANDWIDTH_TABLE
        .iter()
        .find(|row| row.1 == fft_size)
        .map(|&row| OfdmParams::from_row(row, CpMode::Normal))
        .ok_or(DspError::UnsupportedFftSize(fft_size))
}
