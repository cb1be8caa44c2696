//! LTE downlink MISO 2x1 transmitter: pure DSP functions and the simulation
//! blocks built on them.

pub mod alamouti;
pub mod blocks;
pub mod chain;
pub mod coding;
pub mod dump;
pub mod fixed;
pub mod grid;
pub mod ofdm;
pub mod params;
pub mod qam;

use thiserror::Error;

pub use alamouti::{alamouti_encode, alamouti_stream, code_matrix};
pub use chain::{reference_topology, ChainConfig};
pub use coding::{encode_channel, systematic_bits, ChannelEncoder, Prbs23, QppInterleaver};
pub use fixed::{quantize, Quantizer, SaturationStats};
pub use grid::{build_resource_grid, FramePlan, GridBuild, GridStream, ResourceGrid};
pub use ofdm::{add_cyclic_prefix, ofdm_modulate, subcarrier_bin, IfftScaling, OfdmModulator};
pub use params::{derive_ofdm_params, ofdm_params_for_fft, CpMode, OfdmParams, BANDWIDTH_TABLE};
pub use qam::{map_qam, map_symbol, Modulation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("input length {len} is not a multiple of the block size {block}")]
    LengthNotMultiple { len: usize, block: usize },
    #[error("{len} bits do not split into {bits_per_symbol}-bit symbols")]
    IndivisibleBits { len: usize, bits_per_symbol: usize },
    #[error("odd symbol count {0} at Alamouti flush")]
    OddSymbolCount(usize),
    #[error("grid column has {got} entries, expected {expected}")]
    WrongColumnLength { expected: usize, got: usize },
    #[error("unsupported channel bandwidth {0} MHz")]
    UnsupportedBandwidth(f64),
    #[error("unsupported FFT size {0}")]
    UnsupportedFftSize(usize),
    #[error("quantization width {0} outside [2, 32]")]
    BadQuantization(u32),
    #[error("{0}")]
    Unsupported(String),
}
