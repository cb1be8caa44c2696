//! Topology of the reference transmitter:
//!
//! ```text
//! mac → coder → mapper → alamouti ─┬→ grid_0 → ifft_0 → cp_0 → dac_0
//!                                  └→ grid_1 → ifft_1 → cp_1 → dac_1
//! ```
//!
//! Stage timings follow a streaming hardware model: each block accepts one
//! item per cycle, so its initiation interval equals the items in a token.
//! The converters play samples at the LTE sampling rate and pace the chain.

use super::blocks::{ALAMOUTI, CP_INSERTION, DAC, GRID_MAPPER, IFFT, MAC_SOURCE, QAM_MAPPER, TURBO_ENCODER};
use super::grid::{FramePlan, GridStream};
use super::params::OfdmParams;
use super::qam::Modulation;
use crate::library::{ParamValue, Params};
use crate::sim::{ChannelDesc, Endpoint, InstanceDesc, StopCondition, Topology};

/// Parameter naming extra key parameters of an instance (comma separated).
pub const KEY_EXTRA: &str = "key_extra";

const CHAIN_CAPACITY: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub ofdm: OfdmParams,
    pub modulation: Modulation,
    pub code_block_size: usize,
    pub quantization_bits: Option<u32>,
    pub clock_mhz: f64,
    /// Data symbols between pilot symbols; `None` disables pilots.
    pub pilot_spacing: Option<usize>,
    pub seed: u32,
    /// Additional parameters appended to every characterized instance's key.
    pub extra: Params,
}

impl ChainConfig {
    pub fn new(ofdm: OfdmParams, clock_mhz: f64) -> Self {
        Self {
            ofdm,
            modulation: Modulation::Qpsk,
            code_block_size: 1024,
            quantization_bits: None,
            clock_mhz,
            pilot_spacing: FramePlan::default().pilot_spacing,
            seed: 1,
            extra: Params::new(),
        }
    }

    /// Modulated symbols per code block.
    pub fn symbols_per_block(&self) -> usize {
        3 * self.code_block_size / self.modulation.bits_per_symbol()
    }

    /// OFDM symbols per antenna in `subframes` 1 ms subframes.
    pub fn symbols_for_subframes(&self, subframes: u64) -> u64 {
        subframes * 2 * self.ofdm.symbols_per_slot() as u64
    }

    pub fn stop_for_subframes(&self, subframes: u64) -> StopCondition {
        StopCondition::Outputs(self.symbols_for_subframes(subframes))
    }

    fn plan(&self) -> FramePlan {
        FramePlan {
            pilot_spacing: self.pilot_spacing,
            ..FramePlan::default()
        }
    }

    fn base_params(&self) -> Params {
        let mut p = Params::new();
        if let Some(q) = self.quantization_bits {
            p.set("quantization_bits", q as i64);
        }
        for (k, v) in self.extra.iter() {
            p.set(k, v.clone());
        }
        if !self.extra.is_empty() {
            let names: Vec<&str> = self.extra.iter().map(|(k, _)| k).collect();
            p.set(KEY_EXTRA, names.join(","));
        }
        p
    }

    fn ofdm_params(&self) -> Params {
        self.base_params()
            .with("fft_size", self.ofdm.fft_size as i64)
            .with("cp_mode", self.ofdm.cp_mode.name())
    }
}

fn ceil_log2(n: usize) -> u64 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as u64
}

fn inst(id: &str, block: &str, parameters: Params, latency: u64, ii: u64) -> InstanceDesc {
    InstanceDesc {
        instance_id: id.into(),
        block_type: block.into(),
        parameters,
        latency_cycles: latency,
        initiation_interval_cycles: ii.max(1),
    }
}

fn link(src: &str, sp: usize, dst: &str, capacity: usize) -> ChannelDesc {
    ChannelDesc {
        src: Endpoint::new(src, sp),
        dst: Endpoint::new(dst, 0),
        capacity,
    }
}

/// Builds the reference transmitter topology for one application.
pub fn reference_topology(cfg: &ChainConfig) -> Topology {
    let k = cfg.code_block_size as u64;
    let n_sym = cfg.symbols_per_block();
    let n = cfg.ofdm.fft_size as u64;
    let ns = n_sym as u64;
    let plan = cfg.plan();
    let grid_emit = GridStream::max_columns(cfg.ofdm.used_subcarriers, &plan, n_sym);

    let mut instances = vec![
        inst(
            "mac",
            MAC_SOURCE,
            Params::new()
                .with("code_block_size", k as i64)
                .with("seed", cfg.seed as i64),
            0,
            1,
        ),
        inst(
            "coder",
            TURBO_ENCODER,
            cfg.base_params().with("code_block_size", k as i64),
            k + 4,
            k,
        ),
        inst(
            "mapper",
            QAM_MAPPER,
            cfg.base_params().with("modulation", cfg.modulation.name()),
            ns + 2,
            ns,
        ),
        inst("alamouti", ALAMOUTI, cfg.base_params(), ns + 2, ns),
    ];
    let mut channels = vec![
        link("mac", 0, "coder", CHAIN_CAPACITY),
        link("coder", 0, "mapper", CHAIN_CAPACITY),
        link("mapper", 0, "alamouti", CHAIN_CAPACITY),
    ];
    let pilot_spacing = cfg.pilot_spacing.unwrap_or(0) as i64;
    for a in 0..2 {
        let grid = format!("grid_{a}");
        let ifft = format!("ifft_{a}");
        let cp = format!("cp_{a}");
        let dac = format!("dac_{a}");
        instances.push(inst(
            &grid,
            GRID_MAPPER,
            cfg.ofdm_params()
                .with("pilot_spacing", pilot_spacing)
                .with("input_symbols", ns as i64),
            ns + 1,
            ns,
        ));
        instances.push(inst(&ifft, IFFT, cfg.ofdm_params(), n + 4 * ceil_log2(n as usize), n));
        // Timing of the prefix stage is set per symbol by the block itself.
        instances.push(inst(&cp, CP_INSERTION, cfg.ofdm_params(), n, n));
        instances.push(inst(
            &dac,
            DAC,
            Params::new()
                .with("fft_size", n as i64)
                .with("cp_mode", cfg.ofdm.cp_mode.name())
                .with("clock_mhz", ParamValue::from_real(cfg.clock_mhz)),
            0,
            1,
        ));
        channels.push(link("alamouti", a, &grid, CHAIN_CAPACITY));
        channels.push(link(&grid, 0, &ifft, grid_emit + 1));
        channels.push(link(&ifft, 0, &cp, CHAIN_CAPACITY));
        channels.push(link(&cp, 0, &dac, CHAIN_CAPACITY));
    }
    Topology {
        clock_mhz: cfg.clock_mhz,
        instances,
        channels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lte::params::derive_ofdm_params;
    use crate::sim::{build_system, BlockRegistry};

    #[test]
    fn log2_ceiling() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(128), 7);
        assert_eq!(ceil_log2(1536), 11);
        assert_eq!(ceil_log2(2048), 11);
    }

    #[test]
    fn chain_builds_with_expected_instances() {
        let cfg = ChainConfig::new(derive_ofdm_params(5.0).unwrap(), 50.0);
        let m = build_system(&reference_topology(&cfg), &BlockRegistry::with_builtin(), None).unwrap();
        let powered: Vec<&str> = m.powered().map(|i| i.instance_id.as_str()).collect();
        assert_eq!(
            powered,
            ["coder", "mapper", "alamouti", "grid_0", "ifft_0", "cp_0", "grid_1", "ifft_1", "cp_1"]
        );
        assert_eq!(cfg.symbols_for_subframes(5), 70);
    }

    #[test]
    fn extra_parameters_reach_keys() {
        let mut cfg = ChainConfig::new(derive_ofdm_params(5.0).unwrap(), 50.0);
        cfg.extra.set("speed_grade", -1);
        let m = build_system(&reference_topology(&cfg), &BlockRegistry::with_builtin(), None).unwrap();
        for i in m.powered() {
            let key = i.config_key.as_ref().unwrap();
            assert_eq!(key.parameters.get("speed_grade").and_then(|v| v.as_int()), Some(-1));
            assert!(!key.parameters.contains(KEY_EXTRA));
        }
    }
}
