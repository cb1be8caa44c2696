//! Simulation blocks of the downlink transmitter chain.

use std::sync::Arc;

use num_complex::Complex64;

use super::alamouti::alamouti_stream;
use super::coding::{ChannelEncoder, Prbs23};
use super::fixed::{block_floating, Quantizer, SaturationStats};
use super::grid::{FramePlan, GridStream};
use super::ofdm::{add_cyclic_prefix, IfftScaling, OfdmModulator};
use super::params::{ofdm_params_for_fft, CpMode, OfdmParams};
use super::qam::{map_qam, Modulation};
use crate::library::Params;
use crate::sim::block::{int_param, usize_param, Behavior, BlockKind, BlockRegistry, Firing, Payload, PortSpec};
use crate::sim::SimError;

pub const MAC_SOURCE: &str = "mac_source";
pub const TURBO_ENCODER: &str = "turbo_encoder";
pub const QAM_MAPPER: &str = "qam_mapper";
pub const ALAMOUTI: &str = "alamouti";
pub const GRID_MAPPER: &str = "grid_mapper";
pub const IFFT: &str = "ifft";
pub const CP_INSERTION: &str = "cp_insertion";
pub const DAC: &str = "dac";

pub fn register(reg: &mut BlockRegistry) {
    let kinds: [(&'static str, Kind); 8] = [
        (MAC_SOURCE, Kind::MacSource),
        (TURBO_ENCODER, Kind::Encoder),
        (QAM_MAPPER, Kind::Mapper),
        (ALAMOUTI, Kind::Alamouti),
        (GRID_MAPPER, Kind::Grid),
        (IFFT, Kind::Ifft),
        (CP_INSERTION, Kind::Cp),
        (DAC, Kind::Dac),
    ];
    for (name, kind) in kinds {
        reg.register(Arc::new(LteBlock { name, kind }));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    MacSource,
    Encoder,
    Mapper,
    Alamouti,
    Grid,
    Ifft,
    Cp,
    Dac,
}

struct LteBlock {
    name: &'static str,
    kind: Kind,
}

fn bad(name: &str, reason: impl Into<String>) -> SimError {
    SimError::BadParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

fn quantizer(params: &Params) -> Result<Option<Quantizer>, SimError> {
    int_param(params, "quantization_bits")?
        .map(|q| Quantizer::new(q as u32).map_err(|e| bad("quantization_bits", e.to_string())))
        .transpose()
}

fn modulation(params: &Params) -> Result<Modulation, SimError> {
    let text = params
        .get("modulation")
        .map(|v| v.to_string())
        .unwrap_or_else(|| "QPSK".into());
    Modulation::parse(&text).map_err(|e| bad("modulation", e.to_string()))
}

fn ofdm(params: &Params) -> Result<OfdmParams, SimError> {
    let n = usize_param(params, "fft_size", 0)?;
    let cp = match params.get("cp_mode") {
        Some(v) => CpMode::parse(&v.to_string()).map_err(|e| bad("cp_mode", e.to_string()))?,
        None => CpMode::Normal,
    };
    Ok(ofdm_params_for_fft(n)
        .map_err(|e| bad("fft_size", e.to_string()))?
        .with_cp_mode(cp))
}

fn frame_plan(params: &Params, q: Option<Quantizer>) -> Result<FramePlan, SimError> {
    let mut plan = FramePlan::default();
    match int_param(params, "pilot_spacing")? {
        Some(0) => plan.pilot_spacing = None,
        Some(p) if p > 0 => plan.pilot_spacing = Some(p as usize),
        Some(p) => return Err(bad("pilot_spacing", format!("must be non-negative, got {p}"))),
        None => {}
    }
    if let Some(q) = q {
        plan.pilot = q.sample(plan.pilot, &mut SaturationStats::default());
    }
    Ok(plan)
}

fn clock_hz(params: &Params) -> Result<u128, SimError> {
    let mhz = params
        .get("clock_mhz")
        .and_then(|v| v.as_real())
        .ok_or_else(|| bad("clock_mhz", "required"))?;
    if !(mhz > 0.0) {
        return Err(bad("clock_mhz", "must be positive"));
    }
    Ok((mhz * 1e6).round() as u128)
}

fn quantize_all(q: &Option<Quantizer>, x: &mut [Complex64], stats: &mut SaturationStats) {
    if let Some(q) = q {
        for s in x.iter_mut() {
            *s = q.sample(*s, stats);
        }
    }
}

impl BlockKind for LteBlock {
    fn name(&self) -> &str {
        self.name
    }

    fn ports(&self, _params: &Params) -> Result<PortSpec, SimError> {
        let (inputs, outputs) = match self.kind {
            Kind::MacSource => (0, 1),
            Kind::Alamouti => (1, 2),
            Kind::Dac => (1, 0),
            _ => (1, 1),
        };
        Ok(PortSpec { inputs, outputs })
    }

    fn key_parameters(&self) -> Option<&[&str]> {
        match self.kind {
            Kind::MacSource | Kind::Dac => None,
            Kind::Encoder => Some(&["code_block_size"]),
            Kind::Mapper => Some(&["modulation", "quantization_bits"]),
            Kind::Alamouti => Some(&["quantization_bits"]),
            Kind::Grid | Kind::Ifft => Some(&["fft_size", "quantization_bits"]),
            Kind::Cp => Some(&["fft_size", "quantization_bits", "cp_mode"]),
        }
    }

    fn instantiate(&self, params: &Params) -> Result<Box<dyn Behavior>, SimError> {
        Ok(match self.kind {
            Kind::MacSource => Box::new(MacSource {
                block: usize_param(params, "code_block_size", 1024)?,
                prbs: Prbs23::new(int_param(params, "seed")?.unwrap_or(1) as u32),
            }),
            Kind::Encoder => Box::new(EncoderBlock {
                encoder: ChannelEncoder::new(usize_param(params, "code_block_size", 1024)?)
                    .map_err(|e| bad("code_block_size", e.to_string()))?,
            }),
            Kind::Mapper => Box::new(MapperBlock {
                modulation: modulation(params)?,
                q: quantizer(params)?,
                stats: SaturationStats::default(),
            }),
            Kind::Alamouti => Box::new(AlamoutiBlock {
                q: quantizer(params)?,
                stats: SaturationStats::default(),
            }),
            Kind::Grid => {
                let q = quantizer(params)?;
                let p = ofdm(params)?;
                let plan = frame_plan(params, q)?;
                let input = usize_param(params, "input_symbols", 1536)?;
                Box::new(GridBlock {
                    max_emit: GridStream::max_columns(p.used_subcarriers, &plan, input),
                    stream: GridStream::new(&p, plan),
                })
            }
            Kind::Ifft => {
                let q = quantizer(params)?;
                let scaling = if q.is_some() {
                    IfftScaling::OneOverN
                } else {
                    IfftScaling::Unitary
                };
                Box::new(IfftBlock {
                    modulator: OfdmModulator::new(ofdm(params)?, scaling),
                    q,
                    block_floating: int_param(params, "block_floating")?.unwrap_or(0) != 0,
                    stats: SaturationStats::default(),
                })
            }
            Kind::Cp => Box::new(CpBlock {
                params: ofdm(params)?,
                symbol: 0,
            }),
            Kind::Dac => {
                let p = ofdm(params)?;
                Box::new(DacBlock {
                    clock_hz: clock_hz(params)?,
                    sample_rate_hz: p.sampling_rate_hz as u128,
                    samples: 0,
                })
            }
        })
    }
}

fn expect_bits(p: Payload) -> Result<Vec<u8>, SimError> {
    match p {
        Payload::Bits(b) => Ok(b),
        other => Err(bad("input", format!("expected bits, got {} other items", other.len()))),
    }
}

fn expect_samples(p: Payload) -> Result<Vec<Complex64>, SimError> {
    match p {
        Payload::Samples(s) => Ok(s),
        other => Err(bad("input", format!("expected samples, got {} other items", other.len()))),
    }
}

fn first(inputs: Vec<Payload>) -> Payload {
    inputs.into_iter().next().expect("one input port")
}

struct MacSource {
    block: usize,
    prbs: Prbs23,
}

impl Behavior for MacSource {
    fn fire(&mut self, _inputs: Vec<Payload>) -> Result<Firing, SimError> {
        Ok(Firing::emit(vec![vec![Payload::Bits(self.prbs.take_bits(self.block))]]))
    }
}

struct EncoderBlock {
    encoder: ChannelEncoder,
}

impl Behavior for EncoderBlock {
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let bits = expect_bits(first(inputs))?;
        let coded = self.encoder.encode(&bits).map_err(|e| bad("input", e.to_string()))?;
        Ok(Firing::emit(vec![vec![Payload::Bits(coded)]]))
    }
}

struct MapperBlock {
    modulation: Modulation,
    q: Option<Quantizer>,
    stats: SaturationStats,
}

impl Behavior for MapperBlock {
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let bits = expect_bits(first(inputs))?;
        let mut syms = map_qam(&bits, self.modulation).map_err(|e| bad("input", e.to_string()))?;
        quantize_all(&self.q, &mut syms, &mut self.stats);
        Ok(Firing::emit(vec![vec![Payload::Samples(syms)]]))
    }
}

struct AlamoutiBlock {
    q: Option<Quantizer>,
    stats: SaturationStats,
}

impl Behavior for AlamoutiBlock {
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let syms = expect_samples(first(inputs))?;
        let (mut a, mut b) = alamouti_stream(&syms).map_err(|e| bad("input", e.to_string()))?;
        quantize_all(&self.q, &mut a, &mut self.stats);
        quantize_all(&self.q, &mut b, &mut self.stats);
        Ok(Firing::emit(vec![
            vec![Payload::Samples(a)],
            vec![Payload::Samples(b)],
        ]))
    }
}

struct GridBlock {
    stream: GridStream,
    max_emit: usize,
}

impl Behavior for GridBlock {
    fn max_emit(&self, _port: usize) -> usize {
        self.max_emit
    }

    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let syms = expect_samples(first(inputs))?;
        let cols = self.stream.push(&syms);
        Ok(Firing::emit(vec![cols.into_iter().map(Payload::Samples).collect()]))
    }
}

struct IfftBlock {
    modulator: OfdmModulator,
    q: Option<Quantizer>,
    block_floating: bool,
    stats: SaturationStats,
}

impl Behavior for IfftBlock {
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let col = expect_samples(first(inputs))?;
        let mut body = self.modulator.body(&col).map_err(|e| bad("input", e.to_string()))?;
        if self.block_floating {
            block_floating(&mut body);
        }
        quantize_all(&self.q, &mut body, &mut self.stats);
        Ok(Firing::emit(vec![vec![Payload::Samples(body)]]))
    }
}

struct CpBlock {
    params: OfdmParams,
    symbol: usize,
}

impl Behavior for CpBlock {
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let body = expect_samples(first(inputs))?;
        if body.len() != self.params.fft_size {
            return Err(bad(
                "input",
                format!("symbol body of {} samples, expected {}", body.len(), self.params.fft_size),
            ));
        }
        let cp = self.params.cp_len(self.symbol % self.params.symbols_per_slot());
        self.symbol += 1;
        let out = add_cyclic_prefix(&body, cp);
        let cycles = out.len() as u64;
        Ok(Firing::emit(vec![vec![Payload::Samples(out)]]).with_timing(cycles, cycles))
    }
}

/// Converter model: plays each symbol at the sampling rate, which paces the
/// whole chain through back-pressure.
struct DacBlock {
    clock_hz: u128,
    sample_rate_hz: u128,
    samples: u128,
}

impl DacBlock {
    fn cycles_for(&self, samples: u128) -> u128 {
        (samples * self.clock_hz).div_ceil(self.sample_rate_hz)
    }
}

impl Behavior for DacBlock {
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let n = first(inputs).len() as u128;
        let start = self.cycles_for(self.samples);
        self.samples += n;
        let dur = (self.cycles_for(self.samples) - start).max(1) as u64;
        Ok(Firing::default().with_timing(dur, dur))
    }
}
