//! Block behaviors and the registry that maps block type names to them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::SimError;
use crate::library::Params;

/// Data carried by one token.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Opaque token used by the generic test blocks; carries a sequence number.
    Unit(u64),
    Bits(Vec<u8>),
    Samples(Vec<Complex64>),
}

impl Payload {
    pub fn len(&self) -> usize {
        match self {
            Payload::Unit(_) => 1,
            Payload::Bits(b) => b.len(),
            Payload::Samples(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Result of one firing: the tokens emitted on each output port (in port
/// order) and, optionally, a per-firing timing that replaces the instance's
/// configured latency and initiation interval.
#[derive(Debug, Clone, Default)]
pub struct Firing {
    pub outputs: Vec<Vec<Payload>>,
    pub timing: Option<Timing>,
}

impl Firing {
    pub fn emit(outputs: Vec<Vec<Payload>>) -> Self {
        Self {
            outputs,
            timing: None,
        }
    }

    pub fn with_timing(mut self, latency: u64, interval: u64) -> Self {
        self.timing = Some(Timing { latency, interval });
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timing {
    pub latency: u64,
    pub interval: u64,
}

/// Runtime state of one block instance.
pub trait Behavior: Send {
    /// Upper bound on tokens emitted on `port` by a single firing. The kernel
    /// reserves this much channel space before it lets the block fire.
    fn max_emit(&self, _port: usize) -> usize {
        1
    }

    /// Whether the block is willing to fire at all (a finite source that ran
    /// dry or a sink that reached its quota returns false).
    fn wants_to_fire(&self) -> bool {
        true
    }

    /// Consumes one token from each input port.
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortSpec {
    pub inputs: usize,
    pub outputs: usize,
}

/// A registered block type.
pub trait BlockKind: Send + Sync {
    fn name(&self) -> &str;

    /// Port arity for the given configuration.
    fn ports(&self, params: &Params) -> Result<PortSpec, SimError>;

    /// Parameter names that identify the characterized configuration. The
    /// system clock is appended by the kernel. `None` marks a testbench block
    /// (stimulus or observer) that has no power record.
    fn key_parameters(&self) -> Option<&[&str]>;

    fn instantiate(&self, params: &Params) -> Result<Box<dyn Behavior>, SimError>;
}

/// Name → block type table.
#[derive(Clone, Default)]
pub struct BlockRegistry {
    kinds: BTreeMap<String, Arc<dyn BlockKind>>,
}

impl fmt::Debug for BlockRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.kinds.keys()).finish()
    }
}

impl BlockRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Generic source/relay/sink blocks plus the LTE transmitter blocks.
    pub fn with_builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(SourceKind));
        reg.register(Arc::new(RelayKind));
        reg.register(Arc::new(SinkKind));
        crate::lte::blocks::register(&mut reg);
        reg
    }

    pub fn register(&mut self, kind: Arc<dyn BlockKind>) {
        self.kinds.insert(kind.name().to_string(), kind);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn BlockKind>> {
        self.kinds.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.kinds.keys().map(String::as_str)
    }
}

pub(crate) fn int_param(params: &Params, name: &str) -> Result<Option<i64>, SimError> {
    match params.get(name) {
        None => Ok(None),
        Some(v) => v.as_int().map(Some).ok_or_else(|| SimError::BadParameter {
            name: name.to_string(),
            reason: format!("expected an integer, got `{v}`"),
        }),
    }
}

pub(crate) fn usize_param(params: &Params, name: &str, default: usize) -> Result<usize, SimError> {
    match int_param(params, name)? {
        None => Ok(default),
        Some(v) if v >= 0 => Ok(v as usize),
        Some(v) => Err(SimError::BadParameter {
            name: name.to_string(),
            reason: format!("must be non-negative, got {v}"),
        }),
    }
}

/// Emits `Unit` tokens, optionally a finite number of them.
///
/// Parameters: `outputs` (default 1), `tokens` (omit for unbounded).
struct SourceKind;

struct Source {
    outputs: usize,
    remaining: Option<u64>,
    next_seq: u64,
}

impl BlockKind for SourceKind {
    fn name(&self) -> &str {
        "source"
    }

    fn ports(&self, params: &Params) -> Result<PortSpec, SimError> {
        Ok(PortSpec {
            inputs: 0,
            outputs: usize_param(params, "outputs", 1)?.max(1),
        })
    }

    fn key_parameters(&self) -> Option<&[&str]> {
        None
    }

    fn instantiate(&self, params: &Params) -> Result<Box<dyn Behavior>, SimError> {
        Ok(Box::new(Source {
            outputs: usize_param(params, "outputs", 1)?.max(1),
            remaining: int_param(params, "tokens")?.map(|n| n.max(0) as u64),
            next_seq: 0,
        }))
    }
}

impl Behavior for Source {
    fn wants_to_fire(&self) -> bool {
        self.remaining != Some(0)
    }

    fn fire(&mut self, _inputs: Vec<Payload>) -> Result<Firing, SimError> {
        if let Some(r) = self.remaining.as_mut() {
            *r -= 1;
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        Ok(Firing::emit(vec![vec![Payload::Unit(seq)]; self.outputs]))
    }
}

/// Consumes one token per input and emits one token per output.
///
/// Parameters: `inputs` and `outputs` (both default 1). A characterized block:
/// its key is made of `variant` when present.
struct RelayKind;

struct Relay {
    outputs: usize,
}

impl BlockKind for RelayKind {
    fn name(&self) -> &str {
        "relay"
    }

    fn ports(&self, params: &Params) -> Result<PortSpec, SimError> {
        let inputs = usize_param(params, "inputs", 1)?;
        let outputs = usize_param(params, "outputs", 1)?;
        if inputs == 0 || outputs == 0 {
            return Err(SimError::BadParameter {
                name: "inputs/outputs".into(),
                reason: "a relay needs at least one input and one output".into(),
            });
        }
        Ok(PortSpec { inputs, outputs })
    }

    fn key_parameters(&self) -> Option<&[&str]> {
        Some(&["variant"])
    }

    fn instantiate(&self, params: &Params) -> Result<Box<dyn Behavior>, SimError> {
        let ports = self.ports(params)?;
        Ok(Box::new(Relay {
            outputs: ports.outputs,
        }))
    }
}

impl Behavior for Relay {
    fn fire(&mut self, inputs: Vec<Payload>) -> Result<Firing, SimError> {
        let seq = inputs
            .iter()
            .map(|p| match p {
                Payload::Unit(s) => *s,
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        Ok(Firing::emit(vec![vec![Payload::Unit(seq)]; self.outputs]))
    }
}

/// Absorbs tokens and records them as simulation output.
///
/// Parameters: `inputs` (default 1).
struct SinkKind;

struct Sink;

impl BlockKind for SinkKind {
    fn name(&self) -> &str {
        "sink"
    }

    fn ports(&self, params: &Params) -> Result<PortSpec, SimError> {
        Ok(PortSpec {
            inputs: usize_param(params, "inputs", 1)?.max(1),
            outputs: 0,
        })
    }

    fn key_parameters(&self) -> Option<&[&str]> {
        None
    }

    fn instantiate(&self, _params: &Params) -> Result<Box<dyn Behavior>, SimError> {
        Ok(Box::new(Sink))
    }
}

impl Behavior for Sink {
    fn fire(&mut self, _inputs: Vec<Payload>) -> Result<Firing, SimError> {
        Ok(Firing::default())
    }
}
