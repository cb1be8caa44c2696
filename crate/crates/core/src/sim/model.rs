use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::block::{BlockKind, BlockRegistry, PortSpec};
use super::SimError;
use crate::library::{IpConfigKey, ParamValue, Params, PowerLibrary};

pub const DEFAULT_CAPACITY: usize = 16;

/// One instance entry of a topology description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDesc {
    pub instance_id: String,
    pub block_type: String,
    #[serde(default)]
    pub parameters: Params,
    pub latency_cycles: u64,
    pub initiation_interval_cycles: u64,
}

/// `(instance_id, port)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoint(pub String, pub usize);

impl Endpoint {
    pub fn new(instance: impl Into<String>, port: usize) -> Self {
        Self(instance.into(), port)
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.0, self.1)
    }
}

fn default_capacity() -> usize {
    DEFAULT_CAPACITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDesc {
    pub src: Endpoint,
    pub dst: Endpoint,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
}

/// Topology description: the JSON system file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub clock_mhz: f64,
    pub instances: Vec<InstanceDesc>,
    pub channels: Vec<ChannelDesc>,
}

impl Topology {
    pub fn from_json_str(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::Topology(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| SimError::Topology(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("topology serializes") + "\n"
    }
}

/// A validated block instance.
#[derive(Clone)]
pub struct IpInstance {
    pub instance_id: String,
    pub block_type: String,
    pub parameters: Params,
    pub kind: Arc<dyn BlockKind>,
    pub ports: PortSpec,
    /// `None` for testbench blocks, which carry no power record.
    pub config_key: Option<IpConfigKey>,
    pub latency_cycles: u64,
    pub initiation_interval_cycles: u64,
}

impl fmt::Debug for IpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IpInstance")
            .field("instance_id", &self.instance_id)
            .field("block_type", &self.block_type)
            .field("config_key", &self.config_key)
            .field("latency_cycles", &self.latency_cycles)
            .field("initiation_interval_cycles", &self.initiation_interval_cycles)
            .finish()
    }
}

/// A validated channel, endpoints resolved to instance indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub src: (usize, usize),
    pub dst: (usize, usize),
    pub capacity: usize,
}

/// Validated dataflow graph in a single clock domain. Read-only once built;
/// each simulation instantiates fresh block state.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub instances: Vec<IpInstance>,
    pub channels: Vec<Channel>,
    pub clock_mhz: f64,
    /// Per instance: channel index feeding each input port.
    pub(crate) inputs: Vec<Vec<usize>>,
    /// Per instance: channel index fed by each output port.
    pub(crate) outputs: Vec<Vec<usize>>,
}

impl SystemModel {
    pub fn index_of(&self, instance_id: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.instance_id == instance_id)
    }

    /// Instances that carry a power record, in declaration order.
    pub fn powered(&self) -> impl Iterator<Item = &IpInstance> {
        self.instances.iter().filter(|i| i.config_key.is_some())
    }

    pub fn is_sink(&self, index: usize) -> bool {
        self.instances[index].ports.outputs == 0
    }

    pub fn is_source(&self, index: usize) -> bool {
        self.instances[index].ports.inputs == 0
    }
}

/// Config key of a characterized instance: its key parameters, any names
/// listed in its `key_extra` parameter, and the clock.
pub fn instance_key(kind: &dyn BlockKind, params: &Params, clock_mhz: f64) -> Option<IpConfigKey> {
    kind.key_parameters().map(|names| {
        let mut p = params.select(names);
        if let Some(extra) = params.get(crate::lte::chain::KEY_EXTRA).and_then(|v| v.as_str()) {
            for name in extra.split(',').map(str::trim).filter(|n| !n.is_empty()) {
                if let Some(v) = params.get(name) {
                    p.set(name, v.clone());
                }
            }
        }
        p.set("clock_mhz", ParamValue::from_real(clock_mhz));
        IpConfigKey::new(kind.name(), p)
    })
}

/// Validates a topology against the registry and, when given, the library.
pub fn build_system(
    topology: &Topology,
    registry: &BlockRegistry,
    library: Option<&PowerLibrary>,
) -> Result<SystemModel, SimError> {
    if !(topology.clock_mhz.is_finite() && topology.clock_mhz > 0.0) {
        return Err(SimError::Topology(format!(
            "clock_mhz must be positive, got {}",
            topology.clock_mhz
        )));
    }

    let mut index = HashMap::new();
    let mut instances = Vec::with_capacity(topology.instances.len());
    for desc in &topology.instances {
        if index.insert(desc.instance_id.clone(), instances.len()).is_some() {
            return Err(SimError::Topology(format!(
                "instance `{}` declared twice",
                desc.instance_id
            )));
        }
        let kind = registry
            .get(&desc.block_type)
            .ok_or_else(|| SimError::UnknownBlock(desc.block_type.clone()))?;
        let ports = kind.ports(&desc.parameters)?;
        if desc.initiation_interval_cycles == 0 {
            return Err(SimError::Topology(format!(
                "instance `{}`: initiation interval must be at least 1 cycle",
                desc.instance_id
            )));
        }
        let config_key = instance_key(kind.as_ref(), &desc.parameters, topology.clock_mhz);
        if let (Some(key), Some(lib)) = (&config_key, library) {
            if !lib.contains(key) {
                return Err(SimError::UnresolvedKey {
                    instance: desc.instance_id.clone(),
                    key: key.clone(),
                });
            }
        }
        // Fail early on bad parameters rather than at simulation time.
        kind.instantiate(&desc.parameters)?;
        instances.push(IpInstance {
            instance_id: desc.instance_id.clone(),
            block_type: desc.block_type.clone(),
            parameters: desc.parameters.clone(),
            kind,
            ports,
            config_key,
            latency_cycles: desc.latency_cycles,
            initiation_interval_cycles: desc.initiation_interval_cycles,
        });
    }

    let mut inputs: Vec<Vec<Option<usize>>> =
        instances.iter().map(|i| vec![None; i.ports.inputs]).collect();
    let mut outputs: Vec<Vec<Option<usize>>> =
        instances.iter().map(|i| vec![None; i.ports.outputs]).collect();
    let mut channels = Vec::with_capacity(topology.channels.len());
    for (c, desc) in topology.channels.iter().enumerate() {
        let resolve = |ep: &Endpoint| {
            index
                .get(&ep.0)
                .copied()
                .ok_or_else(|| SimError::DanglingEndpoint(ep.to_string()))
        };
        let src = resolve(&desc.src)?;
        let dst = resolve(&desc.dst)?;
        let out_slot = outputs[src]
            .get_mut(desc.src.1)
            .ok_or_else(|| SimError::DanglingEndpoint(format!("{} (no such output port)", desc.src)))?;
        if out_slot.replace(c).is_some() {
            return Err(SimError::Topology(format!("output {} connected twice", desc.src)));
        }
        let in_slot = inputs[dst]
            .get_mut(desc.dst.1)
            .ok_or_else(|| SimError::DanglingEndpoint(format!("{} (no such input port)", desc.dst)))?;
        if in_slot.replace(c).is_some() {
            return Err(SimError::Topology(format!("input {} connected twice", desc.dst)));
        }
        if desc.capacity == 0 {
            return Err(SimError::Topology(format!(
                "channel {} -> {} has zero capacity",
                desc.src, desc.dst
            )));
        }
        channels.push(Channel {
            src: (src, desc.src.1),
            dst: (dst, desc.dst.1),
            capacity: desc.capacity,
        });
    }

    let unconnected = |slots: &Vec<Vec<Option<usize>>>, dir: &str| -> Result<Vec<Vec<usize>>, SimError> {
        slots
            .iter()
            .enumerate()
            .map(|(i, ports)| {
                ports
                    .iter()
                    .enumerate()
                    .map(|(p, c)| {
                        c.ok_or_else(|| {
                            SimError::Topology(format!(
                                "{dir} port {} of `{}` is not connected",
                                p, instances[i].instance_id
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    };
    let inputs = unconnected(&inputs, "input")?;
    let outputs = unconnected(&outputs, "output")?;

    let model = SystemModel {
        instances,
        channels,
        clock_mhz: topology.clock_mhz,
        inputs,
        outputs,
    };
    check_connectivity(&model)?;
    Ok(model)
}

/// Every instance must be reachable from a source and must reach a sink.
fn check_connectivity(model: &SystemModel) -> Result<(), SimError> {
    let n = model.instances.len();
    if n == 0 {
        return Err(SimError::Topology("empty system".into()));
    }
    let reach = |starts: Vec<usize>, forward: bool| {
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = starts.into();
        for &s in &queue {
            seen[s] = true;
        }
        while let Some(i) = queue.pop_front() {
            let next: Vec<usize> = if forward {
                model.outputs[i].iter().map(|&c| model.channels[c].dst.0).collect()
            } else {
                model.inputs[i].iter().map(|&c| model.channels[c].src.0).collect()
            };
            for j in next {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    };
    let from_sources = reach((0..n).filter(|&i| model.is_source(i)).collect(), true);
    let to_sinks = reach((0..n).filter(|&i| model.is_sink(i)).collect(), false);
    for (i, inst) in model.instances.iter().enumerate() {
        if !from_sources[i] {
            return Err(SimError::Topology(format!(
                "instance `{}` is not reachable from any source",
                inst.instance_id
            )));
        }
        if !to_sinks[i] {
            return Err(SimError::Topology(format!(
                "instance `{}` does not reach any sink",
                inst.instance_id
            )));
        }
    }
    Ok(())
}
