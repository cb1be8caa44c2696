//! Discrete-event dataflow simulation and activity tracing.

pub mod block;
mod kernel;
mod model;
mod trace;

use thiserror::Error;

use crate::library::IpConfigKey;

pub use block::{BlockKind, BlockRegistry, Behavior, Firing, Payload, PortSpec, Timing};
pub use kernel::{simulate, ChannelCount, SimulationResult, StopCondition};
pub use model::{
    build_system, instance_key, Channel, ChannelDesc, Endpoint, InstanceDesc, IpInstance,
    SystemModel, Topology, DEFAULT_CAPACITY,
};
pub use trace::{activity_coefficients, ActivityTrace, Interval};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown block type `{0}`")]
    UnknownBlock(String),
    #[error("channel endpoint {0} does not name a declared instance port")]
    DanglingEndpoint(String),
    #[error("instance `{instance}`: no power record for {key}")]
    UnresolvedKey { instance: String, key: IpConfigKey },
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("parameter `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("deadlock at cycle {cycle}; blocked: {}", blocked.join(", "))]
    Deadlock { cycle: u64, blocked: Vec<String> },
    #[error("instance `{instance}` broke its block contract: {reason}")]
    BlockContract { instance: String, reason: String },
    #[error("instance `{instance}`: {reason}")]
    Block { instance: String, reason: String },
    #[error("activity coefficients are undefined for a zero-length simulation")]
    ZeroDuration,
    #[error("invalid activity trace: {0}")]
    InvalidTrace(String),
    #[error("i/o error: {0}")]
    Io(String),
}
