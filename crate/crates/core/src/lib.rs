//! Activity-aware power estimation for FPGA dataflow systems.
//!
//! A system is a graph of characterized IP blocks. Simulating it yields the
//! fraction of time each block is busy; weighting each block's active and
//! idle power by that fraction gives the system's dynamic power. The crate
//! ships an LTE downlink MISO 2x1 transmitter as its reference system, and an
//! energy-efficiency analysis on top of the power estimates.

// NaN must fail the range checks, so they are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ee;
mod error;
pub mod estimator;
pub mod library;
pub mod lte;
pub mod scenario;
pub mod sim;
#[cfg(any(test, feature = "testing"))]
pub mod testing;

pub use ee::{
    average_capacity, ee_sweep, energy_efficiency, sample_channel, CircuitMode, EeApplication,
    EeConfig, EeCurve, EeParams, EePoint, FadingSamples,
};
pub use error::{Error, Result};
pub use estimator::{
    cumulative_power, estimate_power, power_breakdown, relative_error, Breakdown, Method,
    PowerReport,
};
pub use library::{
    import_characterization_csv, load_library, save_library, IpConfigKey, IpPowerRecord,
    ParamValue, Params, PowerLibrary,
};
pub use scenario::{enumerate_applications, parse_scenario, ApplicationSpec, ScenarioSpec};
pub use sim::{
    activity_coefficients, build_system, simulate, ActivityTrace, BlockRegistry,
    SimulationResult, StopCondition, SystemModel, Topology,
};
