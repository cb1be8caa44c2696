//! Fixtures shared by the benchmarks: the bundled scenario and library,
//! resolved once per application.

use std::path::{Path, PathBuf};

use actisim_core::library::load_library;
use actisim_core::scenario::{enumerate_applications, parse_scenario, ResolvedApplication};
use actisim_core::sim::BlockRegistry;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

/// Every application of the bundled IFFT sweep, ready to simulate.
pub fn bundled_applications() -> Vec<ResolvedApplication> {
    let dir = data_dir();
    let spec = parse_scenario(dir.join("lte_scenario.json")).expect("bundled scenario parses");
    let library = load_library(dir.join("lte_synthetic_library.json")).expect("bundled library loads");
    let registry = BlockRegistry::with_builtin();
    enumerate_applications(&spec)
        .expect("bundled scenario enumerates")
        .iter()
        .map(|app| app.resolve(&registry, &library).expect("bundled application resolves"))
        .collect()
}
