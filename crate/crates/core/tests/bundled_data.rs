use std::path::PathBuf;

use actisim_core::estimator::{cumulative_power, estimate_from_trace, power_breakdown, relative_error};
use actisim_core::library::{load_library, IpConfigKey, PowerLibrary};
use actisim_core::scenario::{enumerate_applications, parse_scenario, ScenarioError};
use actisim_core::sim::{simulate, BlockRegistry, SimError};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn scenario_resolves_and_totals_grow_with_fft_size() {
    let spec = parse_scenario(data("lte_scenario.json")).unwrap();
    let lib = load_library(data("lte_synthetic_library.json")).unwrap();
    let registry = BlockRegistry::with_builtin();
    let apps = enumerate_applications(&spec).unwrap();
    assert_eq!(apps.len(), 4);

    let mut last = 0.0;
    for app in &apps {
        let resolved = app.resolve(&registry, &lib).unwrap();
        assert_eq!(resolved.records.len(), 9, "{}", app.id);
        let run = simulate(&resolved.system, resolved.stop).unwrap();
        let weighted = estimate_from_trace(&run.trace, &resolved.records).unwrap();
        let cumulative = cumulative_power(&resolved.records).unwrap();
        assert!(weighted.total_mw < cumulative.total_mw);
        assert!(weighted.total_mw > last, "{}", app.id);
        last = weighted.total_mw;

        let gap = relative_error(cumulative.total_mw, weighted.total_mw).unwrap();
        assert!(gap > 5.0, "{}: {gap}", app.id);

        let breakdown = power_breakdown(&weighted).unwrap();
        assert_eq!(breakdown.dominant().unwrap().block_type, "ifft", "{}", app.id);
        let shares: f64 = breakdown.groups.iter().map(|g| g.share).sum();
        assert!((shares - 1.0).abs() < 1e-12);
    }
}

#[test]
fn missing_record_fails_only_its_application() {
    let spec = parse_scenario(data("lte_scenario.json")).unwrap();
    let full = load_library(data("lte_synthetic_library.json")).unwrap();
    let dropped = |k: &IpConfigKey| k.ip_name == "ifft" && k.parameters.get("fft_size").and_then(|v| v.as_int()) == Some(2048);
    let records: Vec<_> = full.records().filter(|r| !dropped(&r.key)).cloned().collect();
    let lib = PowerLibrary::from_records(records).unwrap();
    let registry = BlockRegistry::with_builtin();

    let outcomes: Vec<_> = enumerate_applications(&spec)
        .unwrap()
        .iter()
        .map(|a| a.resolve(&registry, &lib))
        .collect();
    assert!(outcomes[..3].iter().all(Result::is_ok));
    match &outcomes[3] {
        Err(ScenarioError::Resolution {
            application,
            source: SimError::UnresolvedKey { instance, key },
        }) => {
            assert_eq!(application, "app4");
            assert!(instance.starts_with("ifft_"));
            assert!(key.to_string().contains("fft_size=2048"), "{key}");
        }
        other => panic!("unexpected outcome: {:?}", other.as_ref().err()),
    }
}
