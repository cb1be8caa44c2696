//! Scenarios and the applications they expand to.
//!
//! A scenario fixes some parameters and lists value axes for others; every
//! combination of axis values is one application. Axes expand in declaration
//! order with the last axis varying fastest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::library::{IpPowerRecord, ParamValue, Params, PowerLibrary};
use crate::lte::{
    derive_ofdm_params, ofdm_params_for_fft, reference_topology, ChainConfig, CpMode, Modulation,
    OfdmParams,
};
use crate::sim::{build_system, BlockRegistry, SimError, StopCondition, SystemModel, Topology};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("unknown scenario parameter `{0}`")]
    UnknownParameter(String),
    #[error("variable axis `{0}` has no values")]
    EmptyAxis(String),
    #[error("parameter `{0}` is both fixed and variable")]
    FixedAndVariable(String),
    #[error("parameter `{name}`: {reason}")]
    InvalidValue { name: String, reason: String },
    #[error("application {application}: {reason}")]
    Derivation { application: String, reason: String },
    #[error("application {application}: {source}")]
    Resolution {
        application: String,
        #[source]
        source: SimError,
    },
    #[error("application {application}: record {key} is characterized for `{found}`, scenario targets `{expected}`")]
    PartMismatch {
        application: String,
        key: String,
        expected: String,
        found: String,
    },
}

/// Kind of value a known parameter accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ValueKind {
    Int,
    Real,
    Text,
}

/// Parameters understood by the reference transmitter.
const DICTIONARY: [(&str, ValueKind); 11] = [
    ("bandwidth_mhz", ValueKind::Real),
    ("clock_mhz", ValueKind::Real),
    ("code_block_size", ValueKind::Int),
    ("coding_rate", ValueKind::Text),
    ("cp_mode", ValueKind::Text),
    ("fft_size", ValueKind::Int),
    ("modulation", ValueKind::Text),
    ("pilot_spacing", ValueKind::Int),
    ("prbs_seed", ValueKind::Int),
    ("quantization_bits", ValueKind::Int),
    ("tx_antennas", ValueKind::Int),
];

fn dictionary_kind(name: &str) -> Option<ValueKind> {
    DICTIONARY.iter().find(|(n, _)| *n == name).map(|&(_, k)| k)
}

/// Name → value entries in file order, rejecting repeated names.
#[derive(Debug, Clone, PartialEq)]
pub struct Entries<T>(pub Vec<(String, T)>);

impl<T> Default for Entries<T> {
    fn default() -> Self {
        Entries(Vec::new())
    }
}

impl<T> Entries<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Serialize> Serialize for Entries<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Entries<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for EntriesVisitor<T> {
            type Value = Entries<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Entries<T>, A::Error> {
                let mut out: Vec<(String, T)> = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, T>()? {
                    if out.iter().any(|(n, _)| *n == k) {
                        return Err(de::Error::custom(format!("duplicate parameter `{k}`")));
                    }
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }

        deserializer.deserialize_map(EntriesVisitor(std::marker::PhantomData))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StopSpec {
    /// Transmit this many 1 ms subframes per antenna.
    Subframes(u64),
    Cycles(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub fixed: Entries<serde_json::Value>,
    #[serde(default)]
    pub variable: Entries<Vec<serde_json::Value>>,
    pub fpga_part: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_mhz: Option<f64>,
    pub stop: StopSpec,
    /// Extra parameter names accepted by this scenario and appended to the
    /// key of every characterized instance.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub custom_parameters: Vec<String>,
}

fn to_param(name: &str, kind: Option<ValueKind>, v: &serde_json::Value) -> Result<ParamValue, ScenarioError> {
    let invalid = |reason: String| ScenarioError::InvalidValue {
        name: name.to_string(),
        reason,
    };
    let value = match v {
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => ParamValue::Int(i),
            None => ParamValue::from_real(n.as_f64().unwrap_or(f64::NAN)),
        },
        serde_json::Value::String(s) => ParamValue::parse_text(s),
        other => return Err(invalid(format!("unsupported value {other}"))),
    };
    match kind {
        Some(ValueKind::Int) if value.as_int().is_none() => {
            Err(invalid(format!("expected an integer, got `{value}`")))
        }
        Some(ValueKind::Real) if !value.as_real().is_some_and(f64::is_finite) => {
            Err(invalid(format!("expected a number, got `{value}`")))
        }
        _ => Ok(value),
    }
}

impl ScenarioSpec {
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let spec: ScenarioSpec =
            serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    fn kind_of(&self, name: &str) -> Result<Option<ValueKind>, ScenarioError> {
        if let Some(kind) = dictionary_kind(name) {
            return Ok(Some(kind));
        }
        if self.custom_parameters.iter().any(|c| c == name) {
            return Ok(None);
        }
        Err(ScenarioError::UnknownParameter(name.to_string()))
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for c in &self.custom_parameters {
            if dictionary_kind(c).is_some() || c == crate::lte::chain::KEY_EXTRA {
                return Err(ScenarioError::InvalidValue {
                    name: c.clone(),
                    reason: "custom parameter shadows a built-in name".into(),
                });
            }
        }
        for (name, v) in &self.fixed.0 {
            to_param(name, self.kind_of(name)?, v)?;
        }
        for (name, values) in &self.variable.0 {
            let kind = self.kind_of(name)?;
            if values.is_empty() {
                return Err(ScenarioError::EmptyAxis(name.clone()));
            }
            if self.fixed.get(name).is_some() {
                return Err(ScenarioError::FixedAndVariable(name.clone()));
            }
            for v in values {
                to_param(name, kind, v)?;
            }
        }
        if let Some(c) = self.clock_mhz {
            if !(c.is_finite() && c > 0.0) {
                return Err(ScenarioError::InvalidValue {
                    name: "clock_mhz".into(),
                    reason: format!("must be positive, got {c}"),
                });
            }
        }
        Ok(())
    }

    pub fn application_count(&self) -> usize {
        self.variable.0.iter().map(|(_, v)| v.len()).product()
    }
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    ScenarioSpec::from_json_str(&text)
}

/// One full binding of a scenario's parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApplicationSpec {
    pub scenario: String,
    /// `app1`, `app2`, … in enumeration order.
    pub id: String,
    pub bindings: Vec<(String, ParamValue)>,
    /// Fixed parameters merged with the bindings.
    pub parameters: Params,
    pub custom_parameters: Vec<String>,
    pub fpga_part: String,
    /// Scenario-level clock, if the scenario sets one.
    pub scenario_clock_mhz: Option<f64>,
    pub stop: StopSpec,
}

/// Cartesian product of the variable axes.
pub fn enumerate_applications(spec: &ScenarioSpec) -> Result<Vec<ApplicationSpec>, ScenarioError> {
    spec.validate()?;
    let mut fixed = Params::new();
    for (name, v) in &spec.fixed.0 {
        fixed.set(name.clone(), to_param(name, spec.kind_of(name)?, v)?);
    }
    let mut axes = Vec::with_capacity(spec.variable.len());
    for (name, values) in &spec.variable.0 {
        let kind = spec.kind_of(name)?;
        let values = values
            .iter()
            .map(|v| to_param(name, kind, v))
            .collect::<Result<Vec<_>, _>>()?;
        axes.push((name.clone(), values));
    }

    let total = spec.application_count();
    let mut apps = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut bindings = vec![(String::new(), ParamValue::Int(0)); axes.len()];
        for (slot, (name, values)) in axes.iter().enumerate().rev() {
            bindings[slot] = (name.clone(), values[rem % values.len()].clone());
            rem /= values.len();
        }
        let mut parameters = fixed.clone();
        for (name, value) in &bindings {
            parameters.set(name.clone(), value.clone());
        }
        apps.push(ApplicationSpec {
            scenario: spec.name.clone(),
            id: format!("app{}", index + 1),
            bindings,
            parameters,
            custom_parameters: spec.custom_parameters.clone(),
            fpga_part: spec.fpga_part.clone(),
            scenario_clock_mhz: spec.clock_mhz,
            stop: spec.stop,
        });
    }
    Ok(apps)
}

/// Everything needed to simulate and estimate one application.
#[derive(Debug, Clone)]
pub struct ResolvedApplication {
    pub ofdm: OfdmParams,
    pub system: SystemModel,
    pub stop: StopCondition,
    /// Power record of every characterized instance.
    pub records: BTreeMap<String, IpPowerRecord>,
}

impl ApplicationSpec {
    /// Bindings as `name=value, …`.
    pub fn label(&self) -> String {
        self.bindings
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn fail(&self, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::Derivation {
            application: self.id.clone(),
            reason: reason.into(),
        }
    }

    fn int(&self, name: &str) -> Option<i64> {
        self.parameters.get(name).and_then(ParamValue::as_int)
    }

    fn text(&self, name: &str) -> Option<String> {
        self.parameters.get(name).map(|v| v.to_string())
    }

    /// Scenario clock when set, otherwise the parameter-level clock.
    pub fn clock_mhz(&self) -> Result<f64, ScenarioError> {
        self.scenario_clock_mhz
            .or_else(|| self.parameters.get("clock_mhz").and_then(ParamValue::as_real))
            .filter(|c| *c > 0.0)
            .ok_or_else(|| self.fail("no positive clock_mhz at scenario or parameter level"))
    }

    /// OFDM numerology from the FFT size, the bandwidth, or both when they agree.
    pub fn ofdm_params(&self) -> Result<OfdmParams, ScenarioError> {
        let fft = self.int("fft_size");
        let bw = self.parameters.get("bandwidth_mhz").and_then(ParamValue::as_real);
        let p = match (fft, bw) {
            (Some(n), None) => ofdm_params_for_fft(n.max(0) as usize).map_err(|e| self.fail(e.to_string()))?,
            (None, Some(b)) => derive_ofdm_params(b).map_err(|e| self.fail(e.to_string()))?,
            (Some(n), Some(b)) => {
                let p = derive_ofdm_params(b).map_err(|e| self.fail(e.to_string()))?;
                if p.fft_size as i64 != n {
                    return Err(self.fail(format!(
                        "fft_size {n} is inconsistent with bandwidth {b} MHz (expects {})",
                        p.fft_size
                    )));
                }
                p
            }
            (None, None) => return Err(self.fail("neither fft_size nor bandwidth_mhz is set")),
        };
        let cp = match self.text("cp_mode") {
            Some(t) => CpMode::parse(&t).map_err(|e| self.fail(e.to_string()))?,
            None => CpMode::Normal,
        };
        Ok(p.with_cp_mode(cp))
    }

    pub fn chain_config(&self) -> Result<ChainConfig, ScenarioError> {
        let mut cfg = ChainConfig::new(self.ofdm_params()?, self.clock_mhz()?);
        if let Some(rate) = self.text("coding_rate") {
            if rate.replace(' ', "") != "1/3" {
                return Err(self.fail(format!("coding rate {rate} is not supported (only 1/3)")));
            }
        }
        if let Some(nt) = self.int("tx_antennas") {
            if nt != 2 {
                return Err(self.fail(format!("{nt} transmit antennas; the chain is MISO 2x1")));
            }
        }
        if let Some(m) = self.text("modulation") {
            cfg.modulation = Modulation::parse(&m).map_err(|e| self.fail(e.to_string()))?;
        }
        if let Some(k) = self.int("code_block_size") {
            if k <= 0 || (3 * k) % cfg.modulation.bits_per_symbol() as i64 != 0 {
                return Err(self.fail(format!("code block size {k} is not usable")));
            }
            cfg.code_block_size = k as usize;
        }
        if !cfg.symbols_per_block().is_multiple_of(2) {
            return Err(self.fail("code block maps to an odd symbol count"));
        }
        if let Some(q) = self.int("quantization_bits") {
            if !(2..=32).contains(&q) {
                return Err(self.fail(format!("quantization_bits {q} outside [2, 32]")));
            }
            cfg.quantization_bits = Some(q as u32);
        }
        match self.int("pilot_spacing") {
            Some(0) => cfg.pilot_spacing = None,
            Some(p) if p > 0 => cfg.pilot_spacing = Some(p as usize),
            Some(p) => return Err(self.fail(format!("pilot_spacing {p} is negative"))),
            None => {}
        }
        if let Some(seed) = self.int("prbs_seed") {
            cfg.seed = seed as u32;
        }
        for name in &self.custom_parameters {
            if let Some(v) = self.parameters.get(name) {
                cfg.extra.set(name.clone(), v.clone());
            }
        }
        Ok(cfg)
    }

    pub fn stop_condition(&self, cfg: &ChainConfig) -> StopCondition {
        match self.stop {
            StopSpec::Subframes(n) => cfg.stop_for_subframes(n),
            StopSpec::Cycles(n) => StopCondition::Cycles(n),
        }
    }

    pub fn topology(&self) -> Result<Topology, ScenarioError> {
        Ok(reference_topology(&self.chain_config()?))
    }

    /// Builds the system and binds every characterized instance to its record.
    pub fn resolve(
        &self,
        registry: &BlockRegistry,
        library: &PowerLibrary,
    ) -> Result<ResolvedApplication, ScenarioError> {
        let cfg = self.chain_config()?;
        let system = build_system(&reference_topology(&cfg), registry, Some(library)).map_err(|source| {
            ScenarioError::Resolution {
                application: self.id.clone(),
                source,
            }
        })?;
        let mut records = BTreeMap::new();
        for inst in system.powered() {
            let key = inst.config_key.as_ref().expect("powered instances carry keys");
            let record = library.lookup(key).expect("build_system checked the key");
            if record.fpga_part != self.fpga_part {
                return Err(ScenarioError::PartMismatch {
                    application: self.id.clone(),
                    key: key.to_string(),
                    expected: self.fpga_part.clone(),
                    found: record.fpga_part.clone(),
                });
            }
            records.insert(inst.instance_id.clone(), record.clone());
        }
        Ok(ResolvedApplication {
            ofdm: cfg.ofdm,
            stop: self.stop_condition(&cfg),
            system,
            records,
        })
    }
}

/// Distinct config keys needed by a set of applications, for characterization
/// planning. Applications that fail to derive are skipped.
pub fn required_keys(apps: &[ApplicationSpec]) -> BTreeSet<crate::library::IpConfigKey> {
    let registry = BlockRegistry::with_builtin();
    apps.iter()
        .filter_map(|a| a.topology().ok())
        .filter_map(|t| build_system(&t, &registry, None).ok())
        .flat_map(|m| m.powered().filter_map(|i| i.config_key.clone()).collect::<Vec<_>>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn table3() -> ScenarioSpec {
        ScenarioSpec::from_json_str(
            &json!({
                "name": "lte_miso_2x1",
                "fixed": {"coding_rate": "1/3", "code_block_size": 1024, "modulation": "QPSK",
                          "quantization_bits": 14, "tx_antennas": 2},
                "variable": {"fft_size": [256, 512, 1024, 2048]},
                "fpga_part": "xc6vlx240t",
                "clock_mhz": 50,
                "stop": {"subframes": 5}
            })
            .to_string(),
        )
        .unwrap()
    }

    #[test]
    fn table3_has_four_applications() {
        let s = table3();
        assert_eq!(s.variable.len(), 1);
        assert_eq!(s.variable.0[0].1.len(), 4);
        let apps = enumerate_applications(&s).unwrap();
        let ffts: Vec<usize> = apps.iter().map(|a| a.ofdm_params().unwrap().fft_size).collect();
        assert_eq!(ffts, [256, 512, 1024, 2048]);
        let bws: Vec<f64> = apps.iter().map(|a| a.ofdm_params().unwrap().bandwidth_mhz).collect();
        assert_eq!(bws, [3.0, 5.0, 10.0, 20.0]);
        assert_eq!(apps[3].id, "app4");
        assert_eq!(apps[0].clock_mhz().unwrap(), 50.0);
        let cfg = apps[0].chain_config().unwrap();
        assert_eq!(cfg.quantization_bits, Some(14));
        assert_eq!(apps[0].stop_condition(&cfg), StopCondition::Outputs(70));
    }

    #[test]
    fn no_axes_gives_one_application() {
        let s = ScenarioSpec::from_json_str(
            r#"{"name": "one", "fixed": {"fft_size": 512}, "fpga_part": "p", "clock_mhz": 50,
                "stop": {"cycles": 1000}}"#,
        )
        .unwrap();
        let apps = enumerate_applications(&s).unwrap();
        assert_eq!(apps.len(), 1);
        assert!(apps[0].bindings.is_empty());
    }

    #[test]
    fn empty_axis_rejected() {
        let err = ScenarioSpec::from_json_str(
            r#"{"name": "x", "variable": {"fft_size": []}, "fpga_part": "p", "stop": {"subframes": 1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::EmptyAxis(ref n) if n == "fft_size"));
    }

    #[test]
    fn unknown_parameter_rejected() {
        let err = ScenarioSpec::from_json_str(
            r#"{"name": "x", "fixed": {"fft_sise": 512}, "fpga_part": "p", "stop": {"subframes": 1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownParameter(ref n) if n == "fft_sise"));
        let err = ScenarioSpec::from_json_str(
            r#"{"name": "x", "fixed": {"fft_size": 512}, "variable": {"fft_size": [256]},
                "fpga_part": "p", "stop": {"subframes": 1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::FixedAndVariable(_)));
        assert!(ScenarioSpec::from_json_str(
            r#"{"name": "x", "fixed": {"fft_size": "big"}, "fpga_part": "p", "stop": {"subframes": 1}}"#
        )
        .is_err());
    }

    #[test]
    fn product_order() {
        let s = ScenarioSpec::from_json_str(
            r#"{"name": "x", "variable": {"modulation": ["QPSK", "16QAM"], "fft_size": [128, 256, 512]},
                "fpga_part": "p", "clock_mhz": 100, "stop": {"subframes": 1}}"#,
        )
        .unwrap();
        let apps = enumerate_applications(&s).unwrap();
        assert_eq!(apps.len(), 6);
        let labels: Vec<String> = apps.iter().map(ApplicationSpec::label).collect();
        assert_eq!(labels[0], "modulation=QPSK, fft_size=128");
        assert_eq!(labels[1], "modulation=QPSK, fft_size=256");
        assert_eq!(labels[3], "modulation=16QAM, fft_size=128");
        // Re-parsing is idempotent.
        let again = enumerate_applications(&ScenarioSpec::from_json_str(&s.to_json_string()).unwrap()).unwrap();
        assert_eq!(again, apps);
    }

    #[test]
    fn bandwidth_and_fft_must_agree() {
        let mk = |fixed: &str| {
            let s = ScenarioSpec::from_json_str(&format!(
                r#"{{"name": "x", "fixed": {fixed}, "fpga_part": "p", "clock_mhz": 50, "stop": {{"subframes": 1}}}}"#
            ))
            .unwrap();
            enumerate_applications(&s).unwrap().remove(0).ofdm_params()
        };
        assert_eq!(mk(r#"{"bandwidth_mhz": 1.4}"#).unwrap().fft_size, 128);
        assert_eq!(mk(r#"{"bandwidth_mhz": "10", "fft_size": 1024}"#).unwrap().used_subcarriers, 600);
        assert!(mk(r#"{"bandwidth_mhz": 10, "fft_size": 2048}"#).is_err());
        assert!(mk(r#"{"modulation": "QPSK"}"#).is_err());
    }

    #[test]
    fn clock_precedence() {
        let s = ScenarioSpec::from_json_str(
            r#"{"name": "x", "fixed": {"fft_size": 512, "clock_mhz": 100}, "fpga_part": "p",
                "clock_mhz": 50, "stop": {"subframes": 1}}"#,
        )
        .unwrap();
        assert_eq!(enumerate_applications(&s).unwrap()[0].clock_mhz().unwrap(), 50.0);
        let s = ScenarioSpec::from_json_str(
            r#"{"name": "x", "fixed": {"fft_size": 512, "clock_mhz": 100}, "fpga_part": "p",
                "stop": {"subframes": 1}}"#,
        )
        .unwrap();
        assert_eq!(enumerate_applications(&s).unwrap()[0].clock_mhz().unwrap(), 100.0);
    }

    #[test]
    fn custom_parameters_pass_through() {
        let s = ScenarioSpec::from_json_str(
            r#"{"name": "x", "fixed": {"fft_size": 512, "speed_grade": -2}, "fpga_part": "p",
                "clock_mhz": 50, "stop": {"subframes": 1}, "custom_parameters": ["speed_grade"]}"#,
        )
        .unwrap();
        let app = enumerate_applications(&s).unwrap().remove(0);
        let keys = required_keys(&[app]);
        assert!(keys
            .iter()
            .all(|k| k.parameters.get("speed_grade") == Some(&ParamValue::Int(-2))));
    }

    #[test]
    fn unsupported_fft_fails_only_that_application() {
        let s = ScenarioSpec::from_json_str(
            r#"{"name": "x", "variable": {"fft_size": [512, 4096]}, "fpga_part": "p",
                "clock_mhz": 50, "stop": {"subframes": 1}}"#,
        )
        .unwrap();
        let apps = enumerate_applications(&s).unwrap();
        assert!(apps[0].ofdm_params().is_ok());
        match apps[1].ofdm_params() {
            Err(ScenarioError::Derivation { application, .. }) => assert_eq!(application, "app2"),
            other => panic!("{other:?}"),
        }
    }
}
