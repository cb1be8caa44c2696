use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

/// A configuration parameter value. Characterization tools export either
/// integers (sizes, bit widths, clock in MHz) or short identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Str(String),
}

impl ParamValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            ParamValue::Str(s) => s.trim().parse().ok(),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Str(s) => Some(s),
            ParamValue::Int(_) => None,
        }
    }

    /// Parses a bare textual value: integers become `Int`, everything else `Str`.
    pub fn parse_text(text: &str) -> ParamValue {
        let text = text.trim();
        match text.parse::<i64>() {
            Ok(v) => ParamValue::Int(v),
            Err(_) => ParamValue::Str(text.to_string()),
        }
    }

    /// Encodes a real number, keeping integral values as integers.
    pub fn from_real(value: f64) -> ParamValue {
        if value.fract() == 0.0 && value.abs() < i64::MAX as f64 {
            ParamValue::Int(value as i64)
        } else {
            ParamValue::Str(format!("{value}"))
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Str(s) => s.trim().parse().ok(),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Str(s) => f.write_str(s),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Str(v)
    }
}

/// Name→value parameter set with unique names. Iteration order is by name,
/// so two sets built in different orders compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Params(BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a parameter, rejecting a name that is already present.
    pub fn try_insert(
        &mut self,
        name: impl Into<String>,
        value: impl Into<ParamValue>,
    ) -> Result<(), String> {
        let name = name.into();
        if self.0.contains_key(&name) {
            return Err(name);
        }
        self.0.insert(name, value.into());
        Ok(())
    }

    /// Inserts or replaces a parameter.
    pub fn set(&mut self, name: impl Into<String>, value: impl Into<ParamValue>) {
        self.0.insert(name.into(), value.into());
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<ParamValue>) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<ParamValue> {
        self.0.remove(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Restricts the set to the given names (missing names are skipped).
    pub fn select(&self, names: &[&str]) -> Params {
        Params(
            self.0
                .iter()
                .filter(|(k, _)| names.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// Parses the `k=v;k=v` list used by characterization CSV exports.
    pub fn parse_list(text: &str) -> Result<Params, String> {
        let mut params = Params::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| format!("parameter `{item}` is not of the form name=value"))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(format!("parameter `{item}` has an empty name"));
            }
            params
                .try_insert(name, ParamValue::parse_text(value))
                .map_err(|n| format!("parameter `{n}` appears more than once"))?;
        }
        Ok(params)
    }

    pub fn to_list(&self) -> String {
        self.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl<'de> Deserialize<'de> for Params {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ParamsVisitor;

        impl<'de> Visitor<'de> for ParamsVisitor {
            type Value = Params;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object of string or integer parameter values")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Params, A::Error> {
                let mut params = Params::new();
                while let Some((name, value)) = map.next_entry::<String, ParamValue>()? {
                    params.try_insert(name, value).map_err(|n| {
                        de::Error::custom(format!("duplicate parameter `{n}`"))
                    })?;
                }
                Ok(params)
            }
        }

        deserializer.deserialize_map(ParamsVisitor)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in self.iter() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for Params {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Params::parse_list(s)
    }
}

/// Identity of one characterized IP configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IpConfigKey {
    pub ip_name: String,
    pub parameters: Params,
}

impl IpConfigKey {
    pub fn new(ip_name: impl Into<String>, parameters: Params) -> Self {
        Self {
            ip_name: ip_name.into(),
            parameters,
        }
    }
}

impl fmt::Display for IpConfigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.ip_name, self.parameters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_insensitive_equality() {
        let a = Params::new().with("fft_size", 1024).with("quantization_bits", 14);
        let b = Params::new().with("quantization_bits", 14).with("fft_size", 1024);
        assert_eq!(IpConfigKey::new("ifft", a), IpConfigKey::new("ifft", b));
    }

    #[test]
    fn different_values_differ() {
        let a = IpConfigKey::new("ifft", Params::new().with("fft_size", 1024));
        let b = IpConfigKey::new("ifft", Params::new().with("fft_size", 2048));
        assert_ne!(a, b);
        let c = IpConfigKey::new("fft", Params::new().with("fft_size", 1024));
        assert_ne!(a, c);
    }

    #[test]
    fn parse_list_types_and_duplicates() {
        let p = Params::parse_list("fft_size=1024; modulation=QPSK").unwrap();
        assert_eq!(p.get("fft_size"), Some(&ParamValue::Int(1024)));
        assert_eq!(p.get("modulation"), Some(&ParamValue::Str("QPSK".into())));
        assert!(Params::parse_list("a=1;a=2").is_err());
        assert!(Params::parse_list("novalue").is_err());
        assert!(Params::parse_list("").unwrap().is_empty());
    }

    #[test]
    fn json_duplicates_rejected() {
        let err = serde_json::from_str::<Params>(r#"{"a": 1, "a": 2}"#).unwrap_err();
        assert!(err.to_string().contains("duplicate parameter"));
        let ok: Params = serde_json::from_str(r#"{"b": "x", "a": 2}"#).unwrap();
        assert_eq!(ok.to_list(), "a=2;b=x");
    }

    #[test]
    fn json_rejects_floats() {
        assert!(serde_json::from_str::<Params>(r#"{"clock": 62.5}"#).is_err());
    }

    #[test]
    fn real_encoding() {
        assert_eq!(ParamValue::from_real(50.0), ParamValue::Int(50));
        assert_eq!(ParamValue::from_real(62.5), ParamValue::Str("62.5".into()));
        assert_eq!(ParamValue::Str("62.5".into()).as_real(), Some(62.5));
    }
}
