//! Power characterization library.
//!
//! Each record holds the two average dynamic powers measured for one IP
//! configuration: one with the IP processing data and one with it at rest.
//! Records are keyed by IP name plus the exact parameter set used during
//! characterization; there is no nearest-match lookup.

mod key;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use key::{IpConfigKey, ParamValue, Params};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("cannot access `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed library data: {0}")]
    Parse(String),
    #[error("unsupported library schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("{}duplicate record for {key}", row_prefix(*.row))]
    DuplicateKey { key: IpConfigKey, row: Option<usize> },
    #[error("{}invalid record for {key}: {reason}", row_prefix(*.row))]
    InvalidRecord {
        key: IpConfigKey,
        row: Option<usize>,
        reason: String,
    },
    #[error("no power record for {0}; characterize this configuration first")]
    NotFound(IpConfigKey),
}

fn row_prefix(row: Option<usize>) -> String {
    row.map(|r| format!("row {r}: ")).unwrap_or_default()
}

/// Characterization result of one IP configuration, powers in milliwatts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpPowerRecord {
    #[serde(flatten)]
    pub key: IpConfigKey,
    pub p_active_mw: f64,
    pub p_idle_mw: f64,
    pub fpga_part: String,
    pub source: String,
}

impl IpPowerRecord {
    pub fn new(key: IpConfigKey, p_active_mw: f64, p_idle_mw: f64, fpga_part: &str) -> Self {
        Self {
            key,
            p_active_mw,
            p_idle_mw,
            fpga_part: fpga_part.to_string(),
            source: "synthetic".to_string(),
        }
    }

    fn check(&self, row: Option<usize>) -> Result<(), LibraryError> {
        let bad = |reason: String| LibraryError::InvalidRecord {
            key: self.key.clone(),
            row,
            reason,
        };
        if !self.p_active_mw.is_finite() || self.p_active_mw < 0.0 {
            return Err(bad(format!("p_active_mw = {} is not a non-negative number", self.p_active_mw)));
        }
        if !self.p_idle_mw.is_finite() || self.p_idle_mw < 0.0 {
            return Err(bad(format!("p_idle_mw = {} is not a non-negative number", self.p_idle_mw)));
        }
        if self.key.ip_name.trim().is_empty() {
            return Err(bad("empty ip_name".to_string()));
        }
        Ok(())
    }

    /// Soft-invariant violations; these never block loading.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.p_idle_mw > self.p_active_mw {
            out.push(format!(
                "{}: idle power {} mW exceeds active power {} mW",
                self.key, self.p_idle_mw, self.p_active_mw
            ));
        }
        out
    }
}

/// Library-level metadata.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LibraryMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    /// Device static power, carried for reporting only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub static_mw: Option<f64>,
}

/// Immutable set of power records with unique keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerLibrary {
    records: BTreeMap<IpConfigKey, IpPowerRecord>,
    pub metadata: LibraryMetadata,
}

#[derive(Serialize, Deserialize)]
struct LibraryFile {
    schema_version: u32,
    #[serde(flatten)]
    metadata: LibraryMetadata,
    records: Vec<IpPowerRecord>,
}

impl PowerLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a library from records, rejecting duplicate keys and invalid powers.
    pub fn from_records(
        records: impl IntoIterator<Item = IpPowerRecord>,
    ) -> Result<Self, LibraryError> {
        let mut lib = PowerLibrary::new();
        for record in records {
            lib.insert(record, None)?;
        }
        Ok(lib)
    }

    fn insert(&mut self, record: IpPowerRecord, row: Option<usize>) -> Result<(), LibraryError> {
        record.check(row)?;
        if self.records.contains_key(&record.key) {
            return Err(LibraryError::DuplicateKey {
                key: record.key,
                row,
            });
        }
        self.records.insert(record.key.clone(), record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in key order.
    pub fn records(&self) -> impl Iterator<Item = &IpPowerRecord> {
        self.records.values()
    }

    pub fn contains(&self, key: &IpConfigKey) -> bool {
        self.records.contains_key(key)
    }

    /// Exact-match lookup.
    pub fn lookup(&self, key: &IpConfigKey) -> Result<&IpPowerRecord, LibraryError> {
        self.records
            .get(key)
            .ok_or_else(|| LibraryError::NotFound(key.clone()))
    }

    pub fn warnings(&self) -> Vec<String> {
        self.records().flat_map(IpPowerRecord::warnings).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self, LibraryError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| LibraryError::Parse(e.to_string()))?;
        let version = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| LibraryError::Parse("missing integer `schema_version`".into()))?;
        if version != u64::from(SCHEMA_VERSION) {
            return Err(LibraryError::SchemaVersion {
                found: version.min(u64::from(u32::MAX)) as u32,
                expected: SCHEMA_VERSION,
            });
        }
        let file: LibraryFile =
            serde_json::from_value(value).map_err(|e| LibraryError::Parse(e.to_string()))?;
        let mut lib = PowerLibrary::from_records(file.records)?;
        lib.metadata = file.metadata;
        Ok(lib)
    }

    pub fn to_json_string(&self) -> String {
        let file = LibraryFile {
            schema_version: SCHEMA_VERSION,
            metadata: self.metadata.clone(),
            records: self.records().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).expect("library serializes") + "\n"
    }

    /// Reads a characterization CSV and returns a new library holding the prior
    /// records plus the imported ones, along with soft warnings. On error
    /// `self` is untouched.
    pub fn import_csv_reader<R: std::io::Read>(
        &self,
        reader: R,
    ) -> Result<(PowerLibrary, Vec<String>), LibraryError> {
        #[derive(Deserialize)]
        struct Row {
            ip_name: String,
            parameters: String,
            p_active_mw: f64,
            p_idle_mw: f64,
            fpga_part: String,
            source: String,
        }

        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = csv
            .headers()
            .map_err(|e| LibraryError::Parse(e.to_string()))?
            .clone();
        let expected = ["ip_name", "parameters", "p_active_mw", "p_idle_mw", "fpga_part", "source"];
        if headers.iter().ne(expected.iter().copied()) {
            return Err(LibraryError::Parse(format!(
                "CSV header must be `{}`",
                expected.join(",")
            )));
        }

        let mut next = self.clone();
        let mut warnings = Vec::new();
        for (i, row) in csv.deserialize::<Row>().enumerate() {
            // Row numbers count the header as row 1.
            let row_no = i + 2;
            let row = row.map_err(|e| LibraryError::Parse(format!("row {row_no}: {e}")))?;
            let parameters = Params::parse_list(&row.parameters)
                .map_err(|e| LibraryError::Parse(format!("row {row_no}: {e}")))?;
            let record = IpPowerRecord {
                key: IpConfigKey::new(row.ip_name, parameters),
                p_active_mw: row.p_active_mw,
                p_idle_mw: row.p_idle_mw,
                fpga_part: row.fpga_part,
                source: row.source,
            };
            warnings.extend(record.warnings().into_iter().map(|w| format!("row {row_no}: {w}")));
            next.insert(record, Some(row_no))?;
        }
        Ok((next, warnings))
    }
}

pub fn load_library(path: impl AsRef<Path>) -> Result<PowerLibrary, LibraryError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LibraryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let lib = PowerLibrary::from_json_str(&text)?;
    for w in lib.warnings() {
        log::warn!("{}: {w}", path.display());
    }
    Ok(lib)
}

pub fn save_library(lib: &PowerLibrary, path: impl AsRef<Path>) -> Result<(), LibraryError> {
    let path = path.as_ref();
    fs::write(path, lib.to_json_string()).map_err(|source| LibraryError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Imports a characterization CSV into a copy of `lib` (all-or-nothing).
pub fn import_characterization_csv(
    path: impl AsRef<Path>,
    lib: &PowerLibrary,
) -> Result<(PowerLibrary, Vec<String>), LibraryError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| LibraryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    lib.import_csv_reader(file)
}
