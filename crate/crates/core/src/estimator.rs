//! System power from activity coefficients and per-IP power records.
//!
//! Each characterized instance contributes `α·p_active + (1 − α)·p_idle`; the
//! cumulative baseline sums `p_active` as if every IP were always busy.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::library::IpPowerRecord;
use crate::sim::{activity_coefficients, ActivityTrace, SimError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("instance sets differ: no record for [{}], no coefficient for [{}]", missing_record.join(", "), missing_alpha.join(", "))]
    InstanceMismatch {
        missing_record: Vec<String>,
        missing_alpha: Vec<String>,
    },
    #[error("instance `{instance}`: activity coefficient {alpha} outside [0, 1]")]
    AlphaOutOfRange { instance: String, alpha: f64 },
    #[error("no instances to estimate")]
    Empty,
    #[error("breakdown of a zero-power report")]
    ZeroTotal,
    #[error("reference power must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("{0}")]
    Trace(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<SimError> for EstimateError {
    fn from(e: SimError) -> Self {
        EstimateError::Trace(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ActivityWeighted,
    Cumulative,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ActivityWeighted => "activity_weighted",
            Method::Cumulative => "cumulative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpContribution {
    pub instance_id: String,
    pub block_type: String,
    pub alpha: f64,
    pub p_active_mw: f64,
    pub p_idle_mw: f64,
    pub contribution_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub application: String,
    pub method: Method,
    pub per_ip: Vec<IpContribution>,
    /// Dynamic power in milliwatts.
    pub total_mw: f64,
    /// Device static power supplied by the user, reported beside the dynamic
    /// total and never added to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub static_mw: Option<f64>,
}

impl PowerReport {
    pub fn for_application(mut self, application: impl Into<String>) -> Self {
        self.application = application.into();
        self
    }

    pub fn with_static_mw(mut self, static_mw: Option<f64>) -> Self {
        self.static_mw = static_mw;
        self
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `instance_id,alpha,p_active_mw,p_idle_mw,contribution_mw,share`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EstimateError> {
        let io = |e: csv::Error| EstimateError::Io(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["instance_id", "alpha", "p_active_mw", "p_idle_mw", "contribution_mw", "share"])
            .map_err(io)?;
        for ip in &self.per_ip {
            let share = if self.total_mw > 0.0 {
                ip.contribution_mw / self.total_mw
            } else {
                0.0
            };
            w.write_record([
                ip.instance_id.clone(),
                ip.alpha.to_string(),
                ip.p_active_mw.to_string(),
                ip.p_idle_mw.to_string(),
                ip.contribution_mw.to_string(),
                share.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| EstimateError::Io(e.to_string()))
    }
}

fn check_sets(
    alphas: &BTreeMap<String, f64>,
    records: &BTreeMap<String, IpPowerRecord>,
) -> Result<(), EstimateError> {
    let missing_record: Vec<String> = alphas
        .keys()
        .filter(|k| !records.contains_key(*k))
        .cloned()
        .collect();
    let missing_alpha: Vec<String> = records
        .keys()
        .filter(|k| !alphas.contains_key(*k))
        .cloned()
        .collect();
    if missing_record.is_empty() && missing_alpha.is_empty() {
        Ok(())
    } else {
        Err(EstimateError::InstanceMismatch {
            missing_record,
            missing_alpha,
        })
    }
}

fn contribution(alpha: f64, r: &IpPowerRecord) -> f64 {
    alpha * r.p_active_mw + (1.0 - alpha) * r.p_idle_mw
}

fn report(method: Method, per_ip: Vec<IpContribution>) -> PowerReport {
    let total_mw = per_ip.iter().map(|c| c.contribution_mw).sum();
    PowerReport {
        application: String::new(),
        method,
        per_ip,
        total_mw,
        static_mw: None,
    }
}

/// Activity-weighted two-state estimate. Both maps must cover the same instances.
pub fn estimate_power(
    alphas: &BTreeMap<String, f64>,
    records: &BTreeMap<String, IpPowerRecord>,
) -> Result<PowerReport, EstimateError> {
    check_sets(alphas, records)?;
    if records.is_empty() {
        return Err(EstimateError::Empty);
    }
    let mut per_ip = Vec::with_capacity(records.len());
    for (id, r) in records {
        let alpha = alphas[id];
        if !(0.0..=1.0).contains(&alpha) {
            return Err(EstimateError::AlphaOutOfRange {
                instance: id.clone(),
                alpha,
            });
        }
        per_ip.push(IpContribution {
            instance_id: id.clone(),
            block_type: r.key.ip_name.clone(),
            alpha,
            p_active_mw: r.p_active_mw,
            p_idle_mw: r.p_idle_mw,
            contribution_mw: contribution(alpha, r),
        });
    }
    Ok(report(Method::ActivityWeighted, per_ip))
}

/// Estimate straight from a trace, using the coefficients of the recorded instances.
pub fn estimate_from_trace(
    trace: &ActivityTrace,
    records: &BTreeMap<String, IpPowerRecord>,
) -> Result<PowerReport, EstimateError> {
    let alphas: BTreeMap<String, f64> = activity_coefficients(trace)?
        .into_iter()
        .filter(|(id, _)| records.contains_key(id))
        .collect();
    estimate_power(&alphas, records)
}

/// Baseline summing active powers (every α taken as 1).
pub fn cumulative_power(records: &BTreeMap<String, IpPowerRecord>) -> Result<PowerReport, EstimateError> {
    if records.is_empty() {
        return Err(EstimateError::Empty);
    }
    let per_ip = records
        .iter()
        .map(|(id, r)| IpContribution {
            instance_id: id.clone(),
            block_type: r.key.ip_name.clone(),
            alpha: 1.0,
            p_active_mw: r.p_active_mw,
            p_idle_mw: r.p_idle_mw,
            contribution_mw: r.p_active_mw,
        })
        .collect();
    Ok(report(Method::Cumulative, per_ip))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpShare {
    pub instance_id: String,
    pub block_type: String,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupShare {
    pub block_type: String,
    pub contribution_mw: f64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub application: String,
    pub per_ip: Vec<IpShare>,
    /// One entry per block type, sorted by name.
    pub groups: Vec<GroupShare>,
}

impl Breakdown {
    pub fn group(&self, block_type: &str) -> Option<&GroupShare> {
        self.groups.iter().find(|g| g.block_type == block_type)
    }

    /// Block type with the largest share.
    pub fn dominant(&self) -> Option<&GroupShare> {
        self.groups
            .iter()
            .max_by(|a, b| a.share.total_cmp(&b.share))
    }
}

pub fn power_breakdown(report: &PowerReport) -> Result<Breakdown, EstimateError> {
    if !(report.total_mw > 0.0) {
        return Err(EstimateError::ZeroTotal);
    }
    let per_ip = report
        .per_ip
        .iter()
        .map(|c| IpShare {
            instance_id: c.instance_id.clone(),
            block_type: c.block_type.clone(),
            share: c.contribution_mw / report.total_mw,
        })
        .collect();
    let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
    for c in &report.per_ip {
        *sums.entry(&c.block_type).or_default() += c.contribution_mw;
    }
    let groups = sums
        .into_iter()
        .map(|(t, mw)| GroupShare {
            block_type: t.to_string(),
            contribution_mw: mw,
            share: mw / report.total_mw,
        })
        .collect();
    Ok(Breakdown {
        application: report.application.clone(),
        per_ip,
        groups,
    })
}

/// `application,block_type,contribution_mw,share`, one row per block type.
pub fn write_breakdown_csv<W: Write>(breakdowns: &[Breakdown], out: W) -> Result<(), EstimateError> {
    let io = |e: csv::Error| EstimateError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["application", "block_type", "contribution_mw", "share"])
        .map_err(io)?;
    for b in breakdowns {
        for g in &b.groups {
            w.write_record([
                b.application.clone(),
                g.block_type.clone(),
                g.contribution_mw.to_string(),
                g.share.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| EstimateError::Io(e.to_string()))
}

/// Percentage error `100·|estimate − reference| / reference`.
pub fn relative_error(estimate_mw: f64, reference_mw: f64) -> Result<f64, EstimateError> {
    if !(reference_mw > 0.0) {
        return Err(EstimateError::NonPositiveReference(reference_mw));
    }
    Ok(100.0 * (estimate_mw - reference_mw).abs() / reference_mw)
}
