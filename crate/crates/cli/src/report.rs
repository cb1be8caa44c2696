use std::fmt::Write as _;
use std::path::Path;

use actisim_core::estimator::{power_breakdown, relative_error, write_breakdown_csv, PowerReport};
use anyhow::{bail, Result};
use serde::Deserialize;

use crate::manifest::{manifest_dir, read_json, ApplicationResult, EstimateManifest, Status};

/// Published or measured totals to compare against, one per application in
/// manifest order.
#[derive(Debug, Deserialize)]
struct ReferenceFile {
    applications: Vec<ReferenceEntry>,
}

#[derive(Debug, Deserialize)]
struct ReferenceEntry {
    reference_mw: f64,
    #[serde(default)]
    fft_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub application: String,
    pub label: String,
    pub reference_mw: Option<f64>,
    pub activity_weighted_mw: f64,
    pub cumulative_mw: f64,
    /// Against the reference when given, else cumulative over activity-weighted.
    pub activity_weighted_error_pct: Option<f64>,
    pub cumulative_error_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

pub fn compare_rows(manifest_path: &Path, reference: Option<&Path>) -> Result<Vec<CompareRow>> {
    let manifest: EstimateManifest = read_json(manifest_path)?;
    let refs = match reference {
        Some(p) => {
            let file: ReferenceFile = read_json(p)?;
            if file.applications.len() != manifest.applications.len() {
                bail!(
                    "{} lists {} applications, the manifest {}",
                    p.display(),
                    file.applications.len(),
                    manifest.applications.len()
                );
            }
            Some(file.applications)
        }
        None => None,
    };
    let mut rows = Vec::new();
    for (i, entry) in manifest.applications.iter().enumerate() {
        let Some(r) = ok_result(entry.status, entry.result.as_ref()) else {
            continue;
        };
        let reference = refs.as_ref().map(|v| &v[i]);
        if let Some(expected) = reference.and_then(|e| e.fft_size) {
            if expected != r.fft_size {
                bail!("{}: reference is for fft_size {expected}, run used {}", entry.id, r.fft_size);
            }
        }
        let reference_mw = reference.map(|e| e.reference_mw);
        let base = reference_mw.unwrap_or(r.activity_weighted_mw);
        rows.push(CompareRow {
            application: entry.id.clone(),
            label: entry.label.clone(),
            reference_mw,
            activity_weighted_mw: r.activity_weighted_mw,
            cumulative_mw: r.cumulative_mw,
            activity_weighted_error_pct: reference_mw
                .map(|m| relative_error(r.activity_weighted_mw, m))
                .transpose()?,
            cumulative_error_pct: relative_error(r.cumulative_mw, base)?,
        });
    }
    Ok(rows)
}

fn ok_result(status: Status, result: Option<&ApplicationResult>) -> Option<&ApplicationResult> {
    result.filter(|_| status == Status::Ok)
}

pub fn render_compare(rows: &[CompareRow], format: Format) -> String {
    let opt = |v: Option<f64>, digits: usize| v.map_or("-".to_string(), |x| format!("{x:.digits$}"));
    let header = [
        "application",
        "parameters",
        "reference_mw",
        "activity_weighted_mw",
        "error_pct",
        "cumulative_mw",
        "cumulative_error_pct",
    ];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.application.clone(),
                r.label.clone(),
                opt(r.reference_mw, 2),
                format!("{:.2}", r.activity_weighted_mw),
                opt(r.activity_weighted_error_pct, 2),
                format!("{:.2}", r.cumulative_mw),
                format!("{:.1}", r.cumulative_error_pct),
            ]
        })
        .collect();
    let mut out = String::new();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let _ = w.write_record(header);
            for row in &cells {
                let _ = w.write_record(row);
            }
            let bytes = w.into_inner().unwrap_or_default();
            out.push_str(&String::from_utf8_lossy(&bytes));
        }
        Format::Table => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cols: Vec<&str>| {
                cols.iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(k, (c, w))| if k < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(out, "{}", line(header.to_vec()));
            for row in &cells {
                let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
            }
        }
    }
    out
}

fn successful_reports(manifest_path: &Path) -> Result<Vec<PowerReport>> {
    let manifest: EstimateManifest = read_json(manifest_path)?;
    let base = manifest_dir(manifest_path);
    manifest
        .applications
        .iter()
        .filter(|e| e.status == Status::Ok)
        .map(|e| read_json(&base.join(&e.id).join("report_activity_weighted.json")))
        .collect()
}

/// Per block type share of every successful application.
pub fn breakdown_csv(manifest_path: &Path) -> Result<Vec<u8>> {
    let breakdowns = successful_reports(manifest_path)?
        .iter()
        .map(power_breakdown)
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    write_breakdown_csv(&breakdowns, &mut out)?;
    Ok(out)
}

/// Per instance contributions of every successful application.
pub fn instances_csv(manifest_path: &Path) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "application",
        "instance_id",
        "block_type",
        "alpha",
        "p_active_mw",
        "p_idle_mw",
        "contribution_mw",
    ])?;
    for report in successful_reports(manifest_path)? {
        for ip in &report.per_ip {
            w.write_record([
                report.application.clone(),
                ip.instance_id.clone(),
                ip.block_type.clone(),
                ip.alpha.to_string(),
                ip.p_active_mw.to_string(),
                ip.p_idle_mw.to_string(),
                ip.contribution_mw.to_string(),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}
