use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use actisim_core::ee::{ee_sweep, parse_pt_range, write_curves_csv, EeApplication, EeConfig};
use actisim_core::estimator::PowerReport;
use anyhow::{bail, Context, Result};

use crate::manifest::{
    manifest_dir, read_json, write_json, EeManifest, EstimateManifest, PhaseTiming, Status, Timings, EE_MANIFEST,
};
use crate::Outcome;

pub const DEFAULT_PT_DBM: &str = "-10:50:1";

pub struct EeArgs {
    pub manifest: PathBuf,
    pub params: PathBuf,
    pub pt_dbm: String,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub timings: Option<PathBuf>,
}

pub fn cmd_ee(args: &EeArgs) -> Result<(EeManifest, Outcome)> {
    let started = Instant::now();
    let estimate: EstimateManifest = read_json(&args.manifest)?;
    let base = manifest_dir(&args.manifest);
    let params_text =
        fs::read_to_string(&args.params).with_context(|| format!("reading {}", args.params.display()))?;
    let mut config = EeConfig::from_json_str(&params_text)?;
    if let Some(n) = args.samples {
        config.n_samples = n;
    }
    let pt = parse_pt_range(&args.pt_dbm)?;
    let seed = args.seed.unwrap_or(estimate.seed);

    let mut apps = Vec::new();
    let mut skipped = Vec::new();
    for entry in &estimate.applications {
        let Some(result) = entry.result.as_ref().filter(|_| entry.status == Status::Ok) else {
            log::warn!("{}: skipped, estimate failed", entry.id);
            skipped.push(entry.id.clone());
            continue;
        };
        // Circuit power comes from the activity-weighted report on disk.
        let report_path = base.join(&entry.id).join("report_activity_weighted.json");
        let report: PowerReport = read_json(&report_path)?;
        apps.push(EeApplication {
            id: entry.id.clone(),
            w_hz: result.bandwidth_mhz * 1e6,
            p_circuit_mw: report.total_mw,
        });
    }
    if apps.is_empty() {
        bail!("no successful application in {}", args.manifest.display());
    }

    let t = Instant::now();
    let curves = ee_sweep(&apps, &pt, &config, seed)?;
    let sweep_s = t.elapsed().as_secs_f64();

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut files = vec![EE_MANIFEST.to_string(), "ee_curves.csv".into(), "ee_curves.json".into()];
    let mut csv = Vec::new();
    write_curves_csv(&curves, &mut csv)?;
    fs::write(args.out.join("ee_curves.csv"), csv)?;
    write_json(&args.out.join("ee_curves.json"), &curves)?;

    let timings_path = args.timings.clone().unwrap_or_else(|| args.out.join("ee_timings.json"));
    let timings_label = match timings_path.strip_prefix(&args.out) {
        Ok(rel) => {
            files.push(rel.display().to_string());
            rel.display().to_string()
        }
        Err(_) => timings_path.display().to_string(),
    };
    files.sort();

    let outcome = if skipped.is_empty() { Outcome::Success } else { Outcome::Partial };
    let manifest = EeManifest {
        command: "ee".into(),
        estimate_manifest: args.manifest.display().to_string(),
        params: args.params.display().to_string(),
        pt_dbm: args.pt_dbm.clone(),
        out_dir: args.out.display().to_string(),
        seed,
        n_samples: config.n_samples,
        applications: apps,
        skipped,
        files,
        timings: timings_label,
    };
    write_json(&args.out.join(EE_MANIFEST), &manifest)?;
    let timings = Timings {
        total_s: started.elapsed().as_secs_f64(),
        phases: vec![PhaseTiming {
            application: "all".into(),
            phase: "sweep".into(),
            seconds: sweep_s,
        }],
    };
    write_json(&timings_path, &timings)?;
    Ok((manifest, outcome))
}
