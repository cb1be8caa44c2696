use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use actisim_core::estimator::{cumulative_power, estimate_from_trace, power_breakdown, write_breakdown_csv, PowerReport};
use actisim_core::library::{load_library, PowerLibrary};
use actisim_core::scenario::{enumerate_applications, parse_scenario, ApplicationSpec};
use actisim_core::sim::{simulate, BlockRegistry};
use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use crate::manifest::{
    write_json, ApplicationEntry, ApplicationResult, EstimateManifest, PhaseTiming, Status, Timings,
    ESTIMATE_MANIFEST,
};
use crate::Outcome;

pub struct EstimateArgs {
    pub scenario: PathBuf,
    pub library: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub timings: Option<PathBuf>,
    pub force: bool,
}

const MAX_JOBS: usize = 16;

struct AppRun {
    entry: ApplicationEntry,
    phases: Vec<PhaseTiming>,
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<(EstimateManifest, Outcome)> {
    let started = Instant::now();
    let spec = parse_scenario(&args.scenario)?;
    let library = load_library(&args.library)?;
    let apps = enumerate_applications(&spec)?;
    prepare_out_dir(&args.out, args.force)?;

    let jobs = args
        .jobs
        .unwrap_or_else(|| apps.len().min(std::thread::available_parallelism().map_or(1, |n| n.get())))
        .clamp(1, MAX_JOBS);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let registry = BlockRegistry::with_builtin();
    log::info!("{} applications, {jobs} jobs", apps.len());

    let runs: Vec<AppRun> = pool.install(|| {
        apps.par_iter()
            .map(|app| run_application(app, &registry, &library, &args.out))
            .collect()
    });

    let mut files = vec![ESTIMATE_MANIFEST.to_string()];
    let mut timings = Timings::default();
    let mut entries = Vec::with_capacity(runs.len());
    for run in runs {
        if let Some(r) = &run.entry.result {
            files.extend(r.files.iter().cloned());
        }
        timings.phases.extend(run.phases);
        entries.push(run.entry);
    }
    let timings_path = args.timings.clone().unwrap_or_else(|| args.out.join("timings.json"));
    let timings_label = match timings_path.strip_prefix(&args.out) {
        Ok(rel) => {
            files.push(rel.display().to_string());
            rel.display().to_string()
        }
        Err(_) => timings_path.display().to_string(),
    };
    files.sort();

    let failed = entries.iter().filter(|e| e.status == Status::Failed).count();
    let manifest = EstimateManifest {
        command: "estimate".into(),
        scenario: args.scenario.display().to_string(),
        scenario_name: spec.name.clone(),
        library: args.library.display().to_string(),
        out_dir: args.out.display().to_string(),
        seed: args.seed,
        applications: entries,
        files,
        timings: timings_label,
    };
    write_json(&args.out.join(ESTIMATE_MANIFEST), &manifest)?;
    timings.total_s = started.elapsed().as_secs_f64();
    write_json(&timings_path, &timings)?;

    let outcome = if failed == 0 {
        Outcome::Success
    } else {
        log::warn!("{failed} of {} applications failed", manifest.applications.len());
        Outcome::Partial
    };
    Ok((manifest, outcome))
}

/// Creates `out`, refusing to mix with unrelated content. With `force`, a
/// previous run directory (one holding a manifest) is replaced.
fn prepare_out_dir(out: &Path, force: bool) -> Result<()> {
    if out.exists() {
        let non_empty = fs::read_dir(out)
            .with_context(|| format!("reading {}", out.display()))?
            .next()
            .is_some();
        if non_empty {
            if !(force && out.join(ESTIMATE_MANIFEST).is_file()) {
                bail!(
                    "output directory {} is not empty (use --force to replace a previous run)",
                    out.display()
                );
            }
            fs::remove_dir_all(out).with_context(|| format!("clearing {}", out.display()))?;
        }
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

fn run_application(app: &ApplicationSpec, registry: &BlockRegistry, library: &PowerLibrary, out: &Path) -> AppRun {
    let mut phases = Vec::new();
    let result = evaluate(app, registry, library, out, &mut phases);
    let entry = ApplicationEntry {
        id: app.id.clone(),
        label: app.label(),
        parameters: app.parameters.clone(),
        status: if result.is_ok() { Status::Ok } else { Status::Failed },
        error: result.as_ref().err().map(|e| format!("{e:#}")),
        result: result.ok(),
    };
    if let Some(e) = &entry.error {
        log::error!("{}: {e}", app.id);
        // Partial outputs of a failed application would be missing from the manifest.
        let _ = fs::remove_dir_all(out.join(&app.id));
    }
    AppRun { entry, phases }
}

fn evaluate(
    app: &ApplicationSpec,
    registry: &BlockRegistry,
    library: &PowerLibrary,
    out: &Path,
    phases: &mut Vec<PhaseTiming>,
) -> Result<ApplicationResult> {
    let mut phase = |name: &str, t: Instant| {
        phases.push(PhaseTiming {
            application: app.id.clone(),
            phase: name.into(),
            seconds: t.elapsed().as_secs_f64(),
        })
    };

    let t = Instant::now();
    let resolved = app.resolve(registry, library)?;
    let run = simulate(&resolved.system, resolved.stop)?;
    phase("simulate", t);

    let t = Instant::now();
    let static_mw = library.metadata.static_mw;
    let weighted = estimate_from_trace(&run.trace, &resolved.records)?
        .for_application(&app.id)
        .with_static_mw(static_mw);
    let cumulative = cumulative_power(&resolved.records)?
        .for_application(&app.id)
        .with_static_mw(static_mw);
    let breakdown = power_breakdown(&weighted)?;
    phase("estimate", t);

    let dir = out.join(&app.id);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    let mut emit = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        files.push(format!("{}/{name}", app.id));
        Ok(())
    };
    emit("topology.json", app.topology()?.to_json_string().into_bytes())?;
    let mut trace = Vec::new();
    run.trace.write_csv(&mut trace)?;
    emit("trace.csv", trace)?;
    for report in [&weighted, &cumulative] {
        let stem = format!("report_{}", report.method.name());
        emit(&format!("{stem}.json"), report.to_json_string().into_bytes())?;
        emit(&format!("{stem}.csv"), report_csv(report)?)?;
    }
    let mut grouped = Vec::new();
    write_breakdown_csv(std::slice::from_ref(&breakdown), &mut grouped)?;
    emit("breakdown.csv", grouped)?;

    let clock_mhz = resolved.system.clock_mhz;
    Ok(ApplicationResult {
        fft_size: resolved.ofdm.fft_size,
        bandwidth_mhz: resolved.ofdm.bandwidth_mhz,
        clock_mhz,
        t_sim_cycles: run.trace.t_sim_cycles,
        simulated_time_s: run.trace.t_sim_cycles as f64 / (clock_mhz * 1e6),
        activity_weighted_mw: weighted.total_mw,
        cumulative_mw: cumulative.total_mw,
        files,
    })
}

fn report_csv(report: &PowerReport) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    Ok(buf)
}
