use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use actisim_cli::manifest::{EeManifest, EstimateManifest, Status};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn actisim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actisim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> T {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn files_under(root: &Path) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().display().to_string());
            }
        }
    }
    out
}

fn estimate(out: &Path, library: &Path, extra: &[&str]) -> Output {
    let scenario = data("lte_scenario.json");
    let mut args = vec!["estimate", "--scenario", p(&scenario), "--library", p(library), "--out", p(out)];
    args.extend_from_slice(extra);
    actisim(&args)
}

#[test]
fn scenario_run_lists_every_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = estimate(&out, &data("lte_synthetic_library.json"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let m: EstimateManifest = read(&out.join("manifest.json"));
    assert_eq!(m.applications.len(), 4);
    assert!(m.applications.iter().all(|a| a.status == Status::Ok));
    let reports = files_under(&out).iter().filter(|f| f.contains("/report_") && f.ends_with(".json")).count();
    assert_eq!(reports, 8);
    let listed: BTreeSet<String> = m.files.iter().cloned().collect();
    assert_eq!(listed, files_under(&out));
}

#[test]
fn missing_record_fails_one_application() {
    let tmp = tempfile::tempdir().unwrap();
    let mut lib: Value = read(&data("lte_synthetic_library.json"));
    let records = lib["records"].as_array_mut().unwrap();
    records.retain(|r| !(r["ip_name"] == "ifft" && r["parameters"]["fft_size"] == 2048));
    let lib_path = tmp.path().join("lib.json");
    fs::write(&lib_path, serde_json::to_string(&lib).unwrap()).unwrap();

    let out = tmp.path().join("run");
    let o = estimate(&out, &lib_path, &[]);
    assert_eq!(o.status.code(), Some(2));
    let m: EstimateManifest = read(&out.join("manifest.json"));
    let status: Vec<Status> = m.applications.iter().map(|a| a.status).collect();
    assert_eq!(status, [Status::Ok, Status::Ok, Status::Ok, Status::Failed]);
    let err = m.applications[3].error.as_deref().unwrap();
    assert!(err.contains("ifft") && err.contains("fft_size=2048"), "{err}");
    assert!(!out.join("app4").exists());
    let listed: BTreeSet<String> = m.files.iter().cloned().collect();
    assert_eq!(listed, files_under(&out));

    // The sweep covers the three successful applications.
    let ee_out = tmp.path().join("ee");
    let o = actisim(&[
        "ee",
        "--manifest",
        p(&out.join("manifest.json")),
        "--params",
        p(&data("ee_params.json")),
        "--pt-dbm",
        "0:10:5",
        "--samples",
        "1000",
        "--out",
        p(&ee_out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let em: EeManifest = read(&ee_out.join("ee_manifest.json"));
    assert_eq!(em.applications.len(), 3);
    assert_eq!(em.skipped, ["app4"]);
}

#[test]
fn scenario_without_axes_runs_once() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tmp.path().join("one.json");
    fs::write(
        &scenario,
        r#"{"name": "single", "fixed": {"fft_size": 128, "modulation": "16QAM", "quantization_bits": 14},
            "fpga_part": "xc6vlx240t", "clock_mhz": 50, "stop": {"subframes": 1}}"#,
    )
    .unwrap();
    let out = tmp.path().join("run");
    let lib = data("lte_synthetic_library.json");
    let o = actisim(&["estimate", "--scenario", p(&scenario), "--library", p(&lib), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m: EstimateManifest = read(&out.join("manifest.json"));
    assert_eq!(m.applications.len(), 1);
}

#[test]
fn ee_curves_and_single_point_range() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert_eq!(estimate(&out, &data("lte_synthetic_library.json"), &[]).status.code(), Some(0));
    let manifest = out.join("manifest.json");
    let params = data("ee_params.json");

    let full = tmp.path().join("ee_full");
    let o = actisim(&["ee", "--manifest", p(&manifest), "--params", p(&params), "--samples", "2000", "--out", p(&full)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let curves: Vec<Value> = read(&full.join("ee_curves.json"));
    assert_eq!(curves.len(), 8);
    assert_eq!(curves[0]["points"].as_array().unwrap().len(), 61);

    let single = tmp.path().join("ee_single");
    let o = actisim(&[
        "ee", "--manifest", p(&manifest), "--params", p(&params), "--pt-dbm", "20", "--samples", "2000", "--out",
        p(&single),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(single.join("ee_curves.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8);
}

#[test]
fn compare_and_report_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert_eq!(estimate(&out, &data("lte_synthetic_library.json"), &[]).status.code(), Some(0));
    let manifest = out.join("manifest.json");

    let o = actisim(&["compare", "--manifest", p(&manifest), "--reference", p(&data("reference_totals.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.contains("118.64") && table.contains("227.01"));

    let o = actisim(&["report", "--manifest", p(&manifest), "--breakdown"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("application,block_type,contribution_mw,share\n"));
    assert_eq!(csv.lines().count(), 1 + 4 * 6);

    let o = actisim(&["report", "--manifest", p(&manifest)]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 4 * 9);
}

#[test]
fn serial_and_parallel_runs_match() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let lib = data("lte_synthetic_library.json");
    let timings = tmp.path().join("timings.json");
    let mut trees = Vec::new();
    for jobs in ["1", "4"] {
        let o = estimate(&out, &lib, &["--jobs", jobs, "--timings", p(&timings), "--force"]);
        assert_eq!(o.status.code(), Some(0));
        let tree: Vec<(String, Vec<u8>)> =
            files_under(&out).into_iter().map(|f| (f.clone(), fs::read(out.join(&f)).unwrap())).collect();
        trees.push(tree);
    }
    assert_eq!(trees[0], trees[1]);
}

#[test]
fn usage_and_config_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(actisim(&["estimate"]).status.code(), Some(1));
    assert_eq!(actisim(&["frobnicate"]).status.code(), Some(1));
    let missing = tmp.path().join("missing.json");
    let out = tmp.path().join("run");
    assert_eq!(estimate(&out, &missing, &[]).status.code(), Some(1));

    // A non-empty directory that is not a previous run is left alone.
    let busy = tmp.path().join("busy");
    fs::create_dir_all(&busy).unwrap();
    fs::write(busy.join("keep.txt"), "x").unwrap();
    let o = estimate(&busy, &data("lte_synthetic_library.json"), &["--force"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(busy.join("keep.txt").exists());
}

#[test]
fn import_builds_a_library() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("char.csv");
    fs::write(
        &csv,
        "ip_name,parameters,p_active_mw,p_idle_mw,fpga_part,source\n\
         ifft,fft_size=4096;quantization_bits=14;clock_mhz=50,80.0,14.0,xc6vlx240t,bench\n",
    )
    .unwrap();
    let out = tmp.path().join("lib.json");
    let base = data("lte_synthetic_library.json");
    let o = actisim(&["import", "--csv", p(&csv), "--library", p(&base), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lib = actisim_core::library::load_library(&out).unwrap();
    assert_eq!(lib.len(), 29);
}
