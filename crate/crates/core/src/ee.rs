//! MISO ergodic capacity and energy efficiency over transmit-power sweeps.
//!
//! `C = W · E[log2(1 + ‖h‖²·Pt·G / Nt)]` with `G = 1` in normalized mode and
//! `G = 10^(−PL/10) / (N0·W)` otherwise; `EE = C / (Pt + P_circuit)` in bit/J.
//! Fading entries are i.i.d. CN(0, 1), and the expectation is a Monte Carlo
//! mean over one sample set shared by every curve and sweep point.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EeError {
    #[error("invalid EE parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("empty fading sample set")]
    NoSamples,
    #[error("samples have {samples} antennas, parameters expect {params}")]
    AntennaMismatch { samples: usize, params: usize },
    #[error("total power is zero")]
    ZeroTotalPower,
    #[error("invalid transmit power range: {0}")]
    BadRange(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn w_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Link parameters of one application.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EeParams {
    pub w_hz: f64,
    pub nt: usize,
    pub n0_dbm_hz: f64,
    /// Path loss as an attenuation in dB.
    pub pl_db: f64,
    /// Take `PL / (N0·W) = 1`; `pl_db` and `n0_dbm_hz` are then unused.
    pub normalized: bool,
}

impl EeParams {
    pub fn normalized(w_hz: f64, nt: usize) -> Self {
        Self {
            w_hz,
            nt,
            n0_dbm_hz: -174.0,
            pl_db: 0.0,
            normalized: true,
        }
    }

    pub fn validate(&self) -> Result<(), EeError> {
        let bad = |name: &str, reason: &str| {
            Err(EeError::InvalidParameter {
                name: name.into(),
                reason: reason.into(),
            })
        };
        if self.nt < 1 {
            return bad("nt", "at least one transmit antenna is required");
        }
        if !(self.w_hz.is_finite() && self.w_hz > 0.0) {
            return bad("w_hz", "bandwidth must be positive");
        }
        if !self.normalized && !(self.n0_dbm_hz.is_finite() && self.pl_db.is_finite()) {
            return bad("n0_dbm_hz/pl_db", "must be finite");
        }
        Ok(())
    }

    /// Channel gain factor `G` applied to the transmit power.
    pub fn gain(&self) -> f64 {
        if self.normalized {
            1.0
        } else {
            let n0_w_hz = dbm_to_w(self.n0_dbm_hz);
            10f64.powf(-self.pl_db / 10.0) / (n0_w_hz * self.w_hz)
        }
    }
}

/// Analysis settings shared by every application of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EeConfig {
    #[serde(default = "default_nt")]
    pub nt: usize,
    #[serde(default = "default_n0")]
    pub n0_dbm_hz: f64,
    #[serde(default)]
    pub pl_db: f64,
    #[serde(default = "default_true")]
    pub normalized: bool,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

fn default_nt() -> usize {
    2
}
fn default_n0() -> f64 {
    -174.0
}
fn default_true() -> bool {
    true
}
fn default_samples() -> usize {
    100_000
}

impl Default for EeConfig {
    fn default() -> Self {
        Self {
            nt: default_nt(),
            n0_dbm_hz: default_n0(),
            pl_db: 0.0,
            normalized: true,
            n_samples: default_samples(),
        }
    }
}

impl EeConfig {
    pub fn from_json_str(text: &str) -> Result<Self, EeError> {
        let c: EeConfig = serde_json::from_str(text).map_err(|e| EeError::InvalidParameter {
            name: "file".into(),
            reason: e.to_string(),
        })?;
        if c.n_samples == 0 {
            return Err(EeError::NoSamples);
        }
        c.params(1.0).validate()?;
        Ok(c)
    }

    pub fn params(&self, w_hz: f64) -> EeParams {
        EeParams {
            w_hz,
            nt: self.nt,
            n0_dbm_hz: self.n0_dbm_hz,
            pl_db: self.pl_db,
            normalized: self.normalized,
        }
    }
}

/// Fading vectors stored sample-major, with their squared norms.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSamples {
    pub nt: usize,
    pub h: Vec<Complex64>,
    pub norm_sqr: Vec<f64>,
}

impl FadingSamples {
    pub fn len(&self) -> usize {
        self.norm_sqr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm_sqr.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[Complex64] {
        &self.h[i * self.nt..(i + 1) * self.nt]
    }

    /// Fixed channel realizations, e.g. a degenerate single sample.
    pub fn from_vectors(nt: usize, vectors: &[Vec<Complex64>]) -> Self {
        let mut h = Vec::with_capacity(nt * vectors.len());
        let mut norm_sqr = Vec::with_capacity(vectors.len());
        for v in vectors {
            assert_eq!(v.len(), nt, "fading vector length");
            norm_sqr.push(v.iter().map(|x| x.norm_sqr()).sum());
            h.extend_from_slice(v);
        }
        Self { nt, h, norm_sqr }
    }
}

/// `n` i.i.d. CN(0, 1) vectors of length `nt`, deterministic in `seed`.
pub fn sample_channel(nt: usize, n: usize, seed: u64) -> FadingSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Vec::with_capacity(nt * n);
    let mut norm_sqr = Vec::with_capacity(n);
    for _ in 0..n {
        let mut e = 0.0;
        for _ in 0..nt {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let x = Complex64::new(re, im) * FRAC_1_SQRT_2;
            e += x.norm_sqr();
            h.push(x);
        }
        norm_sqr.push(e);
    }
    FadingSamples { nt, h, norm_sqr }
}

/// Mean of `log2(1 + ‖h‖²·snr / Nt)` over the samples, in bit/s/Hz.
pub fn spectral_efficiency(nt: usize, snr: f64, samples: &FadingSamples) -> f64 {
    let scale = snr / nt as f64;
    let sum: f64 = samples.norm_sqr.iter().map(|&g| (g * scale).ln_1p()).sum();
    sum / (samples.len() as f64 * LN_2)
}

pub fn average_capacity(params: &EeParams, pt_w: f64, samples: &FadingSamples) -> Result<f64, EeError> {
    params.validate()?;
    if samples.is_empty() {
        return Err(EeError::NoSamples);
    }
    if samples.nt != params.nt {
        return Err(EeError::AntennaMismatch {
            samples: samples.nt,
            params: params.nt,
        });
    }
    if !(pt_w >= 0.0) {
        return Err(EeError::InvalidParameter {
            name: "pt_w".into(),
            reason: format!("must be non-negative, got {pt_w}"),
        });
    }
    Ok(params.w_hz * spectral_efficiency(params.nt, pt_w * params.gain(), samples))
}

pub fn energy_efficiency(capacity_bps: f64, pt_w: f64, p_circuit_w: f64) -> Result<f64, EeError> {
    let total = pt_w + p_circuit_w;
    if !(total > 0.0) {
        return Err(EeError::ZeroTotalPower);
    }
    Ok(capacity_bps / total)
}

/// `start:stop:step` in dBm, inclusive of `stop` when it lies on the grid.
pub fn parse_pt_range(text: &str) -> Result<Vec<f64>, EeError> {
    let bad = || EeError::BadRange(text.to_string());
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = match parts[..] {
        [a] => (a, a, 1.0),
        [a, b] => (a, b, 1.0),
        [a, b, c] => (a, b, c),
        _ => return Err(bad()),
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitMode {
    WithoutCircuit,
    WithCircuit,
}

impl CircuitMode {
    pub fn name(self) -> &'static str {
        match self {
            CircuitMode::WithoutCircuit => "without_circuit",
            CircuitMode::WithCircuit => "with_circuit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EePoint {
    pub pt_dbm: f64,
    pub pt_w: f64,
    pub p_circuit_w: f64,
    pub p_total_w: f64,
    pub capacity_bps: f64,
    pub ee_bit_per_joule: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeCurve {
    pub application: String,
    pub mode: CircuitMode,
    pub p_circuit_mw: f64,
    pub points: Vec<EePoint>,
}

impl EeCurve {
    pub fn at(&self, pt_dbm: f64) -> Option<&EePoint> {
        self.points.iter().find(|p| (p.pt_dbm - pt_dbm).abs() < 1e-9)
    }
}

/// One application entering a sweep: its bandwidth and estimated circuit power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeApplication {
    pub id: String,
    pub w_hz: f64,
    pub p_circuit_mw: f64,
}

/// Curves for every application in both circuit-power modes, in application
/// order with the circuit-free curve first.
pub fn ee_sweep(
    apps: &[EeApplication],
    pt_dbm: &[f64],
    config: &EeConfig,
    seed: u64,
) -> Result<Vec<EeCurve>, EeError> {
    if pt_dbm.is_empty() || pt_dbm.iter().any(|p| !p.is_finite()) || pt_dbm.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EeError::BadRange(format!("{pt_dbm:?}")));
    }
    if config.n_samples == 0 {
        return Err(EeError::NoSamples);
    }
    let samples = sample_channel(config.nt, config.n_samples, seed);
    ee_sweep_with_samples(apps, pt_dbm, config, &samples)
}

pub fn ee_sweep_with_samples(
    apps: &[EeApplication],
    pt_dbm: &[f64],
    config: &EeConfig,
    samples: &FadingSamples,
) -> Result<Vec<EeCurve>, EeError> {
    let mut curves = Vec::with_capacity(2 * apps.len());
    // Capacity per unit bandwidth depends only on pt·G; reuse it when G repeats.
    let mut cache: Vec<(f64, Vec<f64>)> = Vec::new();
    for app in apps {
        if !(app.p_circuit_mw >= 0.0) {
            return Err(EeError::InvalidParameter {
                name: "p_circuit_mw".into(),
                reason: format!("application {}: {}", app.id, app.p_circuit_mw),
            });
        }
        let params = config.params(app.w_hz);
        params.validate()?;
        let g = params.gain();
        let se = match cache.iter().find(|(k, _)| *k == g) {
            Some((_, se)) => se.clone(),
            None => {
                let se: Vec<f64> = pt_dbm
                    .iter()
                    .map(|&p| spectral_efficiency(params.nt, dbm_to_w(p) * g, samples))
                    .collect();
                cache.push((g, se.clone()));
                se
            }
        };
        for (mode, pc_mw) in [
            (CircuitMode::WithoutCircuit, 0.0),
            (CircuitMode::WithCircuit, app.p_circuit_mw),
        ] {
            let p_circuit_w = pc_mw / 1000.0;
            let points = pt_dbm
                .iter()
                .zip(&se)
                .map(|(&p, &s)| {
                    let pt_w = dbm_to_w(p);
                    let capacity_bps = app.w_hz * s;
                    Ok(EePoint {
                        pt_dbm: p,
                        pt_w,
                        p_circuit_w,
                        p_total_w: pt_w + p_circuit_w,
                        capacity_bps,
                        ee_bit_per_joule: energy_efficiency(capacity_bps, pt_w, p_circuit_w)?,
                    })
                })
                .collect::<Result<Vec<_>, EeError>>()?;
            curves.push(EeCurve {
                application: app.id.clone(),
                mode,
                p_circuit_mw: pc_mw,
                points,
            });
        }
    }
    Ok(curves)
}

/// `application,mode,pt_dbm,p_circuit_mw,p_total_dbm,capacity_bps,ee`.
pub fn write_curves_csv<W: Write>(curves: &[EeCurve], out: W) -> Result<(), EeError> {
    let io = |e: csv::Error| EeError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["application", "mode", "pt_dbm", "p_circuit_mw", "p_total_dbm", "capacity_bps", "ee"])
        .map_err(io)?;
    for c in curves {
        for p in &c.points {
            w.write_record([
                c.application.clone(),
                c.mode.name().to_string(),
                p.pt_dbm.to_string(),
                c.p_circuit_mw.to_string(),
                w_to_dbm(p.p_total_w).to_string(),
                p.capacity_bps.to_string(),
                p.ee_bit_per_joule.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| EeError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_variance_entries() {
        let s = sample_channel(1, 100_000, 7);
        let m: f64 = s.norm_sqr.iter().sum::<f64>() / s.len() as f64;
        assert!((m - 1.0).abs() < 0.02, "{m}");
        let s = sample_channel(2, 100_000, 7);
        let m: f64 = s.norm_sqr.iter().sum::<f64>() / s.len() as f64;
        assert!((m - 2.0).abs() < 0.03, "{m}");
        assert_eq!(sample_channel(2, 1000, 3), sample_channel(2, 1000, 3));
        assert_ne!(sample_channel(2, 1000, 3), sample_channel(2, 1000, 4));
    }

    #[test]
    fn per_antenna_split_normalizes_mean_snr() {
        for nt in 1..=4 {
            let s = sample_channel(nt, 200_000, 11);
            let m = s.norm_sqr.iter().map(|g| g / nt as f64).sum::<f64>() / s.len() as f64;
            assert!((m - 1.0).abs() < 0.01, "nt={nt}: {m}");
        }
    }

    #[test]
    fn capacity_cases() {
        let s = sample_channel(2, 1000, 1);
        let p = EeParams::normalized(1e6, 2);
        assert_eq!(average_capacity(&p, 0.0, &s).unwrap(), 0.0);
        let one = FadingSamples::from_vectors(1, &[vec![Complex64::new(1.0, 0.0)]]);
        let c = average_capacity(&EeParams::normalized(5e6, 1), 1.0, &one).unwrap();
        assert!((c - 5e6).abs() < 1e-6);
        assert!(matches!(average_capacity(&p, 1.0, &one), Err(EeError::AntennaMismatch { .. })));
        let empty = FadingSamples::from_vectors(2, &[]);
        assert!(matches!(average_capacity(&p, 1.0, &empty), Err(EeError::NoSamples)));
    }

    #[test]
    fn capacity_monotone_and_linear_in_w() {
        let s = sample_channel(2, 5000, 9);
        let p = EeParams::normalized(1e6, 2);
        let mut last = 0.0;
        for dbm in -10..=50 {
            let c = average_capacity(&p, dbm_to_w(dbm as f64), &s).unwrap();
            assert!(c >= last);
            last = c;
        }
        let c1 = average_capacity(&p, 1.0, &s).unwrap();
        let c3 = average_capacity(&EeParams::normalized(3e6, 2), 1.0, &s).unwrap();
        assert!((c3 - 3.0 * c1).abs() < 1e-6 * c3);
    }

    #[test]
    fn physical_gain() {
        let p = EeParams {
            w_hz: 1e6,
            nt: 1,
            n0_dbm_hz: -174.0,
            pl_db: 100.0,
            normalized: false,
        };
        // N0·W = 10^-20.4 W/Hz · 10^6 Hz = 10^-14.4 W, PL = 10^-10: G = 10^4.4.
        assert!((p.gain().log10() - 4.4).abs() < 1e-9);
    }

    #[test]
    fn ee_cases() {
        assert_eq!(energy_efficiency(1e6, 0.5, 0.5).unwrap(), 1e6);
        assert_eq!(energy_efficiency(0.0, 0.0, 0.2).unwrap(), 0.0);
        assert!(energy_efficiency(1e6, 1.0, 0.1).unwrap() > energy_efficiency(1e6, 1.0, 0.2).unwrap());
        assert!(matches!(energy_efficiency(1.0, 0.0, 0.0), Err(EeError::ZeroTotalPower)));
    }

    #[test]
    fn ranges() {
        let r = parse_pt_range("-10:50:1").unwrap();
        assert_eq!(r.len(), 61);
        assert_eq!((r[0], r[60]), (-10.0, 50.0));
        assert_eq!(parse_pt_range("20").unwrap(), vec![20.0]);
        assert_eq!(parse_pt_range("0:1:0.25").unwrap().len(), 5);
        assert!(parse_pt_range("5:0:1").is_err());
        assert!(parse_pt_range("0:5:0").is_err());
        assert!(parse_pt_range("a:b").is_err());
    }

    #[test]
    fn sweep_modes() {
        let cfg = EeConfig {
            n_samples: 2000,
            ..EeConfig::default()
        };
        let apps = [
            EeApplication { id: "a".into(), w_hz: 5e6, p_circuit_mw: 150.0 },
            EeApplication { id: "b".into(), w_hz: 5e6, p_circuit_mw: 0.0 },
        ];
        let pts = parse_pt_range("-10:50:5").unwrap();
        let curves = ee_sweep(&apps, &pts, &cfg, 42).unwrap();
        assert_eq!(curves.len(), 4);
        for (without, with) in curves[0].points.iter().zip(&curves[1].points) {
            assert!(with.ee_bit_per_joule < without.ee_bit_per_joule);
            assert_eq!(with.capacity_bps, without.capacity_bps);
        }
        assert_eq!(curves[2].points, curves[3].points);
        assert_eq!(curves, ee_sweep(&apps, &pts, &cfg, 42).unwrap());
        let mut buf = Vec::new();
        write_curves_csv(&curves, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("application,mode,pt_dbm,p_circuit_mw,p_total_dbm,capacity_bps,ee\na,without_circuit,-10,0,"));
        assert_eq!(text.lines().count(), 1 + 4 * pts.len());
    }
}
