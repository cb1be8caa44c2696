//! Per-antenna sample dumps for external inspection.

use std::io::{self, Write};

use num_complex::Complex64;

use super::fixed::{Quantizer, SaturationStats};
use super::DspError;

/// One `re,im` row per sample, with a header.
pub fn write_samples_csv<W: Write>(samples: &[Complex64], mut out: W) -> io::Result<()> {
    writeln!(out, "re,im")?;
    for s in samples {
        writeln!(out, "{:e},{:e}", s.re, s.im)?;
    }
    out.flush()
}

/// Interleaved little-endian int16 `re, im` codes of a fixed-point stream.
pub fn write_samples_i16<W: Write>(samples: &[Complex64], q_bits: u32, mut out: W) -> Result<(), DspError> {
    if q_bits > 16 {
        return Err(DspError::Unsupported(format!(
            "{q_bits}-bit samples do not fit an int16 dump"
        )));
    }
    let q = Quantizer::new(q_bits)?;
    let mut stats = SaturationStats::default();
    let mut buf = Vec::with_capacity(samples.len() * 4);
    for s in samples {
        for x in [s.re, s.im] {
            buf.extend_from_slice(&(q.code(x, &mut stats) as i16).to_le_bytes());
        }
    }
    out.write_all(&buf).map_err(|e| DspError::Unsupported(e.to_string()))
}

pub fn read_samples_i16(bytes: &[u8], q_bits: u32) -> Vec<Complex64> {
    let step = 2f64.powi(-(q_bits as i32 - 1));
    bytes
        .chunks_exact(4)
        .map(|c| {
            let re = i16::from_le_bytes([c[0], c[1]]) as f64 * step;
            let im = i16::from_le_bytes([c[2], c[3]]) as f64 * step;
            Complex64::new(re, im)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_samples_csv(&[Complex64::new(0.5, -0.25)], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "re,im\n5e-1,-2.5e-1\n");
    }

    #[test]
    fn int16_codes_round_trip() {
        let q = Quantizer::new(14).unwrap();
        let x: Vec<_> = (-5..5)
            .map(|k| Complex64::new(k as f64 * q.step() * 7.0, -(k as f64) * q.step()))
            .collect();
        let mut buf = Vec::new();
        write_samples_i16(&x, 14, &mut buf).unwrap();
        assert_eq!(buf.len(), x.len() * 4);
        assert_eq!(read_samples_i16(&buf, 14), x);
        assert!(write_samples_i16(&x, 20, Vec::new()).is_err());
    }
}
