//! QPSK and 16-QAM mapping following the 3GPP downlink constellation tables,
//! normalized to unit average symbol energy.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DspError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "16QAM")]
    Qam16,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Qpsk => "QPSK",
            Modulation::Qam16 => "16QAM",
        }
    }

    pub fn parse(text: &str) -> Result<Modulation, DspError> {
        match text.to_ascii_uppercase().replace(['-', '_', ' '], "").as_str() {
            "QPSK" => Ok(Modulation::Qpsk),
            "16QAM" | "QAM16" => Ok(Modulation::Qam16),
            _ => Err(DspError::Unsupported(format!("modulation `{text}`"))),
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn sign(bit: u8) -> f64 {
    1.0 - 2.0 * f64::from(bit & 1)
}

pub fn map_symbol(bits: &[u8], modulation: Modulation) -> Complex64 {
    match modulation {
        Modulation::Qpsk => Complex64::new(sign(bits[0]), sign(bits[1])) * FRAC_1_SQRT_2,
        Modulation::Qam16 => {
            let scale = 1.0 / 10f64.sqrt();
            let re = sign(bits[0]) * (1.0 + 2.0 * f64::from(bits[2] & 1));
            let im = sign(bits[1]) * (1.0 + 2.0 * f64::from(bits[3] & 1));
            Complex64::new(re, im) * scale
        }
    }
}

pub fn map_qam(bits: &[u8], modulation: Modulation) -> Result<Vec<Complex64>, DspError> {
    let m = modulation.bits_per_symbol();
    if !bits.len().is_multiple_of(m) {
        return Err(DspError::IndivisibleBits {
            len: bits.len(),
            bits_per_symbol: m,
        });
    }
    Ok(bits.chunks(m).map(|c| map_symbol(c, modulation)).collect())
}
