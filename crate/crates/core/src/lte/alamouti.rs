//! Two-antenna Alamouti space-time block code.
//!
//! A symbol pair `(s1, s2)` occupies two symbol periods: antenna 1 sends
//! `s1` then `-conj(s2)`, antenna 2 sends `s2` then `conj(s1)`.

use num_complex::Complex64;

use super::DspError;

pub type AntennaPair = [Complex64; 2];

pub fn alamouti_encode(s1: Complex64, s2: Complex64) -> (AntennaPair, AntennaPair) {
    ([s1, -s2.conj()], [s2, s1.conj()])
}

/// Encodes a whole stream; the length must be even.
pub fn alamouti_stream(symbols: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>), DspError> {
    if !symbols.len().is_multiple_of(2) {
        return Err(DspError::OddSymbolCount(symbols.len()));
    }
    let mut ant1 = Vec::with_capacity(symbols.len());
    let mut ant2 = Vec::with_capacity(symbols.len());
    for pair in symbols.chunks_exact(2) {
        let (a, b) = alamouti_encode(pair[0], pair[1]);
        ant1.extend_from_slice(&a);
        ant2.extend_from_slice(&b);
    }
    Ok((ant1, ant2))
}

/// Code matrix with rows = antennas, columns = symbol periods.
pub fn code_matrix(s1: Complex64, s2: Complex64) -> [[Complex64; 2]; 2] {
    let (a, b) = alamouti_encode(s1, s2);
    [a, b]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_input() {
        let (a, b) = alamouti_encode(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(a, [c(1.0, 0.0), c(-0.0, 0.0)]);
        assert_eq!(b, [c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn conjugation_rule() {
        let (a, b) = alamouti_encode(c(1.0, 1.0), c(1.0, -1.0));
        assert_eq!(a, [c(1.0, 1.0), c(-1.0, -1.0)]);
        assert_eq!(b, [c(1.0, -1.0), c(1.0, -1.0)]);
    }

    #[test]
    fn odd_stream() {
        assert!(matches!(alamouti_stream(&[c(1.0, 0.0); 3]), Err(DspError::OddSymbolCount(3))));
        let (a, b) = alamouti_stream(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(b.len(), 2);
    }

    proptest! {
        #[test]
        fn orthogonal(r1 in -2.0..2.0f64, i1 in -2.0..2.0f64, r2 in -2.0..2.0f64, i2 in -2.0..2.0f64) {
            let (s1, s2) = (c(r1, i1), c(r2, i2));
            let m = code_matrix(s1, s2);
            let energy = s1.norm_sqr() + s2.norm_sqr();
            for i in 0..2 {
                for j in 0..2 {
                    let g: Complex64 = (0..2).map(|k| m[i][k] * m[j][k].conj()).sum();
                    let expect = if i == j { energy } else { 0.0 };
                    prop_assert!((g - expect).norm() <= 1e-12 * energy.max(1.0));
                }
            }
        }
    }
}
