//! Rate-1/3 systematic parallel-concatenated convolutional encoder.
//!
//! Each code block produces three streams: the systematic bits, the parity of
//! an 8-state recursive systematic encoder (feedback 1+D²+D³, forward
//! 1+D+D³) over the block, and the parity of the same encoder over the
//! block permuted by a quadratic permutation polynomial
//! `π(i) = (f1·i + f2·i²) mod K`. Both encoders start in the zero state and
//! are not terminated, so a K-bit block yields exactly 3K bits. Output is
//! interleaved per bit position as `[s, p1, p2]`.

use super::DspError;

/// Parity stream of the constituent recursive encoder.
fn rsc_parity(bits: impl Iterator<Item = u8>) -> Vec<u8> {
    let (mut s1, mut s2, mut s3) = (0u8, 0u8, 0u8);
    bits.map(|u| {
        let fb = (u & 1) ^ s2 ^ s3;
        let p = fb ^ s1 ^ s3;
        s3 = s2;
        s2 = s1;
        s1 = fb;
        p
    })
    .collect()
}

/// Quadratic permutation polynomial interleaver.
#[derive(Debug, Clone)]
pub struct QppInterleaver {
    pub f1: usize,
    pub f2: usize,
    perm: Vec<usize>,
}

impl QppInterleaver {
    pub fn new(k: usize, f1: usize, f2: usize) -> Result<Self, DspError> {
        if k == 0 {
            return Err(DspError::Unsupported("empty code block".into()));
        }
        let perm: Vec<usize> = (0..k)
            .map(|i| ((f1 * i) % k + (f2 * ((i * i) % k)) % k) % k)
            .collect();
        let mut seen = vec![false; k];
        for &p in &perm {
            if std::mem::replace(&mut seen[p], true) {
                return Err(DspError::Unsupported(format!(
                    "QPP ({f1}, {f2}) is not a permutation of length {k}"
                )));
            }
        }
        Ok(Self { f1, f2, perm })
    }

    /// Default coefficients: (31, 64) for 1024-bit blocks, otherwise the first
    /// valid pair from a small search.
    pub fn for_block_size(k: usize) -> Result<Self, DspError> {
        if k == 1024 {
            return Self::new(k, 31, 64);
        }
        let rad: usize = prime_factors(k).into_iter().product();
        for f1 in (3..k.max(4)).step_by(2) {
            for mult in 1..=8 {
                let f2 = (rad * mult) % k;
                if let Ok(q) = Self::new(k, f1, f2) {
                    return Ok(q);
                }
            }
        }
        // Identity permutation as a last resort.
        Self::new(k, 1, 0)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Encoder for a fixed code block size.
#[derive(Debug, Clone)]
pub struct ChannelEncoder {
    interleaver: QppInterleaver,
}

impl ChannelEncoder {
    pub fn new(code_block_size: usize) -> Result<Self, DspError> {
        Ok(Self {
            interleaver: QppInterleaver::for_block_size(code_block_size)?,
        })
    }

    pub fn code_block_size(&self) -> usize {
        self.interleaver.len()
    }

    pub fn interleaver(&self) -> &QppInterleaver {
        &self.interleaver
    }

    fn encode_block(&self, block: &[u8], out: &mut Vec<u8>) {
        let p1 = rsc_parity(block.iter().copied());
        let p2 = rsc_parity(self.interleaver.perm.iter().map(|&i| block[i]));
        for i in 0..block.len() {
            out.extend_from_slice(&[block[i] & 1, p1[i], p2[i]]);
        }
    }

    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>, DspError> {
        let k = self.code_block_size();
        if !bits.len().is_multiple_of(k) {
            return Err(DspError::LengthNotMultiple {
                len: bits.len(),
                block: k,
            });
        }
        let mut out = Vec::with_capacity(3 * bits.len());
        for block in bits.chunks(k) {
            self.encode_block(block, &mut out);
        }
        Ok(out)
    }
}

/// Encodes `bits` (one bit per byte, values 0/1) in blocks of `code_block_size`.
pub fn encode_channel(bits: &[u8], code_block_size: usize) -> Result<Vec<u8>, DspError> {
    ChannelEncoder::new(code_block_size)?.encode(bits)
}

/// Systematic bits of an encoded stream (positions `0 mod 3`).
pub fn systematic_bits(coded: &[u8]) -> Vec<u8> {
    coded.iter().step_by(3).copied().collect()
}

/// Pseudo-random bit source (PRBS-23, x²³ + x¹⁸ + 1).
#[derive(Debug, Clone)]
pub struct Prbs23 {
    state: u32,
}

impl Prbs23 {
    pub fn new(seed: u32) -> Self {
        let state = seed & 0x7F_FFFF;
        Self {
            state: if state == 0 { 1 } else { state },
        }
    }

    pub fn next_bit(&mut self) -> u8 {
        let bit = ((self.state >> 22) ^ (self.state >> 17)) & 1;
        self.state = ((self.state << 1) | bit) & 0x7F_FFFF;
        bit as u8
    }

    pub fn take_bits(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.next_bit()).collect()
    }
}
