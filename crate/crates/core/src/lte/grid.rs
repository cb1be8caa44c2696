//! Resource grid construction for the shared data channel.
//!
//! Pilot symbols occupy whole OFDM symbols on a fixed period; every other
//! column is filled with data symbols in subcarrier-major order. Cells without
//! data are left at zero.

use std::collections::VecDeque;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::OfdmParams;

/// Pilot layout: one pilot OFDM symbol followed by `pilot_spacing` data
/// symbols, repeating from symbol 0. `None` disables pilots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramePlan {
    pub pilot_spacing: Option<usize>,
    pub pilot: Complex64,
}

impl Default for FramePlan {
    fn default() -> Self {
        Self {
            pilot_spacing: Some(10),
            pilot: Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        }
    }
}

impl FramePlan {
    pub fn without_pilots() -> Self {
        Self {
            pilot_spacing: None,
            ..Self::default()
        }
    }

    pub fn is_pilot(&self, symbol_index: usize) -> bool {
        self.pilot_spacing
            .is_some_and(|p| symbol_index.is_multiple_of(p + 1))
    }

    /// Pilot columns among symbols `[first, first + n)`.
    pub fn pilot_count(&self, first: usize, n: usize) -> usize {
        (first..first + n).filter(|&j| self.is_pilot(j)).count()
    }
}

/// Column-major grid: `cells[j * used + k]` is subcarrier `k` of symbol `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    pub used_subcarriers: usize,
    pub n_symbols: usize,
    pub cells: Vec<Complex64>,
    pub pilot_mask: Vec<bool>,
}

impl ResourceGrid {
    pub fn zeros(used_subcarriers: usize, n_symbols: usize) -> Self {
        Self {
            used_subcarriers,
            n_symbols,
            cells: vec![Complex64::new(0.0, 0.0); used_subcarriers * n_symbols],
            pilot_mask: vec![false; used_subcarriers * n_symbols],
        }
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        let u = self.used_subcarriers;
        &self.cells[j * u..(j + 1) * u]
    }

    pub fn is_pilot_column(&self, j: usize) -> bool {
        let u = self.used_subcarriers;
        u > 0 && self.pilot_mask[j * u..(j + 1) * u].iter().all(|&p| p)
    }

    pub fn pilot_columns(&self) -> usize {
        (0..self.n_symbols).filter(|&j| self.is_pilot_column(j)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridBuild {
    pub grid: ResourceGrid,
    /// Data symbols placed in the grid.
    pub consumed: usize,
    /// True when the data cells could not all be filled.
    pub underrun: bool,
}

/// Fills `n_symbols` columns starting at global symbol index `first_symbol`.
pub fn build_resource_grid(
    symbols: &[Complex64],
    params: &OfdmParams,
    plan: &FramePlan,
    first_symbol: usize,
    n_symbols: usize,
) -> GridBuild {
    let u = params.used_subcarriers;
    let mut grid = ResourceGrid::zeros(u, n_symbols);
    let mut data = symbols.iter();
    let mut consumed = 0;
    let mut underrun = false;
    for j in 0..n_symbols {
        let col = j * u..(j + 1) * u;
        if plan.is_pilot(first_symbol + j) {
            grid.cells[col.clone()].fill(plan.pilot);
            grid.pilot_mask[col].fill(true);
            continue;
        }
        for cell in &mut grid.cells[col] {
            match data.next() {
                Some(&s) => {
                    *cell = s;
                    consumed += 1;
                }
                None => underrun = true,
            }
        }
    }
    if underrun {
        log::warn!("resource grid under-run: {consumed} data symbols for {n_symbols} columns");
    }
    GridBuild {
        grid,
        consumed,
        underrun,
    }
}

/// Streaming grid mapper: buffers data symbols and releases complete columns.
#[derive(Debug, Clone)]
pub struct GridStream {
    used: usize,
    plan: FramePlan,
    next_symbol: usize,
    buffer: VecDeque<Complex64>,
}

impl GridStream {
    pub fn new(params: &OfdmParams, plan: FramePlan) -> Self {
        Self {
            used: params.used_subcarriers,
            plan,
            next_symbol: 0,
            buffer: VecDeque::new(),
        }
    }

    /// Most columns one push of `input_len` symbols can release.
    pub fn max_columns(used: usize, plan: &FramePlan, input_len: usize) -> usize {
        let data_cols = input_len.div_ceil(used);
        match plan.pilot_spacing {
            Some(_) => 2 * data_cols + 1,
            None => data_cols,
        }
    }

    pub fn push(&mut self, symbols: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.buffer.extend(symbols.iter().copied());
        let mut out = Vec::new();
        loop {
            if self.plan.is_pilot(self.next_symbol) {
                // A pilot column is only released ahead of a full data column so
                // columns leave in frame order without trailing pilots.
                let next_data = self.next_symbol + 1;
                if self.plan.is_pilot(next_data) || self.buffer.len() >= self.used {
                    out.push(vec![self.plan.pilot; self.used]);
                    self.next_symbol += 1;
                    continue;
                }
                break;
            }
            if self.buffer.len() < self.used {
                break;
            }
            out.push(self.buffer.drain(..self.used).collect());
            self.next_symbol += 1;
        }
        out
    }

    pub fn next_symbol(&self) -> usize {
        self.next_symbol
    }
}
