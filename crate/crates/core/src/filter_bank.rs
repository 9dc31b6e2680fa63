//! Normalized 1-D Gaussian filters, deduplicated by tap count.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::retinal::SigmaField;

/// Tap count for blur strength `sigma`: `ceil(6σ)` rounded up to the next
/// odd integer, never below 1.
pub fn filter_length(sigma: f64) -> usize {
    let n = (6.0 * sigma).ceil().max(1.0) as usize;
    n | 1
}

/// The σ a bank stores for a filter of `length` taps.
pub fn representative_sigma(length: usize) -> f64 {
    length as f64 / 6.0
}

/// Gaussian sampled at integer offsets from the center and normalized to sum 1.
pub fn gaussian_kernel(sigma: f64, length: usize) -> Vec<f64> {
    debug_assert!(length % 2 == 1);
    if length == 1 {
        return vec![1.0];
    }
    let r = (length / 2) as f64;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (0..length)
        .map(|i| {
            let d = i as f64 - r;
            (-d * d / denom).exp()
        })
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    // Exact mirror symmetry regardless of summation rounding.
    for i in 0..length / 2 {
        k[length - 1 - i] = k[i];
    }
    k
}

/// 1-D Gaussian truncated at `ceil(6σ)` taps (forced odd). Strengths that
/// round to a single tap yield the identity filter `[1.0]`.
pub fn gaussian_filter_1d(sigma: f64) -> Result<Vec<f64>> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParam(format!(
            "sigma must be finite and >= 0, got {sigma}"
        )));
    }
    Ok(gaussian_kernel(sigma, filter_length(sigma)))
}

/// Filters shared by all fragments of a frame plus the running-offset index
/// used to locate each filter in the flattened coefficient array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterBank {
    pub filters: Vec<Vec<f64>>,
    pub lengths: Vec<usize>,
    /// `lengths.len() + 1` entries: entry `i` is the offset of filter `i`,
    /// the last entry is the total coefficient count.
    pub cumulative_sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
}

impl FilterBank {
    /// Bank holding only the identity filter at index 0.
    pub fn identity() -> Self {
        Self::from_lengths(std::iter::empty())
    }

    /// Bank with the identity at index 0 followed by one filter per distinct
    /// length > 1, in ascending order.
    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Self {
        let mut distinct: Vec<usize> = lengths.into_iter().filter(|&l| l > 1).collect();
        distinct.sort_unstable();
        distinct.dedup();
        distinct.insert(0, 1);
        let sigmas: Vec<f64> = distinct
            .iter()
            .map(|&l| if l == 1 { 0.0 } else { representative_sigma(l) })
            .collect();
        let filters: Vec<Vec<f64>> = distinct
            .iter()
            .zip(&sigmas)
            .map(|(&l, &s)| gaussian_kernel(s, l))
            .collect();
        let mut cumulative_sizes = Vec::with_capacity(distinct.len() + 1);
        let mut acc = 0;
        cumulative_sizes.push(acc);
        for &l in &distinct {
            acc += l;
            cumulative_sizes.push(acc);
        }
        Self {
            filters,
            lengths: distinct,
            cumulative_sizes,
            sigmas,
        }
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn filter(&self, index: usize) -> &[f64] {
        &self.filters[index]
    }

    /// Index of the filter with exactly `length` taps.
    pub fn index_of_length(&self, length: usize) -> Option<usize> {
        self.lengths.binary_search(&length).ok()
    }

    /// All coefficients back to back, addressed through `cumulative_sizes`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.filters.iter().flatten().copied().collect()
    }

    pub fn max_length(&self) -> usize {
        self.lengths.last().copied().unwrap_or(1)
    }

    /// Plain-text table: index, length, σ, offset.
    pub fn to_table(&self) -> String {
        let mut out = String::from("index\tlength\tsigma\toffset\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{i}\t{}\t{:.6}\t{}\n",
                self.lengths[i], self.sigmas[i], self.cumulative_sizes[i]
            ));
        }
        out.push_str(&format!("total\t{}\n", total_coefficients(self)));
        out
    }
}

/// Quantizes a σ field by filter length. Returns the bank and, per cell, the
/// index of its filter.
pub fn build_bank(field: &SigmaField) -> (FilterBank, Vec<usize>) {
    let lengths: Vec<usize> = field.sigma.iter().map(|&s| filter_length(s)).collect();
    let bank = FilterBank::from_lengths(lengths.iter().copied());
    let lookup: BTreeMap<usize, usize> = bank
        .lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i))
        .collect();
    let indices = lengths.iter().map(|l| lookup[l]).collect();
    (bank, indices)
}

/// Total number of coefficients across the bank.
pub fn total_coefficients(bank: &FilterBank) -> usize {
    bank.lengths.iter().sum()
}
