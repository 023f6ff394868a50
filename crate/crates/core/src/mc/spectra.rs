use serde::Serialize;

use super::sample::{HermitianSample, PathEnsemble};
use crate::error::{AlgebraError, Result};

pub const INTERLACING_TOL: f64 = 1e-10;

/// Sorted (descending) eigenvalues of leading principal minors.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorSpectra {
    sizes: Vec<usize>,
    n_paths: usize,
    n_times: usize,
    /// `[path][time][size]` blocks, each of length `size`.
    values: Vec<f64>,
    stride: usize,
    pub interlacing: InterlacingReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterlacingReport {
    pub tolerance: f64,
    /// Number of (path, time) samples checked.
    pub checked: usize,
    pub violations: usize,
    pub max_violation: f64,
}

impl InterlacingReport {
    pub fn pass_rate(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            1.0 - self.violations as f64 / self.checked as f64
        }
    }
}

impl MinorSpectra {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn eigenvalues(&self, path: usize, time: usize, size_idx: usize) -> &[f64] {
        let base = (path * self.n_times + time) * self.stride;
        let off: usize = self.sizes[..size_idx].iter().sum();
        &self.values[base + off..base + off + self.sizes[size_idx]]
    }

    /// All minors at one sample, concatenated in size order.
    pub fn sample_values(&self, path: usize, time: usize) -> &[f64] {
        let base = (path * self.n_times + time) * self.stride;
        &self.values[base..base + self.stride]
    }
}

/// Descending eigenvalues of the leading `k × k` minor.
pub fn minor_eigenvalues(s: &HermitianSample, k: usize) -> Vec<f64> {
    let mut ev: Vec<f64> = s.minor(k).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Largest violation of `λ_i^{(k)} ≥ λ_i^{(m)} ≥ λ_{i+k−m}^{(k)}` for
/// descending spectra of orders `m < k`; zero when interlaced.
pub fn interlacing_violation(big: &[f64], small: &[f64]) -> f64 {
    let (k, m) = (big.len(), small.len());
    let mut worst: f64 = 0.0;
    for i in 0..m {
        worst = worst.max(small[i] - big[i]);
        worst = worst.max(big[i + k - m] - small[i]);
    }
    worst
}

/// Spectra of the requested minors at every grid time, with a Cauchy
/// interlacing check between consecutive requested orders.
pub fn minor_spectra(ens: &PathEnsemble, sizes: &[usize]) -> Result<MinorSpectra> {
    minor_spectra_tol(ens, sizes, INTERLACING_TOL)
}

pub fn minor_spectra_tol(ens: &PathEnsemble, sizes: &[usize], tolerance: f64) -> Result<MinorSpectra> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(AlgebraError::InvalidArgument("no minor sizes requested".into()));
    }
    if let Some(&bad) = sizes.iter().find(|&&k| k == 0 || k > ens.d()) {
        return Err(AlgebraError::IndexOutOfRange { what: "minor order", index: bad, bound: ens.d() });
    }
    let stride: usize = sizes.iter().sum();
    let n_times = ens.times().len();
    let mut values = Vec::with_capacity(ens.n_paths() * n_times * stride);
    let mut report = InterlacingReport { tolerance, checked: 0, violations: 0, max_violation: 0.0 };
    for p in 0..ens.n_paths() {
        for t in 0..n_times {
            let s = ens.sample(p, t);
            let start = values.len();
            for &k in &sizes {
                values.extend(minor_eigenvalues(&s, k));
            }
            let block = &values[start..];
            let scale = block.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
            let mut off = 0;
            let mut worst: f64 = 0.0;
            for w in sizes.windows(2) {
                let small = &block[off..off + w[0]];
                let big = &block[off + w[0]..off + w[0] + w[1]];
                worst = worst.max(interlacing_violation(big, small));
                off += w[0];
            }
            if sizes.len() > 1 {
                report.checked += 1;
                if worst > tolerance * scale {
                    report.violations += 1;
                }
                report.max_violation = report.max_violation.max(worst);
            }
        }
    }
    Ok(MinorSpectra { sizes, n_paths: ens.n_paths(), n_times, values, stride, interlacing: report })
}
