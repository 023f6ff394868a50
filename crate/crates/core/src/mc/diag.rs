//! Exploratory check of the Markov property for minor eigenvalue processes.
//!
//! For `t1 < t2 < t3` the target `y = g(Λ(t3))` is regressed, within
//! quantile bins of `g(Λ(t2))`, on all eigenvalues at `t2` plus the single
//! extra feature `z = g(Λ(t1))`. Under the Markov property the standardized
//! coefficient of `z` should vanish. The pooled effect size comes with a
//! percentile bootstrap interval over paths. No verdict is drawn.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sample::PathEnsemble;
use super::spectra::{minor_spectra, MinorSpectra};
use crate::error::{AlgebraError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Largest eigenvalue of the largest requested minor.
    #[default]
    TopEigenvalue,
    BottomEigenvalue,
    /// Trace of the largest requested minor.
    Trace,
}

impl std::str::FromStr for Statistic {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "top" | "top_eigenvalue" => Ok(Statistic::TopEigenvalue),
            "bottom" | "bottom_eigenvalue" => Ok(Statistic::BottomEigenvalue),
            "trace" => Ok(Statistic::Trace),
            _ => Err(AlgebraError::InvalidArgument(format!("unknown statistic `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticConfig {
    pub statistic: Statistic,
    pub bins: usize,
    pub min_per_bin: usize,
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        DiagnosticConfig { statistic: Statistic::TopEigenvalue, bins: 4, min_per_bin: 50, bootstrap: 200, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BinReport {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `None` when the bin has too few samples for the regression.
    pub effect: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovReport {
    pub times: [f64; 3],
    pub sizes: Vec<usize>,
    pub statistic: Statistic,
    pub n_paths: usize,
    pub bins: Vec<BinReport>,
    pub insufficient_bins: usize,
    /// Pooled standardized coefficient of `g(Λ(t1))`.
    pub effect: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub bootstrap: usize,
}

impl MarkovReport {
    /// True when the bootstrap interval covers zero.
    pub fn consistent_with_zero(&self) -> Option<bool> {
        Some(self.ci_low? <= 0.0 && 0.0 <= self.ci_high?)
    }
}

struct Data {
    y: Vec<f64>,
    z: Vec<f64>,
    x: Vec<Vec<f64>>,
    bin: Vec<usize>,
}

fn stat(sp: &MinorSpectra, path: usize, time: usize, g: Statistic) -> f64 {
    let last = sp.sizes().len() - 1;
    let ev = sp.eigenvalues(path, time, last);
    match g {
        Statistic::TopEigenvalue => ev[0],
        Statistic::BottomEigenvalue => ev[ev.len() - 1],
        Statistic::Trace => ev.iter().sum(),
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt()
}

/// Standardized least-squares coefficient of `z` in `y ~ 1 + x + z`.
fn bin_effect(data: &Data, idx: &[usize]) -> Option<f64> {
    let k = data.x[0].len() + 2;
    let n = idx.len();
    let mut xm = DMatrix::<f64>::zeros(n, k);
    let mut yv = DVector::<f64>::zeros(n);
    for (r, &p) in idx.iter().enumerate() {
        xm[(r, 0)] = 1.0;
        for (c, v) in data.x[p].iter().enumerate() {
            xm[(r, c + 1)] = *v;
        }
        xm[(r, k - 1)] = data.z[p];
        yv[r] = data.y[p];
    }
    let a = xm.transpose() * &xm;
    let b = xm.transpose() * &yv;
    let svd = a.svd(true, true);
    let eps = 1e-10 * svd.singular_values.max();
    let beta = svd.solve(&b, eps).ok()?;
    let zs: Vec<f64> = idx.iter().map(|&p| data.z[p]).collect();
    let ys: Vec<f64> = idx.iter().map(|&p| data.y[p]).collect();
    let (sz, sy) = (std_dev(&zs), std_dev(&ys));
    (sz > 0.0 && sy > 0.0).then(|| beta[k - 1] * sz / sy)
}

/// Pooled effect over bins for the given multiset of paths.
fn pooled(data: &Data, paths: &[usize], n_bins: usize, min: usize, per_bin: Option<&mut Vec<BinReport>>) -> Option<f64> {
    let mut groups = vec![Vec::new(); n_bins];
    for &p in paths {
        groups[data.bin[p]].push(p);
    }
    let need = min.max(data.x[0].len() + 4);
    let mut acc = 0.0;
    let mut weight = 0usize;
    let mut effects = Vec::with_capacity(n_bins);
    for g in &groups {
        let e = if g.len() >= need { bin_effect(data, g) } else { None };
        if let Some(v) = e {
            acc += v * g.len() as f64;
            weight += g.len();
        }
        effects.push((g.len(), e));
    }
    if let Some(out) = per_bin {
        for (b, (count, e)) in out.iter_mut().zip(effects) {
            b.count = count;
            b.effect = e;
        }
    }
    (weight > 0).then(|| acc / weight as f64)
}

pub fn markov_diagnostic(ens: &PathEnsemble, sizes: &[usize], times: [f64; 3], cfg: &DiagnosticConfig) -> Result<MarkovReport> {
    if !(times[0] < times[1] && times[1] < times[2]) {
        return Err(AlgebraError::InvalidGrid("diagnostic times must satisfy t1 < t2 < t3".into()));
    }
    let idx = times
        .iter()
        .map(|&t| ens.time_index(t).ok_or_else(|| AlgebraError::InvalidGrid(format!("time {t} is not on the grid"))))
        .collect::<Result<Vec<_>>>()?;
    if cfg.bins == 0 {
        return Err(AlgebraError::InvalidArgument("need at least one bin".into()));
    }
    let sp = minor_spectra(ens, sizes)?;
    let n = ens.n_paths();
    let g = cfg.statistic;
    let s2: Vec<f64> = (0..n).map(|p| stat(&sp, p, idx[1], g)).collect();
    let mut sorted = s2.clone();
    sorted.sort_by(f64::total_cmp);
    let edges: Vec<f64> = (1..cfg.bins).map(|b| sorted[(b * n / cfg.bins).min(n - 1)]).collect();
    let bin_of = |v: f64| edges.iter().take_while(|&&e| v >= e).count();
    let data = Data {
        y: (0..n).map(|p| stat(&sp, p, idx[2], g)).collect(),
        z: (0..n).map(|p| stat(&sp, p, idx[0], g)).collect(),
        x: (0..n).map(|p| sp.sample_values(p, idx[1]).to_vec()).collect(),
        bin: s2.iter().map(|&v| bin_of(v)).collect(),
    };
    let mut bins: Vec<BinReport> = (0..cfg.bins)
        .map(|b| BinReport {
            lo: if b == 0 { f64::NEG_INFINITY } else { edges[b - 1] },
            hi: if b + 1 == cfg.bins { f64::INFINITY } else { edges[b] },
            count: 0,
            effect: None,
        })
        .collect();
    let all: Vec<usize> = (0..n).collect();
    let effect = pooled(&data, &all, cfg.bins, cfg.min_per_bin, Some(&mut bins));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut boot = Vec::with_capacity(cfg.bootstrap);
    for _ in 0..cfg.bootstrap {
        let resample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        if let Some(e) = pooled(&data, &resample, cfg.bins, cfg.min_per_bin, None) {
            boot.push(e);
        }
    }
    boot.sort_by(f64::total_cmp);
    let pct = |q: f64| (!boot.is_empty()).then(|| boot[((q * (boot.len() - 1) as f64).round()) as usize]);
    Ok(MarkovReport {
        times,
        sizes: sp.sizes().to_vec(),
        statistic: g,
        n_paths: n,
        insufficient_bins: bins.iter().filter(|b| b.effect.is_none()).count(),
        bins,
        effect,
        ci_low: pct(0.025),
        ci_high: pct(0.975),
        bootstrap: boot.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::sample::sample_hbm;

    #[test]
    fn single_matrix_effect_near_zero() {
        let ens = sample_hbm(2, &[0.5, 1.0, 1.5], 4000, 21, false).unwrap();
        let cfg = DiagnosticConfig { bootstrap: 100, ..Default::default() };
        let r = markov_diagnostic(&ens, &[2], [0.5, 1.0, 1.5], &cfg).unwrap();
        assert_eq!(r.bins.iter().map(|b| b.count).sum::<usize>(), 4000);
        assert_eq!(r.consistent_with_zero(), Some(true), "{r:?}");
    }

    #[test]
    fn two_consecutive_minors() {
        let ens = sample_hbm(3, &[0.5, 1.0, 1.5], 4000, 8, false).unwrap();
        let cfg = DiagnosticConfig { bootstrap: 100, seed: 4, ..Default::default() };
        let r = markov_diagnostic(&ens, &[2, 3], [0.5, 1.0, 1.5], &cfg).unwrap();
        assert_eq!(r.insufficient_bins, 0);
        assert_eq!(r.consistent_with_zero(), Some(true), "{r:?}");
    }

    #[test]
    fn reports_small_bins() {
        let ens = sample_hbm(3, &[0.5, 1.0, 1.5], 40, 1, false).unwrap();
        let cfg = DiagnosticConfig { bootstrap: 10, ..Default::default() };
        let r = markov_diagnostic(&ens, &[2, 3], [0.5, 1.0, 1.5], &cfg).unwrap();
        assert_eq!(r.insufficient_bins, 4);
        assert!(r.effect.is_none());
        assert!(markov_diagnostic(&ens, &[3], [1.0, 0.5, 1.5], &cfg).is_err());
        assert!(markov_diagnostic(&ens, &[3], [0.5, 1.0, 2.0], &cfg).is_err());
    }
}
