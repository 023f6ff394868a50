use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Scale of the Gaussian increments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `Cov(b_ij, b_kl) = δ_il δ_jk t`, from the scalar product `Tr(MN)`:
    /// diagonal variance `t`, off-diagonal real and imaginary parts `t/2`.
    #[default]
    TraceForm,
    /// Independent standard components on the Hermitian basis
    /// `E_ii, E_ij + E_ji, i(E_ji − E_ij)`: every real coordinate has
    /// variance `t`.
    UnitComponents,
}

/// A Hermitian matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianSample {
    d: usize,
    data: Vec<Complex64>,
}

impl HermitianSample {
    pub fn new(d: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != d * d {
            return Err(AlgebraError::DimensionMismatch { expected: d * d, got: data.len() });
        }
        let scale = data.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..d {
            for j in i..d {
                if (data[i * d + j] - data[j * d + i].conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(AlgebraError::InvalidArgument(format!("entry ({},{}) breaks hermiticity", i + 1, j + 1)));
                }
            }
        }
        Ok(HermitianSample { d, data })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.d + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.data[i * self.d + i].re).sum()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.d, self.d, &self.data)
    }

    /// Leading principal `k × k` minor.
    pub fn minor(&self, k: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(k, k, |i, j| self.get(i, j))
    }
}

/// Sampled Brownian paths on the Hermitian matrices at fixed grid times.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    pub(crate) d: usize,
    pub(crate) times: Vec<f64>,
    pub(crate) n_paths: usize,
    pub(crate) seed: u64,
    pub(crate) traceless: bool,
    pub(crate) normalization: Normalization,
    /// `[path][time][i * d + j]`, flattened.
    pub(crate) data: Vec<Complex64>,
}

impl PathEnsemble {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn traceless(&self) -> bool {
        self.traceless
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.data
    }

    /// Row-major entries of path `path` at grid index `time`.
    pub fn entries(&self, path: usize, time: usize) -> &[Complex64] {
        let dd = self.d * self.d;
        let off = (path * self.times.len() + time) * dd;
        &self.data[off..off + dd]
    }

    pub fn sample(&self, path: usize, time: usize) -> HermitianSample {
        HermitianSample { d: self.d, data: self.entries(path, time).to_vec() }
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

pub fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(AlgebraError::InvalidGrid("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(AlgebraError::InvalidGrid("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AlgebraError::InvalidGrid("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Per-path generator: the master seed fixes the key, the path index picks
/// the stream, so paths do not depend on each other or on evaluation order.
pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Adds one exact Gaussian increment over a step of length `dt`.
pub(crate) fn add_increment(b: &mut [Complex64], d: usize, dt: f64, norm: Normalization, rng: &mut ChaCha8Rng) {
    if dt == 0.0 {
        return;
    }
    let diag = Normal::new(0.0, dt.sqrt()).expect("positive variance");
    let off_sd = match norm {
        Normalization::TraceForm => (dt / 2.0).sqrt(),
        Normalization::UnitComponents => dt.sqrt(),
    };
    let off = Normal::new(0.0, off_sd).expect("positive variance");
    for i in 0..d {
        b[i * d + i] += Complex64::new(diag.sample(rng), 0.0);
        for j in i + 1..d {
            let z = Complex64::new(off.sample(rng), off.sample(rng));
            b[i * d + j] += z;
            b[j * d + i] += z.conj();
        }
    }
}

pub(crate) fn project_traceless(b: &[Complex64], d: usize) -> Vec<Complex64> {
    let mean = (0..d).map(|i| b[i * d + i].re).sum::<f64>() / d as f64;
    let mut out = b.to_vec();
    for i in 0..d {
        out[i * d + i] -= Complex64::new(mean, 0.0);
    }
    out
}

/// Samples `paths` Brownian paths started at `0` on the grid `times`.
pub fn sample_hbm(d: usize, times: &[f64], paths: usize, seed: u64, traceless: bool) -> Result<PathEnsemble> {
    sample_hbm_with(d, times, paths, seed, traceless, Normalization::TraceForm)
}

pub fn sample_hbm_with(
    d: usize,
    times: &[f64],
    paths: usize,
    seed: u64,
    traceless: bool,
    normalization: Normalization,
) -> Result<PathEnsemble> {
    validate_grid(times)?;
    if d == 0 || paths == 0 {
        return Err(AlgebraError::InvalidArgument("need d >= 1 and at least one path".into()));
    }
    let dd = d * d;
    let mut data = Vec::with_capacity(paths * times.len() * dd);
    for path in 0..paths {
        let mut rng = path_rng(seed, path);
        let mut b = vec![Complex64::new(0.0, 0.0); dd];
        let mut prev = 0.0;
        for &t in times {
            add_increment(&mut b, d, t - prev, normalization, &mut rng);
            prev = t;
            if traceless {
                data.extend(project_traceless(&b, d));
            } else {
                data.extend_from_slice(&b);
            }
        }
    }
    Ok(PathEnsemble { d, times: times.to_vec(), n_paths: paths, seed, traceless, normalization, data })
}

/// Mean and standard error of a sample.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[1.0, 1.0]).is_err());
        assert!(validate_grid(&[-1.0]).is_err());
        assert!(validate_grid(&[0.0, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn samples_are_hermitian_and_deterministic() {
        let a = sample_hbm(3, &[0.5, 1.0], 20, 11, false).unwrap();
        let b = sample_hbm(3, &[0.5, 1.0], 20, 11, false).unwrap();
        assert_eq!(a, b);
        for p in 0..20 {
            assert!(HermitianSample::new(3, a.entries(p, 1).to_vec()).is_ok());
        }
        let c = sample_hbm(3, &[0.5, 1.0], 20, 12, false).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn traceless_paths() {
        let e = sample_hbm(4, &[0.3, 1.0], 50, 3, true).unwrap();
        for p in 0..50 {
            for t in 0..2 {
                assert!(e.sample(p, t).trace().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        assert!(HermitianSample::new(2, vec![one, i, i, one]).is_err());
        assert!(HermitianSample::new(2, vec![one, i, -i, one]).is_ok());
    }

    #[test]
    fn entry_moments() {
        let e = sample_hbm(2, &[1.0], 20_000, 5, false).unwrap();
        let b11: Vec<f64> = (0..e.n_paths()).map(|p| e.entries(p, 0)[0].re.powi(2)).collect();
        let (m, se) = mean_and_se(&b11);
        assert!((m - 1.0).abs() < 4.0 * se);
        let e = sample_hbm_with(2, &[1.0], 20_000, 5, false, Normalization::UnitComponents).unwrap();
        let off: Vec<f64> = (0..e.n_paths()).map(|p| e.entries(p, 0)[1].norm_sqr()).collect();
        let (m, se) = mean_and_se(&off);
        assert!((m - 2.0).abs() < 4.0 * se);
    }
}
