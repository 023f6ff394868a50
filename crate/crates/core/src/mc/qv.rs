use num_complex::Complex64;
use serde::Serialize;

use super::sample::{add_increment, path_rng, Normalization};
use crate::comm::CommPoly;
use crate::error::{AlgebraError, Result};
use crate::ito::ito_covar;

/// Realized versus predicted quadratic covariation along one fine path.
#[derive(Clone, Debug, Serialize)]
pub struct QvCheck {
    pub steps: usize,
    pub horizon: f64,
    /// `Σ Δf · Δh` over the path.
    pub realized: f64,
    /// Left-point Riemann sum of `ito_covar(f, h)(B_t) dt`.
    pub predicted: f64,
    pub rel_error: f64,
}

/// Simulates one path of `B` on `[0, horizon]` with `steps` exact increments
/// and compares the realized covariation of `f(B)` and `h(B)` with the
/// symbolic rate.
pub fn quadratic_variation_check(f: &CommPoly, h: &CommPoly, horizon: f64, steps: usize, seed: u64) -> Result<QvCheck> {
    if f.rank() != h.rank() {
        return Err(AlgebraError::RankMismatch(f.rank(), h.rank()));
    }
    if steps == 0 || !horizon.is_finite() || horizon <= 0.0 {
        return Err(AlgebraError::InvalidGrid("need a positive horizon and at least one step".into()));
    }
    let d = f.rank();
    let rate = ito_covar(f, h)?;
    let dt = horizon / steps as f64;
    let mut rng = path_rng(seed, 0);
    let mut b = vec![Complex64::new(0.0, 0.0); d * d];
    let (mut fv, mut hv) = (f.eval(&b)?.re, h.eval(&b)?.re);
    let (mut realized, mut predicted) = (0.0, 0.0);
    for _ in 0..steps {
        predicted += rate.eval(&b)?.re * dt;
        add_increment(&mut b, d, dt, Normalization::TraceForm, &mut rng);
        let (fn_, hn) = (f.eval(&b)?.re, h.eval(&b)?.re);
        realized += (fn_ - fv) * (hn - hv);
        fv = fn_;
        hv = hn;
    }
    let rel_error = (realized - predicted).abs() / predicted.abs().max(f64::MIN_POSITIVE);
    Ok(QvCheck { steps, horizon, realized, predicted, rel_error })
}
