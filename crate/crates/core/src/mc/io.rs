//! Ensemble export.
//!
//! CSV output has one row per path, time and statistic with the header
//! `path,t,stat,value`. Ensemble statistics are named `re_b[i,j]` and
//! `im_b[i,j]` (upper triangle including the diagonal; the rest follows from
//! hermiticity). Spectra statistics are `lambda[k,i]`, the `i`-th largest
//! eigenvalue of the order-`k` minor.
//!
//! The binary layout is little-endian throughout:
//!
//! | field     | type        |
//! |-----------|-------------|
//! | magic     | `b"HBME"`   |
//! | version   | `u32` = 1   |
//! | d         | `u32`       |
//! | n_times   | `u32`       |
//! | n_paths   | `u32`       |
//! | seed      | `u64`       |
//! | flags     | `u32`: bit 0 traceless, bit 1 unit-component normalization |
//! | times     | `n_times × f64` |
//! | entries   | `n_paths × n_times × d² × (re f64, im f64)`, row-major |

use std::io::{Read, Write};

use num_complex::Complex64;

use super::sample::{Normalization, PathEnsemble};
use super::spectra::MinorSpectra;
use crate::error::{AlgebraError, Result};

const MAGIC: &[u8; 4] = b"HBME";
const VERSION: u32 = 1;

fn csv_err(e: csv::Error) -> AlgebraError {
    AlgebraError::Io(e.to_string())
}

pub fn write_ensemble_csv<W: Write>(ens: &PathEnsemble, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path", "t", "stat", "value"]).map_err(csv_err)?;
    let d = ens.d();
    for p in 0..ens.n_paths() {
        for (ti, t) in ens.times().iter().enumerate() {
            let e = ens.entries(p, ti);
            for i in 0..d {
                for j in i..d {
                    let z = e[i * d + j];
                    let (ps, ts) = (p.to_string(), t.to_string());
                    w.write_record([&ps, &ts, &format!("re_b[{},{}]", i + 1, j + 1), &z.re.to_string()]).map_err(csv_err)?;
                    if i != j {
                        w.write_record([&ps, &ts, &format!("im_b[{},{}]", i + 1, j + 1), &z.im.to_string()]).map_err(csv_err)?;
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectra_csv<W: Write>(sp: &MinorSpectra, times: &[f64], out: W) -> Result<()> {
    if times.len() != sp.n_times() {
        return Err(AlgebraError::DimensionMismatch { expected: sp.n_times(), got: times.len() });
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path", "t", "stat", "value"]).map_err(csv_err)?;
    for p in 0..sp.n_paths() {
        for (ti, t) in times.iter().enumerate() {
            for (si, k) in sp.sizes().iter().enumerate() {
                for (i, v) in sp.eigenvalues(p, ti, si).iter().enumerate() {
                    w.write_record([p.to_string(), t.to_string(), format!("lambda[{k},{}]", i + 1), v.to_string()])
                        .map_err(csv_err)?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_ensemble_binary<W: Write>(ens: &PathEnsemble, mut out: W) -> Result<()> {
    let u32_of = |n: usize, what: &'static str| {
        u32::try_from(n).map_err(|_| AlgebraError::InvalidArgument(format!("{what} does not fit in u32")))
    };
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&u32_of(ens.d(), "d")?.to_le_bytes())?;
    out.write_all(&u32_of(ens.times().len(), "n_times")?.to_le_bytes())?;
    out.write_all(&u32_of(ens.n_paths(), "n_paths")?.to_le_bytes())?;
    out.write_all(&ens.seed().to_le_bytes())?;
    let mut flags = 0u32;
    if ens.traceless() {
        flags |= 1;
    }
    if ens.normalization() == Normalization::UnitComponents {
        flags |= 2;
    }
    out.write_all(&flags.to_le_bytes())?;
    for t in ens.times() {
        out.write_all(&t.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(ens.raw().len() * 16);
    for z in ens.raw() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_ensemble_binary<R: Read>(mut r: R) -> Result<PathEnsemble> {
    if &read_array::<4, _>(&mut r)? != MAGIC {
        return Err(AlgebraError::Io("not an ensemble file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(AlgebraError::Io(format!("unsupported ensemble format version {version}")));
    }
    let d = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let n_times = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let n_paths = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let seed = u64::from_le_bytes(read_array(&mut r)?);
    let flags = u32::from_le_bytes(read_array(&mut r)?);
    let times = (0..n_times).map(|_| Ok(f64::from_le_bytes(read_array(&mut r)?))).collect::<Result<Vec<_>>>()?;
    let n = n_paths * n_times * d * d;
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        let re = f64::from_le_bytes(read_array(&mut r)?);
        let im = f64::from_le_bytes(read_array(&mut r)?);
        data.push(Complex64::new(re, im));
    }
    let normalization = if flags & 2 != 0 { Normalization::UnitComponents } else { Normalization::TraceForm };
    Ok(PathEnsemble { d, times, n_paths, seed, traceless: flags & 1 != 0, normalization, data })
}
