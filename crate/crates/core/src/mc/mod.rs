//! Monte-Carlo wing: Hermitian Brownian motion paths, minor spectra with
//! interlacing checks, a Markov-property diagnostic, and export.

mod diag;
mod io;
mod qv;
mod sample;
mod spectra;

pub use diag::{markov_diagnostic, BinReport, DiagnosticConfig, MarkovReport, Statistic};
pub use io::{read_ensemble_binary, write_ensemble_binary, write_ensemble_csv, write_spectra_csv};
pub use qv::{quadratic_variation_check, QvCheck};
pub use sample::{
    mean_and_se, path_rng, sample_hbm, sample_hbm_with, validate_grid, HermitianSample, Normalization, PathEnsemble,
};
pub use spectra::{
    interlacing_violation, minor_eigenvalues, minor_spectra, minor_spectra_tol, InterlacingReport, MinorSpectra,
    INTERLACING_TOL,
};
