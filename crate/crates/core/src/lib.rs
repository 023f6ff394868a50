//! Exact computer algebra for the universal enveloping algebra `U(gl_d)`
//! and the quantum Markov chain built from its coproduct, together with
//! the commutative side: Itô calculus on polynomial functions of Hermitian
//! Brownian motion and Monte-Carlo minor spectra.

pub mod blocks;
pub mod comm;
pub mod error;
pub mod factor;
pub mod hopf;
pub mod ito;
pub mod matrix;
pub mod mc;
pub mod pbw;
pub mod rep;
pub mod scalar;
pub mod span;

pub use error::{AlgebraError, Result};
pub use matrix::DenseMatrix;
pub use pbw::{Algebra, Generator, GeneratorId, Monomial, UeaElement};
pub use scalar::{Rational, Scalar};
