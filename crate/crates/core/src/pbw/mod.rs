//! `U(gl_d)` in PBW normal form.

mod algebra;
mod element;
mod generator;
mod monomial;

pub use algebra::{Algebra, GeneratorId};
pub use element::UeaElement;
pub(crate) use element::{add_term, write_coeff_term};
pub use generator::{pbw_index, pbw_order, Generator};
pub use monomial::Monomial;
