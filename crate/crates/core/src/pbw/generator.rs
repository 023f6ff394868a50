use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};

/// A Lie-algebra generator of `gl_d` in the basis `{e_ij (i≠j), h_k, c}`,
/// with 1-based indices. `h_k = e_kk − e_{k+1,k+1}` and `c = Σ e_ii`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    OffDiag(usize, usize),
    Cartan(usize),
    Central,
}

impl Generator {
    pub fn validate(self, d: usize) -> Result<Self> {
        match self {
            Generator::OffDiag(i, j) => {
                for k in [i, j] {
                    if k == 0 || k > d {
                        return Err(AlgebraError::IndexOutOfRange { what: "e[i,j]", index: k, bound: d });
                    }
                }
                if i == j {
                    return Err(AlgebraError::DiagonalOffDiag(i));
                }
            }
            Generator::Cartan(k) => {
                if k == 0 || k >= d {
                    return Err(AlgebraError::IndexOutOfRange { what: "h[i]", index: k, bound: d - 1 });
                }
            }
            Generator::Central => {}
        }
        Ok(self)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::OffDiag(i, j) => write!(f, "e[{i},{j}]"),
            Generator::Cartan(k) => write!(f, "h[{k}]"),
            Generator::Central => write!(f, "c"),
        }
    }
}

/// The fixed PBW order for rank `d`: raising `e_ij (i<j)` lexicographically,
/// then `h_1..h_{d−1}`, then `c`, then lowering `e_ij (i>j)` lexicographically.
pub fn pbw_order(d: usize) -> Vec<Generator> {
    let mut out = Vec::with_capacity(d * d);
    for i in 1..=d {
        for j in (i + 1)..=d {
            out.push(Generator::OffDiag(i, j));
        }
    }
    for k in 1..d {
        out.push(Generator::Cartan(k));
    }
    out.push(Generator::Central);
    for i in 1..=d {
        for j in 1..i {
            out.push(Generator::OffDiag(i, j));
        }
    }
    out
}

/// Position of a generator in [`pbw_order`].
pub fn pbw_index(d: usize, g: Generator) -> usize {
    let raising = d * (d - 1) / 2;
    match g {
        Generator::OffDiag(i, j) if i < j => {
            // rows 1..i-1 contribute (d - r) entries each
            let before: usize = (1..i).map(|r| d - r).sum();
            before + (j - i - 1)
        }
        Generator::Cartan(k) => raising + k - 1,
        Generator::Central => raising + d - 1,
        Generator::OffDiag(i, j) => {
            let before: usize = (1..i).map(|r| r - 1).sum();
            raising + d + before + (j - 1)
        }
    }
}
