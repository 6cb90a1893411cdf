use thiserror::Error;

use crate::fourier::Mode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// `k·α` vanished (to the resonance threshold) for a scanned lattice point.
    #[error("rational resonance at p = {witness:?} (|p·α| = {value:e})")]
    Resonance { witness: Mode, value: f64 },

    /// A cohomological equation has no smooth solution for this data: the
    /// listed frequencies carry nonzero coefficients on (near-)zero divisors.
    #[error("obstructed: {} resonant frequencies, first {:?}", resonant.len(), resonant.first())]
    Obstructed { resonant: Vec<Mode> },

    #[error("aliasing: mode {mode:?} does not fit the grid {sizes:?}")]
    Aliasing { mode: Mode, sizes: Vec<usize> },

    #[error("series is not real: imaginary residue {residue:e}")]
    NonReal { residue: f64 },

    #[error("incomplete sum: truncation K = {given} but the series needs K >= {required}")]
    IncompleteSum { given: u64, required: u64 },

    #[error("support overflow in pullback: dropped tail with l1 norm <= {tail_bound:e}")]
    SupportOverflow { tail_bound: f64 },

    #[error("singular matrix (det = {det:e})")]
    Singular { det: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("invalid lift: {0}")]
    InvalidLift(String),

    #[error("quadrature not converged: node-doubling difference {difference:e} > {tolerance:e}")]
    Refine { difference: f64, tolerance: f64 },
}

impl Error {
    /// Verdicts about the input data (as opposed to bad arguments or crashes).
    pub fn is_obstruction(&self) -> bool {
        matches!(self, Error::Resonance { .. } | Error::Obstructed { .. })
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
