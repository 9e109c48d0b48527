//! Desk-scale workbench for asymptotic density and generic computability.
//!
//! Everything in this crate is a pure function of its inputs and builds
//! without `std` (it needs `alloc`). Densities are exact rationals; the only
//! floating point lives inside [`density::strong_genericity_fit`], whose
//! least-squares step works in log space.
//!
//! * [`density`] prefix densities over ω and over finite alphabets.
//! * [`partition`] the `R_k` slices of ω − {0}, the `𝓡(A)` coding and the
//!   spread encoding over words.
//! * [`machines`] a fuel-bounded register machine universe giving `Φ_{e,s}`
//!   and `W_{e,s}`, optionally relative to an oracle.
//! * [`generic`] generic listings, c.e.-pair decision procedures and the
//!   limit-approximation coarse decoder.
//! * [`constructions`] stage-by-stage simulators for the effective
//!   constructions, with full event traces.
//! * [`eop`] enumeration operators, graph codes, joins and the reduction
//!   witnesses built from them.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod constructions;
pub mod density;
pub mod eop;
pub mod generic;
pub mod machines;
pub mod partition;

mod bits;
mod error;

pub use bits::Bitset;
pub use density::{DensityProfile, NatSetPrefix, WordSetPrefix};
pub use error::{Error, Result};

/// Exact rational used for every density value.
pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational.
pub fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(num.into(), den.into())
}
