//! A computable set whose density is the limit of a computable sequence of
//! rationals in `(0,1)`.
//!
//! Starting from `s_1 = 1` with `A↾1 = {0}`, each step either appends the
//! fewest new elements that lift the running fraction `|A↾s|/(s+1)` to at
//! least `q_{n+1}`, or appends the fewest non-elements that drop it below.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, Zero};

use crate::{Bitset, Error, NatSetPrefix, Rational, Result};

/// `n ↦ q_n` for `n ≥ 1`.
pub trait RationalSeq {
    fn term(&self, n: u64) -> Rational;
}

impl<F: Fn(u64) -> Rational> RationalSeq for F {
    fn term(&self, n: u64) -> Rational {
        self(n)
    }
}

/// `q_n = q` for every `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constant(pub Rational);

impl RationalSeq for Constant {
    fn term(&self, _n: u64) -> Rational {
        self.0.clone()
    }
}

/// `q_n = ⌊10^n · x⌋ / 10^n`, the n-digit decimal truncation of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalTruncations(pub Rational);

impl RationalSeq for DecimalTruncations {
    fn term(&self, n: u64) -> Rational {
        let scale = BigInt::from(BigUint::from(10u8).pow(n));
        let scaled = (&self.0 * Rational::from_integer(scale.clone())).floor();
        scaled / Rational::from_integer(scale)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Delta02Build {
    /// `A ∩ [0, s_N]`.
    pub set: NatSetPrefix,
    /// `s_1, …, s_N`.
    pub checkpoints: Vec<u64>,
    /// `|A↾s_n|` alongside each checkpoint.
    pub counts: Vec<u64>,
}

impl Delta02Build {
    /// `|A↾s_n| / (s_n + 1)` for `n ≥ 1`.
    pub fn fraction(&self, n: u64) -> Option<Rational> {
        let i = usize::try_from(n.checked_sub(1)?).ok()?;
        let s = *self.checkpoints.get(i)?;
        Some(Rational::new(self.counts[i].into(), (s + 1).into()))
    }
}

/// Runs the builder for `n = 1..=steps`.
pub fn delta02_density_set(q: &impl RationalSeq, steps: u64) -> Result<Delta02Build> {
    let mut bits = Bitset::new(2);
    bits.set(0, true);
    let mut s: u64 = 1;
    let mut count: u64 = 1;
    let mut checkpoints = Vec::with_capacity(steps as usize);
    let mut counts = Vec::with_capacity(steps as usize);
    if steps == 0 {
        return Ok(Delta02Build { set: NatSetPrefix::from_bitset(bits), checkpoints, counts });
    }
    check_term(&q.term(1), 1)?;
    checkpoints.push(s);
    counts.push(count);
    for n in 1..steps {
        let target = q.term(n + 1);
        check_term(&target, n + 1)?;
        let (num, den) = (target.numer().clone(), target.denom().clone());
        // c/(s+1) < num/den  ⇔  c·den < num·(s+1)
        let below = BigInt::from(count) * &den < &num * BigInt::from(s + 1);
        let mut k: u64 = 1;
        if below {
            while BigInt::from(count + k) * &den < &num * BigInt::from(s + k + 1) {
                k += 1;
            }
            bits.grow(s + k + 1);
            for m in s + 1..=s + k {
                bits.set(m, true);
            }
            count += k;
        } else {
            while BigInt::from(count) * &den >= &num * BigInt::from(s + k + 1) {
                k += 1;
            }
            bits.grow(s + k + 1);
        }
        s += k;
        checkpoints.push(s);
        counts.push(count);
    }
    Ok(Delta02Build { set: NatSetPrefix::from_bitset(bits), checkpoints, counts })
}

fn check_term(q: &Rational, n: u64) -> Result<()> {
    if q.is_positive() && *q < Rational::one() && !q.is_zero() {
        Ok(())
    } else {
        Err(Error::arg(alloc::format!("q_{n} = {q} is not strictly between 0 and 1")))
    }
}
