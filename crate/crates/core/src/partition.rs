//! The slices `R_k = {m ≥ 1 : 2^k ∣ m, 2^{k+1} ∤ m}` and the codings built on them.
//!
//! Every `m ≥ 1` lies in exactly one slice (its 2-adic valuation) and
//! `ρ(R_k) = 2^{-(k+1)}`. `𝓡(A) = ⋃_{n∈A} R_n` spreads each bit `A(n)` over a
//! set of positive density, which is what makes the bit recoverable from any
//! generic description.

use alloc::vec::Vec;

use crate::generic::GenericListing;
use crate::{Error, NatSetPrefix, Result, WordSetPrefix};

/// Index of the slice `R_k` holding `m`.
pub fn r_index(m: u64) -> Result<u32> {
    if m == 0 {
        return Err(Error::arg("0 lies in no slice R_k"));
    }
    Ok(m.trailing_zeros())
}

pub fn in_slice(k: u32, m: u64) -> bool {
    m != 0 && m.trailing_zeros() == k
}

/// The `x`-th element of `R_k` in increasing order, `2^k (2x+1)`, or `None`
/// when it does not fit in a `u64`.
pub fn checked_f_enum(k: u32, x: u64) -> Option<u64> {
    let odd = x.checked_mul(2)?.checked_add(1)?;
    if k >= 64 || odd.leading_zeros() < k {
        return None;
    }
    Some(odd << k)
}

/// The `x`-th element of `R_k` in increasing order.
///
/// Panics when `2^k (2x+1)` overflows a `u64`; see [`checked_f_enum`].
pub fn f_enum(k: u32, x: u64) -> u64 {
    checked_f_enum(k, x).unwrap_or_else(|| panic!("f_enum({k}, {x}) overflows u64"))
}

/// Inverse of [`f_enum`]: `m = f_enum(k, x)`.
pub fn slice_position(m: u64) -> Option<(u32, u64)> {
    if m == 0 {
        return None;
    }
    let k = m.trailing_zeros();
    Some((k, (m >> k) >> 1))
}

/// Membership of `𝓡(A)` for a set `A` given by its characteristic function.
#[derive(Clone, Copy, Debug)]
pub struct CodedSet<F> {
    base: F,
}

impl<F: Fn(u64) -> bool> CodedSet<F> {
    pub fn new(base: F) -> Self {
        CodedSet { base }
    }

    pub fn contains(&self, m: u64) -> bool {
        m != 0 && (self.base)(m.trailing_zeros() as u64)
    }

    pub fn base_contains(&self, n: u64) -> bool {
        (self.base)(n)
    }
}

/// `𝓡(A) ∩ [0, bound)`.
pub fn encode_r(a: impl Fn(u64) -> bool, bound: u64) -> NatSetPrefix {
    match try_encode_r(|n| Ok::<_, core::convert::Infallible>(a(n)), bound) {
        Ok(set) => set,
        Err(never) => match never {},
    }
}

/// `𝓡(A) ∩ [0, bound)` for a fallible membership source. `A` is asked only
/// about `0 ..= ⌊log₂(bound−1)⌋`, each point once; the first failure is returned.
pub fn try_encode_r<E>(
    mut a: impl FnMut(u64) -> core::result::Result<bool, E>,
    bound: u64,
) -> core::result::Result<NatSetPrefix, E> {
    let top = if bound <= 1 { 0 } else { 64 - (bound - 1).leading_zeros() };
    let mut bits = Vec::with_capacity(top as usize);
    for k in 0..top {
        bits.push(a(k as u64)?);
    }
    Ok(NatSetPrefix::from_fn(bound, |m| m != 0 && bits[m.trailing_zeros() as usize]))
}

/// Reads a generic listing of `𝓡(A)` until some pair `(m, b)` with `m ∈ R_n`
/// shows up and returns `b`, which is `A(n)` when the listing is correct.
///
/// At most `budget` pairs are consumed by this call.
pub fn decode_r<I>(listing: &mut GenericListing<I>, n: u32, budget: u64) -> Result<bool>
where
    I: Iterator<Item = (u64, bool)>,
{
    for _ in 0..budget {
        match listing.next_pair()? {
            Some((m, b)) if in_slice(n, m) => return Ok(b),
            Some(_) => {}
            None => break,
        }
    }
    Err(Error::BudgetExceeded(budget))
}

/// Default consumption budget for listing decoders.
pub const DEFAULT_DECODE_BUDGET: u64 = 1 << 22;

/// `𝓡({i : b_i = 1}) ∩ [0, bound)` for the binary expansion `.b_0 b_1 …` of a
/// real in `[0,1]`. Its density tends to the real.
pub fn density_real_to_set(bits: impl IntoIterator<Item = bool>, bound: u64) -> NatSetPrefix {
    let top = if bound <= 1 { 0 } else { 64 - (bound - 1).leading_zeros() } as usize;
    let mut digits: Vec<bool> = bits.into_iter().take(top).collect();
    digits.resize(top, false);
    encode_r(|n| digits[n as usize], bound)
}

/// The spread encoding `T = {0^n 1 w : n ∈ A, w ∈ {0,1}*}` up to length `max_len`.
pub fn spread_encode(a: impl Fn(u64) -> bool, max_len: u32) -> Result<WordSetPrefix> {
    WordSetPrefix::from_fn(2, max_len, |w| match w.iter().position(|&c| c == 1) {
        Some(n) => a(n as u64),
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{prefix_density, word_prefix_density};
    use crate::generic::listings;
    use crate::{ratio, Rational};
    use alloc::vec;
    use num_traits::{Signed, Zero};

    #[test]
    fn r_index_examples() {
        assert_eq!(r_index(12).unwrap(), 2);
        assert_eq!(r_index(1).unwrap(), 0);
        assert_eq!(r_index(96).unwrap(), 5);
        assert!(matches!(r_index(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn f_enum_examples() {
        assert_eq!(f_enum(2, 0), 4);
        assert_eq!(f_enum(2, 2), 20);
        assert_eq!(f_enum(0, 7), 15);
        assert_eq!(checked_f_enum(63, 0), Some(1 << 63));
        assert_eq!(checked_f_enum(63, 1), None);
        assert_eq!(checked_f_enum(64, 0), None);
        assert_eq!(slice_position(20), Some((2, 2)));
    }

    #[test]
    fn partition_law_brute_force() {
        let n = 1u64 << 16;
        for m in 1..n {
            let owners: Vec<u32> = (0..17).filter(|&k| m % (1 << k) == 0 && m % (1 << (k + 1)) != 0).collect();
            assert_eq!(owners.len(), 1, "m={m}");
            assert_eq!(r_index(m).unwrap(), owners[0]);
        }
    }

    #[test]
    fn f_enum_matches_sorted_slices() {
        let n = 1u64 << 16;
        for k in 0..16u32 {
            let brute: Vec<u64> = (1..n).filter(|m| m % (1 << k) == 0 && m % (1 << (k + 1)) != 0).collect();
            let closed: Vec<u64> = (0..).map(|x| f_enum(k, x)).take_while(|&m| m < n).collect();
            assert_eq!(closed, brute, "k={k}");
        }
    }

    #[test]
    fn encode_examples() {
        let odds = encode_r(|n| n == 0, 10);
        assert_eq!(odds.iter().collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
        assert!(encode_r(|_| false, 100).is_empty());

        let bound = 1u64 << 20;
        let a = encode_r(|n| n <= 1, bound);
        let brute = (1..bound).filter(|m| m % 2 == 1 || m % 4 == 2).count() as u64;
        let rho = prefix_density(&a, bound - 1).unwrap();
        assert_eq!(rho, ratio(brute, bound));
        assert!((rho - ratio(3, 4)).abs() <= ratio(1, 1 << 18));
    }

    #[test]
    fn encode_pointwise_law() {
        let a = |n: u64| n % 3 == 1 || n == 4;
        let bound = 5000;
        let set = encode_r(a, bound);
        for m in 1..bound {
            assert_eq!(set.contains(m).unwrap(), a(r_index(m).unwrap() as u64));
        }
        assert!(!set.contains(0).unwrap());
    }

    #[test]
    fn try_encode_propagates_failure() {
        let r: core::result::Result<NatSetPrefix, &str> =
            try_encode_r(|n| if n == 3 { Err("oracle down") } else { Ok(true) }, 1 << 8);
        assert_eq!(r.unwrap_err(), "oracle down");
        // bound 16 needs k ≤ 3 exactly
        let mut asked = Vec::new();
        try_encode_r(|n| { asked.push(n); Ok::<_, ()>(false) }, 16).unwrap();
        assert_eq!(asked, vec![0, 1, 2, 3]);
    }

    #[test]
    fn decode_examples() {
        let a = |n: u64| n == 3;
        let mut g = GenericListing::new(listings::full_r_listing(a));
        assert!(decode_r(&mut g, 3, DEFAULT_DECODE_BUDGET).unwrap());
        let mut g = GenericListing::new(listings::full_r_listing(a));
        assert!(!decode_r(&mut g, 2, DEFAULT_DECODE_BUDGET).unwrap());

        let mut g = GenericListing::new(listings::full_r_listing(a).filter(|&(m, _)| !in_slice(5, m)));
        assert_eq!(decode_r(&mut g, 5, 10_000), Err(Error::BudgetExceeded(10_000)));
    }

    #[test]
    fn decode_inverts_encode() {
        let a = |n: u64| (n * 7 + 3) % 5 < 2;
        let bound = 1u64 << 14;
        let prefix = encode_r(a, bound);
        for n in 0..13u32 {
            let mut g = GenericListing::new(listings::ascending(&prefix));
            assert_eq!(decode_r(&mut g, n, bound).unwrap(), a(n as u64), "n={n}");
        }
    }

    #[test]
    fn real_to_set_examples() {
        let half = density_real_to_set([true].into_iter().chain(core::iter::repeat(false)), 64);
        assert_eq!(half, NatSetPrefix::from_fn(64, |m| m % 2 == 1));
        assert!(density_real_to_set(core::iter::repeat(false), 64).is_empty());

        // 1/3 = .010101…
        let bound = 1u64 << 20;
        let third = density_real_to_set((0..).map(|i: u32| i % 2 == 1), bound);
        let brute = (1..bound).filter(|m| m.trailing_zeros() % 2 == 1).count() as u64;
        let rho = prefix_density(&third, bound - 1).unwrap();
        assert_eq!(rho, ratio(brute, bound));
        assert!((rho - ratio(1, 3)).abs() <= ratio(1, 1 << 10));
    }

    #[test]
    fn spread_examples() {
        let t = spread_encode(|_| false, 8).unwrap();
        assert_eq!(word_prefix_density(&t, 8).unwrap(), Rational::zero());

        let t = spread_encode(|n| n == 1, 3).unwrap();
        assert_eq!(t.words(), vec![vec![0, 1], vec![0, 1, 0], vec![0, 1, 1]]);

        let t = spread_encode(|n| n == 0, 18).unwrap();
        let d = word_prefix_density(&t, 18).unwrap();
        assert!((d - ratio(1, 2)).abs() < ratio(1, 1 << 15));
    }
}
