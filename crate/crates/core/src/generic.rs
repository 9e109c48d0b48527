//! Generic and coarse computability engines.
//!
//! A *generic listing* is a stream of `(n, bit)` pairs listing the graph of
//! a partial 0/1 function. A *c.e. pair* `C0 ⊆ Ā`, `C1 ⊆ A` answers queries
//! about `A` by waiting for the point to show up on either side. A *limit
//! approximation* `s ↦ A_s` converging to `A` yields a total set generically
//! similar to `𝓡(A)`, and the density threshold decoder reads `A` back.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::density::{prefix_density, symdiff_density};
use crate::machines::{Machine, Run, Status};
use crate::partition::{self, in_slice};
use crate::{ratio, Error, NatSetPrefix, Rational, Result};

/// A monotonically consumed stream of `(argument, bit)` pairs.
///
/// With [`GenericListing::checked`] every pair is remembered and a second
/// pair for the same argument with the other bit is a
/// [`Error::NotAFunction`].
pub struct GenericListing<I> {
    inner: I,
    consumed: u64,
    seen: Option<BTreeMap<u64, bool>>,
}

impl<I: Iterator<Item = (u64, bool)>> GenericListing<I> {
    pub fn new(inner: I) -> Self {
        GenericListing { inner, consumed: 0, seen: None }
    }

    pub fn checked(inner: I) -> Self {
        GenericListing { inner, consumed: 0, seen: Some(BTreeMap::new()) }
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn next_pair(&mut self) -> Result<Option<(u64, bool)>> {
        let Some((n, b)) = self.inner.next() else {
            return Ok(None);
        };
        self.consumed += 1;
        if let Some(seen) = self.seen.as_mut() {
            if let Some(&prev) = seen.get(&n) {
                if prev != b {
                    return Err(Error::NotAFunction { arg: n, first: prev as u64, second: b as u64 });
                }
            } else {
                seen.insert(n, b);
            }
        }
        Ok(Some((n, b)))
    }
}

/// Ready-made listings.
pub mod listings {
    use super::*;

    /// The full graph of `𝓡(A)`: `(0, false)` first, then `(f_enum(k, x), A(k))`
    /// along the anti-diagonals `k + x = d`. Every `R_k` shows up early.
    /// Elements that do not fit in a `u64` are skipped.
    pub fn full_r_listing(a: impl Fn(u64) -> bool) -> impl Iterator<Item = (u64, bool)> {
        let diagonals = (0u64..).flat_map(|d| {
            (0..=d.min(63)).filter_map(move |k| {
                partition::checked_f_enum(k as u32, d - k).map(|m| (k, m))
            })
        });
        core::iter::once((0, false)).chain(diagonals.map(move |(k, m)| (m, a(k))))
    }

    /// `(m, A(m))` for every `m` below the prefix bound, in increasing order.
    pub fn ascending(prefix: &NatSetPrefix) -> impl Iterator<Item = (u64, bool)> + '_ {
        (0..prefix.bound()).map(move |m| (m, prefix.bitset().get(m)))
    }
}

/// Decodes `A` from a generic listing of `𝓡(A)`, remembering every slice bit
/// seen so far. The budget caps the total number of pairs consumed.
pub struct ListingDecoder<I> {
    listing: GenericListing<I>,
    known: BTreeMap<u32, bool>,
    budget: u64,
}

impl<I: Iterator<Item = (u64, bool)>> ListingDecoder<I> {
    pub fn new(listing: GenericListing<I>, budget: u64) -> Self {
        ListingDecoder { listing, known: BTreeMap::new(), budget }
    }

    pub fn consumed(&self) -> u64 {
        self.listing.consumed()
    }

    /// `A(n)`, or [`Error::BudgetExceeded`] if the listing gave nothing on `R_n`
    /// within the budget.
    pub fn decode(&mut self, n: u32) -> Result<bool> {
        while !self.known.contains_key(&n) {
            if self.listing.consumed() >= self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            match self.listing.next_pair()? {
                Some((m, b)) if m != 0 => {
                    self.known.entry(m.trailing_zeros()).or_insert(b);
                }
                Some(_) => {}
                None => return Err(Error::BudgetExceeded(self.budget)),
            }
        }
        Ok(self.known[&n])
    }
}

/// A uniformly computable sequence of finite sets `s ↦ A_s`.
pub trait LimitApprox {
    /// Membership of `k` in `A_s`.
    fn contains_at(&self, s: u64, k: u64) -> bool;
}

impl<F: Fn(u64, u64) -> bool> LimitApprox for F {
    fn contains_at(&self, s: u64, k: u64) -> bool {
        self(s, k)
    }
}

/// `A_s = early` for `s < stable_at`, `A_s = target` afterwards.
#[derive(Clone, Debug)]
pub struct StabilizingApprox {
    pub early: Vec<u64>,
    pub target: Vec<u64>,
    pub stable_at: u64,
}

impl LimitApprox for StabilizingApprox {
    fn contains_at(&self, s: u64, k: u64) -> bool {
        let set = if s < self.stable_at { &self.early } else { &self.target };
        set.contains(&k)
    }
}

/// The computable set `C` with `n ∈ C ⇔ r_index(n) ∈ A_n`; the stage used is
/// the queried number itself. `C(0) = 0`.
pub fn coarse_from_limit(l: &impl LimitApprox, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    l.contains_at(n, n.trailing_zeros() as u64)
}

/// Stage-`s` guess at `A(n)` from a set `C` generically similar to `𝓡(A)`:
/// 1 iff `ρ_s(C ∩ R_n) ≥ ½ · 2^{-(n+1)}`.
pub fn decode_from_coarse(c: impl Fn(u64) -> bool, n: u32, s: u64) -> Result<bool> {
    if s == 0 {
        return Err(Error::arg("decode_from_coarse needs a stage s ≥ 1"));
    }
    let mut count: u128 = 0;
    for x in 0.. {
        match partition::checked_f_enum(n, x) {
            Some(m) if m <= s => {
                if c(m) {
                    count += 1;
                }
            }
            _ => break,
        }
    }
    // count / (s+1) ≥ 2^{-(n+2)}  ⇔  count · 2^{n+2} ≥ s + 1
    let lhs = count.checked_shl(n + 2).filter(|v| v >> (n + 2) == count);
    Ok(match lhs {
        Some(v) => v >= s as u128 + 1,
        None => true,
    })
}

/// A c.e. set observed through its stage-wise enumeration.
pub trait CeSet {
    /// Whether `x` has been enumerated by stage `s`. Monotone in `s`.
    fn enumerated_by(&mut self, x: u64, s: u64) -> bool;
}

/// A decidable set viewed as c.e.: `x` appears at stage `x + 1`.
pub struct Decidable<F>(pub F);

impl<F: Fn(u64) -> bool> CeSet for Decidable<F> {
    fn enumerated_by(&mut self, x: u64, s: u64) -> bool {
        x < s && (self.0)(x)
    }
}

/// A finite enumeration given as `(stage, element)` events.
#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    first_seen: BTreeMap<u64, u64>,
}

impl Enumeration {
    pub fn new(events: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut first_seen = BTreeMap::new();
        for (s, x) in events {
            let e = first_seen.entry(x).or_insert(s);
            *e = (*e).min(s);
        }
        Enumeration { first_seen }
    }
}

impl CeSet for Enumeration {
    fn enumerated_by(&mut self, x: u64, s: u64) -> bool {
        self.first_seen.get(&x).is_some_and(|&t| t <= s)
    }
}

/// `W_e` for one machine; runs are cached so repeated queries resume.
pub struct MachineDomain {
    machine: Machine,
    runs: BTreeMap<u64, Run>,
}

impl MachineDomain {
    pub fn new(machine: Machine) -> Self {
        MachineDomain { machine, runs: BTreeMap::new() }
    }
}

impl CeSet for MachineDomain {
    fn enumerated_by(&mut self, x: u64, s: u64) -> bool {
        if x >= s {
            return false;
        }
        let machine = &self.machine;
        let run = self.runs.entry(x).or_insert_with(|| machine.start(x));
        match run.status() {
            Status::Halted(_) => run.steps() <= s,
            Status::Diverged => false,
            Status::Running => {
                if run.steps() >= s {
                    return false;
                }
                matches!(machine.advance(run, s), Status::Halted(_))
            }
        }
    }
}

/// Decides `x` from a c.e. pair `C0 ⊆ Ā`, `C1 ⊆ A`: interleaves both
/// enumerations up to stage `budget` and answers by whichever side lists `x`
/// first. `Ok(None)` means out of budget.
pub fn generic_from_pair(
    c0: &mut impl CeSet,
    c1: &mut impl CeSet,
    x: u64,
    budget: u64,
) -> Result<Option<bool>> {
    for s in 1..=budget {
        let no = c0.enumerated_by(x, s);
        let yes = c1.enumerated_by(x, s);
        match (no, yes) {
            (true, true) => return Err(Error::Contradiction(x)),
            (true, false) => return Ok(Some(false)),
            (false, true) => return Ok(Some(true)),
            (false, false) => {}
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationReport {
    /// The enumerated parts of `C0` and `C1` inside `[0, n]` are disjoint.
    pub consistent: bool,
    /// `ρ_n` of the enumerated union.
    pub union_density: Rational,
    /// Points listed on both sides, if any.
    pub overlap: Vec<u64>,
}

/// Disjointness and union density of a c.e. pair as enumerated by stage
/// `budget`, on `[0, n]`.
pub fn densely_approximable_report(
    c0: &mut impl CeSet,
    c1: &mut impl CeSet,
    budget: u64,
    n: u64,
) -> ApproximationReport {
    let mut union = 0u64;
    let mut overlap = Vec::new();
    for x in 0..=n {
        let a = c0.enumerated_by(x, budget);
        let b = c1.enumerated_by(x, budget);
        if a || b {
            union += 1;
        }
        if a && b {
            overlap.push(x);
        }
    }
    ApproximationReport { consistent: overlap.is_empty(), union_density: ratio(union, n + 1), overlap }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityReport {
    /// `(n, ρ_n(A △ B))` at each sample point.
    pub samples: Vec<(u64, Rational)>,
    /// Samples never increase from one point to the next.
    pub nonincreasing: bool,
    /// The last sample is at most the threshold.
    pub below_threshold: bool,
}

/// Prefix evidence for `A ∼_g B`; never a verdict about the limit.
pub fn generic_similarity_verdict(
    a: &NatSetPrefix,
    b: &NatSetPrefix,
    points: &[u64],
    threshold: &Rational,
) -> Result<SimilarityReport> {
    if points.is_empty() {
        return Err(Error::arg("no sample points"));
    }
    let samples = points
        .iter()
        .map(|&n| Ok((n, symdiff_density(a, b, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let nonincreasing = samples.windows(2).all(|w| w[1].1 <= w[0].1);
    let below_threshold = samples.last().is_some_and(|s| s.1 <= *threshold);
    Ok(SimilarityReport { samples, nonincreasing, below_threshold })
}

/// `ρ_n(A ∩ R_k)`; handy when reading slice-local evidence out of a report.
pub fn slice_density(a: &NatSetPrefix, k: u32, n: u64) -> Result<Rational> {
    let slice = NatSetPrefix::from_fn(n + 1, |m| in_slice(k, m));
    let cut = a.restrict(n + 1);
    if cut.bound() <= n {
        return Err(Error::InsufficientKnowledge { n, bound: a.bound() });
    }
    prefix_density(&cut.intersection(&slice), n)
}

impl SimilarityReport {
    pub fn max_sample(&self) -> Rational {
        self.samples.iter().map(|s| s.1.clone()).max().unwrap_or_else(Rational::zero)
    }
}
