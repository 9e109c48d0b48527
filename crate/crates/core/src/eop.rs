//! Enumeration operators, graph codings, joins and the slice-level
//! reductions between generic listings.
//!
//! An operator is a finite list of axioms `(n, D)`; it sends `X` to
//! `{n : some axiom (n, D) has D ⊆ X}`. Premises are kept as sorted sets;
//! the canonical index `Σ_{k∈D} 2^k` only appears at the file boundary.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::generic::{GenericListing, ListingDecoder};
use crate::machines::{FuelResult, Machine, Program};
use crate::partition::{checked_f_enum, slice_position};
use crate::{Error, NatSetPrefix, Result};

/// Cantor pairing `⟨a,b⟩ = (a+b)(a+b+1)/2 + b`.
pub mod pairing {
    /// `None` when the code does not fit in a `u64`.
    pub fn pair(a: u64, b: u64) -> Option<u64> {
        let s = a as u128 + b as u128;
        let z = s.checked_mul(s + 1)? / 2 + b as u128;
        u64::try_from(z).ok()
    }

    pub fn unpair(z: u64) -> (u64, u64) {
        let z = z as u128;
        // largest w with w(w+1)/2 ≤ z
        let mut w = (isqrt(8 * z + 1) - 1) / 2;
        while w * (w + 1) / 2 > z {
            w -= 1;
        }
        while (w + 1) * (w + 2) / 2 <= z {
            w += 1;
        }
        let b = z - w * (w + 1) / 2;
        ((w - b) as u64, b as u64)
    }

    fn isqrt(n: u128) -> u128 {
        if n < 2 {
            return n;
        }
        let mut x = (libm::sqrt(n as f64) as u128).max(1);
        while x * x > n {
            x -= 1;
        }
        while (x + 1) * (x + 1) <= n {
            x += 1;
        }
        x
    }
}

/// A finite set of naturals, sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSet(Vec<u64>);

impl FiniteSet {
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet(v)
    }

    pub fn empty() -> Self {
        FiniteSet(Vec::new())
    }

    pub fn elements(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        FiniteSet::new(self.0.iter().chain(&other.0).copied())
    }

    /// `Σ_{k∈D} 2^k`.
    pub fn canonical_index(&self) -> BigUint {
        let mut idx = BigUint::zero();
        for &k in &self.0 {
            idx.set_bit(k, true);
        }
        idx
    }

    /// Inverse of [`FiniteSet::canonical_index`]. Indices wider than
    /// `max_width` bits are rejected.
    pub fn from_canonical_index(idx: &BigUint, max_width: u64) -> Result<FiniteSet> {
        if idx.bits() > max_width {
            return Err(Error::Format(alloc::format!(
                "canonical index has {} bits, limit is {max_width}",
                idx.bits()
            )));
        }
        Ok(FiniteSet((0..idx.bits()).filter(|&k| idx.bit(k)).collect()))
    }
}

/// Default cap on canonical index width when reading operators.
pub const DEFAULT_INDEX_WIDTH: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Axiom {
    pub output: u64,
    pub premise: FiniteSet,
}

impl Axiom {
    pub fn new(output: u64, premise: impl IntoIterator<Item = u64>) -> Self {
        Axiom { output, premise: FiniteSet::new(premise) }
    }
}

/// A finite enumeration operator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumOperator {
    axioms: Vec<Axiom>,
}

/// Result of a budgeted application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    /// Confirmed outputs, increasing.
    pub outputs: Vec<u64>,
    /// Some axioms were left unchecked because the query budget ran out.
    pub exhausted: bool,
}

/// Result of [`compose`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    pub operator: EnumOperator,
    /// Axiom generation stopped at the bound; the operator is then only an
    /// under-approximation of the composite.
    pub truncated: bool,
}

impl EnumOperator {
    pub fn new(axioms: impl IntoIterator<Item = Axiom>) -> Self {
        EnumOperator { axioms: axioms.into_iter().collect() }
    }

    /// `{(n, {n}) : n < bound}`.
    pub fn identity(bound: u64) -> Self {
        EnumOperator::new((0..bound).map(|n| Axiom::new(n, [n])))
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn push(&mut self, axiom: Axiom) {
        self.axioms.push(axiom);
    }

    /// `W(X)` for a decidable `X`.
    pub fn apply(&self, x: impl FnMut(u64) -> bool) -> Vec<u64> {
        self.apply_within(x, u64::MAX).outputs
    }

    /// `W(X)` asking `X` about at most `budget` distinct points.
    pub fn apply_within(&self, mut x: impl FnMut(u64) -> bool, budget: u64) -> Applied {
        let mut known: BTreeMap<u64, bool> = BTreeMap::new();
        let mut out = BTreeSet::new();
        let mut exhausted = false;
        'axioms: for ax in &self.axioms {
            if out.contains(&ax.output) {
                continue;
            }
            for &d in ax.premise.elements() {
                let member = match known.get(&d) {
                    Some(&b) => b,
                    None => {
                        if known.len() as u64 >= budget {
                            exhausted = true;
                            continue 'axioms;
                        }
                        let b = x(d);
                        known.insert(d, b);
                        b
                    }
                };
                if !member {
                    continue 'axioms;
                }
            }
            out.insert(ax.output);
        }
        Applied { outputs: out.into_iter().collect(), exhausted }
    }

    /// Starts an incremental application over an `X` that arrives one
    /// element at a time.
    pub fn stream(&self) -> StreamApplication<'_> {
        StreamApplication::new(self)
    }
}

/// Incremental `W(X)`: feed elements of `X` as they are enumerated, get back
/// outputs as soon as a premise is covered. Each output is emitted once.
pub struct StreamApplication<'a> {
    op: &'a EnumOperator,
    missing: Vec<usize>,
    waiting: BTreeMap<u64, Vec<usize>>,
    seen: BTreeSet<u64>,
    emitted: BTreeSet<u64>,
    ready: Vec<u64>,
}

impl<'a> StreamApplication<'a> {
    fn new(op: &'a EnumOperator) -> Self {
        let mut waiting: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        let mut missing = Vec::with_capacity(op.axioms.len());
        let mut emitted = BTreeSet::new();
        let mut ready = Vec::new();
        for (i, ax) in op.axioms.iter().enumerate() {
            missing.push(ax.premise.len());
            if ax.premise.is_empty() && emitted.insert(ax.output) {
                ready.push(ax.output);
            }
            for &d in ax.premise.elements() {
                waiting.entry(d).or_default().push(i);
            }
        }
        StreamApplication { op, missing, waiting, seen: BTreeSet::new(), emitted, ready }
    }

    /// Outputs with empty premises, available before any input.
    pub fn initial(&mut self) -> Vec<u64> {
        core::mem::take(&mut self.ready)
    }

    pub fn feed(&mut self, x: u64) -> Vec<u64> {
        let mut out = core::mem::take(&mut self.ready);
        if !self.seen.insert(x) {
            return out;
        }
        if let Some(axs) = self.waiting.remove(&x) {
            for i in axs {
                self.missing[i] -= 1;
                let n = self.op.axioms[i].output;
                if self.missing[i] == 0 && self.emitted.insert(n) {
                    out.push(n);
                }
            }
        }
        out
    }
}

/// `U` with `U(X) = V(W(X))`: each `V`-axiom `(n, D)` is combined with one
/// `W`-axiom for every element of `D`, in all ways. At most `bound` axioms
/// are generated.
pub fn compose(v: &EnumOperator, w: &EnumOperator, bound: usize) -> Composition {
    let mut by_output: BTreeMap<u64, Vec<&FiniteSet>> = BTreeMap::new();
    for ax in &w.axioms {
        by_output.entry(ax.output).or_default().push(&ax.premise);
    }
    let mut axioms: BTreeSet<Axiom> = BTreeSet::new();
    let mut truncated = false;
    'outer: for ax in &v.axioms {
        let choices: Option<Vec<&Vec<&FiniteSet>>> =
            ax.premise.elements().iter().map(|d| by_output.get(d)).collect();
        let Some(choices) = choices else { continue };
        // odometer over one premise per element of D
        let mut pick = alloc::vec![0usize; choices.len()];
        loop {
            let premise = choices
                .iter()
                .zip(&pick)
                .fold(FiniteSet::empty(), |acc, (opts, &i)| acc.union(opts[i]));
            let axiom = Axiom { output: ax.output, premise };
            if !axioms.contains(&axiom) {
                if axioms.len() >= bound {
                    truncated = true;
                    break 'outer;
                }
                axioms.insert(axiom);
            }
            let mut i = 0;
            while i < pick.len() {
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == pick.len() {
                break;
            }
        }
    }
    Composition { operator: EnumOperator::new(axioms), truncated }
}

/// `{⟨a,b⟩ : (a,b) ∈ p}`.
pub fn graph_code(p: &[(u64, u64)]) -> Result<FiniteSet> {
    let mut seen: BTreeMap<u64, u64> = BTreeMap::new();
    let mut codes = Vec::with_capacity(p.len());
    for &(a, b) in p {
        if let Some(&prev) = seen.get(&a) {
            if prev != b {
                return Err(Error::NotAFunction { arg: a, first: prev, second: b });
            }
        }
        seen.insert(a, b);
        codes.push(pairing::pair(a, b).ok_or(Error::Overflow("graph pair"))?);
    }
    Ok(FiniteSet::new(codes))
}

/// Inverse of [`graph_code`], sorted by argument.
pub fn graph_decode(codes: &FiniteSet) -> Result<Vec<(u64, u64)>> {
    let mut graph: BTreeMap<u64, u64> = BTreeMap::new();
    for &z in codes.elements() {
        let (a, b) = pairing::unpair(z);
        if let Some(&prev) = graph.get(&a) {
            if prev != b {
                return Err(Error::NotAFunction { arg: a, first: prev.min(b), second: prev.max(b) });
            }
        }
        graph.insert(a, b);
    }
    Ok(graph.into_iter().collect())
}

/// `A ⊕ B = {2n : n ∈ A} ∪ {2n+1 : n ∈ B}` below `bound`.
pub fn join(a: impl Fn(u64) -> bool, b: impl Fn(u64) -> bool, bound: u64) -> NatSetPrefix {
    NatSetPrefix::from_fn(bound, |m| if m % 2 == 0 { a(m / 2) } else { b(m / 2) })
}

/// `B = ⋃_n f_n(A_n)` below `bound`, with `f_n(x) = 2^n(2x+1)`. Slices past the
/// given list are empty.
pub fn upper_bound_encode(sets: &[&dyn Fn(u64) -> bool], bound: u64) -> NatSetPrefix {
    NatSetPrefix::from_fn(bound, |m| match slice_position(m) {
        Some((n, x)) => sets.get(n as usize).is_some_and(|a| a(x)),
        None => false,
    })
}

/// Axioms `(⟨x,b⟩, {⟨f_n(x), b⟩})` for `x < bound`, `b ∈ {0,1}`: turns a
/// listing of `B` into a listing of `A_n` when `B(f_n(x)) = A_n(x)`.
pub fn slice_reduction_operator(n: u32, bound: u64) -> Result<EnumOperator> {
    let mut axioms = Vec::with_capacity(2 * bound as usize);
    for x in 0..bound {
        let m = checked_f_enum(n, x).ok_or(Error::Overflow("slice element"))?;
        for b in 0..2 {
            let out = pairing::pair(x, b).ok_or(Error::Overflow("graph pair"))?;
            let inp = pairing::pair(m, b).ok_or(Error::Overflow("graph pair"))?;
            axioms.push(Axiom::new(out, [inp]));
        }
    }
    Ok(EnumOperator::new(axioms))
}

/// Graph codes of a listing, in listing order.
pub fn listing_codes(pairs: impl IntoIterator<Item = (u64, bool)>) -> Result<Vec<u64>> {
    pairs
        .into_iter()
        .map(|(m, b)| pairing::pair(m, b as u64).ok_or(Error::Overflow("graph pair")))
        .collect()
}

/// The witness pipeline for `A ≤_T B ⇒ 𝓡(A) ≤_g 𝓡(B)`.
///
/// Reads a generic listing of `𝓡(B)`, decodes `B` bit by bit, runs `program`
/// with `B` as oracle to decide `A(k)` for each slice index needed, and emits
/// the total listing `(m, 𝓡(A)(m))` for `m < bound`. Each oracle run gets at
/// most `fuel` steps; the listing at most `budget` pairs overall.
pub fn r_embedding_forward<I>(
    program: &Program,
    listing: GenericListing<I>,
    bound: u64,
    fuel: u64,
    budget: u64,
) -> Result<Vec<(u64, bool)>>
where
    I: Iterator<Item = (u64, bool)>,
{
    let machine = Machine::new(program);
    let mut decoder = ListingDecoder::new(listing, budget);
    let mut a_bits: BTreeMap<u32, bool> = BTreeMap::new();
    let mut out = Vec::with_capacity(bound as usize);
    for m in 0..bound {
        if m == 0 {
            out.push((0, false));
            continue;
        }
        let k = m.trailing_zeros();
        let bit = match a_bits.get(&k) {
            Some(&b) => b,
            None => {
                let mut oracle = |j: u64| -> Result<bool> {
                    let j = u32::try_from(j).map_err(|_| Error::Overflow("oracle query"))?;
                    decoder.decode(j)
                };
                let b = match machine.eval_oracle(k as u64, fuel, &mut oracle)? {
                    FuelResult::Converged(v) => v != 0,
                    FuelResult::OutOfFuel => return Err(Error::BudgetExceeded(fuel)),
                };
                a_bits.insert(k, b);
                b
            }
        };
        out.push((m, bit));
    }
    Ok(out)
}
