//! Exact prefix densities.
//!
//! For `A ⊆ ω` the n-th density is `ρ_n(A) = |A ∩ [0,n]| / (n+1)`; for a set
//! of words `S ⊆ Σ*` it is `|S↾n| / |Σ*↾n|` where `↾n` keeps the words of
//! length at most `n`. A prefix never guesses: asking about a point it does
//! not cover is an [`Error::InsufficientKnowledge`].

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::{ratio, Bitset, Error, Rational, Result};

/// Finite approximation `A ∩ [0, bound)` of a set of naturals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NatSetPrefix {
    bits: Bitset,
}

impl NatSetPrefix {
    pub fn empty(bound: u64) -> Self {
        NatSetPrefix { bits: Bitset::new(bound) }
    }

    pub fn full(bound: u64) -> Self {
        Self::from_fn(bound, |_| true)
    }

    pub fn from_fn(bound: u64, mut member: impl FnMut(u64) -> bool) -> Self {
        let mut bits = Bitset::new(bound);
        for m in 0..bound {
            if member(m) {
                bits.set(m, true);
            }
        }
        NatSetPrefix { bits }
    }

    /// Elements at or above `bound` are rejected.
    pub fn from_elements(bound: u64, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = Self::empty(bound);
        for m in elements {
            set.insert(m)?;
        }
        Ok(set)
    }

    pub fn from_bitset(bits: Bitset) -> Self {
        NatSetPrefix { bits }
    }

    /// Exclusive upper limit of knowledge.
    pub fn bound(&self) -> u64 {
        self.bits.len()
    }

    pub fn bitset(&self) -> &Bitset {
        &self.bits
    }

    fn check(&self, n: u64) -> Result<()> {
        if n < self.bound() {
            Ok(())
        } else {
            Err(Error::InsufficientKnowledge { n, bound: self.bound() })
        }
    }

    pub fn contains(&self, m: u64) -> Result<bool> {
        self.check(m)?;
        Ok(self.bits.get(m))
    }

    pub fn insert(&mut self, m: u64) -> Result<()> {
        self.check(m)?;
        self.bits.set(m, true);
        Ok(())
    }

    /// `|A ∩ [0,n]|`.
    pub fn count_upto(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.bits.count_below(n + 1))
    }

    /// Cardinality of the whole known prefix.
    pub fn len(&self) -> u64 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones()
    }

    /// The prefix cut down to `[0, bound)`; the bound never grows.
    pub fn restrict(&self, bound: u64) -> Self {
        NatSetPrefix { bits: self.bits.truncate(bound) }
    }

    pub fn union(&self, other: &Self) -> Self {
        NatSetPrefix { bits: self.bits.zip_with(&other.bits, |a, b| a | b) }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        NatSetPrefix { bits: self.bits.zip_with(&other.bits, |a, b| a & b) }
    }

    pub fn difference(&self, other: &Self) -> Self {
        NatSetPrefix { bits: self.bits.zip_with(&other.bits, |a, b| a & !b) }
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        NatSetPrefix { bits: self.bits.zip_with(&other.bits, |a, b| a ^ b) }
    }

    /// Complement within `[0, bound)`.
    pub fn complement(&self) -> Self {
        NatSetPrefix { bits: self.bits.zip_with(&self.bits, |a, _| !a) }
    }

    /// `A ∩ [0,n] ⊆ B ∩ [0,n]`.
    pub fn is_subset_upto(&self, other: &Self, n: u64) -> Result<bool> {
        self.check(n)?;
        other.check(n)?;
        let a = self.restrict(n + 1);
        Ok(a.difference(&other.restrict(n + 1)).is_empty())
    }
}

/// `ρ_n(A) = |A ∩ [0,n]| / (n+1)`.
pub fn prefix_density(a: &NatSetPrefix, n: u64) -> Result<Rational> {
    Ok(ratio(a.count_upto(n)?, n + 1))
}

/// Which tail of the samples feeds the upper and lower estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TailWindow {
    /// The last `⌈len/2⌉` samples.
    #[default]
    LastHalf,
    Last(usize),
    All,
}

impl TailWindow {
    fn start(self, len: usize) -> usize {
        match self {
            TailWindow::LastHalf => len / 2,
            TailWindow::Last(k) => len.saturating_sub(k.max(1)),
            TailWindow::All => 0,
        }
    }
}

/// Exact densities at chosen sample points plus tail-window estimates of the
/// upper and lower density.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProfile {
    pub samples: Vec<(u64, Rational)>,
    pub upper_estimate: Rational,
    pub lower_estimate: Rational,
}

impl DensityProfile {
    /// Builds a profile from already computed samples. Points must strictly
    /// increase and the list must be nonempty.
    pub fn from_samples(samples: Vec<(u64, Rational)>, window: TailWindow) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::arg("a density profile needs at least one sample point"));
        }
        if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::arg("sample points must be strictly increasing"));
        }
        let tail = &samples[window.start(samples.len())..];
        let upper = tail.iter().map(|s| &s.1).max().cloned().unwrap_or_else(Rational::zero);
        let lower = tail.iter().map(|s| &s.1).min().cloned().unwrap_or_else(Rational::zero);
        Ok(DensityProfile { samples, upper_estimate: upper, lower_estimate: lower })
    }
}

pub fn density_profile(a: &NatSetPrefix, points: &[u64]) -> Result<DensityProfile> {
    density_profile_with(a, points, TailWindow::default())
}

pub fn density_profile_with(
    a: &NatSetPrefix,
    points: &[u64],
    window: TailWindow,
) -> Result<DensityProfile> {
    let samples = points
        .iter()
        .map(|&n| Ok((n, prefix_density(a, n)?)))
        .collect::<Result<Vec<_>>>()?;
    DensityProfile::from_samples(samples, window)
}

/// `|A↾n| / |B↾n|`, the density of `A` inside `B` at `n`.
pub fn relative_density(a: &NatSetPrefix, b: &NatSetPrefix, n: u64) -> Result<Rational> {
    if !a.is_subset_upto(b, n)? {
        return Err(Error::arg("relative density needs A ⊆ B on the prefix"));
    }
    let den = b.count_upto(n)?;
    if den == 0 {
        return Err(Error::UndefinedRatio(n));
    }
    Ok(ratio(a.count_upto(n)?, den))
}

/// `ρ_n(A △ B)`.
pub fn symdiff_density(a: &NatSetPrefix, b: &NatSetPrefix, n: u64) -> Result<Rational> {
    a.check(n)?;
    b.check(n)?;
    prefix_density(&a.symmetric_difference(b), n)
}

/// Finite additivity at one prefix: `(ρ_n(⋃ parts), Σ ρ_n(part))`.
///
/// The parts must be pairwise disjoint on `[0,n]`.
pub fn rca_check(parts: &[NatSetPrefix], n: u64) -> Result<(Rational, Rational)> {
    if parts.is_empty() {
        return Ok((Rational::zero(), Rational::zero()));
    }
    let mut union = parts[0].restrict(n + 1);
    union.check(n)?;
    let mut rhs = prefix_density(&parts[0], n)?;
    for p in &parts[1..] {
        let p = p.restrict(n + 1);
        p.check(n)?;
        if !union.intersection(&p).is_empty() {
            return Err(Error::arg("parts overlap on the prefix"));
        }
        rhs += prefix_density(&p, n)?;
        union = union.union(&p);
    }
    Ok((prefix_density(&union, n)?, rhs))
}

/// Number of words of length at most `n` over an alphabet of size `sigma`.
pub fn word_count_upto(sigma: u32, n: u32) -> Option<u64> {
    if sigma == 0 {
        return None;
    }
    if sigma == 1 {
        return Some(n as u64 + 1);
    }
    let s = sigma as u64;
    let mut total: u64 = 0;
    let mut layer: u64 = 1;
    for _ in 0..=n {
        total = total.checked_add(layer)?;
        layer = layer.checked_mul(s)?;
    }
    Some(total)
}

/// Membership of every word of length `≤ bound` over `{0, …, σ−1}`, stored in
/// shortlex order so that `S↾n` is a bit prefix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WordSetPrefix {
    alphabet_size: u32,
    bound: u32,
    bits: Bitset,
}

impl WordSetPrefix {
    pub fn empty(alphabet_size: u32, bound: u32) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::arg("alphabet must have at least one letter"));
        }
        let total = word_count_upto(alphabet_size, bound)
            .ok_or(Error::Overflow("word count"))?;
        Ok(WordSetPrefix { alphabet_size, bound, bits: Bitset::new(total) })
    }

    /// Calls `member` once per word, shortest first, lexicographic within a length.
    pub fn from_fn(
        alphabet_size: u32,
        bound: u32,
        mut member: impl FnMut(&[u32]) -> bool,
    ) -> Result<Self> {
        let mut set = Self::empty(alphabet_size, bound)?;
        let mut word: Vec<u32> = Vec::new();
        let mut idx = 0u64;
        for len in 0..=bound {
            word.clear();
            word.resize(len as usize, 0);
            loop {
                if member(&word) {
                    set.bits.set(idx, true);
                }
                idx += 1;
                // odometer increment, last letter fastest
                let mut pos = word.len();
                let mut carried = true;
                while carried && pos > 0 {
                    pos -= 1;
                    word[pos] += 1;
                    if word[pos] == alphabet_size {
                        word[pos] = 0;
                    } else {
                        carried = false;
                    }
                }
                if carried {
                    break;
                }
            }
        }
        Ok(set)
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Shortlex position of a word.
    pub fn index_of(&self, word: &[u32]) -> Result<u64> {
        let len = word.len() as u32;
        if len > self.bound {
            return Err(Error::InsufficientKnowledge { n: len as u64, bound: self.bound as u64 + 1 });
        }
        let mut v: u64 = 0;
        for &c in word {
            if c >= self.alphabet_size {
                return Err(Error::arg("letter outside the alphabet"));
            }
            v = v * self.alphabet_size as u64 + c as u64;
        }
        let before = if len == 0 { 0 } else { word_count_upto(self.alphabet_size, len - 1).unwrap() };
        Ok(before + v)
    }

    pub fn contains(&self, word: &[u32]) -> Result<bool> {
        Ok(self.bits.get(self.index_of(word)?))
    }

    pub fn insert(&mut self, word: &[u32]) -> Result<()> {
        let i = self.index_of(word)?;
        self.bits.set(i, true);
        Ok(())
    }

    /// `|S↾n|`.
    pub fn count_upto(&self, n: u32) -> Result<u64> {
        if n > self.bound {
            return Err(Error::InsufficientKnowledge { n: n as u64, bound: self.bound as u64 + 1 });
        }
        Ok(self.bits.count_below(word_count_upto(self.alphabet_size, n).unwrap()))
    }

    /// All members, shortest first.
    pub fn words(&self) -> Vec<Vec<u32>> {
        let sigma = self.alphabet_size as u64;
        self.bits
            .iter_ones()
            .map(|idx| {
                let mut len = 0u32;
                while word_count_upto(self.alphabet_size, len).unwrap() <= idx {
                    len += 1;
                }
                let mut v = idx - if len == 0 { 0 } else { word_count_upto(self.alphabet_size, len - 1).unwrap() };
                let mut w = alloc::vec![0u32; len as usize];
                for slot in w.iter_mut().rev() {
                    if sigma > 1 {
                        *slot = (v % sigma) as u32;
                        v /= sigma;
                    }
                }
                w
            })
            .collect()
    }
}

/// `|S↾n| / |Σ*↾n|`.
pub fn word_prefix_density(s: &WordSetPrefix, n: u32) -> Result<Rational> {
    let den = word_count_upto(s.alphabet_size, n).ok_or(Error::Overflow("word count"))?;
    Ok(ratio(s.count_upto(n)?, den))
}

pub fn word_density_profile(
    s: &WordSetPrefix,
    lengths: &[u32],
    window: TailWindow,
) -> Result<DensityProfile> {
    let samples = lengths
        .iter()
        .map(|&n| Ok((n as u64, word_prefix_density(s, n)?)))
        .collect::<Result<Vec<_>>>()?;
    DensityProfile::from_samples(samples, window)
}

/// Knobs for [`strong_genericity_fit`].
#[derive(Clone, Debug)]
pub struct FitConfig {
    /// Rate reported when every sample already has density 1.
    pub default_sigma: Rational,
    /// Largest tolerated ratio between the constant needed to dominate every
    /// sample and the constant of the least-squares line.
    pub max_slack: f64,
    /// σ is rounded to a dyadic rational with this many fraction bits.
    pub sigma_bits: u32,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { default_sigma: ratio(1, 2), max_slack: 16.0, sigma_bits: 24 }
    }
}

/// Outcome of fitting `1 − ρ_n ≤ C σ^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericityFit {
    /// `1 − ρ_n ≤ c · sigma^n` holds exactly on every sample.
    Exponential { c: Rational, sigma: Rational },
    /// Every sample had density 1.
    Degenerate { c: Rational, sigma: Rational },
    /// The decay is not exponential against the fitted line.
    NoFit,
}

/// Evidence (not proof) of exponentially fast convergence to density 1.
///
/// Fits `ln(1 − ρ_n) ≈ a + n ln σ` by least squares over the samples with
/// `ρ_n < 1`, rounds σ to a dyadic rational, then takes the smallest `C` with
/// `1 − ρ_n ≤ C σ^n` on every sample. The fit is rejected when σ is not below
/// 1, when fewer than two samples are usable, or when that `C` exceeds the
/// fitted `e^a` by more than `max_slack`.
pub fn strong_genericity_fit(profile: &DensityProfile, config: &FitConfig) -> GenericityFit {
    let one = Rational::one();
    let gaps: Vec<(u64, Rational)> = profile
        .samples
        .iter()
        .filter(|(_, rho)| *rho < one)
        .map(|(n, rho)| (*n, &one - rho))
        .collect();
    if gaps.is_empty() {
        return GenericityFit::Degenerate { c: one, sigma: config.default_sigma.clone() };
    }
    if gaps.len() < 2 {
        return GenericityFit::NoFit;
    }
    let pts: Vec<(f64, f64)> = gaps
        .iter()
        .map(|(n, g)| (*n as f64, ln_rational(g)))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if !slope.is_finite() || slope >= 0.0 {
        return GenericityFit::NoFit;
    }
    let scale = 1u64 << config.sigma_bits;
    let num = libm::round(libm::exp(slope) * scale as f64) as u64;
    if num == 0 || num >= scale {
        return GenericityFit::NoFit;
    }
    let sigma = ratio(num, scale);
    let ln_sigma = libm::log(num as f64 / scale as f64);
    let needed = pts
        .iter()
        .map(|(n, y)| y - n * ln_sigma)
        .fold(f64::NEG_INFINITY, f64::max);
    if needed - intercept > libm::log(config.max_slack) {
        return GenericityFit::NoFit;
    }
    let c = gaps
        .iter()
        .map(|(n, g)| g / Pow::pow(&sigma, *n))
        .max()
        .expect("nonempty");
    GenericityFit::Exponential { c, sigma }
}

/// Natural log of a positive rational, robust to huge numerators and denominators.
pub(crate) fn ln_rational(q: &Rational) -> f64 {
    fn ln_big(x: &BigInt) -> f64 {
        let bits = x.bits();
        if bits <= 1000 {
            libm::log(x.to_f64().unwrap_or(f64::INFINITY))
        } else {
            let shift = bits - 900;
            let top: BigInt = x >> shift as usize;
            libm::log(top.to_f64().unwrap()) + shift as f64 * core::f64::consts::LN_2
        }
    }
    ln_big(q.numer()) - ln_big(q.denom())
}
