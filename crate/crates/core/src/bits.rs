use alloc::vec;
use alloc::vec::Vec;

const WORD: u64 = 64;

/// Fixed-length bitset over `[0, len)` with fast prefix popcounts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bitset {
    len: u64,
    words: Vec<u64>,
}

impl core::fmt::Debug for Bitset {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_set().entries(self.iter_ones()).finish()
    }
}

impl Bitset {
    pub fn new(len: u64) -> Self {
        let words = len.div_ceil(WORD) as usize;
        Bitset { len, words: vec![0; words] }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[(i / WORD) as usize] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: u64, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let w = &mut self.words[(i / WORD) as usize];
        let mask = 1u64 << (i % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Grows (never shrinks) the bitset; new bits are clear.
    pub fn grow(&mut self, len: u64) {
        if len > self.len {
            self.len = len;
            self.words.resize(len.div_ceil(WORD) as usize, 0);
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of set bits in `[0, end)`.
    pub fn count_below(&self, end: u64) -> u64 {
        let end = end.min(self.len);
        let full = (end / WORD) as usize;
        let mut n: u64 = self.words[..full].iter().map(|w| w.count_ones() as u64).sum();
        let rem = end % WORD;
        if rem != 0 {
            n += (self.words[full] & ((1u64 << rem) - 1)).count_ones() as u64;
        }
        n
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(wi as u64 * WORD + tz)
            })
        })
    }

    /// Bitwise combination truncated to the shorter length.
    pub fn zip_with(&self, other: &Bitset, f: impl Fn(u64, u64) -> u64) -> Bitset {
        let len = self.len.min(other.len);
        let n = len.div_ceil(WORD) as usize;
        let mut words: Vec<u64> = self.words[..n]
            .iter()
            .zip(&other.words[..n])
            .map(|(&a, &b)| f(a, b))
            .collect();
        let rem = len % WORD;
        if rem != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        Bitset { len, words }
    }

    /// Keeps only `[0, len)`.
    pub fn truncate(&self, len: u64) -> Bitset {
        let mut out = Bitset::new(len.min(self.len));
        let n = out.words.len();
        out.words.copy_from_slice(&self.words[..n]);
        let rem = out.len % WORD;
        if rem != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        out
    }
}
