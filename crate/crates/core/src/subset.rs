//! Subsets of a finite ground set `[n] = {1, ..., n}` as machine-word bitmasks,
//! plus the fast zeta and Möbius transforms over the subset lattice.
//!
//! Element `i` (1-based) is stored in bit `i - 1`. A dense set function on
//! `[n]` is a slice of length `2^n` indexed by bitmask.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, Result};

/// Largest ground set supported by the dense (non-symmetric) code paths.
pub const MAX_GROUND: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 32);
        if n == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!((1..=32).contains(&i));
        Subset(1 << (i - 1))
    }

    /// The discrete interval `{a, a+1, ..., b}`, 1-based and inclusive.
    pub fn interval(a: usize, b: usize) -> Self {
        debug_assert!(1 <= a && a <= b && b <= 32);
        Subset(((Subset::full(b).0 as u64) & !((1u64 << (a - 1)) - 1)) as u32)
    }

    /// Builds a subset from 1-based elements, which must be strictly increasing
    /// and lie in `[n]`.
    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        let mut prev = 0usize;
        for &e in elements {
            if e == 0 || e > n {
                return domain(format!("element {e} outside ground set [1, {n}]"));
            }
            if e <= prev {
                return domain(format!("subset list {elements:?} is not strictly increasing"));
            }
            prev = e;
            bits |= 1 << (e - 1);
        }
        Ok(Subset(bits))
    }

    pub fn elements(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i + 1)
            }
        })
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= 32 && self.0 & (1 << (i - 1)) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & Subset::full(n).0)
    }

    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(Subset::full(n))
    }

    /// True when the elements form a run of consecutive integers.
    pub fn is_interval(self) -> bool {
        if self.0 == 0 {
            return false;
        }
        let shifted = self.0 >> self.0.trailing_zeros();
        shifted & (shifted + 1) == 0
    }

    /// Lexicographic order on the sorted element lists, so `{1,2} < {1,3} < {2}`.
    pub fn lex_cmp(self, other: Subset) -> Ordering {
        let mut a = self.iter();
        let mut b = other.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as its sorted 1-based element list.
impl serde::Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

pub(crate) fn check_ground(n: usize) -> Result<()> {
    if n == 0 {
        return domain("ground set must have n >= 1");
    }
    if n > MAX_GROUND {
        return domain(format!("ground set size {n} exceeds the dense limit {MAX_GROUND}"));
    }
    Ok(())
}

/// `f(S) <- sum_{T subset of S} f(T)`.
pub fn zeta_subsets(f: &mut [f64]) {
    let size = f.len();
    debug_assert!(size.is_power_of_two());
    let mut bit = 1;
    while bit < size {
        for s in 0..size {
            if s & bit != 0 {
                f[s] += f[s ^ bit];
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`zeta_subsets`]: `f(S) <- sum_{T subset of S} (-1)^{|S|-|T|} f(T)`.
pub fn moebius_subsets(f: &mut [f64]) {
    let size = f.len();
    debug_assert!(size.is_power_of_two());
    let mut bit = 1;
    while bit < size {
        for s in 0..size {
            if s & bit != 0 {
                f[s] -= f[s ^ bit];
            }
        }
        bit <<= 1;
    }
}

/// `f(S) <- sum_{T superset of S} f(T)`.
pub fn zeta_supersets(f: &mut [f64]) {
    let size = f.len();
    debug_assert!(size.is_power_of_two());
    let mut bit = 1;
    while bit < size {
        for s in 0..size {
            if s & bit == 0 {
                f[s] += f[s | bit];
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`zeta_supersets`].
pub fn moebius_supersets(f: &mut [f64]) {
    let size = f.len();
    debug_assert!(size.is_power_of_two());
    let mut bit = 1;
    while bit < size {
        for s in 0..size {
            if s & bit == 0 {
                f[s] -= f[s | bit];
            }
        }
        bit <<= 1;
    }
}
