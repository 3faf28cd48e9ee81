//! Measures on the nonempty subsets of a finite ground set, and the algebra
//! on them: union and intersection masses, superposition, restriction and
//! conditioning on zeros.

use std::collections::BTreeMap;
use std::ops::Add;

use crate::error::{domain, Error, Result};
use crate::subset::{check_ground, Subset};

/// A nonnegative extended real. Infinite mass is an explicit variant so that
/// arithmetic on finite masses never produces `inf`/`NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mass {
    Finite(f64),
    Infinite,
}

impl Mass {
    pub const ZERO: Mass = Mass::Finite(0.0);

    pub fn is_infinite(self) -> bool {
        matches!(self, Mass::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Mass::Finite(v) => Some(v),
            Mass::Infinite => None,
        }
    }
}

impl Add for Mass {
    type Output = Mass;

    fn add(self, rhs: Mass) -> Mass {
        match (self, rhs) {
            (Mass::Finite(a), Mass::Finite(b)) => Mass::Finite(a + b),
            _ => Mass::Infinite,
        }
    }
}

/// Read access shared by the nonnegative and the signed measure types.
pub trait AtomicMeasure {
    fn ground(&self) -> usize;

    fn for_each_atom(&self, f: &mut dyn FnMut(Subset, Mass));
}

/// A nonnegative measure on `P([n]) \ {∅}`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetMeasure {
    n: usize,
    atoms: BTreeMap<Subset, Mass>,
}

impl SubsetMeasure {
    /// The zero measure on `[n]`.
    pub fn new(n: usize) -> Result<Self> {
        check_ground(n)?;
        Ok(SubsetMeasure {
            n,
            atoms: BTreeMap::new(),
        })
    }

    pub fn from_atoms<I>(n: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut m = SubsetMeasure::new(n)?;
        for (set, mass) in atoms {
            m.add_atom(set, mass)?;
        }
        Ok(m)
    }

    /// Product-measure intensity: every singleton carries `mass`.
    pub fn singletons(n: usize, mass: f64) -> Result<Self> {
        SubsetMeasure::from_atoms(n, (1..=n).map(|i| (Subset::singleton(i), mass)))
    }

    fn check_set(&self, set: Subset) -> Result<()> {
        if set.is_empty() {
            return domain("measures carry no mass on the empty set");
        }
        if !set.fits(self.n) {
            return domain(format!("{set} is not a subset of [{}]", self.n));
        }
        Ok(())
    }

    /// Adds `mass` to the atom at `set`. Zero masses are not stored.
    pub fn add_atom(&mut self, set: Subset, mass: f64) -> Result<()> {
        self.check_set(set)?;
        if !mass.is_finite() || mass < 0.0 {
            return domain(format!(
                "atom mass must be finite and nonnegative, got {mass} at {set}"
            ));
        }
        if mass == 0.0 {
            return Ok(());
        }
        let entry = self.atoms.entry(set).or_insert(Mass::ZERO);
        *entry = *entry + Mass::Finite(mass);
        Ok(())
    }

    pub fn add_infinite_atom(&mut self, set: Subset) -> Result<()> {
        self.check_set(set)?;
        self.atoms.insert(set, Mass::Infinite);
        Ok(())
    }

    pub fn with_atom(mut self, set: Subset, mass: f64) -> Result<Self> {
        self.add_atom(set, mass)?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self, set: Subset) -> Mass {
        self.atoms.get(&set).copied().unwrap_or(Mass::ZERO)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Subset, Mass)> + '_ {
        self.atoms.iter().map(|(s, m)| (*s, *m))
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn has_infinite_atoms(&self) -> bool {
        self.atoms.values().any(|m| m.is_infinite())
    }

    /// Largest absolute difference between atom masses, or `None` when the
    /// ground sets differ or infinite atoms do not line up.
    pub fn max_abs_diff(&self, other: &SubsetMeasure) -> Option<f64> {
        if self.n != other.n {
            return None;
        }
        let mut worst = 0.0f64;
        for set in self.atoms.keys().chain(other.atoms.keys()) {
            match (self.mass(*set), other.mass(*set)) {
                (Mass::Finite(a), Mass::Finite(b)) => worst = worst.max((a - b).abs()),
                (Mass::Infinite, Mass::Infinite) => {}
                _ => return None,
            }
        }
        Some(worst)
    }
}

impl AtomicMeasure for SubsetMeasure {
    fn ground(&self) -> usize {
        self.n
    }

    fn for_each_atom(&self, f: &mut dyn FnMut(Subset, Mass)) {
        for (s, m) in &self.atoms {
            f(*s, *m);
        }
    }
}

/// A finite signed measure on `P([n]) \ {∅}`, stored densely (index = bitmask,
/// index 0 is unused and always zero).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSubsetMeasure {
    n: usize,
    masses: Vec<f64>,
}

impl SignedSubsetMeasure {
    pub fn zero(n: usize) -> Result<Self> {
        check_ground(n)?;
        Ok(SignedSubsetMeasure {
            n,
            masses: vec![0.0; 1 << n],
        })
    }

    /// Takes a dense vector of length `2^n`; entry 0 is ignored.
    pub fn from_dense(n: usize, mut masses: Vec<f64>) -> Result<Self> {
        check_ground(n)?;
        if masses.len() != 1 << n {
            return domain(format!(
                "dense measure on [{n}] needs {} entries, got {}",
                1usize << n,
                masses.len()
            ));
        }
        if let Some(bad) = masses.iter().position(|m| !m.is_finite()) {
            return domain(format!(
                "signed masses must be finite, got {} at {}",
                masses[bad],
                Subset::from_bits(bad as u32)
            ));
        }
        masses[0] = 0.0;
        Ok(SignedSubsetMeasure { n, masses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self, set: Subset) -> f64 {
        self.masses[set.bits() as usize]
    }

    pub fn set_mass(&mut self, set: Subset, mass: f64) -> Result<()> {
        if set.is_empty() || !set.fits(self.n) {
            return domain(format!("{set} is not a nonempty subset of [{}]", self.n));
        }
        self.masses[set.bits() as usize] = mass;
        Ok(())
    }

    pub fn dense(&self) -> &[f64] {
        &self.masses
    }

    /// All nonempty subsets with their (possibly zero) masses, in bitmask order.
    pub fn atoms(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .skip(1)
            .map(|(b, m)| (Subset::from_bits(b as u32), *m))
    }

    /// The nonnegative measure with the same atoms, clipping entries in
    /// `[-slack, 0)` to zero. Fails if some atom is more negative than that.
    pub fn to_nonnegative(&self, slack: f64) -> Result<SubsetMeasure> {
        let mut out = SubsetMeasure::new(self.n)?;
        for (set, m) in self.atoms() {
            if m < -slack {
                return Err(Error::NotRepresentable(format!(
                    "atom {set} carries negative mass {m:e}"
                )));
            }
            if m > 0.0 {
                out.add_atom(set, m)?;
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &SignedSubsetMeasure) -> Option<f64> {
        if self.n != other.n {
            return None;
        }
        Some(
            self.masses
                .iter()
                .zip(&other.masses)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

impl TryFrom<&SubsetMeasure> for SignedSubsetMeasure {
    type Error = Error;

    fn try_from(nu: &SubsetMeasure) -> Result<Self> {
        let mut out = SignedSubsetMeasure::zero(nu.n)?;
        for (set, m) in nu.atoms() {
            match m {
                Mass::Finite(v) => out.masses[set.bits() as usize] = v,
                Mass::Infinite => return Err(Error::Degenerate(set)),
            }
        }
        Ok(out)
    }
}

impl AtomicMeasure for SignedSubsetMeasure {
    fn ground(&self) -> usize {
        self.n
    }

    fn for_each_atom(&self, f: &mut dyn FnMut(Subset, Mass)) {
        for (set, m) in self.atoms() {
            if m != 0.0 {
                f(set, Mass::Finite(m));
            }
        }
    }
}

fn check_query(n: usize, a: Subset) -> Result<()> {
    if a.is_empty() {
        return domain("query set must be nonempty");
    }
    if !a.fits(n) {
        return domain(format!("{a} is not a subset of [{n}]"));
    }
    Ok(())
}

/// `ν(S_A^∪)`: total mass of the stored sets that meet `a`.
pub fn union_mass<M: AtomicMeasure + ?Sized>(nu: &M, a: Subset) -> Result<Mass> {
    check_query(nu.ground(), a)?;
    let mut total = Mass::ZERO;
    nu.for_each_atom(&mut |set, m| {
        if set.intersects(a) {
            total = total + m;
        }
    });
    Ok(total)
}

/// `ν(S_A^∩)`: total mass of the stored sets that contain `a`.
pub fn intersection_mass<M: AtomicMeasure + ?Sized>(nu: &M, a: Subset) -> Result<Mass> {
    check_query(nu.ground(), a)?;
    let mut total = Mass::ZERO;
    nu.for_each_atom(&mut |set, m| {
        if a.is_subset_of(set) {
            total = total + m;
        }
    });
    Ok(total)
}

/// `ν + ν'`, whose process is the coordinatewise max of independent copies.
pub fn superpose(a: &SubsetMeasure, b: &SubsetMeasure) -> Result<SubsetMeasure> {
    if a.n != b.n {
        return Err(Error::GroundMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let mut out = a.clone();
    for (set, m) in b.atoms() {
        match m {
            Mass::Finite(v) => out.add_atom(set, v)?,
            Mass::Infinite => out.add_infinite_atom(set)?,
        }
    }
    Ok(out)
}

/// Pushforward of `ν` under `J ↦ J ∩ B`, dropping what lands on `∅`.
/// The ground set is kept, so the result lives on subsets of `b`.
pub fn restrict(nu: &SubsetMeasure, b: Subset) -> Result<SubsetMeasure> {
    check_query(nu.n, b)?;
    let mut out = SubsetMeasure::new(nu.n)?;
    for (set, m) in nu.atoms() {
        let image = set.intersection(b);
        if image.is_empty() {
            continue;
        }
        match m {
            Mass::Finite(v) => out.add_atom(image, v)?,
            Mass::Infinite => out.add_infinite_atom(image)?,
        }
    }
    Ok(out)
}

/// The intensity of `X | {X(Bᶜ) ≡ 0}` on `B`: the atoms of `ν` inside `b`.
pub fn condition_zero(nu: &SubsetMeasure, b: Subset) -> Result<SubsetMeasure> {
    check_query(nu.n, b)?;
    let mut out = SubsetMeasure::new(nu.n)?;
    for (set, m) in nu.atoms() {
        if set.is_subset_of(b) {
            match m {
                Mass::Finite(v) => out.add_atom(set, v)?,
                Mass::Infinite => out.add_infinite_atom(set)?,
            }
        }
    }
    Ok(out)
}
