//! Inversion from zero patterns to the unique signed intensity, the
//! representability test, and the exchangeable fast path keyed by cardinality.

use std::cmp::Ordering;

use astro_float::{BigFloat, Consts};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::SignedSubsetMeasure;
use crate::pattern::ZeroPattern;
use crate::precision::{big_ln, settle_levels, LogZeroSource};
use crate::subset::{check_ground, moebius_subsets, Subset};
use crate::tolerance::Tolerances;

/// `ν(K) = Σ_{I ⊆ K} (−1)^{|K|−|I|} log z([n] \ I)` for every nonempty `K`.
pub fn invert(z: &ZeroPattern) -> SignedSubsetMeasure {
    let n = z.n();
    let full = (1usize << n) - 1;
    let logs = z.log_values();
    let mut g: Vec<f64> = (0..=full).map(|i| logs[full & !i]).collect();
    moebius_subsets(&mut g);
    g[0] = 0.0;
    SignedSubsetMeasure::from_dense(n, g).expect("dense inversion has the right shape")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Representability {
    Representable,
    NotRepresentable { witness: Subset, mass: f64 },
}

impl Representability {
    pub fn is_representable(&self) -> bool {
        matches!(self, Representability::Representable)
    }
}

/// Picks the most negative mass; near-ties go to the lexicographically
/// smallest subset.
pub(crate) fn most_negative(atoms: impl Iterator<Item = (Subset, f64)>) -> Option<(Subset, f64)> {
    let mut best: Option<(Subset, f64)> = None;
    for (set, m) in atoms {
        best = match best {
            None => Some((set, m)),
            Some((bs, bm)) => {
                let slack = 1e-12 * bm.abs().max(1.0);
                if m < bm - slack
                    || ((m - bm).abs() <= slack && set.lex_cmp(bs) == Ordering::Less)
                {
                    Some((set, m))
                } else {
                    Some((bs, bm))
                }
            }
        };
    }
    best
}

/// Sign test on an already inverted measure.
pub fn classify_measure(nu: &SignedSubsetMeasure, tol: f64) -> Representability {
    match most_negative(nu.atoms()) {
        Some((witness, mass)) if mass < -tol => {
            Representability::NotRepresentable { witness, mass }
        }
        _ => Representability::Representable,
    }
}

/// Representable iff every atom of the inverted measure is `≥ −tol`.
pub fn is_representable(z: &ZeroPattern, tol: f64) -> Representability {
    classify_measure(&invert(z), tol)
}

/// `z_j = P(X([j]) ≡ 0)` for an exchangeable law on `{0,1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricZeroPattern {
    n: usize,
    log_z: Vec<f64>,
    // the caller's plain values, kept so that high-precision logs start from them
    values: Option<Vec<f64>>,
}

impl SymmetricZeroPattern {
    pub fn from_values(z: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if let Some(j) = z.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            if z[j] == 0.0 {
                return Err(Error::InversionHypothesis(Subset::full(j.min(32))));
            }
            return Err(Error::InvalidPattern(format!("z_{j} = {} is not positive", z[j])));
        }
        let log_z = z.iter().map(|v| v.ln()).collect();
        let mut out = SymmetricZeroPattern::from_log_values(log_z, tol)?;
        let mut values = z;
        values[0] = 1.0;
        out.values = Some(values);
        Ok(out)
    }

    pub fn from_log_values(mut log_z: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if log_z.len() < 2 {
            return Err(Error::Domain(
                "a symmetric zero pattern needs z_0..z_n with n >= 1".into(),
            ));
        }
        let n = log_z.len() - 1;
        if (log_z[0].exp() - 1.0).abs() > tol.eq {
            return Err(Error::InvalidPattern(format!(
                "z_0 must be 1, got {}",
                log_z[0].exp()
            )));
        }
        log_z[0] = 0.0;
        for (j, lz) in log_z.iter().enumerate() {
            if lz.is_nan() || *lz == f64::INFINITY || *lz > tol.eq {
                return Err(Error::InvalidPattern(format!("log z_{j} = {lz} is invalid")));
            }
            if *lz == f64::NEG_INFINITY {
                return Err(Error::InvalidPattern(format!("z_{j} = 0")));
            }
        }
        for j in 1..=n {
            if log_z[j].exp() > log_z[j - 1].exp() + tol.eq {
                return Err(Error::InvalidPattern(format!(
                    "not decreasing: z_{j} > z_{}",
                    j - 1
                )));
            }
        }
        Ok(SymmetricZeroPattern {
            n,
            log_z,
            values: None,
        })
    }

    /// Reads off `z_j = z([j])` from a full pattern, which must be
    /// permutation invariant to `tol.eq`.
    pub fn from_pattern(z: &ZeroPattern, tol: &Tolerances) -> Result<Self> {
        let n = z.n();
        let values: Vec<f64> = (0..=n)
            .map(|j| if j == 0 { 1.0 } else { z.z(Subset::full(j)) })
            .collect();
        for b in 0..1u32 << n {
            let set = Subset::from_bits(b);
            if (z.z(set) - values[set.len()]).abs() > tol.eq {
                return Err(Error::InvalidPattern(format!(
                    "pattern is not permutation invariant at {set}"
                )));
            }
        }
        SymmetricZeroPattern::from_values(values, tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self, j: usize) -> f64 {
        match &self.values {
            Some(v) => v[j],
            None => self.log_z[j].exp(),
        }
    }

    pub fn log_z(&self, j: usize) -> f64 {
        self.log_z[j]
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_z
    }

    /// The full pattern `I ↦ z_{|I|}` (requires `n ≤ 24`).
    pub fn expand(&self, tol: &Tolerances) -> Result<ZeroPattern> {
        check_ground(self.n)?;
        let log_z = (0..1u32 << self.n)
            .map(|b| self.log_z[b.count_ones() as usize])
            .collect();
        ZeroPattern::from_log_values(self.n, log_z, tol)
    }
}

impl LogZeroSource for SymmetricZeroPattern {
    fn ground(&self) -> usize {
        self.n
    }

    fn log_zeros(&self, bits: usize, cc: &mut Consts) -> Result<Vec<BigFloat>> {
        Ok(match &self.values {
            Some(v) => v.iter().map(|z| big_ln(*z, bits, cc)).collect(),
            None => self
                .log_z
                .iter()
                .map(|l| BigFloat::from_f64(*l, bits))
                .collect(),
        })
    }
}

/// A permutation-invariant intensity: `ν(K) = λ_{|K|}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelMeasure {
    n: usize,
    lambda: Vec<f64>,
    /// Working precision at which the levels settled (0 for plain evaluation).
    bits: usize,
}

impl LevelMeasure {
    pub fn new(lambda: Vec<f64>, bits: usize) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Domain("a level measure needs n >= 1".into()));
        }
        if let Some(l) = lambda.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("level {} is not finite", l + 1)));
        }
        Ok(LevelMeasure {
            n: lambda.len(),
            lambda,
            bits,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `λ_ℓ`, 1-based.
    pub fn level(&self, l: usize) -> f64 {
        self.lambda[l - 1]
    }

    pub fn levels(&self) -> &[f64] {
        &self.lambda
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Absolute agreement floor the levels settled under, `2^{−bits/4}`;
    /// levels smaller than this have no resolved sign. Zero for plain
    /// evaluation.
    pub fn resolution(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            2f64.powi(-((self.bits / 4).min(1000) as i32))
        }
    }

    /// Most negative level below `−tol`, as `(ℓ, λ_ℓ)`; ties go to the smallest ℓ.
    pub fn witness(&self, tol: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.lambda.iter().enumerate() {
            if *v < -tol && best.map_or(true, |(_, b)| *v < b - 1e-12 * b.abs().max(1.0)) {
                best = Some((i + 1, *v));
            }
        }
        best
    }

    pub fn is_representable(&self, tol: f64) -> bool {
        self.witness(tol).is_none()
    }

    /// The dense signed measure with `ν(K) = λ_{|K|}` (requires `n ≤ 24`).
    pub fn to_signed_measure(&self) -> Result<SignedSubsetMeasure> {
        check_ground(self.n)?;
        let dense = (0..1u32 << self.n)
            .map(|b| match b.count_ones() as usize {
                0 => 0.0,
                k => self.lambda[k - 1],
            })
            .collect();
        SignedSubsetMeasure::from_dense(self.n, dense)
    }
}

/// `λ_ℓ = Σ_{j=0}^{ℓ} (−1)^{ℓ−j} C(ℓ,j) log z_{n−j}` in arbitrary precision,
/// escalating from `precision_bits`.
pub fn symmetric_invert(z: &SymmetricZeroPattern, precision_bits: usize) -> Result<LevelMeasure> {
    levels_from_source(z, precision_bits)
}

pub(crate) fn levels_from_source(
    src: &dyn LogZeroSource,
    precision_bits: usize,
) -> Result<LevelMeasure> {
    let settled = settle_levels(src, precision_bits)?;
    LevelMeasure::new(settled.lambda, settled.bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::SubsetMeasure;
    use crate::pattern::{distribution_to_zero_pattern, forward_zero_pattern, BinaryDistribution};

    fn s(n: usize, e: &[usize]) -> Subset {
        Subset::from_elements(n, e).unwrap()
    }

    #[test]
    fn product_law_inverts_to_singletons() {
        let p = 0.35f64;
        let d = BinaryDistribution::product(4, p).unwrap();
        let nu = invert(&distribution_to_zero_pattern(&d).unwrap());
        for (set, m) in nu.atoms() {
            let want = if set.len() == 1 { -(1.0 - p).ln() } else { 0.0 };
            assert!((m - want).abs() < 1e-12, "{set}: {m}");
        }
    }

    #[test]
    fn invert_undoes_forward() {
        let nu = SubsetMeasure::from_atoms(
            3,
            [
                (s(3, &[1]), 0.3),
                (s(3, &[1, 3]), 1.1),
                (s(3, &[2, 3]), 0.05),
                (Subset::full(3), 0.7),
            ],
        )
        .unwrap();
        let back = invert(&forward_zero_pattern(&nu).unwrap());
        let want = SignedSubsetMeasure::try_from(&nu).unwrap();
        assert!(back.max_abs_diff(&want).unwrap() < 1e-13);
        assert!(is_representable(&forward_zero_pattern(&nu).unwrap(), 1e-9).is_representable());
    }

    #[test]
    fn witness_is_most_negative_then_lexicographic() {
        let atoms = [
            (s(3, &[2, 3]), -0.5),
            (s(3, &[1, 2]), -0.5),
            (s(3, &[1]), -0.1),
        ];
        assert_eq!(most_negative(atoms.into_iter()), Some((s(3, &[1, 2]), -0.5)));
    }

    #[test]
    fn symmetric_pattern_validation() {
        let tol = Tolerances::default();
        assert!(SymmetricZeroPattern::from_values(vec![1.0, 0.5, 0.6], &tol).is_err());
        assert!(SymmetricZeroPattern::from_values(vec![0.9, 0.5], &tol).is_err());
        assert!(SymmetricZeroPattern::from_values(vec![1.0, 0.5, 0.0], &tol).is_err());
        assert!(SymmetricZeroPattern::from_values(vec![1.0], &tol).is_err());
        assert!(SymmetricZeroPattern::from_values(vec![1.0, 0.5, 0.25], &tol).is_ok());
    }

    #[test]
    fn symmetric_constant_tail() {
        // z = (1, c, ..., c): only the top level survives
        let tol = Tolerances::default();
        let c = 0.3f64;
        let z = SymmetricZeroPattern::from_values(vec![1.0, c, c, c, c], &tol).unwrap();
        let levels = symmetric_invert(&z, 256).unwrap();
        let general = invert(&z.expand(&tol).unwrap());
        for (set, m) in general.atoms() {
            assert!((levels.level(set.len()) - m).abs() < 1e-12);
        }
        for l in 1..4 {
            assert!(levels.level(l).abs() < 1e-15);
        }
        assert!((levels.level(4) + c.ln()).abs() < 1e-15);
    }

    #[test]
    fn level_witness() {
        let lm = LevelMeasure::new(vec![0.5, -0.2, -0.7, -0.7], 0).unwrap();
        assert_eq!(lm.witness(1e-9), Some((3, -0.7)));
        assert!(!lm.is_representable(1e-9));
        assert!(LevelMeasure::new(vec![0.1, 0.0], 0).unwrap().is_representable(1e-9));
    }
}
