//! Zero patterns `I ↦ P(X(I) ≡ 0)`, explicit laws on `{0,1}^n`, and the maps
//! between them and from intensity measures.
//!
//! A configuration is indexed by the bitmask of its ones, so index
//! `Σ 2^{i-1} x_i`. Zero patterns are kept as logarithms.

use crate::error::{domain, Error, Result};
use crate::measure::{Mass, SignedSubsetMeasure, SubsetMeasure};
use crate::subset::{check_ground, moebius_supersets, zeta_subsets, Subset};
use crate::tolerance::Tolerances;

/// `I ↦ P(X(I) ≡ 0)` over all subsets of `[n]`, stored as `log z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPattern {
    n: usize,
    log_z: Vec<f64>,
}

impl ZeroPattern {
    /// Validates plain probabilities: length `2^n`, `z(∅) = 1`, positivity,
    /// `z ≤ 1` and monotonicity (all up to `tol.eq`).
    pub fn from_values(n: usize, z: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        check_ground(n)?;
        check_len(n, z.len())?;
        for (b, v) in z.iter().enumerate() {
            if v.is_nan() {
                return Err(Error::InvalidPattern(format!(
                    "z{} is NaN",
                    Subset::from_bits(b as u32)
                )));
            }
            if *v <= 0.0 {
                return Err(Error::InversionHypothesis(Subset::from_bits(b as u32)));
            }
        }
        ZeroPattern::from_log_values(n, z.iter().map(|v| v.ln()).collect(), tol)
    }

    pub fn from_log_values(n: usize, mut log_z: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        check_ground(n)?;
        check_len(n, log_z.len())?;
        if (log_z[0].exp() - 1.0).abs() > tol.eq {
            return Err(Error::InvalidPattern(format!(
                "z(∅) must be 1, got {}",
                log_z[0].exp()
            )));
        }
        log_z[0] = 0.0;
        for (b, lz) in log_z.iter().enumerate() {
            let set = Subset::from_bits(b as u32);
            if lz.is_nan() {
                return Err(Error::InvalidPattern(format!("log z{set} is NaN")));
            }
            if *lz == f64::NEG_INFINITY {
                return Err(Error::InversionHypothesis(set));
            }
            if lz.exp() > 1.0 + tol.eq {
                return Err(Error::InvalidPattern(format!(
                    "z{set} = {} exceeds 1",
                    lz.exp()
                )));
            }
        }
        for b in 0..log_z.len() {
            let zb = log_z[b].exp();
            for i in 0..n {
                let bit = 1usize << i;
                if b & bit == 0 {
                    let zc = log_z[b | bit].exp();
                    if zc > zb + tol.eq {
                        return Err(Error::InvalidPattern(format!(
                            "not monotone: z{} = {zc} > z{} = {zb}",
                            Subset::from_bits((b | bit) as u32),
                            Subset::from_bits(b as u32)
                        )));
                    }
                }
            }
        }
        Ok(ZeroPattern { n, log_z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self, set: Subset) -> f64 {
        self.log_z[set.bits() as usize].exp()
    }

    pub fn log_z(&self, set: Subset) -> f64 {
        self.log_z[set.bits() as usize]
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_z
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_z.iter().map(|v| v.exp()).collect()
    }

    /// Largest `|z(I) - z'(I)|`, or `None` when the ground sets differ.
    pub fn max_abs_diff(&self, other: &ZeroPattern) -> Option<f64> {
        if self.n != other.n {
            return None;
        }
        Some(
            self.log_z
                .iter()
                .zip(&other.log_z)
                .map(|(a, b)| (a.exp() - b.exp()).abs())
                .fold(0.0, f64::max),
        )
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if len != 1 << n {
        return Err(Error::InvalidPattern(format!(
            "expected {} entries for n = {n}, got {len}",
            1usize << n
        )));
    }
    Ok(())
}

/// An explicit law on `{0,1}^n`; `prob[x]` is the probability of the
/// configuration whose ones form the bitmask `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDistribution {
    n: usize,
    prob: Vec<f64>,
}

impl BinaryDistribution {
    pub fn new(n: usize, prob: Vec<f64>) -> Result<Self> {
        check_ground(n)?;
        if prob.len() != 1 << n {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities for n = {n}, got {}",
                1usize << n,
                prob.len()
            )));
        }
        if let Some(x) = prob.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "configuration {x:#b} has probability {}",
                prob[x]
            )));
        }
        let total: f64 = prob.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(BinaryDistribution { n, prob })
    }

    /// Builds a law from a function of the set of ones.
    pub fn from_fn(n: usize, f: impl Fn(Subset) -> f64) -> Result<Self> {
        check_ground(n)?;
        let prob = (0..1u32 << n).map(|x| f(Subset::from_bits(x))).collect();
        BinaryDistribution::new(n, prob)
    }

    /// The product law where each coordinate is one with probability `p`.
    pub fn product(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("p = {p} is not a probability"));
        }
        BinaryDistribution::from_fn(n, |ones| {
            p.powi(ones.len() as i32) * (1.0 - p).powi((n - ones.len()) as i32)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability of the configuration whose set of ones is `ones`.
    pub fn prob(&self, ones: Subset) -> f64 {
        self.prob[ones.bits() as usize]
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    /// `P(X(I) ≡ 0)`.
    pub fn zero_probability(&self, set: Subset) -> f64 {
        self.prob
            .iter()
            .enumerate()
            .filter(|(x, _)| (*x as u32) & set.bits() == 0)
            .map(|(_, p)| p)
            .sum()
    }

    /// `E[f(X)]` for a function of the set of ones.
    pub fn expect(&self, f: impl Fn(Subset) -> f64) -> f64 {
        self.prob
            .iter()
            .enumerate()
            .map(|(x, p)| p * f(Subset::from_bits(x as u32)))
            .sum()
    }

    pub fn max_abs_diff(&self, other: &BinaryDistribution) -> Option<f64> {
        if self.n != other.n {
            return None;
        }
        Some(
            self.prob
                .iter()
                .zip(&other.prob)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Dense union masses `A ↦ ν(S_A^∪)` for every `A ⊆ [n]` (entry 0 is 0),
/// computed as `total − Σ_{J ⊆ Aᶜ} ν(J)` with one zeta transform.
pub(crate) fn dense_union_masses(n: usize, dense: &[f64]) -> Vec<f64> {
    let mut below = dense.to_vec();
    below[0] = 0.0;
    let total: f64 = below.iter().sum();
    zeta_subsets(&mut below);
    let full = (1usize << n) - 1;
    (0..1usize << n)
        .map(|a| if a == 0 { 0.0 } else { total - below[full & !a] })
        .collect()
}

/// `z(I) = exp(−ν(S_I^∪))` for every `I`.
pub fn forward_zero_pattern(nu: &SubsetMeasure) -> Result<ZeroPattern> {
    let n = nu.n();
    let mut dense = vec![0.0; 1 << n];
    let mut infinite = Subset::EMPTY;
    for (set, m) in nu.atoms() {
        match m {
            Mass::Finite(v) => dense[set.bits() as usize] = v,
            Mass::Infinite => infinite = infinite.union(set),
        }
    }
    if !infinite.is_empty() {
        // the smallest offending set is a singleton inside an infinite atom
        let i = infinite.iter().next().unwrap_or(1);
        return Err(Error::Degenerate(Subset::singleton(i)));
    }
    let log_z = dense_union_masses(n, &dense).into_iter().map(|u| -u).collect();
    Ok(ZeroPattern { n, log_z })
}

/// `log z` produced by a signed measure; no validity is implied.
pub fn signed_forward_log_z(nu: &SignedSubsetMeasure) -> Vec<f64> {
    dense_union_masses(nu.n(), nu.dense())
        .into_iter()
        .map(|u| -u)
        .collect()
}

/// Inclusion–exclusion from the zero pattern to the law of `X`.
pub fn zero_pattern_to_distribution(
    z: &ZeroPattern,
    tol: &Tolerances,
) -> Result<BinaryDistribution> {
    let n = z.n;
    let full = (1usize << n) - 1;
    // exactly-zero-on-I probabilities, indexed by the zero set I
    let mut exact = z.values();
    moebius_supersets(&mut exact);
    let mut prob = vec![0.0; 1 << n];
    for (zeros, v) in exact.into_iter().enumerate() {
        let ones = full & !zeros;
        if v < -tol.inconsistency {
            return Err(Error::InconsistentZeroPattern {
                config: ones as u32,
                value: v,
            });
        }
        prob[ones] = v.max(0.0);
    }
    let total: f64 = prob.iter().sum();
    for p in &mut prob {
        *p /= total;
    }
    BinaryDistribution::new(n, prob)
}

/// Marginal sums `z(I) = P(X(I) ≡ 0)`; every entry must be positive.
pub fn distribution_to_zero_pattern(d: &BinaryDistribution) -> Result<ZeroPattern> {
    let n = d.n;
    let full = (1usize << n) - 1;
    let mut below = d.prob.clone();
    zeta_subsets(&mut below);
    let z: Vec<f64> = (0..=full).map(|i| below[full & !i]).collect();
    let mut zero_sets: Vec<Subset> = (0..=full)
        .filter(|&i| z[i] <= 0.0)
        .map(|i| Subset::from_bits(i as u32))
        .collect();
    zero_sets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.lex_cmp(*b)));
    if let Some(first) = zero_sets.first() {
        return Err(Error::InversionHypothesis(*first));
    }
    let log_z = z.iter().map(|v| v.min(1.0).ln()).collect();
    let mut out = ZeroPattern { n, log_z };
    out.log_z[0] = 0.0;
    Ok(out)
}

/// The law of `X^ν`.
pub fn forward_distribution(nu: &SubsetMeasure, tol: &Tolerances) -> Result<BinaryDistribution> {
    zero_pattern_to_distribution(&forward_zero_pattern(nu)?, tol)
}
