//! Model-specific verdicts: the Curie-Weiss zero pattern and a search for
//! negative levels, and the one-sided criteria for Markov chains on trees and
//! the Ising model on `Z^d`.
//!
//! The Curie-Weiss law is `μ(σ) ∝ exp(J Σ_{i<j} σ_i σ_j)` with `J = β/n`,
//! read as a `{0,1}` process by identifying spin `−1` with `0`.

use astro_float::{BigFloat, Consts};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::moebius::{levels_from_source, LevelMeasure, SymmetricZeroPattern};
use crate::polylog::root_r2;
use crate::precision::{to_f64, LogZeroSource, DEFAULT_PRECISION_BITS, RM};
use crate::tolerance::Tolerances;

pub const MAX_CURIE_WEISS_N: usize = 4096;

/// Levels below this count as negative in the search.
pub const NEGATIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurieWeissSpec {
    n: usize,
    beta: f64,
}

impl CurieWeissSpec {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if !(2..=MAX_CURIE_WEISS_N).contains(&n) {
            return domain(format!("need 2 <= n <= {MAX_CURIE_WEISS_N}, got {n}"));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return domain(format!("beta = {beta} must be finite and nonnegative"));
        }
        Ok(CurieWeissSpec { n, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn coupling(&self) -> f64 {
        self.beta / self.n as f64
    }
}

impl LogZeroSource for CurieWeissSpec {
    fn ground(&self) -> usize {
        self.n
    }

    fn log_zeros(&self, bits: usize, cc: &mut Consts) -> Result<Vec<BigFloat>> {
        let n = self.n;
        let j = BigFloat::from_f64(self.beta, bits).div(&BigFloat::from_u64(n as u64, bits), bits, RM);
        let half = BigFloat::from_f64(0.5, bits);
        // w(k) = exp(J((2k − n)² − n)/2), k = number of +1 spins
        let w: Vec<BigFloat> = (0..=n)
            .map(|k| {
                let m = 2 * k as i64 - n as i64;
                let e = BigFloat::from_f64((m * m - n as i64) as f64, bits);
                e.mul(&j, bits, RM).mul(&half, bits, RM).exp(bits, RM, cc)
            })
            .collect();
        // S_j = Σ_k C(n − j, k) w(k): configurations with the first j spins down
        let partial = |m: usize| -> BigFloat {
            let mut binom = BigFloat::from_u64(1, bits);
            let mut acc = w[0].clone();
            for k in 1..=m {
                binom = binom
                    .mul(&BigFloat::from_u64((m - k + 1) as u64, bits), bits, RM)
                    .div(&BigFloat::from_u64(k as u64, bits), bits, RM);
                acc = acc.add(&binom.mul(&w[k], bits, RM), bits, RM);
            }
            acc
        };
        let log_total = partial(n).ln(bits, RM, cc);
        let mut out = Vec::with_capacity(n + 1);
        for jj in 0..=n {
            if jj == 0 {
                out.push(BigFloat::from_f64(0.0, bits));
            } else {
                out.push(partial(n - jj).ln(bits, RM, cc).sub(&log_total, bits, RM));
            }
        }
        Ok(out)
    }
}

/// `z_j` of the Curie-Weiss law, computed at `precision_bits` and rounded to
/// `f64`. Level computations should use [`curie_weiss_levels`], which
/// inverts the high-precision values directly.
pub fn curie_weiss_zero_pattern(
    spec: &CurieWeissSpec,
    precision_bits: usize,
) -> Result<SymmetricZeroPattern> {
    crate::precision::check_bits(precision_bits)?;
    let mut cc = crate::precision::consts()?;
    let log_z: Vec<f64> = spec
        .log_zeros(precision_bits, &mut cc)?
        .iter()
        .map(to_f64)
        .collect();
    let values = log_z.iter().map(|l| l.exp()).collect();
    SymmetricZeroPattern::from_values(values, &Tolerances::default())
}

/// Levels of the Curie-Weiss law with precision escalation.
pub fn curie_weiss_levels(spec: &CurieWeissSpec, precision_bits: usize) -> Result<LevelMeasure> {
    levels_from_source(spec, precision_bits)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurieWeissWitness {
    pub n: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativitySearch {
    pub beta: f64,
    pub n_max: usize,
    /// First `(n, k)` in order of `n`, then `k`, with `λ_k < −1e−9`.
    pub found: Option<CurieWeissWitness>,
    /// Sizes whose levels did not settle within the precision ceiling.
    pub cancellation_failures: Vec<usize>,
}

fn start_bits(n: usize) -> usize {
    // the top level cancels roughly n bits
    (n + 128).next_power_of_two().clamp(DEFAULT_PRECISION_BITS, 4096)
}

/// Scans `n = 2..=n_max` for a negative level. Sizes are evaluated in
/// parallel batches; the smallest `n` with a hit is returned.
pub fn curie_weiss_negativity_search(beta: f64, n_max: usize) -> Result<NegativitySearch> {
    if !(2..=MAX_CURIE_WEISS_N).contains(&n_max) {
        return domain(format!("need 2 <= n_max <= {MAX_CURIE_WEISS_N}, got {n_max}"));
    }
    CurieWeissSpec::new(2, beta)?;
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut failures = Vec::new();
    let mut start = 2;
    while start <= n_max {
        let end = (start + batch - 1).min(n_max);
        let results: Vec<(usize, Result<LevelMeasure>)> = (start..=end)
            .into_par_iter()
            .map(|n| {
                let spec = CurieWeissSpec { n, beta };
                (n, curie_weiss_levels(&spec, start_bits(n)))
            })
            .collect();
        for (n, res) in results {
            match res {
                Ok(levels) => {
                    if let Some((k, value)) = levels
                        .levels()
                        .iter()
                        .enumerate()
                        .find(|(_, v)| **v < -NEGATIVITY_TOL)
                        .map(|(i, v)| (i + 1, *v))
                    {
                        return Ok(NegativitySearch {
                            beta,
                            n_max,
                            found: Some(CurieWeissWitness { n, k, value }),
                            cancellation_failures: failures,
                        });
                    }
                }
                Err(Error::CancellationFailure { .. }) => failures.push(n),
                Err(e) => return Err(e),
            }
        }
        start = end + 1;
    }
    Ok(NegativitySearch {
        beta,
        n_max,
        found: None,
        cancellation_failures: failures,
    })
}

/// One-sided verdicts: the criteria only ever rule representability out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OneSidedVerdict {
    NotInR,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundVerdict {
    pub verdict: OneSidedVerdict,
    /// The quantity compared with the threshold.
    pub statistic: f64,
    pub threshold: f64,
}

fn threshold(n: usize) -> Result<f64> {
    Ok(root_r2(n, 1e-15)?.threshold)
}

/// Markov chain on the `d`-regular tree with parameter `r`: not in R when
/// `r < 1/(1 − r_2^{(d)})`. The chain's `p` plays no role in the bound.
pub fn tree_mc_verdict(d: usize, r: f64) -> Result<BoundVerdict> {
    if d < 3 {
        return domain(format!("need d >= 3, got {d}"));
    }
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("r = {r} must lie in (0, 1)"));
    }
    let thr = threshold(d)?;
    Ok(BoundVerdict {
        verdict: if r < thr {
            OneSidedVerdict::NotInR
        } else {
            OneSidedVerdict::Inconclusive
        },
        statistic: r,
        threshold: thr,
    })
}

/// Plus-phase Ising model on `Z^d` at coupling `J`: not in R when
/// `e^{2dJ}/(e^{2dJ} + e^{−2dJ}) ≤ 1/(1 − r_2^{(2d)})`.
pub fn ising_verdict(d: usize, coupling: f64) -> Result<BoundVerdict> {
    if d < 2 {
        return domain(format!("need d >= 2, got {d}"));
    }
    if !(coupling > 0.0 && coupling.is_finite()) {
        return domain(format!("J = {coupling} must be positive"));
    }
    let thr = threshold(2 * d)?;
    // e^{a}/(e^{a} + e^{−a}) = 1/(1 + e^{−2a})
    let stat = 1.0 / (1.0 + (-4.0 * d as f64 * coupling).exp());
    Ok(BoundVerdict {
        verdict: if stat <= thr {
            OneSidedVerdict::NotInR
        } else {
            OneSidedVerdict::Inconclusive
        },
        statistic: stat,
        threshold: thr,
    })
}
