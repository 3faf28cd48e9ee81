//! Window sampler for translation-invariant intensities on `ℤ` supported on
//! intervals, with Monte-Carlo checks against the analytic zero
//! probabilities and the domination-from-below criterion.
//!
//! Every interval `[a, a+ℓ−1]` meeting the window is present independently
//! with probability `1 − e^{−w_ℓ}`; a site is one iff it lies in a present
//! interval. Per start `a`, the number of present intervals over all lengths
//! is Poisson with rate `Σ w_ℓ` and each picks its length from `w_ℓ / Σ w`,
//! which has the same law. The sampler is exact for the stored (truncated)
//! lengths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Error, Result};
use crate::markov::IntervalNu;
use crate::measure::SubsetMeasure;
use crate::pattern::{forward_distribution, BinaryDistribution};
use crate::subset::Subset;
use crate::tolerance::Tolerances;

/// Starting positions per random stream; also the draw-block size of the
/// repeated-window checks.
const STREAM_BLOCK: usize = 1024;

/// Largest window length accepted by [`sample_window`].
pub const MAX_WINDOW: usize = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowSample {
    pub n: usize,
    #[serde(serialize_with = "bits_as_string")]
    pub bits: Vec<bool>,
    pub seed: u64,
}

fn bits_as_string<S: Serializer>(bits: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&bit_string(bits))
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

impl WindowSample {
    pub fn bit_string(&self) -> String {
        bit_string(&self.bits)
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

/// Rates and length table shared by all draws.
struct Prepared {
    max_len: usize,
    count: Option<Poisson<f64>>,
    cumulative: Vec<f64>,
    singleton_keep: f64,
}

impl Prepared {
    fn new(inu: &IntervalNu, singleton_extra: f64) -> Result<Self> {
        if !(singleton_extra >= 0.0 && singleton_extra.is_finite()) {
            return domain(format!("singleton mass {singleton_extra} must be finite and nonnegative"));
        }
        let first_moment: f64 = inu.singleton_union_mass();
        if !first_moment.is_finite() {
            return domain("Σ ℓ w_ℓ is not finite");
        }
        let mut acc = 0.0;
        let cumulative: Vec<f64> = inu
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let count = if acc > 0.0 {
            Some(Poisson::new(acc).map_err(|e| Error::Domain(format!("rate {acc}: {e}")))?)
        } else {
            None
        };
        Ok(Prepared {
            max_len: inu.max_len(),
            count,
            cumulative,
            singleton_keep: (-singleton_extra).exp(),
        })
    }

    fn length<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let u = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|c| *c <= u).min(self.max_len - 1) + 1
    }

    /// Starts `first..first+len` (window coordinates, sites `0..n`), marking
    /// ones into `ones`.
    fn fill_starts<R: Rng>(&self, first: i64, len: usize, n: usize, ones: &mut [bool], rng: &mut R) {
        let Some(count) = &self.count else { return };
        for a in first..first + len as i64 {
            let k = count.sample(rng) as u64;
            for _ in 0..k {
                let l = self.length(rng) as i64;
                let lo = a.max(0);
                let hi = (a + l - 1).min(n as i64 - 1);
                for site in lo..=hi {
                    ones[site as usize] = true;
                }
            }
        }
    }

    fn fill_singletons<R: Rng>(&self, ones: &mut [bool], rng: &mut R) {
        if self.singleton_keep < 1.0 {
            for b in ones.iter_mut() {
                if rng.gen::<f64>() >= self.singleton_keep {
                    *b = true;
                }
            }
        }
    }

    /// One window of length `n` from a single stream.
    fn window<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<bool> {
        let mut ones = vec![false; n];
        let first = 1 - self.max_len as i64;
        self.fill_starts(first, n + self.max_len - 1, n, &mut ones, rng);
        self.fill_singletons(&mut ones, rng);
        ones
    }
}

/// One window `X_1..X_N`. Starting positions are split into blocks of 1024,
/// each with its own ChaCha8 stream, and the singleton layer uses one more
/// stream, so the output does not depend on the thread count.
pub fn sample_window(
    inu: &IntervalNu,
    singleton_extra: f64,
    n: usize,
    seed: u64,
) -> Result<WindowSample> {
    if n == 0 || n > MAX_WINDOW {
        return domain(format!("window length must lie in [1, {MAX_WINDOW}], got {n}"));
    }
    let prep = Prepared::new(inu, singleton_extra)?;
    let first = 1 - prep.max_len as i64;
    let starts = n + prep.max_len.max(1) - 1;
    let blocks = starts.div_ceil(STREAM_BLOCK);
    let partial: Vec<Vec<bool>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64 + 1);
            let mut ones = vec![false; n];
            let len = STREAM_BLOCK.min(starts - b * STREAM_BLOCK);
            prep.fill_starts(first + (b * STREAM_BLOCK) as i64, len, n, &mut ones, &mut rng);
            ones
        })
        .collect();
    let mut bits = vec![false; n];
    for part in partial {
        for (b, p) in bits.iter_mut().zip(part) {
            *b |= p;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    prep.fill_singletons(&mut bits, &mut rng);
    Ok(WindowSample { n, bits, seed })
}

/// Runs `f` on `draws` independent windows, one ChaCha8 stream per block of
/// 1024 draws, and folds the results in draw order.
fn repeated_windows<T, F>(
    prep: &Prepared,
    n: usize,
    draws: usize,
    seed: u64,
    init: T,
    f: F,
    merge: fn(T, T) -> T,
) -> T
where
    T: Send + Clone + Sync,
    F: Fn(&mut T, &[bool]) + Sync,
{
    let blocks = draws.div_ceil(STREAM_BLOCK);
    let parts: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut acc = init.clone();
            for _ in 0..STREAM_BLOCK.min(draws - b * STREAM_BLOCK) {
                let w = prep.window(n, &mut rng);
                f(&mut acc, &w);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init, merge)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub k: usize,
    pub draws: usize,
    pub estimate: f64,
    pub analytic: f64,
    pub std_error: f64,
    pub z_score: f64,
    /// `Σ_{ℓ>L} ℓ w_ℓ` of the measure the truncation came from.
    pub neglected_tail: f64,
}

/// Empirical `P(X_0 = 0, X_k = 0)` against
/// `c_0² exp(Σ_{ℓ>k} (ℓ − k) w_ℓ)`, where `c_0 = P(X_0 = 0)`.
pub fn pair_correlation_check(
    inu: &IntervalNu,
    singleton_extra: f64,
    k: usize,
    draws: usize,
    seed: u64,
) -> Result<CorrelationReport> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    if draws < 2 {
        return domain("need at least two draws");
    }
    let prep = Prepared::new(inu, singleton_extra)?;
    let c0 = (-(inu.singleton_union_mass() + singleton_extra)).exp();
    let analytic = c0 * c0 * inu.pair_intersection_mass(k).exp();
    let hits = repeated_windows(
        &prep,
        k + 1,
        draws,
        seed,
        0u64,
        |acc, w| {
            if !w[0] && !w[k] {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    let estimate = hits as f64 / draws as f64;
    let std_error = (analytic * (1.0 - analytic) / draws as f64).sqrt();
    Ok(CorrelationReport {
        k,
        draws,
        estimate,
        analytic,
        std_error,
        z_score: (estimate - analytic) / std_error,
        neglected_tail: inu.tail_mass(),
    })
}

/// The measure whose forward law is the window law of the sampler.
pub fn window_intensity(inu: &IntervalNu, singleton_extra: f64, n: usize) -> Result<SubsetMeasure> {
    let mut nu = inu.window_measure(n)?;
    if singleton_extra > 0.0 {
        for i in 1..=n {
            nu.add_atom(Subset::singleton(i), singleton_extra)?;
        }
    }
    Ok(nu)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub n: usize,
    pub draws: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Cells after pooling those with expected count below 5.
    pub cells: usize,
}

/// Pearson chi-square of the empirical window law (windows of length
/// `n ≤ 16`) against the exact forward law of [`window_intensity`].
pub fn window_chi_square(
    inu: &IntervalNu,
    singleton_extra: f64,
    n: usize,
    draws: usize,
    seed: u64,
) -> Result<ChiSquareReport> {
    if n == 0 || n > 16 {
        return domain(format!("chi-square windows support 1 <= n <= 16, got {n}"));
    }
    let prep = Prepared::new(inu, singleton_extra)?;
    let exact: BinaryDistribution = forward_distribution(
        &window_intensity(inu, singleton_extra, n)?,
        &Tolerances::default(),
    )?;
    let counts = repeated_windows(
        &prep,
        n,
        draws,
        seed,
        vec![0u64; 1 << n],
        |acc, w| {
            let idx = w
                .iter()
                .enumerate()
                .fold(0usize, |m, (i, b)| if *b { m | 1 << i } else { m });
            acc[idx] += 1;
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    Ok(pearson(n, draws, &counts, exact.probs()))
}

fn pearson(n: usize, draws: usize, counts: &[u64], probs: &[f64]) -> ChiSquareReport {
    let total = draws as f64;
    // pool rare cells, in order of increasing expectation, into one bin
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|a, b| probs[*a].total_cmp(&probs[*b]));
    let mut statistic = 0.0;
    let mut cells = 0usize;
    let (mut pooled_e, mut pooled_o) = (0.0, 0.0);
    for i in order {
        let e = probs[i] * total;
        let o = counts[i] as f64;
        if e < 5.0 || pooled_e > 0.0 && pooled_e < 5.0 {
            pooled_e += e;
            pooled_o += o;
            continue;
        }
        statistic += (o - e).powi(2) / e;
        cells += 1;
    }
    if pooled_e > 0.0 {
        statistic += (pooled_o - pooled_e).powi(2) / pooled_e;
        cells += 1;
    } else if pooled_o > 0.0 {
        // impossible configurations were observed
        statistic = f64::INFINITY;
    }
    let dof = cells.saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| 1.0 - d.cdf(statistic))
        .unwrap_or(f64::NAN);
    ChiSquareReport {
        n,
        draws,
        statistic,
        dof,
        p_value,
        cells,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Domination {
    Dominates,
    Fails { n: usize },
}

/// Checks `ν(S_{[n]}^∪) ≥ −n log(1 − p)` for `n = 1..=n_max`, where
/// `ν(S_{[n]}^∪) = Σ (n + ℓ − 1) w_ℓ + n s`.
pub fn domination_check(
    inu: &IntervalNu,
    singleton_extra: f64,
    p: f64,
    n_max: usize,
) -> Result<Domination> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p = {p} must lie in (0, 1)"));
    }
    if n_max == 0 {
        return domain("n_max must be at least 1");
    }
    let per_site = -(-p).ln_1p();
    for n in 1..=n_max {
        let lhs = inu.box_union_mass(n) + n as f64 * singleton_extra;
        if lhs < n as f64 * per_site {
            return Ok(Domination::Fails { n });
        }
    }
    Ok(Domination::Dominates)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockVariance {
    pub block_len: usize,
    pub blocks: usize,
    pub variance: f64,
}

/// Variance of site averages over disjoint blocks of a single long window,
/// for each block length. A diagnostic only.
pub fn block_variance_monitor(
    inu: &IntervalNu,
    singleton_extra: f64,
    total_len: usize,
    block_lens: &[usize],
    seed: u64,
) -> Result<Vec<BlockVariance>> {
    let w = sample_window(inu, singleton_extra, total_len, seed)?;
    block_lens
        .iter()
        .map(|&b| {
            if b == 0 || total_len / b < 2 {
                return domain(format!("block length {b} leaves fewer than two blocks"));
            }
            let means: Vec<f64> = w
                .bits
                .chunks_exact(b)
                .map(|c| c.iter().filter(|x| **x).count() as f64 / b as f64)
                .collect();
            let m = means.iter().sum::<f64>() / means.len() as f64;
            let variance =
                means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
            Ok(BlockVariance {
                block_len: b,
                blocks: means.len(),
                variance,
            })
        })
        .collect()
}
