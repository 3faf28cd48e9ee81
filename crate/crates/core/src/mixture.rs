//! Finite mixtures of product measures `Σ α_i Π_{1 − q x_i}` restricted to
//! `[n]`: their level measures, sign predictions as `x_2 → 1` from the
//! polylogarithm, the `α_1` threshold, and phase scans over `(α_1, x_2)`.

use astro_float::{BigFloat, Consts};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::moebius::{levels_from_source, LevelMeasure};
use crate::polylog::{polylog_neg_order, root_r2, sign_exact};
use crate::precision::{LogZeroSource, RM};

/// `X ∼ Σ α_i Π_{1 − q x_i}`, so `P(X([j]) ≡ 0) = Σ α_i (q x_i)^j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureSpec {
    q: f64,
    x: Vec<f64>,
    alpha: Vec<f64>,
}

impl MixtureSpec {
    pub fn new(q: f64, x: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return domain(format!("q = {q} must lie in (0, 1]"));
        }
        if x.is_empty() || x.len() != alpha.len() {
            return domain("x and alpha must be nonempty and of equal length");
        }
        if x[0] != 1.0 {
            return domain(format!("x_1 must be 1, got {}", x[0]));
        }
        if x.windows(2).any(|w| !(w[1] < w[0])) || x.last().is_some_and(|v| *v < 0.0) {
            return domain("x must be strictly decreasing and nonnegative");
        }
        if alpha.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return domain("every alpha_i must lie in (0, 1]");
        }
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("alpha sums to {total}, not 1"));
        }
        Ok(MixtureSpec { q, x, alpha })
    }

    /// The two-component family `α_1 Π_{1−q} + (1 − α_1) Π_{1 − q x_2}`.
    pub fn two_point(q: f64, x2: f64, alpha1: f64) -> Result<Self> {
        MixtureSpec::new(q, vec![1.0, x2], vec![alpha1, 1.0 - alpha1])
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `z_j = Σ α_i (q x_i)^j / Σ α_i` in plain floating point.
    pub fn zero_probabilities(&self, n: usize) -> Vec<f64> {
        let total: f64 = self.alpha.iter().sum();
        (0..=n)
            .map(|j| {
                self.alpha
                    .iter()
                    .zip(&self.x)
                    .map(|(a, x)| a * (self.q * x).powi(j as i32))
                    .sum::<f64>()
                    / total
            })
            .collect()
    }
}

struct MixtureSource<'a> {
    spec: &'a MixtureSpec,
    n: usize,
}

impl LogZeroSource for MixtureSource<'_> {
    fn ground(&self) -> usize {
        self.n
    }

    fn log_zeros(&self, bits: usize, cc: &mut Consts) -> Result<Vec<BigFloat>> {
        let q = BigFloat::from_f64(self.spec.q, bits);
        let bases: Vec<BigFloat> = self
            .spec
            .x
            .iter()
            .map(|x| BigFloat::from_f64(*x, bits).mul(&q, bits, RM))
            .collect();
        let alphas: Vec<BigFloat> = self
            .spec
            .alpha
            .iter()
            .map(|a| BigFloat::from_f64(*a, bits))
            .collect();
        let total = alphas
            .iter()
            .fold(BigFloat::from_f64(0.0, bits), |acc, a| acc.add(a, bits, RM));
        let log_total = total.ln(bits, RM, cc);
        // running powers (q x_i)^j
        let mut powers: Vec<BigFloat> = alphas.clone();
        let mut out = Vec::with_capacity(self.n + 1);
        for j in 0..=self.n {
            if j > 0 {
                for (p, b) in powers.iter_mut().zip(&bases) {
                    *p = p.mul(b, bits, RM);
                }
            }
            let sum = powers
                .iter()
                .fold(BigFloat::from_f64(0.0, bits), |acc, p| acc.add(p, bits, RM));
            out.push(sum.ln(bits, RM, cc).sub(&log_total, bits, RM));
        }
        Ok(out)
    }
}

/// Levels of the mixture on `[n]` in arbitrary precision. The structural
/// bounds `λ_1 ≥ −log q` and `λ_2 ≥ 0` are checked on the way out.
pub fn mixture_levels(spec: &MixtureSpec, n: usize, precision_bits: usize) -> Result<LevelMeasure> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    let levels = levels_from_source(&MixtureSource { spec, n }, precision_bits)?;
    let slack = 1e-12;
    let lower = -spec.q.ln();
    if levels.level(1) < lower - slack * lower.abs().max(1.0) {
        return Err(Error::Internal(format!(
            "λ_1 = {} below −log q = {lower}",
            levels.level(1)
        )));
    }
    if levels.level(2) < -slack {
        return Err(Error::Internal(format!("λ_2 = {} is negative", levels.level(2))));
    }
    Ok(levels)
}

/// Predicted sign of `λ_k` as `x_2 → 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NearOneSign {
    Positive,
    Negative,
    Boundary,
}

/// Sign of the level `k` as `x_2 → 1`: the opposite of the sign of
/// `Li_{1−k}(−(1 − α_1)/α_1)`; `Boundary` when `|Li| < tol`.
pub fn sign_near_one(k: usize, alpha1: f64, tol: f64) -> Result<NearOneSign> {
    if k < 3 {
        return domain(format!("need k >= 3, got {k}"));
    }
    if !(alpha1 > 0.0 && alpha1 < 1.0) {
        return domain(format!("alpha1 = {alpha1} must lie in (0, 1)"));
    }
    let li = polylog_neg_order(k)?;
    let v = li.eval(-(1.0 - alpha1) / alpha1);
    Ok(if v.abs() < tol {
        NearOneSign::Boundary
    } else if v < 0.0 {
        NearOneSign::Positive
    } else {
        NearOneSign::Negative
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdClass {
    RepresentableNearOne,
    NotRepresentableNearOne,
    /// `α_1` sits on the threshold; still representable near one.
    Boundary,
}

impl ThresholdClass {
    pub fn is_representable_near_one(self) -> bool {
        !matches!(self, ThresholdClass::NotRepresentableNearOne)
    }
}

/// Compares `α_1` with `1/(1 − r_2^{(n)})`; within `1e−12` of it counts as
/// `Boundary` (representable).
pub fn threshold_classify(n: usize, alpha1: f64) -> Result<ThresholdClass> {
    if !(alpha1 > 0.0 && alpha1 < 1.0) {
        return domain(format!("alpha1 = {alpha1} must lie in (0, 1)"));
    }
    let thr = root_r2(n, 1e-15)?.threshold;
    Ok(if (alpha1 - thr).abs() <= 1e-12 {
        ThresholdClass::Boundary
    } else if alpha1 > thr {
        ThresholdClass::RepresentableNearOne
    } else {
        ThresholdClass::NotRepresentableNearOne
    })
}

/// Exact comparison for rational `α_1`, using the sign of `Li_{1−n}` at
/// `−(1 − α_1)/α_1` inside the root bracket.
pub fn threshold_classify_exact(n: usize, alpha1: &BigRational) -> Result<ThresholdClass> {
    let zero = BigRational::from_integer(BigInt::from(0));
    let one = BigRational::one();
    if !(alpha1 > &zero && alpha1 < &one) {
        return domain(format!("alpha1 = {alpha1} must lie in (0, 1)"));
    }
    let z = -(&one - alpha1) / alpha1;
    // left end of the bracket on which Li_{1−n} changes sign exactly once
    let left = if n == 3 { -2.0 } else { root_r2(n - 1, 1e-15)?.r2 };
    let zf = num_traits::ToPrimitive::to_f64(&z).unwrap_or(f64::NEG_INFINITY);
    if zf <= left + 1e-9 {
        // safely below r_2^{(n)} (which exceeds r_2^{(n−1)} by far more than 1e−9)
        return Ok(ThresholdClass::NotRepresentableNearOne);
    }
    let li = polylog_neg_order(n)?;
    Ok(match sign_exact(&li, &z) {
        0 => ThresholdClass::Boundary,
        // Li < 0 on (r_2, 0)
        s if s < 0 => ThresholdClass::RepresentableNearOne,
        _ => ThresholdClass::NotRepresentableNearOne,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSign {
    Positive,
    Negative,
    Zero,
    Unresolved,
}

impl CellSign {
    pub fn as_str(self) -> &'static str {
        match self {
            CellSign::Positive => "positive",
            CellSign::Negative => "negative",
            CellSign::Zero => "zero",
            CellSign::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha1: f64,
    pub x2: f64,
    pub k: usize,
    /// `NaN` when unresolved.
    pub level: f64,
    pub sign: CellSign,
}

/// Options for [`phase_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub q: f64,
    pub precision_bits: usize,
    /// Mark cells with `|λ_k|` below this as unresolved. `None` flags only
    /// cells whose levels fail to settle within the precision ceiling.
    pub unresolved_below: Option<f64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            q: 1.0,
            precision_bits: crate::precision::DEFAULT_PRECISION_BITS,
            unresolved_below: None,
        }
    }
}

/// `α_1 = i/(steps + 1)`, `i = 1..=steps`: interior points of `(0, 1)`.
pub fn alpha_grid(steps: usize) -> Vec<f64> {
    (1..=steps).map(|i| i as f64 / (steps + 1) as f64).collect()
}

/// `x_2 = j/steps`, `j = 0..steps`: `[0, 1)` including the `x_2 = 0` column.
pub fn x2_grid(steps: usize) -> Vec<f64> {
    (0..steps).map(|j| j as f64 / steps as f64).collect()
}

/// Signs of `λ_k`, `k = 3..=n`, on the grid, rows in `(α_1, x_2, k)`
/// row-major order independent of scheduling.
pub fn phase_scan(
    n: usize,
    alphas: &[f64],
    x2s: &[f64],
    opts: &ScanOptions,
) -> Result<Vec<ScanRow>> {
    if !(3..=12).contains(&n) {
        return domain(format!("phase scans support 3 <= n <= 12, got {n}"));
    }
    if alphas.len() > 2000 || x2s.len() > 2000 {
        return domain("grid is limited to 2000 x 2000");
    }
    let cells: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|a| x2s.iter().map(move |x| (*a, *x)))
        .collect();
    let rows: Result<Vec<Vec<ScanRow>>> = cells
        .par_iter()
        .map(|&(alpha1, x2)| {
            let spec = MixtureSpec::two_point(opts.q, x2, alpha1)?;
            let levels = match mixture_levels(&spec, n, opts.precision_bits) {
                Ok(l) => Some(l),
                Err(Error::CancellationFailure { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok((3..=n)
                .map(|k| {
                    let (level, sign) = match &levels {
                        None => (f64::NAN, CellSign::Unresolved),
                        Some(l) => {
                            let v = l.level(k);
                            let sign = match opts.unresolved_below {
                                Some(t) if v.abs() < t => CellSign::Unresolved,
                                _ if v.abs() <= l.resolution() => CellSign::Zero,
                                _ if v > 0.0 => CellSign::Positive,
                                _ if v < 0.0 => CellSign::Negative,
                                _ => CellSign::Zero,
                            };
                            (v, sign)
                        }
                    };
                    ScanRow {
                        alpha1,
                        x2,
                        k,
                        level,
                        sign,
                    }
                })
                .collect())
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

/// Infinite exchangeable mixtures `Σ α_i Π_{p_i}`: representable iff `m = 2`
/// and `p_m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeableVerdict {
    InR,
    NotInR,
}

pub fn exchangeable_mixture_classify(p: &[f64], alpha: &[f64]) -> Result<ExchangeableVerdict> {
    if p.is_empty() || p.len() != alpha.len() {
        return domain("p and alpha must be nonempty and of equal length");
    }
    if p.windows(2).any(|w| !(w[0] < w[1])) || p[0] < 0.0 || p[p.len() - 1] > 1.0 {
        return domain("need 0 <= p_1 < ... < p_m <= 1");
    }
    if alpha.iter().any(|a| !(*a > 0.0)) || (alpha.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return domain("alpha must be positive and sum to 1");
    }
    Ok(if p.len() == 2 && p[1] == 1.0 {
        ExchangeableVerdict::InR
    } else {
        ExchangeableVerdict::NotInR
    })
}

/// Convenience for callers holding `α_1` as a ratio of integers.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
