//! Arbitrary-precision evaluation of the alternating level sums
//! `λ_ℓ = Σ_{j=0}^{ℓ} (−1)^{ℓ−j} C(ℓ,j) log z_{n−j}` with automatic precision
//! escalation.
//!
//! The sums are the iterated forward differences of `a_j = log z_{n−j}`, so
//! they are computed as a difference table (subtractions only). The working
//! precision starts at the caller's value and doubles until two consecutive
//! evaluations agree level by level.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::error::{domain, Error, Result};

pub const DEFAULT_PRECISION_BITS: usize = 256;
pub const MIN_PRECISION_BITS: usize = 64;
pub const MAX_PRECISION_BITS: usize = 8192;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Anything that can produce `log z_j`, `j = 0..=n`, at a requested precision.
pub trait LogZeroSource {
    fn ground(&self) -> usize;

    fn log_zeros(&self, bits: usize, cc: &mut Consts) -> Result<Vec<BigFloat>>;
}

/// Levels `λ_1..λ_n` together with the precision at which they settled.
#[derive(Debug, Clone, PartialEq)]
pub struct SettledLevels {
    pub lambda: Vec<f64>,
    pub bits: usize,
}

pub(crate) fn consts() -> Result<Consts> {
    Consts::new().map_err(|e| Error::Internal(format!("constant cache: {e:?}")))
}

pub(crate) fn check_bits(bits: usize) -> Result<()> {
    if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&bits) {
        return domain(format!(
            "precision {bits} bits outside [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}]"
        ));
    }
    Ok(())
}

/// Nearest `f64` to a `BigFloat` (infinite when out of range, NaN for NaN).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0);
    // value = 0.top... × 2^exp
    let mag = scale2(top as f64, exp as i64 - 64);
    match sign {
        Sign::Neg => -mag,
        Sign::Pos => mag,
    }
}

fn scale2(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(k as i32)
}

/// All levels at one fixed precision.
pub fn levels_at(src: &dyn LogZeroSource, bits: usize, cc: &mut Consts) -> Result<Vec<BigFloat>> {
    let n = src.ground();
    let logs = src.log_zeros(bits, cc)?;
    if logs.len() != n + 1 {
        return Err(Error::Internal(format!(
            "log zero source returned {} values for n = {n}",
            logs.len()
        )));
    }
    // row_0[j] = log z_{n-j}; row_{k+1}[j] = row_k[j+1] - row_k[j]
    let mut row: Vec<BigFloat> = logs.into_iter().rev().collect();
    let mut out = Vec::with_capacity(n);
    for _ in 1..=n {
        let next: Vec<BigFloat> = row
            .windows(2)
            .map(|w| w[1].sub(&w[0], bits, RM))
            .collect();
        out.push(next[0].clone());
        row = next;
    }
    Ok(out)
}

fn agree(a: f64, b: f64, bits: usize) -> bool {
    if a.is_nan() || b.is_nan() {
        return false;
    }
    let floor = 2f64.powi(-((bits / 2).min(1000) as i32));
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + floor
}

/// Evaluates the levels at `start_bits`, `2·start_bits`, ... until two
/// consecutive evaluations agree on every level.
///
/// Agreement means `|a − b| ≤ 1e−12·max(|a|,|b|) + 2^{−p/2}` with `p` the
/// lower precision; the absolute part lets levels that are exactly zero
/// settle. Fails with a cancellation error once `MAX_PRECISION_BITS` would be
/// exceeded.
pub fn settle_levels(src: &dyn LogZeroSource, start_bits: usize) -> Result<SettledLevels> {
    check_bits(start_bits)?;
    let mut cc = consts()?;
    // the top precision still needs a lower one to be compared against
    let mut bits = start_bits.min(MAX_PRECISION_BITS / 2);
    let mut prev: Vec<f64> = levels_at(src, bits, &mut cc)?.iter().map(to_f64).collect();
    loop {
        let next_bits = bits * 2;
        let cur: Vec<f64> = levels_at(src, next_bits, &mut cc)?
            .iter()
            .map(to_f64)
            .collect();
        match first_disagreement(&prev, &cur, bits) {
            None => {
                return Ok(SettledLevels {
                    lambda: cur,
                    bits: next_bits,
                })
            }
            Some(level) if next_bits * 2 > MAX_PRECISION_BITS => {
                return Err(Error::CancellationFailure {
                    level: level + 1,
                    bits: MAX_PRECISION_BITS,
                })
            }
            Some(_) => {
                prev = cur;
                bits = next_bits;
            }
        }
    }
}

fn first_disagreement(a: &[f64], b: &[f64], bits: usize) -> Option<usize> {
    a.iter()
        .zip(b)
        .position(|(x, y)| !agree(*x, *y, bits) || !x.is_finite())
}

/// `log x` at the given precision for a positive `f64`.
pub(crate) fn big_ln(x: f64, bits: usize, cc: &mut Consts) -> BigFloat {
    BigFloat::from_f64(x, bits).ln(bits, RM, cc)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Plain(Vec<f64>);

    impl LogZeroSource for Plain {
        fn ground(&self) -> usize {
            self.0.len() - 1
        }

        fn log_zeros(&self, bits: usize, cc: &mut Consts) -> Result<Vec<BigFloat>> {
            Ok(self.0.iter().map(|z| big_ln(*z, bits, cc)).collect())
        }
    }

    #[test]
    fn conversion_to_f64() {
        for v in [1.0, 3.0, 0.1, -2.5e-300, 1e300, -7.25, f64::MIN_POSITIVE] {
            assert_eq!(to_f64(&BigFloat::from_f64(v, 128)), v);
        }
        let mut cc = consts().unwrap();
        let third = BigFloat::from_f64(1.0, 256).div(&BigFloat::from_f64(3.0, 256), 256, RM);
        assert!((to_f64(&third) - 1.0 / 3.0).abs() < 1e-17);
        let l2 = big_ln(2.0, 256, &mut cc);
        assert!((to_f64(&l2) - 2f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn product_law_levels() {
        // powers of 1/2 are exact, so the higher levels vanish identically
        let p = 0.5f64;
        let n = 40;
        let z: Vec<f64> = (0..=n).map(|j| (1.0 - p).powi(j as i32)).collect();
        let settled = settle_levels(&Plain(z), 256).unwrap();
        assert!((settled.lambda[0] + (1.0 - p).ln()).abs() < 1e-13);
        for l in &settled.lambda[1..] {
            assert!(l.abs() < 1e-30, "{l}");
        }
    }

    #[test]
    fn difference_table_matches_binomial_sum() {
        let z = [1.0, 0.6, 0.45, 0.4, 0.38];
        let n = 4;
        let mut cc = consts().unwrap();
        let got: Vec<f64> = levels_at(&Plain(z.to_vec()), 256, &mut cc)
            .unwrap()
            .iter()
            .map(to_f64)
            .collect();
        let binom = |a: usize, b: usize| -> f64 {
            (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
        };
        for l in 1..=n {
            let want: f64 = (0..=l)
                .map(|j| {
                    let sign = if (l - j) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binom(l, j) * z[n - j].ln()
                })
                .sum();
            assert!((got[l - 1] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_precision() {
        assert!(settle_levels(&Plain(vec![1.0, 0.5]), 32).is_err());
        assert!(settle_levels(&Plain(vec![1.0, 0.5]), 10000).is_err());
    }
}
