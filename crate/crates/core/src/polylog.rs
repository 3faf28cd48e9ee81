//! Polylogarithms of non-positive integer order as exact rational functions,
//! `Li_{1−k}(z) = N_k(z) / (1 − z)^k`, and the largest negative root
//! `r_2^{(n)}` of `Li_{1−n}` that sets the mixture threshold `1/(1 − r_2^{(n)})`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// `Li_{1−k}` with numerator coefficients in ascending powers of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylogRational {
    k: usize,
    numerator: Vec<BigRational>,
}

impl PolylogRational {
    pub fn k(&self) -> usize {
        self.k
    }

    /// The order `s = 1 − k`.
    pub fn order(&self) -> i64 {
        1 - self.k as i64
    }

    pub fn numerator(&self) -> &[BigRational] {
        &self.numerator
    }

    fn coeffs_f64(&self) -> Vec<f64> {
        self.numerator
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// `N_k(z)` in floating point.
    pub fn numerator_at(&self, z: f64) -> f64 {
        horner(&self.coeffs_f64(), z)
    }

    /// `N_k(z) / z`, which has constant term 1 and the same nonzero roots.
    pub fn reduced_at(&self, z: f64) -> f64 {
        horner(&self.coeffs_f64()[1..], z)
    }

    /// `Li_{1−k}(z)` for real `z ≠ 1`.
    pub fn eval(&self, z: f64) -> f64 {
        self.numerator_at(z) / (1.0 - z).powi(self.k as i32)
    }

    /// Exact value at a rational point `z ≠ 1`.
    pub fn eval_exact(&self, z: &BigRational) -> Result<BigRational> {
        let one = BigRational::one();
        if *z == one {
            return domain("Li has a pole at z = 1");
        }
        let mut acc = BigRational::zero();
        for c in self.numerator.iter().rev() {
            acc = acc * z + c;
        }
        let denom = num_traits::pow(one - z, self.k);
        Ok(acc / denom)
    }

    /// Exact value of `N_k(z)/z` (sign-equivalent to `−Li_{1−k}(z)` for `z < 0`).
    pub fn reduced_exact(&self, z: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.numerator[1..].iter().rev() {
            acc = acc * z + c;
        }
        acc
    }
}

fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

/// Builds `Li_{1−k}` from `Li_0(z) = z/(1−z)` via `Li_{j−1} = z·dLi_j/dz`,
/// i.e. `N_{k+1} = z (N_k'(1 − z) + k N_k)`.
pub fn polylog_neg_order(k: usize) -> Result<PolylogRational> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    let r = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut num = vec![r(0), r(1)];
    for j in 1..k {
        let kk = r(j as i64);
        // derivative
        let deriv: Vec<BigRational> = num
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * r(i as i64))
            .collect();
        // deriv·(1 − z) + j·num
        let mut inner = vec![BigRational::zero(); num.len() + 1];
        for (i, c) in deriv.iter().enumerate() {
            inner[i] += c;
            inner[i + 1] -= c;
        }
        for (i, c) in num.iter().enumerate() {
            inner[i] += c * &kk;
        }
        // times z
        let mut next = vec![BigRational::zero()];
        next.extend(inner);
        while next.len() > 2 && next.last().is_some_and(|c| c.is_zero()) {
            next.pop();
        }
        num = next;
    }
    Ok(PolylogRational { k, numerator: num })
}

/// Partial sum `Σ_{j=1}^{terms} z^j j^{k−1}` of the defining series.
pub fn polylog_series(k: usize, z: f64, terms: usize) -> f64 {
    let mut pow = 1.0;
    let mut sum = 0.0;
    for j in 1..=terms {
        pow *= z;
        sum += pow * (j as f64).powi(k as i32 - 1);
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootTable {
    pub n: usize,
    pub r2: f64,
    pub threshold: f64,
}

/// Largest strictly negative root of `Li_{1−n}`, `n ≥ 3`, by bisection on
/// `(r_2^{(n−1)}, 0)` (on `(−2, 0)` for `n = 3`, where the left end is `−∞`).
pub fn root_r2(n: usize, tol: f64) -> Result<RootTable> {
    if n < 3 {
        return domain(format!("r_2 is defined for n >= 3, got {n}"));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let mut left = -2.0;
    for m in 3..=n {
        let r2 = bisect(m, left, tol)?;
        left = r2;
    }
    Ok(RootTable {
        n,
        r2: left,
        threshold: 1.0 / (1.0 - left),
    })
}

/// `root_r2` for every `n` in `3..=n_max`, sharing the bracket chain.
pub fn root_table(n_max: usize, tol: f64) -> Result<Vec<RootTable>> {
    if n_max < 3 {
        return domain(format!("r_2 is defined for n >= 3, got {n_max}"));
    }
    let mut out = Vec::new();
    let mut left = -2.0;
    for m in 3..=n_max {
        let r2 = bisect(m, left, tol)?;
        out.push(RootTable {
            n: m,
            r2,
            threshold: 1.0 / (1.0 - r2),
        });
        left = r2;
    }
    Ok(out)
}

fn bisect(n: usize, left: f64, tol: f64) -> Result<f64> {
    let li = polylog_neg_order(n)?;
    // Li_{1−n} > 0 at the left end, < 0 just left of 0
    let mut lo = left;
    let mut hi = -f64::EPSILON.sqrt() * 1e-3;
    if !(li.eval(lo) > 0.0 && li.eval(hi) < 0.0) {
        return Err(Error::Internal(format!(
            "bracket sign check failed for Li_{{{}}} on ({lo}, {hi})",
            1 - n as i64
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = li.eval(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact sign of `Li_{1−k}(z)` at a rational `z < 0` (`−1`, `0`, `1`).
pub fn sign_exact(li: &PolylogRational, z: &BigRational) -> i8 {
    // (1 − z)^k > 0 for z < 1, and N = z·M with z < 0
    let m = li.reduced_exact(z);
    if m.is_zero() {
        0
    } else if m.is_positive() == z.is_negative() {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let li0 = polylog_neg_order(1).unwrap();
        assert!((li0.eval(0.5) - 1.0).abs() < 1e-15);
        let li1 = polylog_neg_order(2).unwrap();
        assert!((li1.eval(0.5) - 2.0).abs() < 1e-15);
        let li2 = polylog_neg_order(3).unwrap();
        assert_eq!(li2.eval(-1.0), 0.0);
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        assert_eq!(li2.numerator(), &[q(0), q(1), q(1)]);
        let li3 = polylog_neg_order(4).unwrap();
        assert_eq!(li3.numerator(), &[q(0), q(1), q(4), q(1)]);
        assert!(polylog_neg_order(0).is_err());
    }

    #[test]
    fn matches_series_inside_disc() {
        for k in 1..=8 {
            let li = polylog_neg_order(k).unwrap();
            for z in [-0.5, -0.1, 0.2, 0.6] {
                let series = polylog_series(k, z, 2000);
                assert!((li.eval(z) - series).abs() < 1e-10 * series.abs().max(1.0));
            }
        }
    }

    #[test]
    fn exact_evaluation() {
        let li = polylog_neg_order(3).unwrap();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        // Li_{-2}(1/2) = (1/2)(3/2)/(1/8) = 6
        assert_eq!(
            li.eval_exact(&half).unwrap(),
            BigRational::from_integer(BigInt::from(6))
        );
        let minus_one = -BigRational::one();
        assert_eq!(sign_exact(&li, &minus_one), 0);
        let minus_two = BigRational::from_integer(BigInt::from(-2));
        assert_eq!(sign_exact(&li, &minus_two), 1);
        let minus_half = -half;
        assert_eq!(sign_exact(&li, &minus_half), -1);
    }

    #[test]
    fn first_roots() {
        assert_eq!(root_r2(3, 1e-15).unwrap().r2, -1.0);
        assert!((root_r2(4, 1e-15).unwrap().r2 - (3f64.sqrt() - 2.0)).abs() < 1e-12);
        assert!((root_r2(5, 1e-15).unwrap().r2 - (2.0 * 6f64.sqrt() - 5.0)).abs() < 1e-12);
        assert!(root_r2(2, 1e-15).is_err());
    }
}
