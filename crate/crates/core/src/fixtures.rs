//! Small laws and intensities with known answers, used by tests, the
//! acceptance runner and the CLI examples.

use crate::error::{domain, Result};
use crate::measure::{SignedSubsetMeasure, SubsetMeasure};
use crate::pattern::BinaryDistribution;
use crate::subset::Subset;

fn set(n: usize, e: &[usize]) -> Subset {
    Subset::from_elements(n, e).expect("fixture subsets are valid")
}

/// `(1,0)` and `(0,1)` with probability `(1−ε)/2` each, `(0,0)` and `(1,1)`
/// with `ε/2` each.
pub fn epsilon_mixture(eps: f64) -> Result<BinaryDistribution> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("ε = {eps} must lie in (0, 1)"));
    }
    BinaryDistribution::new(2, vec![eps / 2.0, (1.0 - eps) / 2.0, (1.0 - eps) / 2.0, eps / 2.0])
}

/// `(X, Y, XY)` with `X, Y` independent fair bits.
pub fn xy_product() -> BinaryDistribution {
    BinaryDistribution::new(3, vec![0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25])
        .expect("valid law")
}

/// The inverted intensity of [`xy_product`].
pub fn xy_product_nu() -> SignedSubsetMeasure {
    let l2 = 2f64.ln();
    let mut nu = SignedSubsetMeasure::zero(3).expect("n = 3");
    for (s, m) in [
        (set(3, &[1]), l2),
        (set(3, &[2]), l2),
        (set(3, &[1, 2]), (0.75f64).ln()),
        (set(3, &[1, 2, 3]), (4.0f64 / 3.0).ln()),
    ] {
        nu.set_mass(s, m).expect("in range");
    }
    nu
}

/// The law on `{0,1}^3` invariant under permutations and under swapping 0
/// and 1, with `P(X ≡ 1) = p1` and hence `p2 = (1 − 2 p1)/6` on each
/// two-ones (and each one-one) configuration.
pub fn four_equal(p1: f64) -> Result<BinaryDistribution> {
    if !(p1 > 0.0 && p1 <= 0.5) {
        return domain(format!("p1 = {p1} must lie in (0, 1/2]"));
    }
    let p2 = (1.0 - 2.0 * p1) / 6.0;
    BinaryDistribution::from_fn(3, |ones| match ones.len() {
        0 | 3 => p1,
        _ => p2,
    })
}

/// Closed-form intensity of [`four_equal`].
pub fn four_equal_nu(p1: f64) -> Result<SignedSubsetMeasure> {
    if !(p1 > 0.0 && p1 <= 0.5) {
        return domain(format!("p1 = {p1} must lie in (0, 1/2]"));
    }
    let p2 = (1.0 - 2.0 * p1) / 6.0;
    let s = p1 + p2;
    let single = (s / p1).ln();
    let double = (p1 / (2.0 * s * s)).ln();
    let triple = (8.0 * s * s * s / p1).ln();
    let dense = (0..8u32)
        .map(|b| match b.count_ones() {
            0 => 0.0,
            1 => single,
            2 => double,
            _ => triple,
        })
        .collect();
    SignedSubsetMeasure::from_dense(3, dense)
}

/// Fixed points of a uniform random permutation of three letters.
pub fn permutation_law() -> BinaryDistribution {
    let sixth = 1.0 / 6.0;
    BinaryDistribution::from_fn(3, |ones| match ones.len() {
        0 => 1.0 / 3.0,
        1 | 3 => sixth,
        _ => 0.0,
    })
    .expect("valid law")
}

/// Divide-and-colour on `[4]`: the partitions `(12,3,4)` and `(1,2,34)` with
/// probability 1/2 each, each block coloured one with probability `p`.
pub fn divide_and_color(p: f64) -> Result<BinaryDistribution> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p = {p} is not a probability"));
    }
    let partitions: [&[u32]; 2] = [&[0b0011, 0b0100, 0b1000], &[0b0001, 0b0010, 0b1100]];
    let mut prob = vec![0.0; 16];
    for blocks in partitions {
        for colours in 0..1u32 << blocks.len() {
            let mut ones = 0u32;
            let mut w = 0.5;
            for (k, b) in blocks.iter().enumerate() {
                if colours >> k & 1 == 1 {
                    ones |= b;
                    w *= p;
                } else {
                    w *= 1.0 - p;
                }
            }
            prob[ones as usize] += w;
        }
    }
    BinaryDistribution::new(4, prob)
}

/// `ν({1,2}) = ν({2,3}) = log 2`, whose process has the downward FKG property.
pub fn dfk_nu() -> SubsetMeasure {
    let l2 = 2f64.ln();
    SubsetMeasure::from_atoms(3, [(set(3, &[1, 2]), l2), (set(3, &[2, 3]), l2)])
        .expect("valid atoms")
}

/// `ν({1,2}) = ν({2,3}) = ν({1}) = ν({3}) = log 2`.
pub fn block_map_nu() -> SubsetMeasure {
    let l2 = 2f64.ln();
    SubsetMeasure::from_atoms(
        3,
        [
            (set(3, &[1]), l2),
            (set(3, &[3]), l2),
            (set(3, &[1, 2]), l2),
            (set(3, &[2, 3]), l2),
        ],
    )
    .expect("valid atoms")
}

/// Law of `(max(X_i, X_{i+1}))_{i=1,2,3}` for i.i.d. fair bits `X_1..X_4`,
/// by enumeration of the 16 inputs.
pub fn block_map_law() -> BinaryDistribution {
    let mut prob = vec![0.0; 8];
    for x in 0..16u32 {
        let y = (0..3).fold(0u32, |acc, i| {
            let bit = (x >> i | x >> (i + 1)) & 1;
            acc | bit << i
        });
        prob[y as usize] += 1.0 / 16.0;
    }
    BinaryDistribution::new(3, prob).expect("valid law")
}

/// Singletons `−log(1−p)` and the full set `−log α`: the law
/// `α Π_p + (1 − α) Π_1` on `[n]`.
pub fn product_plus_ones_nu(n: usize, p: f64, alpha: f64) -> Result<SubsetMeasure> {
    if !(0.0..1.0).contains(&p) || !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("need p in [0,1) and alpha in (0,1], got {p}, {alpha}"));
    }
    let mut nu = SubsetMeasure::singletons(n, -(1.0 - p).ln())?;
    nu.add_atom(Subset::full(n), -alpha.ln())?;
    Ok(nu)
}
