//! Exhaustive positive-association and downward-FKG checkers for small `n`.
//!
//! Increasing events on `{0,1}^n` are enumerated as the up-closures of all
//! antichains, which is feasible for `n ≤ 4` (168 events at `n = 4`).

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::pattern::BinaryDistribution;
use crate::subset::Subset;

pub const MAX_ASSOCIATION_GROUND: usize = 4;

const COV_SLACK: f64 = 1e-12;

/// An increasing event, given by its minimal configurations (sets of ones).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpSet {
    pub minimal: Vec<Subset>,
    #[serde(skip)]
    mask: u32,
}

impl UpSet {
    /// Indicator membership for the configuration with ones `x`.
    pub fn contains(&self, x: Subset) -> bool {
        self.mask >> x.bits() & 1 == 1
    }

    fn lex_cmp(&self, other: &UpSet) -> Ordering {
        for (a, b) in self.minimal.iter().zip(&other.minimal) {
            match a.lex_cmp(*b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.minimal.len().cmp(&other.minimal.len())
    }
}

/// All increasing events on `{0,1}^n`, including the empty and the sure event.
pub fn increasing_events(n: usize) -> Result<Vec<UpSet>> {
    if n == 0 || n > MAX_ASSOCIATION_GROUND {
        return domain(format!(
            "exhaustive association checks support 1 <= n <= {MAX_ASSOCIATION_GROUND}, got {n}"
        ));
    }
    let size = 1u32 << n;
    let up_closure = |x: u32| -> u32 {
        (0..size)
            .filter(|y| y & x == x)
            .fold(0u32, |m, y| m | 1 << y)
    };
    let mut out = Vec::new();
    let mut chosen: Vec<u32> = Vec::new();
    fn rec(
        next: u32,
        size: u32,
        chosen: &mut Vec<u32>,
        out: &mut Vec<UpSet>,
        up: &dyn Fn(u32) -> u32,
    ) {
        if next == size {
            let mask = chosen.iter().fold(0u32, |m, x| m | up(*x));
            let mut minimal: Vec<Subset> = chosen.iter().map(|x| Subset::from_bits(*x)).collect();
            minimal.sort_by(|a, b| a.lex_cmp(*b));
            out.push(UpSet { minimal, mask });
            return;
        }
        rec(next + 1, size, chosen, out, up);
        let comparable = chosen
            .iter()
            .any(|c| c & next == *c || c & next == next);
        if !comparable {
            chosen.push(next);
            rec(next + 1, size, chosen, out, up);
            chosen.pop();
        }
    }
    rec(0, size, &mut chosen, &mut out, &up_closure);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AssociationVerdict {
    Pass,
    Fail {
        f: UpSet,
        g: UpSet,
        covariance: f64,
    },
}

impl AssociationVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, AssociationVerdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FkgVerdict {
    Pass,
    Fail {
        /// The zero set `I` of the conditioning event `{X(I) ≡ 0}`.
        conditioned_on: Subset,
        f: UpSet,
        g: UpSet,
        covariance: f64,
    },
}

impl FkgVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, FkgVerdict::Pass)
    }
}

fn prob_of(probs: &[f64], mask: u32) -> f64 {
    probs
        .iter()
        .enumerate()
        .filter(|(x, _)| mask >> x & 1 == 1)
        .map(|(_, p)| p)
        .sum()
}

/// Worst covariance pair, or `None` if all covariances are `≥ −1e−12`.
fn worst_pair(events: &[UpSet], probs: &[f64]) -> Option<(usize, usize, f64)> {
    let marginals: Vec<f64> = events.iter().map(|e| prob_of(probs, e.mask)).collect();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..events.len() {
        for j in 0..events.len() {
            let cov = prob_of(probs, events[i].mask & events[j].mask) - marginals[i] * marginals[j];
            if cov >= -COV_SLACK {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj, bc)) => {
                    let slack = 1e-12 * bc.abs().max(1.0);
                    cov < bc - slack
                        || ((cov - bc).abs() <= slack
                            && events[i]
                                .lex_cmp(&events[bi])
                                .then(events[j].lex_cmp(&events[bj]))
                                == Ordering::Less)
                }
            };
            if better {
                best = Some((i, j, cov));
            }
        }
    }
    best
}

/// `P(A ∩ B) ≥ P(A) P(B) − 1e−12` for all increasing `A, B`; on failure the
/// most negatively correlated pair is returned.
pub fn check_positive_association(d: &BinaryDistribution) -> Result<AssociationVerdict> {
    let events = increasing_events(d.n())?;
    Ok(match worst_pair(&events, d.probs()) {
        None => AssociationVerdict::Pass,
        Some((i, j, covariance)) => AssociationVerdict::Fail {
            f: events[i].clone(),
            g: events[j].clone(),
            covariance,
        },
    })
}

/// Positive association of every conditional law given `{X(I) ≡ 0}` with
/// positive probability. Conditioning sets are tried by size, then
/// lexicographically; the first failing one is reported.
pub fn check_downward_fkg(d: &BinaryDistribution) -> Result<FkgVerdict> {
    let n = d.n();
    let events = increasing_events(n)?;
    let mut sets: Vec<Subset> = (0..1u32 << n).map(Subset::from_bits).collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.lex_cmp(*b)));
    for i in sets {
        let mass = d.zero_probability(i);
        if mass <= 0.0 {
            continue;
        }
        let cond: Vec<f64> = d
            .probs()
            .iter()
            .enumerate()
            .map(|(x, p)| if x as u32 & i.bits() == 0 { p / mass } else { 0.0 })
            .collect();
        if let Some((a, b, covariance)) = worst_pair(&events, &cond) {
            return Ok(FkgVerdict::Fail {
                conditioned_on: i,
                f: events[a].clone(),
                g: events[b].clone(),
                covariance,
            });
        }
    }
    Ok(FkgVerdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_increasing_events() {
        // Dedekind numbers
        let counts: Vec<usize> = (1..=4).map(|n| increasing_events(n).unwrap().len()).collect();
        assert_eq!(counts, vec![3, 6, 20, 168]);
        assert!(increasing_events(5).is_err());
        assert!(increasing_events(0).is_err());
    }

    #[test]
    fn events_are_up_closed() {
        for e in increasing_events(4).unwrap() {
            for x in 0..16u32 {
                if e.contains(Subset::from_bits(x)) {
                    for i in 0..4 {
                        assert!(e.contains(Subset::from_bits(x | 1 << i)));
                    }
                }
            }
        }
    }

    #[test]
    fn product_laws_pass() {
        for p in [0.1, 0.5, 0.8] {
            let d = BinaryDistribution::product(4, p).unwrap();
            assert!(check_positive_association(&d).unwrap().passed());
            assert!(check_downward_fkg(&d).unwrap().passed());
        }
    }

    #[test]
    fn anti_correlated_pair_fails() {
        // X = (B, 1 − B)
        let d = BinaryDistribution::new(2, vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        match check_positive_association(&d).unwrap() {
            AssociationVerdict::Fail { covariance, .. } => assert!((covariance + 0.25).abs() < 1e-15),
            AssociationVerdict::Pass => panic!("should fail"),
        }
    }
}
