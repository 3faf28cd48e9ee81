//! File formats.
//!
//! Measures: `{"n": 3, "atoms": [{"set": [1, 2], "mass": 0.5}]}`, with
//! `"mass": "inf"` for an infinite atom. Distributions: `{"n": 2, "probs":
//! [..]}` indexed by `Σ 2^{i−1} x_i`. Symmetric patterns: `{"n": 4, "z":
//! [z_0, .., z_n]}`. Gap laws: `{"b": [b_1, ..]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::GapDistribution;
use crate::measure::{Mass, SignedSubsetMeasure, SubsetMeasure};
use crate::moebius::SymmetricZeroPattern;
use crate::pattern::BinaryDistribution;
use crate::subset::Subset;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassJson {
    Finite(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub set: Vec<usize>,
    pub mass: MassJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub n: usize,
    pub atoms: Vec<AtomJson>,
}

fn parse_set(n: usize, set: &[usize]) -> Result<Subset> {
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("subset {set:?} is not strictly increasing")));
    }
    Subset::from_elements(n, set)
}

impl MeasureJson {
    pub fn to_measure(&self) -> Result<SubsetMeasure> {
        let mut nu = SubsetMeasure::new(self.n)?;
        for a in &self.atoms {
            let set = parse_set(self.n, &a.set)?;
            match &a.mass {
                MassJson::Finite(m) => nu.add_atom(set, *m)?,
                MassJson::Named(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => {
                    nu.add_infinite_atom(set)?
                }
                MassJson::Named(s) => {
                    return Err(Error::Domain(format!("mass {s:?} is neither a number nor \"inf\"")))
                }
            }
        }
        Ok(nu)
    }

    /// Accepts negative masses.
    pub fn to_signed_measure(&self) -> Result<SignedSubsetMeasure> {
        let mut nu = SignedSubsetMeasure::zero(self.n)?;
        for a in &self.atoms {
            let set = parse_set(self.n, &a.set)?;
            let MassJson::Finite(m) = a.mass else {
                return Err(Error::Domain("signed measures take finite masses only".into()));
            };
            nu.set_mass(set, nu.mass(set) + m)?;
        }
        Ok(nu)
    }

    pub fn from_measure(nu: &SubsetMeasure) -> Self {
        MeasureJson {
            n: nu.n(),
            atoms: nu
                .atoms()
                .map(|(s, m)| AtomJson {
                    set: s.elements(),
                    mass: match m {
                        Mass::Finite(v) => MassJson::Finite(v),
                        Mass::Infinite => MassJson::Named("inf".into()),
                    },
                })
                .collect(),
        }
    }

    /// Nonzero atoms in lexicographic order.
    pub fn from_signed(nu: &SignedSubsetMeasure) -> Self {
        let mut atoms: Vec<(Subset, f64)> = nu.atoms().filter(|(_, m)| *m != 0.0).collect();
        atoms.sort_by(|a, b| a.0.lex_cmp(b.0));
        MeasureJson {
            n: nu.n(),
            atoms: atoms
                .into_iter()
                .map(|(s, m)| AtomJson {
                    set: s.elements(),
                    mass: MassJson::Finite(m),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionJson {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl DistributionJson {
    pub fn to_distribution(&self) -> Result<BinaryDistribution> {
        BinaryDistribution::new(self.n, self.probs.clone())
    }

    pub fn from_distribution(d: &BinaryDistribution) -> Self {
        DistributionJson {
            n: d.n(),
            probs: d.probs().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricJson {
    pub n: usize,
    pub z: Vec<f64>,
}

impl SymmetricJson {
    pub fn to_pattern(&self, tol: &Tolerances) -> Result<SymmetricZeroPattern> {
        if self.z.len() != self.n + 1 {
            return Err(Error::Domain(format!(
                "expected {} values z_0..z_n, got {}",
                self.n + 1,
                self.z.len()
            )));
        }
        SymmetricZeroPattern::from_values(self.z.clone(), tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapJson {
    pub b: Vec<f64>,
}

impl GapJson {
    pub fn to_gaps(&self) -> Result<GapDistribution> {
        GapDistribution::new(self.b.clone())
    }
}
