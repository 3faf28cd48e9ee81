//! Exchangeable intensities `ν = c Σ δ_i + ∫ Π_x dσ(x) (+ a δ_ℕ)` and their
//! correspondence with infinitely divisible laws on `[0, ∞]`.
//!
//! Under `φ(x) = −log(1 − x)` the de Finetti variable `Q` becomes
//! `Z = −log(1 − Q)`, whose Lévy measure is `σ̂ = σ ∘ φ^{−1}` and whose drift
//! is `c`. The full-set atom `a` becomes the mass `1 − e^{−a}` at `Z = ∞`.

use std::collections::BTreeMap;

use quadrature::double_exponential::integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::pattern::BinaryDistribution;

const QUAD_TOL: f64 = 1e-12;

/// Built-in densities for σ on `(0, 1)`; each has a closed-form image on
/// `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    /// `dσ = dx`.
    Lebesgue,
    /// `dσ = dx / (−log(1 − x))`, the image of the exponential(1) Lévy measure.
    Ex49,
    /// `dσ = (1−x)^{b−1}(1 − (1−x)^a) / (−x log(1−x)) dx`, the image of the
    /// Lévy measure of `−log` of a Beta(a, b) variable.
    Beta { a: f64, b: f64 },
}

impl DensityKind {
    fn validate(self) -> Result<Self> {
        if let DensityKind::Beta { a, b } = self {
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return domain(format!("beta density needs a, b > 0, got ({a}, {b})"));
            }
        }
        Ok(self)
    }

    /// `σ` density at `x`, given `x` and `ln(1 − x)` separately so values near
    /// `x = 1` keep their precision.
    fn sigma_at(self, x: f64, log1mx: f64) -> f64 {
        match self {
            DensityKind::Lebesgue => 1.0,
            DensityKind::Ex49 => 1.0 / -log1mx,
            DensityKind::Beta { a, b } => {
                ((b - 1.0) * log1mx).exp() * -(a * log1mx).exp_m1() / (-x * log1mx)
            }
        }
    }

    /// Density of σ on `(0, 1)`.
    pub fn sigma(self, x: f64) -> f64 {
        if !(x > 0.0 && x < 1.0) {
            return 0.0;
        }
        self.sigma_at(x, (-x).ln_1p())
    }

    /// Closed-form density of `σ̂` on `(0, ∞)`.
    pub fn sigma_hat(self, s: f64) -> f64 {
        if !(s > 0.0 && s.is_finite()) {
            return 0.0;
        }
        match self {
            DensityKind::Lebesgue => (-s).exp(),
            DensityKind::Ex49 => (-s).exp() / s,
            DensityKind::Beta { a, b } => {
                (-b * s).exp() * -(-a * s).exp_m1() / (s * -(-s).exp_m1())
            }
        }
    }
}

/// `σ̂` density obtained from a σ density by change of variables.
pub fn pushforward_density(sigma: impl Fn(f64) -> f64, s: f64) -> f64 {
    let x = -(-s).exp_m1();
    sigma(x) * (-s).exp()
}

/// σ density obtained from a `σ̂` density: `σ̂(−log(1−x)) / (1 − x)`.
pub fn pullback_density(sigma_hat: impl Fn(f64) -> f64, x: f64) -> f64 {
    sigma_hat(-(-x).ln_1p()) / (1.0 - x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

/// A permutation-invariant intensity on the subsets of `ℕ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeableNu {
    c: f64,
    atoms: Vec<Atom>,
    density: Option<DensityKind>,
    fullset: f64,
}

impl ExchangeableNu {
    /// Atoms of σ must lie in `(0, 1)`; mass on `Π_1` is the full-set atom.
    pub fn new(c: f64, atoms: Vec<Atom>, density: Option<DensityKind>, fullset: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return domain(format!("c = {c} must be finite and nonnegative"));
        }
        if !(fullset >= 0.0 && fullset.is_finite()) {
            return domain(format!("full-set atom {fullset} must be finite and nonnegative"));
        }
        for a in &atoms {
            if !(a.x > 0.0 && a.x < 1.0) {
                return domain(format!(
                    "sigma atom at {} must lie in (0, 1); use the full-set atom for x = 1",
                    a.x
                ));
            }
            if !(a.mass >= 0.0 && a.mass.is_finite()) {
                return domain(format!("sigma atom mass {} is invalid", a.mass));
            }
        }
        let density = density.map(DensityKind::validate).transpose()?;
        let en = ExchangeableNu {
            c,
            atoms,
            density,
            fullset,
        };
        let first_moment = en.first_moment();
        if !first_moment.is_finite() {
            return domain("∫ x dσ(x) is not finite");
        }
        Ok(en)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<DensityKind> {
        self.density
    }

    pub fn fullset(&self) -> f64 {
        self.fullset
    }

    /// `∫ x dσ(x)`.
    pub fn first_moment(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.x * a.mass).sum();
        atoms
            + self
                .density
                .map_or(0.0, |d| integrate(|x| x * d.sigma(x), 0.0, 1.0, QUAD_TOL).integral)
    }

    /// `P(X_1 = ⋯ = X_j = 0) = E[e^{−jZ}]`, `j = 0..=n`.
    pub fn zero_probabilities(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|j| laplace_of_z(self, j as f64).unwrap_or(f64::NAN)).collect()
    }

    /// The restriction of the process to `[n]`, `n ≤ 24`.
    pub fn restricted_law(&self, n: usize) -> Result<BinaryDistribution> {
        if n == 0 || n > 24 {
            return domain(format!("need 1 <= n <= 24, got {n}"));
        }
        // inclusion-exclusion over the sites required to be one
        let z = self.zero_probabilities(n);
        let mut by_zeros = vec![0.0; n + 1];
        for (m, slot) in by_zeros.iter_mut().enumerate() {
            // P(a fixed m-set is all zero and the other n − m sites all one)
            let mut acc = 0.0;
            let mut binom = 1.0;
            for i in 0..=(n - m) {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * z[m + i];
                binom = binom * (n - m - i) as f64 / (i + 1) as f64;
            }
            *slot = acc.max(0.0);
        }
        let prob: Vec<f64> = (0..1u32 << n)
            .map(|ones| by_zeros[n - ones.count_ones() as usize])
            .collect();
        let total: f64 = prob.iter().sum();
        BinaryDistribution::new(n, prob.iter().map(|p| p / total).collect())
    }
}

/// Drift `γ`, Lévy measure `σ̂` on `(0, ∞)` and mass at `Z = ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriple {
    gamma: f64,
    atoms: Vec<(f64, f64)>,
    density: Option<DensityKind>,
    mass_at_infinity: f64,
}

impl LevyTriple {
    /// `atoms` are `(s, mass)` pairs with `s ∈ (0, ∞)`.
    pub fn new(
        gamma: f64,
        atoms: Vec<(f64, f64)>,
        density: Option<DensityKind>,
        mass_at_infinity: f64,
    ) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return domain(format!("gamma = {gamma} must be finite and nonnegative"));
        }
        if !(0.0..1.0).contains(&mass_at_infinity) {
            return domain(format!("mass at infinity {mass_at_infinity} must lie in [0, 1)"));
        }
        if atoms
            .iter()
            .any(|(s, m)| !(*s > 0.0 && s.is_finite() && *m >= 0.0 && m.is_finite()))
        {
            return domain("Lévy atoms need s in (0, ∞) and finite nonnegative mass");
        }
        let density = density.map(DensityKind::validate).transpose()?;
        Ok(LevyTriple {
            gamma,
            atoms,
            density,
            mass_at_infinity,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<DensityKind> {
        self.density
    }

    pub fn mass_at_infinity(&self) -> f64 {
        self.mass_at_infinity
    }

    /// Density of `σ̂` at `s`.
    pub fn sigma_hat_density(&self, s: f64) -> f64 {
        self.density.map_or(0.0, |d| d.sigma_hat(s))
    }
}

pub fn levy_from_exchangeable(en: &ExchangeableNu) -> LevyTriple {
    LevyTriple {
        gamma: en.c,
        atoms: en.atoms.iter().map(|a| (-(-a.x).ln_1p(), a.mass)).collect(),
        density: en.density,
        mass_at_infinity: -(-en.fullset).exp_m1(),
    }
}

pub fn exchangeable_from_levy(lt: &LevyTriple) -> ExchangeableNu {
    ExchangeableNu {
        c: lt.gamma,
        atoms: lt
            .atoms
            .iter()
            .map(|(s, m)| Atom {
                x: -(-s).exp_m1(),
                mass: *m,
            })
            .collect(),
        density: lt.density,
        fullset: -(-lt.mass_at_infinity).ln_1p(),
    }
}

/// `E[e^{−tZ}] = e^{−ct} e^{−a 1[t>0]} exp(∫((1−y)^t − 1) dσ(y))`.
pub fn laplace_of_z(en: &ExchangeableNu, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("t = {t} must be finite and nonnegative"));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let atoms: f64 = en
        .atoms
        .iter()
        .map(|a| a.mass * (t * (-a.x).ln_1p()).exp_m1())
        .sum();
    let dens = en.density.map_or(0.0, |d| {
        integrate(
            |y| {
                let l = (-y).ln_1p();
                (t * l).exp_m1() * d.sigma_at(y, l)
            },
            0.0,
            1.0,
            QUAD_TOL,
        )
        .integral
    });
    Ok((-en.c * t - en.fullset + atoms + dens).exp())
}

/// Where the density part of σ was truncated for sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    /// Points below `eps` are dropped; `∫_0^eps x dσ < trunc_eps`.
    pub eps: f64,
    pub lower_x_integral: f64,
    /// σ-mass above the upper cut, which is also dropped.
    pub upper_mass: f64,
}

struct Cell {
    v0: f64,
    width: f64,
    bound: f64,
}

/// Precomputed thinning envelope for the density part, in the logit
/// coordinate `v = log(x/(1−x))` where `σ(x)·x(1−x)` is bounded.
pub struct QSampler {
    c: f64,
    fullset_prob: f64,
    atoms: Vec<(f64, Poisson<f64>)>,
    density: Option<DensityKind>,
    cells: Vec<Cell>,
    cumulative: Vec<f64>,
    total_rate: Option<Poisson<f64>>,
    truncation: Option<Truncation>,
}

fn logistic(v: f64) -> (f64, f64) {
    // (x, ln(1 − x)) with x = 1/(1 + e^{−v})
    let x = 1.0 / (1.0 + (-v).exp());
    let log1mx = -(if v > 0.0 { v + (-v).exp().ln_1p() } else { v.exp().ln_1p() });
    (x, log1mx)
}

fn logit_density(d: DensityKind, v: f64) -> f64 {
    let (x, log1mx) = logistic(v);
    d.sigma_at(x, log1mx) * x * log1mx.exp()
}

const UPPER_TAIL: f64 = 1e-12;
const CELL_WIDTH: f64 = 0.25;

impl QSampler {
    pub fn new(en: &ExchangeableNu, trunc_eps: f64) -> Result<Self> {
        if !(trunc_eps > 0.0 && trunc_eps < 1.0) {
            return domain(format!("trunc_eps = {trunc_eps} must lie in (0, 1)"));
        }
        let atoms = en
            .atoms
            .iter()
            .filter(|a| a.mass > 0.0)
            .map(|a| Ok(((-a.x).ln_1p(), poisson(a.mass)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut s = QSampler {
            c: en.c,
            fullset_prob: -(-en.fullset).exp_m1(),
            atoms,
            density: en.density,
            cells: Vec::new(),
            cumulative: Vec::new(),
            total_rate: None,
            truncation: None,
        };
        if let Some(d) = en.density {
            s.build_envelope(d, trunc_eps)?;
        }
        Ok(s)
    }

    fn build_envelope(&mut self, d: DensityKind, trunc_eps: f64) -> Result<()> {
        let lower = |eps: f64| integrate(|x| x * d.sigma(x), 0.0, eps, QUAD_TOL * trunc_eps).integral;
        let mut eps = 0.5;
        while lower(eps) >= trunc_eps {
            eps *= 0.5;
            if eps < 1e-300 {
                return Err(Error::Internal("could not truncate σ near 0".into()));
            }
        }
        let v_lo = (eps / (1.0 - eps)).ln();
        let v_max = 700.0;
        let tail = |v: f64| integrate(|u| logit_density(d, u), v, v_max, 1e-15).integral;
        let mut v_hi = v_lo.max(0.0) + 1.0;
        while v_hi < v_max && tail(v_hi) >= UPPER_TAIL {
            v_hi += 1.0;
        }
        let upper_mass = if v_hi < v_max { tail(v_hi) } else { 0.0 };
        let mut v = v_lo;
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        while v < v_hi {
            let width = CELL_WIDTH.min(v_hi - v);
            let peak = (0..=16)
                .map(|i| logit_density(d, v + width * i as f64 / 16.0))
                .fold(0.0, f64::max);
            let bound = peak * 1.25 + 1e-300;
            acc += bound * width;
            cumulative.push(acc);
            self.cells.push(Cell { v0: v, width, bound });
            v += width;
        }
        self.cumulative = cumulative;
        self.total_rate = if acc > 0.0 { Some(poisson(acc)?) } else { None };
        self.truncation = Some(Truncation {
            eps,
            lower_x_integral: lower(eps),
            upper_mass,
        });
        Ok(())
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.truncation
    }

    /// One draw of `Q = 1 − (1 − y_0) Π (1 − Y_j)`, or 1 on the full-set atom.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.fullset_prob > 0.0 && rng.gen::<f64>() < self.fullset_prob {
            return 1.0;
        }
        // log(1 − Q)
        let mut log_keep = -self.c;
        for (l, pois) in &self.atoms {
            let k = pois.sample(rng);
            if k > 0.0 {
                log_keep += k * l;
            }
        }
        if let (Some(d), Some(pois)) = (self.density, &self.total_rate) {
            let total = *self.cumulative.last().unwrap_or(&0.0);
            let k = pois.sample(rng) as u64;
            for _ in 0..k {
                let u = rng.gen::<f64>() * total;
                let i = self.cumulative.partition_point(|c| *c <= u).min(self.cells.len() - 1);
                let cell = &self.cells[i];
                let v = cell.v0 + rng.gen::<f64>() * cell.width;
                if rng.gen::<f64>() * cell.bound < logit_density(d, v) {
                    log_keep += logistic(v).1;
                }
            }
        }
        -log_keep.exp_m1()
    }

    /// `draws` samples from independent ChaCha8 streams, one per block of
    /// 4096 draws, so the output does not depend on the thread count.
    pub fn sample_many(&self, draws: usize, seed: u64) -> Vec<f64> {
        const BLOCK: usize = 4096;
        let blocks = draws.div_ceil(BLOCK);
        (0..blocks)
            .into_par_iter()
            .flat_map_iter(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b as u64);
                let len = BLOCK.min(draws - b * BLOCK);
                (0..len).map(move |_| self.sample(&mut rng)).collect::<Vec<_>>()
            })
            .collect()
    }
}

fn poisson(rate: f64) -> Result<Poisson<f64>> {
    Poisson::new(rate).map_err(|e| Error::Domain(format!("Poisson rate {rate}: {e}")))
}

/// A single draw of the de Finetti variable with the given seed.
pub fn sample_definetti_q(en: &ExchangeableNu, seed: u64, trunc_eps: f64) -> Result<f64> {
    let sampler = QSampler::new(en, trunc_eps)?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Measure JSON: `{"c", "fullset", "atoms": [{"x", "mass"}], "density":
/// {"kind", "params"}}` with kinds `lebesgue`, `ex49`, `beta` (params `a`, `b`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeableNuJson {
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub fullset: f64,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub density: Option<DensityJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl DensityJson {
    pub fn to_kind(&self) -> Result<DensityKind> {
        let param = |k: &str| {
            self.params
                .get(k)
                .copied()
                .ok_or_else(|| Error::Domain(format!("density {} needs parameter {k}", self.kind)))
        };
        match self.kind.as_str() {
            "lebesgue" => Ok(DensityKind::Lebesgue),
            "ex49" => Ok(DensityKind::Ex49),
            "beta" | "beta(a,b)" => DensityKind::Beta {
                a: param("a")?,
                b: param("b")?,
            }
            .validate(),
            other => domain(format!("unknown density kind {other:?}")),
        }
    }

    pub fn from_kind(kind: DensityKind) -> Self {
        let (name, params) = match kind {
            DensityKind::Lebesgue => ("lebesgue", BTreeMap::new()),
            DensityKind::Ex49 => ("ex49", BTreeMap::new()),
            DensityKind::Beta { a, b } => (
                "beta",
                BTreeMap::from([("a".to_string(), a), ("b".to_string(), b)]),
            ),
        };
        DensityJson {
            kind: name.into(),
            params,
        }
    }
}

impl TryFrom<&ExchangeableNuJson> for ExchangeableNu {
    type Error = Error;

    fn try_from(j: &ExchangeableNuJson) -> Result<Self> {
        let density = j.density.as_ref().map(DensityJson::to_kind).transpose()?;
        ExchangeableNu::new(j.c, j.atoms.clone(), density, j.fullset)
    }
}

impl From<&ExchangeableNu> for ExchangeableNuJson {
    fn from(en: &ExchangeableNu) -> Self {
        ExchangeableNuJson {
            c: en.c,
            fullset: en.fullset,
            atoms: en.atoms.clone(),
            density: en.density.map(DensityJson::from_kind),
        }
    }
}

/// Lévy atoms reuse [`Atom`] with `x` holding the location `s ∈ (0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTripleJson {
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub density: Option<DensityJson>,
    #[serde(default)]
    pub mass_at_infinity: f64,
}

impl TryFrom<&LevyTripleJson> for LevyTriple {
    type Error = Error;

    fn try_from(j: &LevyTripleJson) -> Result<Self> {
        let density = j.density.as_ref().map(DensityJson::to_kind).transpose()?;
        let atoms = j.atoms.iter().map(|a| (a.x, a.mass)).collect();
        LevyTriple::new(j.gamma, atoms, density, j.mass_at_infinity)
    }
}

impl From<&LevyTriple> for LevyTripleJson {
    fn from(lt: &LevyTriple) -> Self {
        LevyTripleJson {
            gamma: lt.gamma,
            atoms: lt.atoms.iter().map(|(s, m)| Atom { x: *s, mass: *m }).collect(),
            density: lt.density.map(DensityJson::from_kind),
            mass_at_infinity: lt.mass_at_infinity,
        }
    }
}
