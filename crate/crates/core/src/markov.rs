//! Stationary two-state Markov chains and renewal processes on `ℤ`: their
//! `c`-sequences `c_k = P(X_0 = 0, X_k = 0)`, the log-convexity criterion and
//! the interval-supported intensity
//! `w_ℓ = log(c_{ℓ−1} c_{ℓ+1} / c_ℓ²)` carried by each interval of length `ℓ`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::measure::SubsetMeasure;
use crate::pattern::ZeroPattern;
use crate::subset::{check_ground, Subset};
use crate::tolerance::Tolerances;

const CONVEXITY_SLACK: f64 = 1e-12;

/// A chain that with probability `p` rerandomises, drawing 0 with
/// probability `r`, and otherwise keeps its state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovParams {
    p: f64,
    r: f64,
}

impl MarkovParams {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) || !(r > 0.0 && r < 1.0) {
            return domain(format!("need p, r in (0,1), got p = {p}, r = {r}"));
        }
        Ok(MarkovParams { p, r })
    }

    /// The `p = 1` boundary: an i.i.d. sequence with `P(X = 0) = r`.
    pub fn iid(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return domain(format!("need r in (0,1), got {r}"));
        }
        Ok(MarkovParams { p: 1.0, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Rows indexed by the current state (0, 1).
    pub fn transition_matrix(&self) -> [[f64; 2]; 2] {
        let (p, r) = (self.p, self.r);
        [[1.0 - p * (1.0 - r), p * (1.0 - r)], [p * r, 1.0 - p * r]]
    }

    /// `c_k − r² = r(1−r)(1−p)^k`.
    fn excess(&self, k: usize) -> f64 {
        self.r * (1.0 - self.r) * (1.0 - self.p).powi(k as i32)
    }

    /// `w_ℓ` in a cancellation-free form: `c_{ℓ−1}c_{ℓ+1} − c_ℓ² = r³(1−r)p²(1−p)^{ℓ−1}`.
    pub fn w(&self, l: usize) -> f64 {
        assert!(l >= 1);
        let (p, r) = (self.p, self.r);
        let c = r * r + self.excess(l);
        let gap = r.powi(3) * (1.0 - r) * p * p * (1.0 - p).powi(l as i32 - 1);
        (gap / (c * c)).ln_1p()
    }

    /// `c_k` directly.
    pub fn c(&self, k: usize) -> f64 {
        self.r * self.r + self.excess(k)
    }

    /// The interval intensity truncated at length `max_len`, with the exact
    /// remaining tail `Σ_{ℓ > L} ℓ w_ℓ`.
    pub fn interval_nu(&self, max_len: usize) -> Result<IntervalNu> {
        if max_len == 0 {
            return domain("max_len must be at least 1");
        }
        let w = (1..=max_len).map(|l| self.w(l)).collect();
        let l = max_len as f64;
        let tail = (self.c(max_len).ln() - 2.0 * self.r.ln())
            + l * (self.c(max_len) / self.c(max_len + 1)).ln();
        IntervalNu::with_tail(w, tail.max(0.0))
    }
}

/// A renewal gap law `b_1..b_L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapDistribution {
    b: Vec<f64>,
}

impl GapDistribution {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return domain("gap law needs at least one entry");
        }
        if let Some(i) = b.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return domain(format!("b_{} = {} is not a probability", i + 1, b[i]));
        }
        let total: f64 = b.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("gap probabilities sum to {total}, not 1"));
        }
        Ok(GapDistribution { b })
    }

    /// Geometric gaps `θ(1−θ)^{n−1}` truncated where the tail drops below
    /// `tail_tol`, renormalised. Returns the law and the discarded tail mass.
    pub fn truncated_geometric(theta: f64, tail_tol: f64) -> Result<(Self, f64)> {
        if !(theta > 0.0 && theta <= 1.0) || !(tail_tol > 0.0 && tail_tol < 1.0) {
            return domain(format!("need θ in (0,1] and tail_tol in (0,1), got {theta}, {tail_tol}"));
        }
        let mut b = Vec::new();
        let mut tail = 1.0;
        while tail > tail_tol {
            b.push(theta * tail);
            tail *= 1.0 - theta;
        }
        let kept: f64 = b.iter().sum();
        for v in &mut b {
            *v /= kept;
        }
        Ok((GapDistribution::new(b)?, tail))
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn mean(&self) -> f64 {
        self.b
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1) as f64 * v)
            .sum()
    }
}

/// `c_0..c_K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CSequence {
    c: Vec<f64>,
}

impl CSequence {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return domain("c-sequence is empty");
        }
        if let Some(k) = c
            .iter()
            .position(|v| !(v.is_finite() && *v > 0.0 && *v <= 1.0 + 1e-12))
        {
            return domain(format!("c_{k} = {} is not in (0, 1]", c[k]));
        }
        Ok(CSequence { c })
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.c[k]
    }

    /// `k·log(c_{k+1}/c_k)` for every available `k`, which tends to 0 for
    /// renewal sequences.
    pub fn ratio_diagnostic(&self) -> Vec<f64> {
        self.c
            .windows(2)
            .enumerate()
            .map(|(k, w)| k as f64 * (w[1] / w[0]).ln())
            .collect()
    }
}

pub fn c_from_markov(mp: &MarkovParams, k_max: usize) -> Result<CSequence> {
    if k_max < 2 {
        return domain("need K >= 2");
    }
    CSequence::new((0..=k_max).map(|k| mp.c(k)).collect())
}

/// `c_k = u_k / μ` with the renewal recursion `u_k = Σ_j b_j u_{k−j}`.
pub fn c_from_gaps(g: &GapDistribution, k_max: usize) -> Result<CSequence> {
    let c0 = 1.0 / g.mean();
    let mut u = vec![1.0];
    for k in 1..=k_max {
        let uk = (1..=k.min(g.b.len()))
            .map(|j| g.b[j - 1] * u[k - j])
            .sum();
        u.push(uk);
    }
    CSequence::new(u.into_iter().map(|v| c0 * v).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Convexity {
    Pass,
    Fail { k: usize },
}

/// `c_{k−1} c_{k+1} ≥ c_k² − 1e−12` for every interior `k`.
pub fn convexity_check(c: &CSequence) -> Result<Convexity> {
    if c.len() < 3 {
        return domain("convexity needs at least c_0, c_1, c_2");
    }
    for k in 1..c.len() - 1 {
        if c.c[k - 1] * c.c[k + 1] < c.c[k] * c.c[k] - CONVEXITY_SLACK {
            return Ok(Convexity::Fail { k });
        }
    }
    Ok(Convexity::Pass)
}

/// `w_ℓ = log(c_{ℓ−1} c_{ℓ+1} / c_ℓ²)`, `ℓ = 1..=L`.
pub fn interval_nu(c: &CSequence, max_len: usize) -> Result<IntervalNu> {
    if max_len == 0 {
        return domain("max_len must be at least 1");
    }
    if c.len() < max_len + 2 {
        return domain(format!(
            "need c_0..c_{} for L = {max_len}, have {} values",
            max_len + 1,
            c.len()
        ));
    }
    if let Convexity::Fail { k } = convexity_check(c)? {
        return Err(Error::NotRepresentable(format!(
            "c-sequence is not log-convex at k = {k}"
        )));
    }
    let w = (1..=max_len)
        .map(|l| (c.c[l - 1] * c.c[l + 1] / (c.c[l] * c.c[l])).ln().max(0.0))
        .collect();
    let l = max_len as f64;
    let tail = (c.c[max_len].ln() - 2.0 * c.c[0].ln()) + l * (c.c[max_len] / c.c[max_len + 1]).ln();
    IntervalNu::with_tail(w, tail.max(0.0))
}

/// Both sides of `Σ_{j=k+1}^{m} (j−k) w_j = log c_k − log c_m + (m−k) log(c_{m+1}/c_m)`
/// and their difference.
pub fn telescoping_check(c: &CSequence, k: usize, m: usize) -> Result<(f64, f64, f64)> {
    if m < k + 1 || m + 1 >= c.len() {
        return domain(format!(
            "need k < m and c up to index m + 1 = {}; have {} values",
            m + 1,
            c.len()
        ));
    }
    let v = &c.c;
    let lhs: f64 = (k + 1..=m)
        .map(|j| (j - k) as f64 * (v[j - 1] * v[j + 1] / (v[j] * v[j])).ln())
        .sum();
    let rhs = v[k].ln() - v[m].ln() + (m - k) as f64 * (v[m + 1] / v[m]).ln();
    Ok((lhs, rhs, lhs - rhs))
}

/// Translation-invariant intensity on `ℤ` charging only intervals:
/// `w[ℓ−1]` per interval of length `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalNu {
    w: Vec<f64>,
    /// `Σ_{ℓ > L} ℓ w_ℓ` of the untruncated measure, when known.
    tail_mass: f64,
}

impl IntervalNu {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        IntervalNu::with_tail(w, 0.0)
    }

    pub fn with_tail(w: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if let Some(i) = w.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return domain(format!("w_{} = {} must be finite and nonnegative", i + 1, w[i]));
        }
        if !(tail_mass.is_finite() && tail_mass >= 0.0) {
            return domain(format!("tail mass {tail_mass} is invalid"));
        }
        Ok(IntervalNu { w, tail_mass })
    }

    pub fn max_len(&self) -> usize {
        self.w.len()
    }

    /// `w_ℓ`, zero beyond the stored lengths.
    pub fn w(&self, l: usize) -> f64 {
        if l == 0 {
            return 0.0;
        }
        self.w.get(l - 1).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `ν(S_0^∪) = Σ ℓ w_ℓ`, so `P(X_0 = 0) = exp(−this)`.
    pub fn singleton_union_mass(&self) -> f64 {
        self.w
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1) as f64 * v)
            .sum()
    }

    /// Mass of intervals containing both `0` and `k`: `Σ_{ℓ > k} (ℓ − k) w_ℓ`.
    pub fn pair_intersection_mass(&self, k: usize) -> f64 {
        self.w
            .iter()
            .enumerate()
            .skip(k)
            .map(|(i, v)| (i + 1 - k) as f64 * v)
            .sum()
    }

    /// `ν(S_{[n]}^∪) = Σ (n + ℓ − 1) w_ℓ`.
    pub fn box_union_mass(&self, n: usize) -> f64 {
        self.w
            .iter()
            .enumerate()
            .map(|(i, v)| (n + i) as f64 * v)
            .sum()
    }

    /// The restriction of the (truncated) measure to the window `[n]`:
    /// every interval meeting the window contributes its intersection.
    pub fn window_measure(&self, n: usize) -> Result<SubsetMeasure> {
        check_ground(n)?;
        let mut nu = SubsetMeasure::new(n)?;
        for (i, w) in self.w.iter().enumerate() {
            let l = (i + 1) as i64;
            if *w == 0.0 {
                continue;
            }
            for a in (2 - l)..=(n as i64) {
                let lo = a.max(1) as usize;
                let hi = (a + l - 1).min(n as i64) as usize;
                nu.add_atom(Subset::interval(lo, hi), *w)?;
            }
        }
        Ok(nu)
    }
}

/// The untruncated restriction of the Markov interval measure to `[n]`, in
/// closed form: interior intervals of length `ℓ` get `w_ℓ`, a boundary
/// interval `[1,b]` (or `[n−b+1,n]`) with `b < n` gets `log(c_{b−1}/c_b)`,
/// and `[n]` itself gets `log c_{n−1} − 2 log c_0`.
pub fn markov_window_nu(mp: &MarkovParams, n: usize) -> Result<SubsetMeasure> {
    check_ground(n)?;
    let mut nu = SubsetMeasure::new(n)?;
    let c0 = mp.c(0);
    for a in 1..=n {
        for b in a..=n {
            let len = b - a + 1;
            let mass = match (a == 1, b == n) {
                (true, true) => mp.c(n - 1).ln() - 2.0 * c0.ln(),
                (true, false) | (false, true) => (mp.c(len - 1) / mp.c(len)).ln(),
                (false, false) => mp.w(len),
            };
            nu.add_atom(Subset::interval(a, b), mass.max(0.0))?;
        }
    }
    Ok(nu)
}

/// Exact zero pattern of the stationary chain on `n` consecutive sites, by
/// transfer-matrix products restricted to state 0 on the chosen sites.
pub fn markov_window_law(mp: &MarkovParams, n: usize, tol: &Tolerances) -> Result<ZeroPattern> {
    if !(2..=24).contains(&n) {
        return domain(format!("window length {n} outside [2, 24]"));
    }
    let t = mp.transition_matrix();
    let pi = [mp.r, 1.0 - mp.r];
    // layer[mask] = (P(X_m = 0, constraints), P(X_m = 1, constraints)) for
    // constraints on the first m sites given by mask
    let mut layer: Vec<[f64; 2]> = vec![pi, [pi[0], 0.0]];
    for m in 1..n {
        let mut next = vec![[0.0; 2]; 1 << (m + 1)];
        for (mask, v) in layer.iter().enumerate() {
            let stepped = [
                v[0] * t[0][0] + v[1] * t[1][0],
                v[0] * t[0][1] + v[1] * t[1][1],
            ];
            next[mask] = stepped;
            next[mask | 1 << m] = [stepped[0], 0.0];
        }
        layer = next;
    }
    let log_z = layer.iter().map(|v| (v[0] + v[1]).ln()).collect();
    ZeroPattern::from_log_values(n, log_z, tol)
}
