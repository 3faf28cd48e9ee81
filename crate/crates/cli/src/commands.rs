//! One function per subcommand. Each returns a [`Report`]; errors become
//! exit status 1 in `main`.

use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use prp_core::association::{check_downward_fkg, check_positive_association};
use prp_core::exchangeable::{
    exchangeable_from_levy, laplace_of_z, levy_from_exchangeable, ExchangeableNu, ExchangeableNuJson, LevyTriple,
    LevyTripleJson, QSampler,
};
use prp_core::json::{DistributionJson, GapJson, MeasureJson, SymmetricJson};
use prp_core::lattice::{
    curie_weiss_levels, curie_weiss_negativity_search, ising_verdict, tree_mc_verdict, BoundVerdict, CurieWeissSpec,
    OneSidedVerdict,
};
use prp_core::markov::{c_from_gaps, convexity_check, interval_nu, Convexity, IntervalNu, MarkovParams};
use prp_core::mixture::{alpha_grid, mixture_levels, phase_scan, x2_grid, CellSign, MixtureSpec, ScanOptions};
use prp_core::pattern::forward_distribution;
use prp_core::polylog::{polylog_neg_order, root_r2, root_table};
use prp_core::stationary::{domination_check, pair_correlation_check, sample_window, Domination};
use prp_core::{
    distribution_to_zero_pattern, forward_zero_pattern, invert, is_representable, symmetric_invert, LevelMeasure,
    Representability, Subset, Tolerances,
};

use crate::output::{num, Report};

pub type CmdResult = Result<Report, Box<dyn StdError>>;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub precision_bits: usize,
    pub tol: f64,
    pub seed: u64,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Box<dyn StdError>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn tolerances() -> Tolerances {
    Tolerances::default()
}

fn bits_of(n: usize, b: u32) -> String {
    (0..n).map(|i| if b >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn measure_table(m: &MeasureJson) -> Vec<Vec<String>> {
    m.atoms
        .iter()
        .map(|a| {
            let set = format!(
                "{{{}}}",
                a.set.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            );
            let mass = match &a.mass {
                prp_core::json::MassJson::Finite(v) => num(*v),
                prp_core::json::MassJson::Named(s) => s.clone(),
            };
            vec![set, mass]
        })
        .collect()
}

pub fn invert_cmd(dist: &Path) -> CmdResult {
    let d = read_json::<DistributionJson>(dist)?.to_distribution()?;
    let nu = invert(&distribution_to_zero_pattern(&d)?);
    let m = MeasureJson::from_signed(&nu);
    let rows = measure_table(&m);
    Ok(Report::new(serde_json::to_value(&m)?).table(&["set", "mass"], rows))
}

pub fn forward_cmd(measure: &Path) -> CmdResult {
    let nu = read_json::<MeasureJson>(measure)?.to_measure()?;
    let z = forward_zero_pattern(&nu)?;
    let d = forward_distribution(&nu, &tolerances())?;
    let n = nu.n();
    let rows = (0..1u32 << n)
        .map(|b| {
            let s = Subset::from_bits(b);
            vec![b.to_string(), bits_of(n, b), num(d.prob(s)), num(z.z(s))]
        })
        .collect();
    Ok(Report::new(json!({ "n": n, "probs": d.probs(), "z": z.values() }))
        .table(&["index", "x", "prob", "z"], rows))
}

pub fn check_cmd(dist: &Path, fkg: bool, cfg: &RunConfig) -> CmdResult {
    let d = read_json::<DistributionJson>(dist)?.to_distribution()?;
    let z = distribution_to_zero_pattern(&d)?;
    let nu = invert(&z);
    let verdict = is_representable(&z, cfg.tol);
    let mut doc = json!({
        "n": d.n(),
        "representable": verdict.is_representable(),
        "witness": Value::Null,
        "mass": Value::Null,
        "measure": MeasureJson::from_signed(&nu),
    });
    let mut pairs = vec![("representable", yes_no(verdict.is_representable()))];
    if let Representability::NotRepresentable { witness, mass } = &verdict {
        doc["witness"] = serde_json::to_value(witness)?;
        doc["mass"] = json!(mass);
        pairs.push(("witness", witness.to_string()));
        pairs.push(("mass", num(*mass)));
    }
    if fkg {
        let pa = check_positive_association(&d)?;
        let dfkg = check_downward_fkg(&d)?;
        pairs.push(("positively_associated", yes_no(pa.passed())));
        pairs.push(("downward_fkg", yes_no(dfkg.passed())));
        doc["positive_association"] = serde_json::to_value(&pa)?;
        doc["downward_fkg"] = serde_json::to_value(&dfkg)?;
    }
    Ok(Report::new(doc).pairs(pairs).negative(!verdict.is_representable()))
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn level_report(levels: &LevelMeasure, tol: f64, extra: Value) -> Report {
    let witness = levels.witness(tol);
    let mut doc = json!({
        "n": levels.n(),
        "levels": levels.levels(),
        "bits": levels.bits(),
        "representable": witness.is_none(),
        "witness": witness.map(|(l, v)| json!({ "level": l, "value": v })),
    });
    if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
        doc.extend(extra);
    }
    let rows = levels
        .levels()
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), num(*v)])
        .collect();
    Report::new(doc).table(&["level", "lambda"], rows).negative(witness.is_some())
}

pub fn symmetric_invert_cmd(pattern: &Path, cfg: &RunConfig) -> CmdResult {
    let z = read_json::<SymmetricJson>(pattern)?.to_pattern(&tolerances())?;
    let levels = symmetric_invert(&z, cfg.precision_bits)?;
    Ok(level_report(&levels, cfg.tol, json!({})))
}

pub fn markov_nu_cmd(p: f64, r: f64, len: usize) -> CmdResult {
    let mp = MarkovParams::new(p, r)?;
    let inu = mp.interval_nu(len)?;
    let c: Vec<f64> = (0..=len + 1).map(|k| mp.c(k)).collect();
    let rows = inu
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| vec![(i + 1).to_string(), num(*w), num(c[i + 1])])
        .collect();
    Ok(Report::new(json!({
        "p": p,
        "r": r,
        "w": inu.weights(),
        "c": c,
        "tail_mass": inu.tail_mass(),
    }))
    .table(&["length", "w", "c"], rows))
}

pub fn renewal_check_cmd(gaps: &Path, len: usize, k_max: usize) -> CmdResult {
    let g = read_json::<GapJson>(gaps)?.to_gaps()?;
    let c = c_from_gaps(&g, k_max.max(len + 1))?;
    let conv = convexity_check(&c)?;
    let mut doc = json!({
        "mean_gap": g.mean(),
        "convexity": conv,
        "representable": conv == Convexity::Pass,
        "w": Value::Null,
    });
    let mut pairs = vec![
        ("mean_gap", num(g.mean())),
        ("representable", yes_no(conv == Convexity::Pass)),
    ];
    match conv {
        Convexity::Fail { k } => pairs.push(("convexity_fails_at", k.to_string())),
        Convexity::Pass => {
            let inu = interval_nu(&c, len)?;
            doc["w"] = json!(inu.weights());
            for (i, w) in inu.weights().iter().enumerate() {
                pairs.push(("w", format!("{}:{}", i + 1, num(*w))));
            }
        }
    }
    Ok(Report::new(doc).pairs(pairs).negative(conv != Convexity::Pass))
}

pub fn mixture_nu_cmd(x: &[f64], alpha: &[f64], q: f64, n: usize, cfg: &RunConfig) -> CmdResult {
    let spec = MixtureSpec::new(q, x.to_vec(), alpha.to_vec())?;
    let levels = mixture_levels(&spec, n, cfg.precision_bits)?;
    Ok(level_report(&levels, cfg.tol, json!({ "q": q, "x": x, "alpha": alpha })))
}

pub fn polylog_cmd(k: usize, z: f64) -> CmdResult {
    if z == 1.0 {
        return Err("Li has a pole at z = 1".into());
    }
    let li = polylog_neg_order(k)?;
    let coeffs: Vec<String> = li.numerator().iter().map(|c| c.to_string()).collect();
    let value = li.eval(z);
    Ok(Report::new(json!({
        "k": k,
        "order": li.order(),
        "z": z,
        "value": value,
        "numerator": coeffs,
    }))
    .pairs(vec![
        ("order", li.order().to_string()),
        ("z", num(z)),
        ("value", num(value)),
        ("numerator", coeffs.join(" ")),
    ]))
}

pub fn polylog_root_cmd(n: usize, all: bool) -> CmdResult {
    let rows = if all { root_table(n, 1e-15)? } else { vec![root_r2(n, 1e-15)?] };
    let table = rows
        .iter()
        .map(|r| vec![r.n.to_string(), num(r.r2), num(r.threshold)])
        .collect();
    let doc = if all {
        serde_json::to_value(&rows)?
    } else {
        serde_json::to_value(rows[0])?
    };
    Ok(Report::new(doc).table(&["n", "r2", "threshold"], table))
}

/// `"A"` or `"AxB"`: α_1 steps and x_2 steps.
fn parse_grid(grid: &str) -> Result<(usize, usize), Box<dyn StdError>> {
    let bad = || format!("grid {grid:?} must look like 200 or 200x100");
    let (a, b) = match grid.split_once('x') {
        Some((a, b)) => (a, b),
        None => (grid, grid),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad().into());
    }
    Ok((a, b))
}

pub fn phase_scan_cmd(
    n: usize,
    grid: &str,
    q: f64,
    out: Option<&PathBuf>,
    unresolved_below: Option<f64>,
    cfg: &RunConfig,
) -> CmdResult {
    let (a, b) = parse_grid(grid)?;
    let opts = ScanOptions {
        q,
        precision_bits: cfg.precision_bits,
        unresolved_below,
    };
    let rows = phase_scan(n, &alpha_grid(a), &x2_grid(b), &opts)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![num(r.alpha1), num(r.x2), r.k.to_string(), num(r.level), r.sign.as_str().to_string()]
        })
        .collect();
    let headers = ["alpha1", "x2", "k", "level", "sign"];
    let count = |s: CellSign| rows.iter().filter(|r| r.sign == s).count();
    let summary = json!({
        "n": n,
        "q": q,
        "alpha_steps": a,
        "x2_steps": b,
        "rows": rows.len(),
        "positive": count(CellSign::Positive),
        "negative": count(CellSign::Negative),
        "zero": count(CellSign::Zero),
        "unresolved": count(CellSign::Unresolved),
    });
    match out {
        Some(path) => {
            let csv = Report::new(Value::Null).table(&headers, table).render(crate::output::Format::Csv);
            fs::write(path, csv).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut doc = summary;
            doc["out"] = json!(path.display().to_string());
            let pairs = doc
                .as_object()
                .expect("summary is an object")
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string().trim_matches('"').to_string()))
                .collect::<Vec<_>>();
            let rows = pairs.into_iter().map(|(k, v)| vec![k, v]).collect();
            Ok(Report::new(doc).table(&["key", "value"], rows))
        }
        None => Ok(Report::new(json!({ "summary": summary, "rows": rows })).table(&headers, table)),
    }
}

pub fn curie_weiss_cmd(beta: f64, n_max: usize, n: Option<usize>, cfg: &RunConfig) -> CmdResult {
    if let Some(n) = n {
        let levels = curie_weiss_levels(&CurieWeissSpec::new(n, beta)?, cfg.precision_bits)?;
        return Ok(level_report(&levels, cfg.tol, json!({ "beta": beta })));
    }
    let s = curie_weiss_negativity_search(beta, n_max)?;
    let mut pairs = vec![("beta", num(beta)), ("n_max", n_max.to_string())];
    match &s.found {
        Some(w) => {
            pairs.push(("witness_n", w.n.to_string()));
            pairs.push(("witness_k", w.k.to_string()));
            pairs.push(("witness_value", num(w.value)));
        }
        None => pairs.push(("witness", "none".into())),
    }
    if !s.cancellation_failures.is_empty() {
        let list = s.cancellation_failures.iter().map(|n| n.to_string()).collect::<Vec<_>>();
        pairs.push(("cancellation_failures", list.join(" ")));
    }
    let negative = s.found.is_some();
    Ok(Report::new(serde_json::to_value(&s)?).pairs(pairs).negative(negative))
}

fn bound_report(v: BoundVerdict) -> CmdResult {
    let verdict = match v.verdict {
        OneSidedVerdict::NotInR => "not_in_r",
        OneSidedVerdict::Inconclusive => "inconclusive",
    };
    Ok(Report::new(serde_json::to_value(v)?)
        .pairs(vec![
            ("verdict", verdict.into()),
            ("statistic", num(v.statistic)),
            ("threshold", num(v.threshold)),
        ])
        .negative(v.verdict == OneSidedVerdict::NotInR))
}

pub fn tree_verdict_cmd(d: usize, r: f64) -> CmdResult {
    bound_report(tree_mc_verdict(d, r)?)
}

pub fn ising_verdict_cmd(d: usize, j: f64) -> CmdResult {
    bound_report(ising_verdict(d, j)?)
}

fn read_exchangeable(path: &Path) -> Result<ExchangeableNu, Box<dyn StdError>> {
    Ok(ExchangeableNu::try_from(&read_json::<ExchangeableNuJson>(path)?)?)
}

fn flat_pairs(doc: &Value) -> Vec<Vec<String>> {
    doc.as_object()
        .map(|o| o.iter().map(|(k, v)| vec![k.clone(), v.to_string()]).collect())
        .unwrap_or_default()
}

pub fn exch_convert_cmd(measure: &Path, from_levy: bool) -> CmdResult {
    let doc = if from_levy {
        let lt = LevyTriple::try_from(&read_json::<LevyTripleJson>(measure)?)?;
        serde_json::to_value(ExchangeableNuJson::from(&exchangeable_from_levy(&lt)))?
    } else {
        let en = read_exchangeable(measure)?;
        serde_json::to_value(LevyTripleJson::from(&levy_from_exchangeable(&en)))?
    };
    let rows = flat_pairs(&doc);
    Ok(Report::new(doc).table(&["key", "value"], rows))
}

pub fn exch_sample_cmd(measure: &Path, draws: usize, trunc_eps: f64, cfg: &RunConfig) -> CmdResult {
    let en = read_exchangeable(measure)?;
    let sampler = QSampler::new(&en, trunc_eps)?;
    let q = sampler.sample_many(draws, cfg.seed);
    let rows = q.iter().map(|v| vec![num(*v)]).collect();
    Ok(Report::new(json!({
        "seed": cfg.seed,
        "draws": q,
        "truncation": sampler.truncation(),
    }))
    .table(&["q"], rows))
}

pub fn exch_laplace_cmd(measure: &Path, ts: &[f64]) -> CmdResult {
    let en = read_exchangeable(measure)?;
    let vals = ts.iter().map(|t| laplace_of_z(&en, *t)).collect::<Result<Vec<_>, _>>()?;
    let rows = ts.iter().zip(&vals).map(|(t, v)| vec![num(*t), num(*v)]).collect();
    let doc: Vec<Value> = ts.iter().zip(&vals).map(|(t, v)| json!({ "t": t, "laplace": v })).collect();
    Ok(Report::new(Value::Array(doc)).table(&["t", "laplace"], rows))
}

/// `{"w": [w_1, ..], "singleton": s}` for `--intervals`.
#[derive(Debug, Deserialize)]
struct IntervalFile {
    w: Vec<f64>,
    #[serde(default)]
    singleton: f64,
}

/// The interval measure to sample: a Markov chain `p,r` or an explicit file.
#[derive(Debug, Clone)]
pub struct Source {
    pub markov: Option<String>,
    pub intervals: Option<PathBuf>,
    pub singleton: f64,
    pub max_len: usize,
}

impl Source {
    fn resolve(&self) -> Result<(IntervalNu, f64), Box<dyn StdError>> {
        match (&self.markov, &self.intervals) {
            (Some(spec), None) => {
                let (p, r) = spec
                    .split_once(',')
                    .ok_or_else(|| format!("--markov {spec:?} must be p,r"))?;
                let mp = MarkovParams::new(p.trim().parse()?, r.trim().parse()?)?;
                Ok((mp.interval_nu(self.max_len)?, self.singleton))
            }
            (None, Some(path)) => {
                let f: IntervalFile = read_json(path)?;
                Ok((IntervalNu::new(f.w)?, f.singleton + self.singleton))
            }
            _ => Err("give exactly one of --markov p,r and --intervals file.json".into()),
        }
    }
}

pub fn sample_cmd(src: &Source, len: usize, cfg: &RunConfig) -> CmdResult {
    let (inu, s) = src.resolve()?;
    let w = sample_window(&inu, s, len, cfg.seed)?;
    let bits = w.bit_string();
    Ok(Report::new(json!({ "n": w.n, "seed": w.seed, "ones": w.ones(), "bits": bits }))
        .table(
            &["n", "seed", "ones", "bits"],
            vec![vec![w.n.to_string(), w.seed.to_string(), w.ones().to_string(), bits.clone()]],
        )
        .raw_text(bits))
}

pub fn correlate_cmd(src: &Source, k: usize, draws: usize, cfg: &RunConfig) -> CmdResult {
    let (inu, s) = src.resolve()?;
    let rep = pair_correlation_check(&inu, s, k, draws, cfg.seed)?;
    let doc = serde_json::to_value(rep)?;
    let rows = flat_pairs(&doc);
    Ok(Report::new(doc).table(&["key", "value"], rows))
}

pub fn dominate_cmd(src: &Source, p: f64, n_max: usize) -> CmdResult {
    let (inu, s) = src.resolve()?;
    let d = domination_check(&inu, s, p, n_max)?;
    let pairs = match d {
        Domination::Dominates => vec![("dominates", "yes".to_string())],
        Domination::Fails { n } => vec![("dominates", "no".to_string()), ("fails_at_n", n.to_string())],
    };
    Ok(Report::new(serde_json::to_value(d)?).pairs(pairs))
}
