use astro_float::{BigFloat, RoundingMode};
use proptest::prelude::*;

use prp_core::mixture::{
    alpha_grid, exchangeable_mixture_classify, mixture_levels, phase_scan, rational, sign_near_one,
    threshold_classify, threshold_classify_exact, x2_grid, CellSign, ExchangeableVerdict, MixtureSpec,
    NearOneSign, ScanOptions, ThresholdClass,
};
use prp_core::polylog::{polylog_neg_order, polylog_series, root_r2, root_table};
use prp_core::precision::to_f64;
use prp_core::{invert, symmetric_invert, Subset, SymmetricZeroPattern, Tolerances};

const RM: RoundingMode = RoundingMode::ToEven;

/// `Σ_{j=1}^{terms} z^j j^{k−1}` in 512-bit arithmetic. At `z = −0.9` the
/// partial sums pass through magnitudes far above the final value, so the
/// plain-float series is not a usable oracle there.
fn series_oracle(k: usize, z: f64, terms: usize) -> f64 {
    let p = 512;
    let zb = BigFloat::from_f64(z, p);
    let mut pow = BigFloat::from_f64(1.0, p);
    let mut sum = BigFloat::from_f64(0.0, p);
    for j in 1..=terms {
        pow = pow.mul(&zb, p, RM);
        let jb = BigFloat::from_u64(j as u64, p);
        let mut term = pow.clone();
        for _ in 1..k {
            term = term.mul(&jb, p, RM);
        }
        sum = sum.add(&term, p, RM);
    }
    to_f64(&sum)
}

#[test]
fn rational_forms_match_series_on_the_disc() {
    for k in 1..=12 {
        let li = polylog_neg_order(k).unwrap();
        for i in -18..=18 {
            let z = i as f64 * 0.05;
            let exact = series_oracle(k, z, 1000);
            let got = li.eval(z);
            assert!(
                (got - exact).abs() <= 1e-10 * exact.abs().max(1.0),
                "k = {k}, z = {z}: {got} vs {exact}"
            );
        }
    }
    // the plain series agrees where it does not cancel
    for k in 1..=6 {
        let li = polylog_neg_order(k).unwrap();
        assert!((li.eval(0.3) - polylog_series(k, 0.3, 1000)).abs() < 1e-12 * li.eval(0.3).max(1.0));
    }
}

#[test]
fn low_order_values() {
    assert!((polylog_neg_order(1).unwrap().eval(0.5) - 1.0).abs() < 1e-15);
    assert!((polylog_neg_order(2).unwrap().eval(0.5) - 2.0).abs() < 1e-15);
    assert_eq!(polylog_neg_order(3).unwrap().eval(-1.0), 0.0);
}

#[test]
fn known_roots_and_thresholds() {
    let t = root_table(12, 1e-15).unwrap();
    assert!((t[0].r2 + 1.0).abs() < 1e-12);
    assert!((t[1].r2 - (3f64.sqrt() - 2.0)).abs() < 1e-10);
    assert!((t[2].r2 - (2.0 * 6f64.sqrt() - 5.0)).abs() < 1e-10);
    for (row, want) in t.iter().zip([0.5, 0.788675, 0.908248, 0.958684, 0.98085]) {
        assert!((row.threshold - want).abs() < 1e-5, "n = {}: {}", row.n, row.threshold);
    }
    for w in t.windows(2) {
        assert!(w[1].r2 > w[0].r2 && w[1].r2 < 0.0);
        assert!(w[1].threshold > w[0].threshold && w[1].threshold < 1.0);
    }
    assert_eq!(root_r2(7, 1e-15).unwrap(), t[4]);
    assert!(root_r2(2, 1e-12).is_err());
}

#[test]
fn near_one_signs_and_thresholds() {
    assert_eq!(sign_near_one(3, 0.6, 1e-12).unwrap(), NearOneSign::Positive);
    assert_eq!(sign_near_one(3, 0.4, 1e-12).unwrap(), NearOneSign::Negative);
    assert_eq!(sign_near_one(3, 0.5, 1e-12).unwrap(), NearOneSign::Boundary);
    assert_eq!(threshold_classify(3, 0.6).unwrap(), ThresholdClass::RepresentableNearOne);
    assert_eq!(threshold_classify(5, 0.85).unwrap(), ThresholdClass::NotRepresentableNearOne);
    assert!(threshold_classify(4, (3.0 + 3f64.sqrt()) / 6.0).unwrap().is_representable_near_one());
    assert_eq!(threshold_classify_exact(3, &rational(1, 2)).unwrap(), ThresholdClass::Boundary);
    assert_eq!(
        threshold_classify_exact(6, &rational(96, 100)).unwrap(),
        ThresholdClass::RepresentableNearOne
    );
    assert_eq!(
        threshold_classify_exact(6, &rational(95, 100)).unwrap(),
        ThresholdClass::NotRepresentableNearOne
    );
}

#[test]
fn small_mixture_closed_forms() {
    let spec = MixtureSpec::new(1.0, vec![1.0, 0.5], vec![0.5, 0.5]).unwrap();
    assert!((mixture_levels(&spec, 3, 256).unwrap().level(1) - (10.0f64 / 9.0).ln()).abs() < 1e-15);
    let (q, a1, n) = (0.45f64, 0.7f64, 8);
    let l = mixture_levels(&MixtureSpec::two_point(q, 0.0, a1).unwrap(), n, 256).unwrap();
    assert!((l.level(1) + q.ln()).abs() < 1e-14);
    assert!((l.level(n) + a1.ln()).abs() < 1e-14);
    assert!((2..n).all(|k| l.level(k).abs() < 1e-14));
}

fn spec() -> impl Strategy<Value = MixtureSpec> {
    (
        0.05f64..=1.0,
        prop::collection::vec(0.0f64..1.0, 0..=2),
        prop::collection::vec(0.05f64..1.0, 3),
    )
        .prop_filter_map("distinct points", |(q, rest, w)| {
            let mut x = vec![1.0];
            let mut rest = rest;
            rest.sort_by(|a, b| b.total_cmp(a));
            for v in rest {
                if *x.last().unwrap() - v < 1e-3 {
                    return None;
                }
                x.push(v);
            }
            let w = &w[..x.len()];
            let total: f64 = w.iter().sum();
            let mut alpha: Vec<f64> = w.iter().map(|v| v / total).collect();
            let drift: f64 = alpha.iter().sum::<f64>() - 1.0;
            alpha[0] -= drift;
            MixtureSpec::new(q, x, alpha).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn three_inversions_agree(spec in spec(), n in 2usize..=8) {
        let tol = Tolerances::default();
        let direct = mixture_levels(&spec, n, 256).unwrap();
        let z = SymmetricZeroPattern::from_values(spec.zero_probabilities(n), &tol).unwrap();
        let sym = symmetric_invert(&z, 256).unwrap();
        let full = invert(&z.expand(&tol).unwrap());
        for l in 1..=n {
            let want = direct.level(l);
            prop_assert!((sym.level(l) - want).abs() < 1e-9, "level {}: {} vs {}", l, sym.level(l), want);
            prop_assert!((full.mass(Subset::full(l)) - want).abs() < 1e-9);
        }
        prop_assert!(direct.level(1) >= -spec.q().ln() - 1e-12);
        prop_assert!(direct.level(2) >= -1e-12);
    }

    #[test]
    fn levels_beyond_one_ignore_q(spec in spec(), n in 2usize..=10) {
        let base = mixture_levels(&spec, n, 256).unwrap();
        for q in [0.2, 0.5, 1.0] {
            let other = MixtureSpec::new(q, spec.x().to_vec(), spec.alpha().to_vec()).unwrap();
            let l = mixture_levels(&other, n, 256).unwrap();
            for k in 2..=n {
                prop_assert!((l.level(k) - base.level(k)).abs() < 1e-12);
            }
            prop_assert!((l.level(1) - base.level(1) + q.ln() - spec.q().ln()).abs() < 1e-12);
        }
    }
}

#[test]
fn n3_scan_near_one_edge() {
    let alphas = alpha_grid(19);
    let rows = phase_scan(3, &alphas, &[0.999], &ScanOptions::default()).unwrap();
    for r in rows {
        match r.alpha1 {
            a if a < 0.49 => assert_eq!(r.sign, CellSign::Negative, "{r:?}"),
            a if a > 0.51 => assert_eq!(r.sign, CellSign::Positive, "{r:?}"),
            _ => {}
        }
    }
}

#[test]
fn scan_is_q_invariant_and_zero_column_nonnegative() {
    let (alphas, x2s) = (alpha_grid(9), x2_grid(10));
    let a = phase_scan(6, &alphas, &x2s, &ScanOptions::default()).unwrap();
    let opts = ScanOptions {
        q: 0.3,
        ..ScanOptions::default()
    };
    let b = phase_scan(6, &alphas, &x2s, &opts).unwrap();
    assert_eq!(a.len(), 9 * 10 * 4);
    for (r, s) in a.iter().zip(&b) {
        assert_eq!((r.alpha1, r.x2, r.k, r.sign), (s.alpha1, s.x2, s.k, s.sign));
        assert!((r.level - s.level).abs() < 1e-12);
        if r.x2 == 0.0 {
            assert!(matches!(r.sign, CellSign::Positive | CellSign::Zero));
        }
    }
}

#[test]
fn scan_agrees_with_near_one_prediction() {
    let alphas = alpha_grid(49);
    for n in 3..=6 {
        for r in phase_scan(n, &alphas, &[0.999], &ScanOptions::default()).unwrap() {
            let predicted = sign_near_one(r.k, r.alpha1, 1e-9).unwrap();
            let expected = match predicted {
                NearOneSign::Positive => CellSign::Positive,
                NearOneSign::Negative => CellSign::Negative,
                NearOneSign::Boundary => continue,
            };
            if r.sign != CellSign::Unresolved {
                assert_eq!(r.sign, expected, "n = {n}: {r:?}");
            }
        }
    }
}

#[test]
fn exchangeable_mixtures() {
    use ExchangeableVerdict::*;
    assert_eq!(exchangeable_mixture_classify(&[0.3, 1.0], &[0.4, 0.6]).unwrap(), InR);
    assert_eq!(exchangeable_mixture_classify(&[0.3, 0.9], &[0.4, 0.6]).unwrap(), NotInR);
    assert_eq!(exchangeable_mixture_classify(&[0.1, 0.5, 1.0], &[0.2, 0.3, 0.5]).unwrap(), NotInR);
}
