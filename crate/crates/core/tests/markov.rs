use proptest::prelude::*;

use prp_core::markov::{
    c_from_gaps, c_from_markov, convexity_check, interval_nu, markov_window_law, markov_window_nu,
    telescoping_check, CSequence, Convexity, GapDistribution, MarkovParams,
};
use prp_core::{invert, is_representable, Error, Subset, Tolerances};

fn grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

#[test]
fn window_inversion_matches_closed_form_on_grid() {
    let tol = Tolerances::default();
    for p in grid() {
        for r in grid() {
            let mp = MarkovParams::new(p, r).unwrap();
            for n in 2..=10 {
                let nu = invert(&markov_window_law(&mp, n, &tol).unwrap());
                let closed = markov_window_nu(&mp, n).unwrap();
                assert!(is_representable(&markov_window_law(&mp, n, &tol).unwrap(), 1e-9).is_representable());
                for b in 1..1u32 << n {
                    let set = Subset::from_bits(b);
                    let want = closed.mass(set).finite().unwrap();
                    assert!(
                        (nu.mass(set) - want).abs() < 1e-8,
                        "p={p} r={r} n={n} {set}: {} vs {want}",
                        nu.mass(set)
                    );
                    if !set.is_interval() {
                        assert_eq!(want, 0.0);
                    }
                }
            }
        }
    }
}

#[test]
fn window_law_small_cases() {
    let tol = Tolerances::default();
    let mp = MarkovParams::new(0.3, 0.6).unwrap();
    let z = markov_window_law(&mp, 2, &tol).unwrap();
    assert!((z.z(Subset::singleton(1)) - 0.6).abs() < 1e-15);
    assert!((z.z(Subset::full(2)) - mp.c(1)).abs() < 1e-15);
    // p = 1 is the product law
    let iid = MarkovParams::iid(0.35).unwrap();
    let z = markov_window_law(&iid, 5, &tol).unwrap();
    for b in 0..32u32 {
        let set = Subset::from_bits(b);
        assert!((z.z(set) - 0.35f64.powi(set.len() as i32)).abs() < 1e-15);
    }
}

#[test]
fn half_half_values() {
    let mp = MarkovParams::new(0.5, 0.5).unwrap();
    let c = c_from_markov(&mp, 40).unwrap();
    assert_eq!(&c.values()[..3], &[0.5, 0.375, 0.3125]);
    let inu = interval_nu(&c, 10).unwrap();
    assert!((inu.w(1) - (10.0f64 / 9.0).ln()).abs() < 1e-15);
    assert!((inu.w(2) - (27.0f64 / 25.0).ln()).abs() < 1e-15);
    assert!((mp.w(1) - (10.0f64 / 9.0).ln()).abs() < 1e-15);
    assert!((mp.w(2) - (27.0f64 / 25.0).ln()).abs() < 1e-15);
    let (lhs, _, diff) = telescoping_check(&c, 0, 30).unwrap();
    assert!((lhs - 2f64.ln()).abs() < 1e-6 && diff.abs() < 1e-10);
}

#[test]
fn telescoping_limit_at_m_200() {
    for p in grid() {
        for r in grid() {
            let mp = MarkovParams::new(p, r).unwrap();
            let c = c_from_markov(&mp, 202).unwrap();
            let (lhs, _, diff) = telescoping_check(&c, 0, 200).unwrap();
            assert!(diff.abs() < 1e-10, "p={p} r={r}: {diff}");
            assert!((lhs + c.get(0).ln()).abs() < 1e-6, "p={p} r={r}: {lhs}");
            let (lhs, rhs, diff) = telescoping_check(&c, 7, 8).unwrap();
            assert!(diff.abs() < 1e-15 && (lhs - rhs).abs() < 1e-15);
        }
    }
}

#[test]
fn iid_and_constant_sequences() {
    let theta = 0.3f64;
    let mut v = vec![theta];
    v.extend(std::iter::repeat(theta * theta).take(12));
    let c = CSequence::new(v).unwrap();
    let inu = interval_nu(&c, 10).unwrap();
    assert!((inu.w(1) + theta.ln()).abs() < 1e-15);
    assert!(inu.weights()[1..].iter().all(|w| *w == 0.0));
    let (lhs, rhs, _) = telescoping_check(&c, 0, 5).unwrap();
    assert!((lhs + theta.ln()).abs() < 1e-15 && (rhs + theta.ln()).abs() < 1e-15);

    let iid = MarkovParams::iid(0.4).unwrap();
    assert!(c_from_markov(&iid, 5).unwrap().values()[1..].iter().all(|v| (v - 0.16).abs() < 1e-15));

    let flat = CSequence::new(vec![0.7; 8]).unwrap();
    assert_eq!(convexity_check(&flat).unwrap(), Convexity::Pass);
    assert!(interval_nu(&flat, 5).unwrap().weights().iter().all(|w| *w == 0.0));
}

#[test]
fn renewal_examples() {
    let ones = GapDistribution::new(vec![1.0]).unwrap();
    assert!(c_from_gaps(&ones, 10).unwrap().values().iter().all(|v| *v == 1.0));

    let two = GapDistribution::new(vec![0.5, 0.5]).unwrap();
    let c = c_from_gaps(&two, 6).unwrap();
    let c0 = 2.0 / 3.0;
    for (k, u) in [(0, 1.0), (1, 0.5), (2, 0.75), (3, 0.625)] {
        assert!((c.get(k) - c0 * u).abs() < 1e-15);
    }
    assert_eq!(convexity_check(&c).unwrap(), Convexity::Fail { k: 2 });
    assert!(matches!(interval_nu(&c, 3), Err(Error::NotRepresentable(_))));

    let theta = 0.35f64;
    let (g, tail) = GapDistribution::truncated_geometric(theta, 1e-15).unwrap();
    assert!(tail < 1e-15);
    let c = c_from_gaps(&g, 40).unwrap();
    assert!((c.get(0) - theta).abs() < 1e-12);
    assert!(c.values()[1..].iter().all(|v| (v - theta * theta).abs() < 1e-12));
    let inu = interval_nu(&c, 30).unwrap();
    assert!((inu.w(1) + theta.ln()).abs() < 1e-10);
    assert!(inu.weights()[1..].iter().all(|w| w.abs() < 1e-10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn markov_c_is_log_convex_and_decreasing(p in 0.01f64..0.99, r in 0.01f64..0.99) {
        let mp = MarkovParams::new(p, r).unwrap();
        let c = c_from_markov(&mp, 60).unwrap();
        prop_assert_eq!(convexity_check(&c).unwrap(), Convexity::Pass);
        prop_assert!(c.values().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn c_tail_bound(p in 0.01f64..0.99, r in 0.01f64..0.99, k in 2usize..200) {
        let mp = MarkovParams::new(p, r).unwrap();
        let c = c_from_markov(&mp, k).unwrap();
        let excess = c.get(k) - c.get(0) * c.get(0);
        prop_assert!(excess >= -1e-15 && excess <= (1.0 - p).powi(k as i32) + 1e-15);
    }

    #[test]
    fn ratio_diagnostic_decays(p in 0.05f64..0.95, r in 0.05f64..0.95) {
        let mp = MarkovParams::new(p, r).unwrap();
        let d = c_from_markov(&mp, 1000).unwrap().ratio_diagnostic();
        // |d_k| rises while (1−p)^k dominates r and then decays for good; past
        // a relative step of 1e−9 the ratio is rounding noise
        let resolved = (0..d.len()).take_while(|k| (mp.c(*k) - mp.c(k + 1)) / mp.c(*k) > 1e-9).count();
        let d = &d[..resolved];
        let peak = (0..d.len()).max_by(|a, b| d[*a].abs().total_cmp(&d[*b].abs())).unwrap();
        for k in peak..d.len() - 1 {
            prop_assert!(d[k + 1].abs() <= d[k].abs(), "k = {}", k);
        }
        prop_assert!(d[d.len() - 1].abs() < 1e-5);
    }

    #[test]
    fn renewal_convexity_implies_decreasing_c(b in prop::collection::vec(0.01f64..1.0, 1..6)) {
        let total: f64 = b.iter().sum();
        let mut b: Vec<f64> = b.iter().map(|v| v / total).collect();
        let drift: f64 = b.iter().sum::<f64>() - 1.0;
        b[0] -= drift;
        let c = c_from_gaps(&GapDistribution::new(b).unwrap(), 40).unwrap();
        if convexity_check(&c).unwrap() == Convexity::Pass {
            prop_assert!(c.values().windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }
}
