use prp_core::lattice::{
    curie_weiss_levels, curie_weiss_negativity_search, curie_weiss_zero_pattern, ising_verdict,
    tree_mc_verdict, CurieWeissSpec, OneSidedVerdict,
};
use prp_core::moebius::symmetric_invert;

/// Regression constants from an independent 2000-bit mpmath evaluation.
const BETA2_WITNESS_N: usize = 57;
const BETA2_WITNESS_VALUE: f64 = -0.0029696351148642305;

#[test]
fn beta_two_witness_is_pinned() {
    let s = curie_weiss_negativity_search(2.0, 200).unwrap();
    let w = s.found.expect("a witness below n = 200");
    assert_eq!((w.n, w.k), (BETA2_WITNESS_N, BETA2_WITNESS_N));
    assert!((w.value - BETA2_WITNESS_VALUE).abs() < 1e-12);
    assert!(s.cancellation_failures.is_empty());
}

#[test]
fn zero_beta_has_no_witness() {
    let s = curie_weiss_negativity_search(0.0, 64).unwrap();
    assert!(s.found.is_none());
}

#[test]
fn moderate_coupling_witnesses_match_oracle() {
    // β ≤ 1 is not free of negative levels at small n
    let s = curie_weiss_negativity_search(0.5, 64).unwrap();
    let w = s.found.unwrap();
    assert_eq!((w.n, w.k), (8, 8));
    assert!((w.value + 5.056968791534126e-05).abs() < 1e-12);
    let s = curie_weiss_negativity_search(1.0, 64).unwrap();
    let w = s.found.unwrap();
    assert_eq!((w.n, w.k), (11, 11));
    assert!((w.value + 0.0026712503661813643).abs() < 1e-12);
}

#[test]
fn three_sites_are_representable() {
    for beta in [0.0, 0.3, 1.0, 2.0, 5.0, 20.0] {
        let spec = CurieWeissSpec::new(3, beta).unwrap();
        let levels = curie_weiss_levels(&spec, 256).unwrap();
        assert!(levels.is_representable(1e-12), "beta = {beta}: {:?}", levels.levels());
        // a ferromagnet puts at least the product-law mass on all-zero
        let z = curie_weiss_zero_pattern(&spec, 256).unwrap();
        assert!(z.z(3) >= 0.125 - 1e-15);
    }
}

#[test]
fn beta_two_at_fifty_seven_matches_oracle_levels() {
    let spec = CurieWeissSpec::new(57, 2.0).unwrap();
    let l = curie_weiss_levels(&spec, 256).unwrap();
    for (k, v) in [(1, 0.01945660578443385), (2, 5.594150525645603e-05), (3, 5.022643888415506e-07)] {
        assert!((l.level(k) - v).abs() < 1e-12 * v.abs().max(1e-3), "k = {k}");
    }
}

#[test]
fn plain_pattern_agrees_at_small_n() {
    let spec = CurieWeissSpec::new(6, 1.5).unwrap();
    let via_pattern = symmetric_invert(&curie_weiss_zero_pattern(&spec, 256).unwrap(), 256).unwrap();
    let direct = curie_weiss_levels(&spec, 256).unwrap();
    for k in 1..=6 {
        assert!((via_pattern.level(k) - direct.level(k)).abs() < 1e-11);
    }
}

#[test]
fn verdict_thresholds_increase_with_dimension() {
    let mut last = 0.0;
    for d in 3..=8 {
        let t = tree_mc_verdict(d, 0.5).unwrap().threshold;
        assert!(t > last);
        last = t;
    }
    let mut last = 0.0;
    for d in 2..=5 {
        let t = ising_verdict(d, 0.01).unwrap().threshold;
        assert!(t > last);
        last = t;
        assert_eq!(ising_verdict(d, 0.01).unwrap().verdict, OneSidedVerdict::NotInR);
    }
}
