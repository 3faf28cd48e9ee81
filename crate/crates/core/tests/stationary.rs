use prp_core::markov::{IntervalNu, MarkovParams};
use prp_core::pattern::forward_zero_pattern;
use prp_core::stationary::{
    block_variance_monitor, pair_correlation_check, sample_window, window_chi_square,
    window_intensity,
};
use prp_core::Subset;

fn half_half() -> IntervalNu {
    MarkovParams::new(0.5, 0.5).unwrap().interval_nu(60).unwrap()
}

#[test]
fn markov_pair_correlation_at_distance_five() {
    let rep = pair_correlation_check(&half_half(), 0.0, 5, 1_000_000, 42).unwrap();
    assert!((rep.analytic - 0.2578125).abs() < 1e-12);
    assert!(rep.z_score.abs() < 3.0, "{rep:?}");
}

#[test]
fn pair_beyond_max_length_is_independent() {
    let inu = IntervalNu::new(vec![0.1, 0.2, 0.05]).unwrap();
    let rep = pair_correlation_check(&inu, 0.0, 3, 10_000, 1).unwrap();
    let c0 = (-inu.singleton_union_mass()).exp();
    assert_eq!(rep.analytic, c0 * c0);
    let p = 0.2f64;
    let empty = IntervalNu::new(vec![]).unwrap();
    let rep = pair_correlation_check(&empty, -(-p).ln_1p(), 2, 10_000, 1).unwrap();
    assert!((rep.analytic - (1.0 - p).powi(2)).abs() < 1e-15);
}

#[test]
fn markov_marginal_is_one_half() {
    let w = sample_window(&half_half(), 0.0, 1_000_000, 7).unwrap();
    let zeros = (w.n - w.ones()) as f64 / w.n as f64;
    // zero indicators at distance k have correlation 2^{−k}, so the variance
    // of the mean is inflated by 1 + 2 Σ_k 2^{−k} = 3
    let se = (0.25 * 3.0 / w.n as f64).sqrt();
    assert!((zeros - 0.5).abs() < 3.0 * se, "{zeros}");
}

#[test]
fn iid_window_site_frequencies() {
    let p = 0.3f64;
    let empty = IntervalNu::new(vec![]).unwrap();
    let w = sample_window(&empty, -(-p).ln_1p(), 200_000, 3).unwrap();
    let ones = w.ones() as f64;
    let n = w.n as f64;
    let chi = (ones - n * p).powi(2) / (n * p) + (n - ones - n * (1.0 - p)).powi(2) / (n * (1.0 - p));
    assert!(chi < 6.635, "chi-square {chi} (99% critical value 6.635, 1 dof)");
}

#[test]
fn unit_pair_weight_union_mass() {
    let inu = IntervalNu::new(vec![0.0, 1.0]).unwrap();
    let z = forward_zero_pattern(&window_intensity(&inu, 0.0, 4).unwrap()).unwrap();
    assert!((z.z(Subset::interval(2, 3)) - (-3f64).exp()).abs() < 1e-15);
    let rep = pair_correlation_check(&inu, 0.0, 1, 200_000, 5).unwrap();
    assert!((rep.analytic - (-3f64).exp()).abs() < 1e-15);
    assert!(rep.z_score.abs() < 3.0, "{rep:?}");
}

#[test]
fn window_law_chi_square_markov() {
    for n in [3, 8, 12] {
        let rep = window_chi_square(&half_half(), 0.0, n, 1_000_000, 100 + n as u64).unwrap();
        assert!(rep.p_value > 0.001, "{rep:?}");
    }
}

#[test]
fn window_law_chi_square_short_intervals_with_singletons() {
    let inu = IntervalNu::new(vec![0.2, 0.1, 0.3]).unwrap();
    for n in [2, 5, 10] {
        let rep = window_chi_square(&inu, 0.15, n, 200_000, n as u64).unwrap();
        assert!(rep.p_value > 0.001, "{rep:?}");
    }
}

#[test]
fn block_variance_decays() {
    let v = block_variance_monitor(&half_half(), 0.0, 1 << 20, &[16, 256, 4096], 8).unwrap();
    assert!(v[0].variance > v[1].variance && v[1].variance > v[2].variance, "{v:?}");
}

#[test]
fn windows_are_seed_reproducible() {
    let a = sample_window(&half_half(), 0.0, 3000, 77).unwrap();
    assert_eq!(a, sample_window(&half_half(), 0.0, 3000, 77).unwrap());
    assert_ne!(a.bits, sample_window(&half_half(), 0.0, 3000, 78).unwrap().bits);
}
