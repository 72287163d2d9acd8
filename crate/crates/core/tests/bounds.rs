mod common;

use common::mc::bhattacharyya_wiretap_mc;
use wiretap_ldpc::bounds::{
    bhattacharyya_bsc, bhattacharyya_source, bhattacharyya_wiretap, gallager_e0, log2_spectra,
    ml_bound, random_coding_exponent, select_asymptotic_params, spectrum_exponent,
    spectrum_exponent_max, weight_prob_bound, ChannelSpec, EnsembleParams, Side, NEGATIVITY_GRID,
};
use wiretap_ldpc::capacity::{cap_s, cap_w};
use wiretap_ldpc::channel::q_function;

/// Exact `Pr(x in C | w(x) = m)` for the socket-matching ensemble. A uniform
/// matching sends the `m d_v` sockets of `x` to a uniform subset of check
/// sockets, so it is enough to count subsets that hit every check evenly.
fn exact_codeword_prob(checks: usize, d_c: usize, marked: usize) -> f64 {
    let sockets = checks * d_c;
    let (mut good, mut total) = (0u64, 0u64);
    for s in 0u32..(1 << sockets) {
        if s.count_ones() as usize != marked {
            continue;
        }
        total += 1;
        let even = (0..checks).all(|c| ((s >> (c * d_c)) & ((1 << d_c) - 1)).count_ones() % 2 == 0);
        good += even as u64;
    }
    good as f64 / total as f64
}

#[test]
fn weight_bound_dominates_exact_enumeration() {
    let (n, d_v, d_c) = (8u64, 2u32, 4u32);
    let checks = (n * d_v as u64 / d_c as u64) as usize;
    let l = n - checks as u64;
    for m in 1..=n {
        let exact = exact_codeword_prob(checks, d_c as usize, (m * d_v as u64) as usize);
        let bound = weight_prob_bound(n, l, d_v, d_c, m).unwrap();
        assert!(
            bound >= exact - 1e-15,
            "m={m}: bound {bound} < exact {exact}"
        );
    }
    assert_eq!(weight_prob_bound(12, 3, 3, 4, 1).unwrap(), 0.0);
}

#[test]
fn subspace_average_below_scaled_spectrum() {
    for m in (2..=600u64).step_by(7) {
        let (s, t) = log2_spectra(600, 150, 40, 3, 4, m).unwrap();
        assert!(t == f64::NEG_INFINITY || t <= s - 40.0 + 1e-9);
    }
    assert!(common::subspace_ratio_max_error() < 1e-12);
}

#[test]
fn bhattacharyya_values() {
    assert_eq!(bhattacharyya_bsc(0.0), 0.0);
    assert_eq!(bhattacharyya_bsc(0.5), 1.0);
    assert!((bhattacharyya_wiretap(0.0, 1.0).unwrap() - 1.0).abs() < 1e-9);
    let p = q_function(1.0);
    assert!((bhattacharyya_source(1.0) - 2.0 * (p * (1.0 - p)).sqrt()).abs() < 1e-15);
    let mut r = common::rng(51);
    let est = bhattacharyya_wiretap_mc(1.0, 1.0, 4_000_000, &mut r);
    let d = bhattacharyya_wiretap(1.0, 1.0).unwrap();
    assert!(est.within(d, 3.0, 1e-9), "{est:?} vs {d}");
}

#[test]
fn exponent_endpoints() {
    for ch in [
        ChannelSpec::Bsc { p: 0.1 },
        ChannelSpec::Bsc { p: 0.3 },
        ChannelSpec::Wiretap {
            beta_tilde: 1.0,
            alpha: 1.0,
        },
    ] {
        assert!(gallager_e0(&ch, 0.0).unwrap().abs() < 1e-12);
        let e0 = gallager_e0(&ch, 1.0).unwrap();
        // cutoff rate from the Bhattacharyya parameter
        let direct = 1.0 - (1.0 + ch.bhattacharyya().unwrap()).log2();
        assert!((e0 - direct).abs() < 1e-9, "{ch:?}: {e0} vs {direct}");
        assert!((random_coding_exponent(&ch, 0.0).unwrap() - e0).abs() < 1e-9);
        for rate in [0.0, 0.05, 0.2, 0.5, 0.9] {
            assert!(random_coding_exponent(&ch, rate).unwrap() >= 0.0);
        }
    }
    let p: f64 = 0.1;
    let cap = 1.0 + p * p.log2() + (1.0 - p) * (1.0 - p).log2();
    assert_eq!(
        random_coding_exponent(&ChannelSpec::Bsc { p }, cap).unwrap(),
        0.0
    );
    assert_eq!(
        random_coding_exponent(&ChannelSpec::Bsc { p }, cap + 0.1).unwrap(),
        0.0
    );
    let cw = cap_w(1.0, 1.0).unwrap().value;
    let ch = ChannelSpec::Wiretap {
        beta_tilde: 1.0,
        alpha: 1.0,
    };
    assert!(random_coding_exponent(&ch, cw).unwrap() < 1e-7);
    assert_eq!(random_coding_exponent(&ch, cw + 0.05).unwrap(), 0.0);
}

/// The key prefactor is the only place `R_k` enters the small-weight term.
#[test]
fn zero_key_rate_removes_key_prefactor() {
    let beta = 10f64.powf(0.15);
    let with_key = EnsembleParams::new(10_000, 6, 8, 0.25, 0.1, 0.2).unwrap();
    let no_key = EnsembleParams::new(10_000, 6, 8, 0.25, 0.0, 0.2).unwrap();
    let a = wiretap_ldpc::bounds::ml_bound_at_gamma(&with_key, Side::Wiretap, beta, 1.0).unwrap();
    let b = wiretap_ldpc::bounds::ml_bound_at_gamma(&no_key, Side::Wiretap, beta, 1.0).unwrap();
    assert!((b.terms[0].log2_value - a.terms[0].log2_value - 1000.0).abs() < 1e-6);
}

#[test]
fn wiretap_bound_decreases_for_six_eight_ensemble() {
    let beta = 10f64.powf(0.15);
    assert!(0.25 < cap_s(beta));
    assert!(0.25 - 0.1 < cap_w(beta, 1.0).unwrap().value);
    let values: Vec<f64> = [10_000u64, 100_000, 1_000_000]
        .iter()
        .map(|&n| {
            let p = EnsembleParams::new(n, 6, 8, 0.25, 0.1, 0.2).unwrap();
            ml_bound(&p, Side::Wiretap, beta, 1.0).unwrap().log2_value
        })
        .collect();
    assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
}

#[test]
fn asymptotic_selection_meets_its_conditions() {
    let choice = common::props::decay_choice().unwrap();
    let beta = 10f64.powf(0.15);
    assert!(choice.beta_bar < choice.gamma);
    assert_eq!(choice.d_v as f64 / choice.d_c as f64, 1.0 - choice.r_c);
    let c_w = cap_w(beta, 1.0).unwrap().value;
    let eps = choice.epsilon;
    let limit = choice.r_c - choice.r_k + (1.0 - choice.r_c) * eps + eps;
    assert!(limit < c_w);
    let p = choice
        .params(1_000_000)
        .unwrap()
        .with_gamma(choice.gamma)
        .unwrap();
    let rep = wiretap_ldpc::bounds::ml_bound_at_gamma(&p, Side::Wiretap, beta, 1.0).unwrap();
    assert!(
        rep.exponent_rate <= limit,
        "{} > {limit}",
        rep.exponent_rate
    );

    let quarter = select_asymptotic_params(0.25, 0.05, 10f64.powf(0.25), 1.0, 0.1, 20_000).unwrap();
    assert_eq!(quarter.d_v % 3, 0);
    assert_eq!(quarter.d_v * 4, quarter.d_c * 3);
    assert!(quarter.beta_bar < quarter.gamma);
}

#[test]
fn negativity_grid_matches_refined_scan() {
    let choice = common::props::decay_choice().unwrap();
    let (lo, hi) = (choice.beta_bar, choice.gamma);
    let coarse = spectrum_exponent_max(lo, hi, choice.r_c, choice.d_c, NEGATIVITY_GRID);
    // 10^6 points, half log-spaced to resolve the region near beta_bar
    let half = 500_000;
    let mut fine = f64::MIN;
    for i in 0..half {
        let t = i as f64 / (half - 1) as f64;
        let xl = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
        let xu = lo + t * (hi - lo);
        fine = fine.max(spectrum_exponent(xl, choice.r_c, choice.d_c));
        fine = fine.max(spectrum_exponent(xu, choice.r_c, choice.d_c));
    }
    assert_eq!(coarse < 0.0, fine < 0.0);
    assert!(coarse >= fine - 1e-12);
    assert!((coarse - fine).abs() < 1e-6 * fine.abs().max(1e-3));
}
