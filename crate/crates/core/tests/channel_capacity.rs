mod common;

use common::mc::{cap_w_mc, h2_direct, q_simpson, unquantized_gap_mc, wiretap_llr_direct};
use wiretap_ldpc::capacity::{
    binary_entropy, cap_s, cap_w, j1, j2, relaxed_capacity_quantized, relaxed_capacity_unquantized,
};
use wiretap_ldpc::channel::{
    db_to_linear, quantize, source_crossover, transmit, wiretap_llr, BpskWord, ChannelParams,
    GaussianNoise,
};

#[test]
fn hard_decision_crossover_matches_q() {
    let mut r = common::rng(11);
    for (beta, seed) in [(0.5, 1u64), (1.0, 2), (1.5, 3)] {
        let params = ChannelParams::new(4.0, 1.0, beta).unwrap();
        let mut rs = common::rng(seed);
        let n = 1_000_000;
        let x = BpskWord::random(n, &mut r);
        let (y, _) = transmit(&x, &params, &mut GaussianNoise(&mut rs)).unwrap();
        let flips = quantize(&y).xor(&x).weight() as f64 / n as f64;
        let p = q_simpson(beta);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((flips - p).abs() < 4.0 * se, "beta={beta}: {flips} vs {p}");
        assert!((source_crossover(&params) - p).abs() < 1e-12);
    }
    assert!((q_simpson(1.0) - 0.15866).abs() < 1e-5);
}

#[test]
fn zero_gain_output_is_uncorrelated() {
    let params = ChannelParams::new(1.0, 2.0, 0.0).unwrap();
    let mut r = common::rng(5);
    let x = BpskWord::random(200_000, &mut r);
    let (y, z) = transmit(&x, &params, &mut GaussianNoise(&mut r)).unwrap();
    for w in [&y, &z] {
        let c: f64 = w
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v * x.symbol(i))
            .sum::<f64>()
            / x.len() as f64;
        assert!(c.abs() < 5.0 / (x.len() as f64).sqrt());
    }
}

#[test]
fn wiretap_llr_matches_mixture_densities() {
    let params = ChannelParams::new(4.0, 1.0, 1.0).unwrap();
    for z in [1.0, -0.4, 2.7, 0.05] {
        let d = wiretap_llr_direct(z, 1.0, 1.0);
        assert!((wiretap_llr(z, &params) - d).abs() < 1e-9, "z={z}");
    }
}

#[test]
fn entropy_and_source_capacity_values() {
    let h = binary_entropy(0.11).unwrap();
    assert!((h - h2_direct(0.11)).abs() < 1e-14);
    assert!((h - 0.49999).abs() < 1e-4);
    let cs = cap_s(1.0);
    assert!((cs - (1.0 - h2_direct(q_simpson(1.0)))).abs() < 1e-9);
    assert!((cs - 0.36935).abs() < 1e-3);
    assert!((cap_s(10.0) - 1.0).abs() < 1e-6);
}

#[test]
fn cap_w_matches_simulation() {
    let mut r = common::rng(21);
    let est = cap_w_mc(1.0, 1.0, 10_000_000, &mut r);
    let q = cap_w(1.0, 1.0).unwrap();
    assert!(q.abs_error <= 1e-6);
    assert!(
        est.within(q.value, 3.0, q.abs_error),
        "{est:?} vs {}",
        q.value
    );
}

#[test]
fn capacity_ordering_on_grid() {
    for alpha in [0.5, 1.0, 1.78] {
        for i in 0..100 {
            let b = 3.0 * i as f64 / 99.0;
            let cw = cap_w(b, alpha).unwrap().value;
            let cs = cap_s(b);
            assert!(
                cw >= -1e-9 && cw <= cs + 1e-9 && cs <= 1.0,
                "alpha={alpha} b={b}"
            );
        }
    }
}

#[test]
fn quantized_capacity_zero_leakage_is_max_difference() {
    let snr = db_to_linear(-0.15);
    let res = relaxed_capacity_quantized(0.0, snr, 1.0).unwrap();
    let hi = snr.sqrt();
    let dense = (0..=4000)
        .map(|i| {
            let b = hi * i as f64 / 4000.0;
            cap_s(b) - cap_w(b, 1.0).unwrap().value
        })
        .fold(f64::MIN, f64::max);
    assert!((res.value - dense).abs() < 1e-5, "{} vs {dense}", res.value);
    assert!(res.argmax_beta_tilde <= hi + 1e-12);

    let mut r = common::rng(31);
    let b = res.argmax_beta_tilde;
    let est = cap_w_mc(b, 1.0, 10_000_000, &mut r);
    let mc_value = cap_s(b) - est.mean;
    assert!((mc_value - res.value).abs() <= 3.0 * est.std_err + res.abs_error);
    for frac in [0.3, 0.6, 0.9] {
        let other = cap_s(frac * hi) - cap_w_mc(frac * hi, 1.0, 1_000_000, &mut r).mean;
        assert!(
            other <= res.value + 0.002,
            "beta={} gives {other}",
            frac * hi
        );
    }
}

#[test]
fn unquantized_gap_matches_simulation() {
    let snr = db_to_linear(0.0);
    let res = relaxed_capacity_unquantized(0.0, snr, 1.0).unwrap();
    let b = res.argmax_beta_tilde;
    let direct = j2(b, 1.0).unwrap().value - j1(b).unwrap().value;
    assert!((res.value - direct).abs() < 1e-12);
    let mut r = common::rng(41);
    let est = unquantized_gap_mc(b, 1.0, 10_000_000, &mut r);
    assert!(est.within(res.value, 3.0, 1e-4), "{est:?} vs {}", res.value);
}

#[test]
fn relaxed_capacities_monotone_and_saturating() {
    let snr = db_to_linear(1.0);
    let mut prev_q = f64::MIN;
    let mut prev_u = f64::MIN;
    for r_l in [0.0, 0.05, 0.1, 0.2, 0.4] {
        let q = relaxed_capacity_quantized(r_l, snr, 1.0).unwrap().value;
        let u = relaxed_capacity_unquantized(r_l, snr, 1.0).unwrap().value;
        assert!(q >= prev_q - 1e-9 && u >= prev_u - 1e-9);
        prev_q = q;
        prev_u = u;
    }
    let mut prev = f64::MIN;
    for db in [-5.0, -2.0, 0.0, 3.0, 5.0] {
        let v = relaxed_capacity_quantized(0.1, db_to_linear(db), 1.0)
            .unwrap()
            .value;
        assert!(v >= prev - 1e-9);
        prev = v;
    }
    let hi = snr.sqrt();
    let max_cw = (0..=400)
        .map(|i| cap_w(hi * i as f64 / 400.0, 1.0).unwrap().value)
        .fold(0.0, f64::max);
    let sat = relaxed_capacity_quantized(max_cw + 0.01, snr, 1.0)
        .unwrap()
        .value;
    assert!((sat - cap_s(hi)).abs() < 1e-9);
}
