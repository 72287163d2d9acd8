mod common;

use rand::RngExt;
use wiretap_ldpc::bp::BpWorkspace;
use wiretap_ldpc::capacity::cap_w;
use wiretap_ldpc::channel::{db_to_linear, BpskWord, ChannelParams, GaussianNoise, ZeroNoise};
use wiretap_ldpc::exec::Execution;
use wiretap_ldpc::ldpc::{
    coset_leader, extract_key, remove_4cycles, sample_regular, triangularize, SecretSharingCode,
};
use wiretap_ldpc::protocol::{
    estimate_error_rates_with, leakage_bound, sweep_trajectory, NoiseMode, Reconciler, SimOptions,
    SweepConfig,
};

fn small_code(n: usize, seed: u64) -> SecretSharingCode {
    let g = remove_4cycles(&sample_regular(n, 3, 4, seed).unwrap(), seed + 1).unwrap();
    triangularize(&g).unwrap()
}

#[test]
fn noiseless_session_agrees_and_publishes_only_the_syndrome() {
    let code = small_code(400, 1);
    let code = code.clone().with_key_len(code.l() / 2).unwrap();
    let rec = Reconciler::new(&code);
    let params = ChannelParams::new(1.0, 1.0, 1.0).unwrap();
    let mut r = common::rng(2);
    let mut ws = BpWorkspace::new();
    for _ in 0..20 {
        let x = BpskWord::random(code.n(), &mut r);
        let t = rec
            .session(x.clone(), &params, &mut ZeroNoise, 200, &mut ws)
            .unwrap();
        assert_eq!(t.y_quantized, x);
        assert!(t.keys_match());
        assert!(!t.source_frame_error());
        // E_S is a function of the published syndrome alone
        assert_eq!(coset_leader(&code, &t.syndrome).unwrap(), t.e_s);
        assert_eq!(extract_key(&code, &t.x0_source).unwrap(), t.key_dest);
    }
}

#[test]
fn agreed_keys_are_consistent_under_noise() {
    let code = small_code(2000, 3);
    let code = code.clone().with_key_len(100).unwrap();
    let rec = Reconciler::new(&code);
    let params = ChannelParams::new(db_to_linear(3.0), 1.0, db_to_linear(3.0).sqrt()).unwrap();
    let mut r = common::rng(4);
    let mut ws = BpWorkspace::new();
    let mut matched = 0;
    for _ in 0..20 {
        let x = BpskWord::random(code.n(), &mut r);
        let mut noise_rng = common::rng(r.random::<u64>());
        let t = rec
            .session(x, &params, &mut GaussianNoise(&mut noise_rng), 200, &mut ws)
            .unwrap();
        if t.keys_match() && t.source_converged {
            matched += 1;
            assert_eq!(extract_key(&code, &t.x0_source).unwrap(), t.key_dest);
        }
    }
    assert!(matched > 0);
}

#[test]
fn zero_power_keys_agree_by_chance() {
    let code = small_code(40, 5).with_key_len(2).unwrap();
    let rec = Reconciler::new(&code);
    let params = ChannelParams::new(1.0, 1.0, 0.0).unwrap();
    let mut r = common::rng(6);
    let mut ws = BpWorkspace::new();
    let trials = 2000;
    let mut hits = 0;
    for _ in 0..trials {
        let x = BpskWord::random(code.n(), &mut r);
        let mut nr = common::rng(r.random::<u64>());
        let t = rec
            .session(x, &params, &mut GaussianNoise(&mut nr), 20, &mut ws)
            .unwrap();
        hits += t.keys_match() as u32;
    }
    let rate = hits as f64 / trials as f64;
    let se = (0.25f64 * 0.75 / trials as f64).sqrt();
    assert!((rate - 0.25).abs() < 4.0 * se, "{rate}");
}

#[test]
fn noiseless_error_rates_are_zero() {
    let code = small_code(400, 7);
    let code = code.clone().with_key_len(40).unwrap();
    let params = ChannelParams::new(1.0, 1.0, 0.8).unwrap();
    let opts = SimOptions {
        noise: NoiseMode::Zero,
        ..SimOptions::new(16, 8)
    };
    let rates = estimate_error_rates_with(&code, &params, &opts).unwrap();
    assert_eq!((rates.eps_s.errors, rates.eps_w.errors), (0, 0));
}

#[test]
fn estimates_do_not_depend_on_scheduling() {
    let code = small_code(1000, 9).with_key_len(60).unwrap();
    let params = ChannelParams::new(db_to_linear(1.0), 1.0, db_to_linear(1.0).sqrt()).unwrap();
    let run = |exec| {
        estimate_error_rates_with(
            &code,
            &params,
            &SimOptions {
                exec,
                ..SimOptions::new(24, 10)
            },
        )
        .unwrap()
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    assert_eq!(run(Execution::Auto), run(Execution::Sequential));
}

#[test]
fn leakage_bound_examples() {
    // ideal decoders, long code
    let v = leakage_bound(0.3, 0.1, 0.0, 0.0, 0.25, usize::MAX);
    assert!((v - 0.05).abs() < 1e-12);
    // whole code rate as key
    assert!((leakage_bound(0.3, 0.3, 0.0, 0.4, 0.2, 1000) - (0.2 + 0.002)).abs() < 1e-15);
    // regular (3,4) operating point at full power
    let beta = db_to_linear(-0.15).sqrt();
    let c_w = cap_w(beta, 1.0).unwrap().value;
    let r_l = leakage_bound(0.25, 0.2, 0.0, 0.0, c_w, 100_000);
    assert!((r_l - 0.139).abs() < 1e-3, "{r_l}");
}

#[test]
fn noiseless_sweep_traces_the_ideal_line() {
    let code = small_code(1000, 11);
    let n = code.n();
    let ks = [150usize, 200, 240];
    let channel = ChannelParams::at_full_power(1.0, 1.0).unwrap();
    let grid = [0.9, 0.95, 1.0];
    let cfg = SweepConfig {
        trials: 8,
        refine_trials: 8,
        eps_cap: 1.0,
        noise: NoiseMode::Zero,
        ..Default::default()
    };
    let traj = sweep_trajectory(&code, &channel, &ks, &grid, &cfg).unwrap();
    assert_eq!(traj.candidates.len(), ks.len() * grid.len());
    for p in &traj.candidates {
        assert_eq!((p.eps_s.errors, p.eps_w.errors), (0, 0));
        let gap = p.c_w - (code.code_rate() - p.r_k);
        assert!(gap >= 0.0);
        assert!((p.r_l_bound - (gap.max(0.0) + 2.0 / n as f64)).abs() < 1e-12);
        assert_eq!(p.feasible, p.r_l_bound <= p.r_k);
    }
    for (k, best) in &traj.best {
        let feasible: Vec<_> = traj
            .candidates
            .iter()
            .filter(|p| p.k == *k && p.feasible)
            .collect();
        match best {
            Some(b) => assert!(feasible.iter().all(|p| b.r_l_bound <= p.r_l_bound)),
            None => assert!(feasible.is_empty()),
        }
    }
}
