//! Oracles shared by the integration tests and the acceptance report.
#![allow(dead_code)]

pub mod mc;

use std::collections::{BTreeMap, BTreeSet};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wiretap_ldpc::bp::{decode, BpOptions, BpWorkspace, DecoderGraph};
use wiretap_ldpc::channel::BpskWord;
use wiretap_ldpc::density::{de_iterate, DeGrid, DeOptions, LlrDensity};
use wiretap_ldpc::ldpc::{
    build_concatenated_subcode, coset_leader, encode, remove_4cycles, sample_irregular,
    sample_regular, syndrome, triangularize, DegreeDistribution, TannerGraph,
};

pub const IRREGULAR_RATE025: &str = include_str!("../../fixtures/irregular_rate025.json");
pub const IRREGULAR_RATE012: &str = include_str!("../../fixtures/irregular_rate012.json");

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- BP vs MAP

/// Random cycle-free Tanner graph: each new check joins one existing variable
/// to one to three fresh ones.
pub fn random_tree(n: usize, r: &mut ChaCha8Rng) -> TannerGraph {
    let mut rows = Vec::new();
    let mut used = 1;
    while used < n {
        let anchor = r.random_range(0..used) as u32;
        let fresh = r.random_range(1..=3usize).min(n - used);
        let mut row = vec![anchor];
        row.extend((used..used + fresh).map(|v| v as u32));
        used += fresh;
        rows.push(row);
    }
    TannerGraph::from_check_rows(n, rows).unwrap()
}

/// Exact a-posteriori LLRs by enumerating all words with the given syndrome.
pub fn map_marginals(g: &TannerGraph, llr: &[f64], target: Option<&[u8]>) -> Vec<f64> {
    let n = g.n();
    let mut p0 = vec![0.0; n];
    let mut p1 = vec![0.0; n];
    for w in 0u32..(1 << n) {
        let bits: Vec<u8> = (0..n).map(|i| ((w >> i) & 1) as u8).collect();
        let s = g.syndrome(&bits).unwrap();
        let ok = match target {
            Some(t) => s == t,
            None => s.iter().all(|&b| b == 0),
        };
        if !ok {
            continue;
        }
        let lw: f64 = bits
            .iter()
            .zip(llr)
            .map(|(&b, &l)| if b == 0 { l / 2.0 } else { -l / 2.0 })
            .sum();
        let pw = lw.exp();
        for i in 0..n {
            if bits[i] == 0 {
                p0[i] += pw;
            } else {
                p1[i] += pw;
            }
        }
    }
    p0.iter().zip(&p1).map(|(a, b)| (a / b).ln()).collect()
}

/// Largest |BP - MAP| posterior LLR difference over `cases` random trees.
pub fn bp_tree_max_error(cases: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let n = r.random_range(2..=16usize);
        let g = random_tree(n, &mut r);
        let llr: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let target: Option<Vec<u8>> =
            (case % 2 == 1).then(|| (0..g.m()).map(|_| r.random_range(0..2u8)).collect());
        let exact = map_marginals(&g, &llr, target.as_deref());
        let dg = DecoderGraph::new(&g);
        let res = decode(
            &dg,
            &llr,
            target.as_deref(),
            BpOptions {
                max_iter: 2 * n + 2,
                early_stop: false,
            },
            &mut BpWorkspace::new(),
            None,
        )
        .unwrap();
        for (a, b) in res.posterior.iter().zip(&exact) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

// ------------------------------------------------------ null-space fixtures

pub fn nullspace(g: &TannerGraph) -> BTreeSet<u32> {
    (0u32..(1 << g.n()))
        .filter(|w| {
            let bits: Vec<u8> = (0..g.n()).map(|i| ((w >> i) & 1) as u8).collect();
            g.is_codeword(&bits)
        })
        .collect()
}

fn pack(bits: &[u8]) -> u32 {
    bits.iter()
        .enumerate()
        .fold(0, |a, (i, &b)| a | ((b as u32) << i))
}

/// Small parity-check matrices: random dense ones (including rank-deficient
/// stacks) and sampled regular graphs without parallel edges.
pub fn small_fixtures() -> Vec<TannerGraph> {
    let mut out = Vec::new();
    let mut r = rng(99);
    for _ in 0..40 {
        let n = r.random_range(4..=16usize);
        let m = r.random_range(1..n);
        let mut rows: Vec<Vec<u8>> = (0..m)
            .map(|_| (0..n).map(|_| r.random_range(0..2u8)).collect())
            .collect();
        if m >= 2 && r.random_range(0..2) == 0 {
            // force a dependent row
            let x: Vec<u8> = rows[0].iter().zip(&rows[1]).map(|(a, b)| a ^ b).collect();
            rows.push(x);
        }
        out.push(TannerGraph::from_dense(&rows).unwrap());
    }
    for (n, dv, dc) in [
        (12, 3, 4),
        (16, 3, 4),
        (15, 3, 5),
        (16, 2, 4),
        (12, 3, 6),
        (16, 3, 8),
    ] {
        for seed in 0..20 {
            let g = sample_regular(n, dv, dc, seed).unwrap();
            if !g.has_parallel_edges() {
                out.push(g);
                break;
            }
        }
    }
    out
}

/// Checks triangularization against exhaustive enumeration: dimension, the
/// encoder image, the syndrome map, and coset leaders.
pub fn nullspace_check() -> Result<usize, String> {
    let fixtures = small_fixtures();
    for (i, g) in fixtures.iter().enumerate() {
        let ns = nullspace(g);
        let code = triangularize(g).map_err(|e| e.to_string())?;
        if 1usize << code.l() != ns.len() {
            return Err(format!(
                "fixture {i}: dimension {} but null space has {} words",
                code.l(),
                ns.len()
            ));
        }
        let mut image = BTreeSet::new();
        for u in 0u32..(1 << code.l()) {
            let sys: Vec<u8> = (0..code.l()).map(|j| ((u >> j) & 1) as u8).collect();
            let x = encode(&code, &sys).map_err(|e| e.to_string())?;
            image.insert(pack(x.bits()));
        }
        if image != ns {
            return Err(format!(
                "fixture {i}: encoder image differs from the null space"
            ));
        }
        for w in 0u32..(1 << g.n()) {
            let word = BpskWord::from_bits((0..g.n()).map(|j| ((w >> j) & 1) as u8));
            let s = syndrome(&code, &word).map_err(|e| e.to_string())?;
            if s.iter().all(|&b| b == 0) != ns.contains(&w) {
                return Err(format!(
                    "fixture {i}: syndrome of {w:#b} disagrees with membership"
                ));
            }
            let leader = coset_leader(&code, &s).map_err(|e| e.to_string())?;
            if syndrome(&code, &leader).map_err(|e| e.to_string())? != s
                || !ns.contains(&(pack(leader.bits()) ^ w))
            {
                return Err(format!(
                    "fixture {i}: coset leader of {w:#b} is not in its coset"
                ));
            }
        }
    }
    Ok(fixtures.len())
}

/// GF(2) rank by dense elimination on `u32` rows.
pub fn dense_rank(rows: &[Vec<u8>]) -> usize {
    let mut v: Vec<u32> = rows.iter().map(|r| pack(r)).collect();
    let mut rank = 0;
    for bit in 0..32 {
        if let Some(p) = (rank..v.len()).find(|&i| (v[i] >> bit) & 1 == 1) {
            v.swap(rank, p);
            for i in 0..v.len() {
                if i != rank && (v[i] >> bit) & 1 == 1 {
                    v[i] ^= v[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Key length of stacked codes against the dense-rank quotient dimension.
pub fn concatenated_rank_check() -> Result<(), String> {
    let mut r = rng(5);
    for _ in 0..30 {
        let n = r.random_range(6..=16usize);
        let m1 = r.random_range(1..n / 2 + 1);
        let m2 = r.random_range(0..n / 2 + 1);
        let mk = |m: usize, r: &mut ChaCha8Rng| -> Vec<Vec<u8>> {
            (0..m)
                .map(|_| (0..n).map(|_| r.random_range(0..2u8)).collect())
                .collect()
        };
        let (h1, h2) = (mk(m1, &mut r), mk(m2, &mut r));
        let c = triangularize(&TannerGraph::from_dense(&h1).unwrap()).map_err(|e| e.to_string())?;
        let extra = if h2.is_empty() {
            TannerGraph::from_check_rows(n, vec![]).unwrap()
        } else {
            TannerGraph::from_dense(&h2).unwrap()
        };
        let cc = build_concatenated_subcode(&c, &extra).map_err(|e| e.to_string())?;
        let stacked: Vec<Vec<u8>> = h1.iter().chain(&h2).cloned().collect();
        let want = dense_rank(&stacked) - dense_rank(&h1);
        if cc.k() != want {
            return Err(format!(
                "n={n}: key length {} but quotient dimension {want}",
                cc.k()
            ));
        }
    }
    Ok(())
}

// ------------------------------------------------------- subspace counting

/// Every subspace of `GF(2)^l` (as a bitmask over the `2^l` vectors), by dimension.
pub fn all_subspaces(l: u32) -> BTreeMap<u32, BTreeSet<u64>> {
    let size = 1u32 << l;
    let span_add = |s: u64, v: u32| -> u64 {
        let mut out = s;
        for u in 0..size {
            if (s >> u) & 1 == 1 {
                out |= 1 << (u ^ v);
            }
        }
        out
    };
    let mut by_dim: BTreeMap<u32, BTreeSet<u64>> = BTreeMap::new();
    by_dim.entry(0).or_default().insert(1);
    for d in 0..l {
        let cur: Vec<u64> = by_dim[&d].iter().copied().collect();
        for s in cur {
            for v in 1..size {
                if (s >> v) & 1 == 0 {
                    by_dim.entry(d + 1).or_default().insert(span_add(s, v));
                }
            }
        }
    }
    by_dim
}

/// Max relative error of `subspace_ratio(l, k)` against enumeration, `1 <= k <= l <= 6`.
pub fn subspace_ratio_max_error() -> f64 {
    let mut worst: f64 = 0.0;
    for l in 1..=6u32 {
        let subs = all_subspaces(l);
        for k in 1..=l {
            let of_dim = &subs[&(l - k)];
            // fixed nonzero vector: e_1
            let containing = of_dim.iter().filter(|&&s| (s >> 1) & 1 == 1).count();
            let exact = containing as f64 / of_dim.len() as f64;
            let got = wiretap_ldpc::bounds::subspace_ratio(l as u64, k as u64).unwrap();
            let err = if exact == 0.0 {
                got.abs()
            } else {
                ((got - exact) / exact).abs()
            };
            worst = worst.max(err);
        }
    }
    worst
}

// --------------------------------------------------------- density evolution

pub fn irregular_rate025() -> DegreeDistribution {
    DegreeDistribution::from_json(IRREGULAR_RATE025).unwrap()
}

pub fn irregular_rate012() -> DegreeDistribution {
    DegreeDistribution::from_json(IRREGULAR_RATE012).unwrap()
}

/// Max over iterations of `|sum_j A_{l,j} lambda_j - e(l)|`.
pub fn de_reconstruction_error(
    dist: &DegreeDistribution,
    channel: &LlrDensity,
    grid: &DeGrid,
    iters: usize,
) -> f64 {
    let t = de_iterate(
        dist,
        channel,
        grid,
        DeOptions {
            iterations: iters,
            record_degree: 0,
            bit_error: false,
        },
    )
    .unwrap();
    (1..=iters)
        .map(|l| {
            let pred: f64 = dist
                .lambda()
                .iter()
                .map(|(j, lam)| lam * t.per_degree_error[l - 1][j])
                .sum();
            (pred - t.message_error[l]).abs()
        })
        .fold(0.0, f64::max)
}

fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// One-iteration error of a degree-2 variable on BPSK/AWGN with all checks of
/// degree 3, by a direct 2-D integral over the two incoming channel LLRs.
pub fn a12_direct(beta: f64) -> f64 {
    let (mu, sd) = (2.0 * beta * beta, 2.0 * beta);
    let steps = 2400;
    let lo = mu - 10.0 * sd;
    let h = 20.0 * sd / steps as f64;
    let pdf = |x: f64| {
        (-0.5 * ((x - mu) / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
    };
    let mut acc = 0.0;
    for i in 0..=steps {
        let a = lo + i as f64 * h;
        let wa = if i == 0 || i == steps { 0.5 } else { 1.0 };
        for j in 0..=steps {
            let b = lo + j as f64 * h;
            let wb = if j == 0 || j == steps { 0.5 } else { 1.0 };
            let m = 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
            // P(channel + m < 0)
            acc += wa * wb * pdf(a) * pdf(b) * phi(-(mu + m) / sd);
        }
    }
    acc * h * h
}

pub fn a12_de(beta: f64, grid: &DeGrid) -> f64 {
    let d = DegreeDistribution::from_pairs(&[(2, 0.5), (3, 0.5)], &[(3, 1.0)]).unwrap();
    let ch = LlrDensity::bpsk_awgn(beta, grid).unwrap();
    let t = de_iterate(
        &d,
        &ch,
        grid,
        DeOptions {
            iterations: 1,
            record_degree: 0,
            bit_error: false,
        },
    )
    .unwrap();
    t.per_degree_error[0][&2]
}

/// Channel model for a DE-vs-BP comparison.
#[derive(Debug, Clone, Copy)]
pub enum TestChannel {
    Bsc(f64),
    Awgn(f64),
}

impl TestChannel {
    pub fn density(self, grid: &DeGrid) -> LlrDensity {
        match self {
            TestChannel::Bsc(p) => LlrDensity::bsc(p, grid).unwrap(),
            TestChannel::Awgn(b) => LlrDensity::bpsk_awgn(b, grid).unwrap(),
        }
    }

    /// Intrinsic LLRs of the all-zero word.
    fn llrs(self, n: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            TestChannel::Bsc(p) => {
                let l = ((1.0 - p) / p).ln();
                (0..n)
                    .map(|_| if r.random::<f64>() < p { -l } else { l })
                    .collect()
            }
            TestChannel::Awgn(b) => {
                use rand_distr::{Distribution, StandardNormal};
                (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(r);
                        2.0 * b * (b + z)
                    })
                    .collect()
            }
        }
    }
}

/// Max over `1..=iters` of |DE bit error - BP bit error| on a sampled
/// 4-cycle-free graph of length `n`, averaged over `frames` frames.
pub fn de_vs_bp_gap(
    dist: &DegreeDistribution,
    ch: TestChannel,
    grid: &DeGrid,
    n: usize,
    iters: usize,
    frames: usize,
    seed: u64,
) -> f64 {
    let de = de_iterate(
        dist,
        &ch.density(grid),
        grid,
        DeOptions {
            iterations: iters,
            record_degree: 0,
            bit_error: true,
        },
    )
    .unwrap();
    let g = remove_4cycles(&sample_irregular(n, dist, seed).unwrap(), seed + 1).unwrap();
    let dg = DecoderGraph::new(&g);
    let mut r = rng(seed + 2);
    let mut ws = BpWorkspace::new();
    let mut err = vec![0.0; iters + 1];
    for _ in 0..frames {
        let llr = ch.llrs(n, &mut r);
        let mut obs = |v: &wiretap_ldpc::bp::IterationView| {
            let e: f64 = v
                .posterior
                .iter()
                .map(|&x| {
                    if x < 0.0 {
                        1.0
                    } else if x == 0.0 {
                        0.5
                    } else {
                        0.0
                    }
                })
                .sum();
            err[v.iteration] += e / (n * frames) as f64;
        };
        decode(
            &dg,
            &llr,
            None,
            BpOptions {
                max_iter: iters,
                early_stop: false,
            },
            &mut ws,
            Some(&mut obs),
        )
        .unwrap();
    }
    (1..=iters)
        .map(|l| (de.bit_error[l] - err[l]).abs())
        .fold(0.0, f64::max)
}

/// The three (distribution, channel) pairs of the DE-vs-BP comparison.
pub fn de_vs_bp_cases() -> Vec<(&'static str, DegreeDistribution, TestChannel)> {
    vec![
        (
            "(3,6) BSC 0.07",
            DegreeDistribution::regular(3, 6).unwrap(),
            TestChannel::Bsc(0.07),
        ),
        (
            "(3,4) AWGN beta 0.8",
            DegreeDistribution::regular(3, 4).unwrap(),
            TestChannel::Awgn(0.8),
        ),
        (
            "rate-0.25 irregular BSC 0.15",
            irregular_rate025(),
            TestChannel::Bsc(0.15),
        ),
    ]
}

// ------------------------------------------------------------ property suite

pub mod props {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, TestCaseError, TestRunner};
    use wiretap_ldpc::bounds::{ml_bound, select_asymptotic_params, AsymptoticChoice, Side};
    use wiretap_ldpc::capacity::{cap_s, cap_w};
    use wiretap_ldpc::channel::{wiretap_llr, wiretap_llr_raw, ChannelParams};
    use wiretap_ldpc::protocol::leakage_bound;

    fn runner(cases: u32) -> TestRunner {
        TestRunner::new(Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        })
    }

    fn fail(
        r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>,
    ) -> Result<(), String> {
        r.map_err(|e| e.to_string())
    }

    pub fn llr_antisymmetry(cases: u32) -> Result<(), String> {
        fail(runner(cases).run(
            &(-40.0..40.0f64, 0.0..4.0f64, 0.0..2.0f64, 0.0..3.0f64),
            |(z, snr, alpha, t)| {
                let p = ChannelParams::new(snr, alpha, t.min(snr.sqrt())).unwrap();
                let (a, b) = (wiretap_llr(z, &p), wiretap_llr(-z, &p));
                prop_assert_eq!(a, -b);
                prop_assert!(a.is_finite());
                let raw = wiretap_llr_raw(z, alpha * t, 0.3);
                prop_assert_eq!(raw, -wiretap_llr_raw(-z, alpha * t, 0.3));
                Ok(())
            },
        ))
    }

    pub fn cap_w_below_cap_s(cases: u32) -> Result<(), String> {
        fail(
            runner(cases).run(&(0.0..4.0f64, 0.0..4.0f64), |(beta, alpha)| {
                let cw = cap_w(beta, alpha).map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert!(
                    cw.value <= cap_s(beta) + 1e-12,
                    "C_w {} > C_s {}",
                    cw.value,
                    cap_s(beta)
                );
                prop_assert!(cw.value >= -1e-12);
                Ok(())
            }),
        )
    }

    pub fn leakage_monotone(cases: u32) -> Result<(), String> {
        let s = (
            0.05..0.9f64,
            0.0..1.0f64,
            0.0..0.5f64,
            0.0..0.5f64,
            0.0..1.0f64,
            1usize..1_000_000,
            0.0..0.1f64,
        );
        fail(runner(cases).run(&s, |(r_c, kf, es, ew, cw, n, d)| {
            let r_k = kf * r_c;
            let base = leakage_bound(r_c, r_k, es, ew, cw, n);
            prop_assert!(leakage_bound(r_c, r_k, es + d, ew, cw, n) >= base);
            prop_assert!(leakage_bound(r_c, r_k, es, ew + d, cw, n) >= base);
            let rk2 = (r_k + d).min(r_c);
            prop_assert!(leakage_bound(r_c, rk2, es, ew, cw, n) >= base - 1e-15);
            Ok(())
        }))
    }

    /// (d_v, d_c) pairs with `d_c = 2 d_v` for the assembly check.
    pub fn assembly_consistency(cases: u32) -> Result<(), String> {
        let s = (
            2u32..12,
            0.5..2.5f64,
            0.5..1.5f64,
            prop::sample::select(vec![1_000u64, 10_000, 100_000]),
            any::<bool>(),
        );
        fail(runner(cases).run(&s, |(dv, beta, alpha, n, wiretap)| {
            let side = if wiretap { Side::Wiretap } else { Side::Source };
            let p = wiretap_ldpc::bounds::EnsembleParams::new(n, dv, 2 * dv, 0.5, 0.1, 0.3)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let r =
                ml_bound(&p, side, beta, alpha).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let sum: f64 = r.terms.iter().map(|t| t.value).sum::<f64>() + r.exponent_term.value;
            if r.value.is_finite() && r.value > 0.0 && sum > 0.0 {
                prop_assert!(
                    ((r.value - sum) / r.value).abs() <= 1e-12,
                    "value {} vs sum {}",
                    r.value,
                    sum
                );
            }
            for t in &r.terms {
                prop_assert_eq!(t.value, t.log2_value.exp2());
            }
            Ok(())
        }))
    }

    /// Parameters satisfying the asymptotic conditions at 3 dB, alpha = 1.
    pub fn decay_choice() -> Result<AsymptoticChoice, String> {
        let beta = 10f64.powf(0.15);
        select_asymptotic_params(0.3, 0.1, beta, 1.0, 0.05, 20_000).map_err(|e| e.to_string())
    }

    /// `ml_bound` over growing `n`; returns the log2 values, which must not increase.
    /// Below `n` of about `1e5` the source side still grows with the
    /// `log2(n (n - l) d_c)` prefactor, so the grid starts there.
    pub fn bound_decay() -> Result<Vec<(u64, f64, f64)>, String> {
        let ch = decay_choice()?;
        let beta = 10f64.powf(0.15);
        let mut out = Vec::new();
        for n in [100_000u64, 1_000_000, 10_000_000, 100_000_000] {
            let p = ch.params(n).map_err(|e| e.to_string())?;
            let w = ml_bound(&p, Side::Wiretap, beta, 1.0).map_err(|e| e.to_string())?;
            let s = ml_bound(&p, Side::Source, beta, 1.0).map_err(|e| e.to_string())?;
            out.push((n, w.log2_value, s.log2_value));
        }
        for pair in out.windows(2) {
            if pair[1].1 > pair[0].1 || pair[1].2 > pair[0].2 {
                return Err(format!(
                    "bound increased between n={} and n={}: {:?}",
                    pair[0].0, pair[1].0, out
                ));
            }
        }
        Ok(out)
    }
}
