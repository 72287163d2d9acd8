//! The one-way key agreement session and its Monte Carlo evaluation.
//!
//! The source X is transmitted once; the destination quantizes its output to
//! `Y~`, sends the syndrome of `Y~` and keeps the key of `X_0 = Y~ xor E_S`.
//! The source recovers `X_0` by decoding `X xor E_S`; the wiretapper decodes
//! `X_0` from `Z`, `E_S` and, pessimistically, the key itself.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bp::{self, BpOptions, BpWorkspace, DecoderGraph, DEFAULT_MAX_ITER};
use crate::capacity::{cap_s, cap_w};
use crate::channel::{
    quantize, transmit, BpskWord, ChannelParams, GaussianNoise, NoiseSource, RealWord, ZeroNoise,
};
use crate::error::SimError;
use crate::exec::{map_range, Execution};
use crate::ldpc::{coset_leader, key_bits_unchecked, syndrome, KeyMap, SecretSharingCode};
use crate::stats::RateEstimate;

/// RNG for trial `index` of a run seeded with `seed`. Each trial owns an
/// independent ChaCha stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    #[default]
    Gaussian,
    /// Noise-free channel outputs, for deterministic checks.
    Zero,
}

/// Everything observed during one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub x: BpskWord,
    pub y: RealWord,
    pub z: RealWord,
    pub y_quantized: BpskWord,
    pub syndrome: Vec<u8>,
    pub e_s: BpskWord,
    pub x0: BpskWord,
    /// Source's estimate of `X_0`.
    pub x0_source: BpskWord,
    /// Key at the source, `K`.
    pub key_source: Vec<u8>,
    /// Key at the destination, `L`.
    pub key_dest: Vec<u8>,
    pub source_converged: bool,
    pub source_iterations: usize,
}

impl SessionTranscript {
    pub fn keys_match(&self) -> bool {
        self.key_source == self.key_dest
    }

    pub fn source_frame_error(&self) -> bool {
        self.x0_source != self.x0
    }
}

/// Cached decoder graphs for a code.
pub struct Reconciler<'a> {
    code: &'a SecretSharingCode,
    source: DecoderGraph,
    wiretap: Option<DecoderGraph>,
}

impl<'a> Reconciler<'a> {
    pub fn new(code: &'a SecretSharingCode) -> Self {
        let wiretap = match code.key_map() {
            KeyMap::Systematic => None,
            KeyMap::Syndrome { stacked, .. } => Some(DecoderGraph::new(stacked)),
        };
        Self {
            code,
            source: DecoderGraph::new(code.graph()),
            wiretap,
        }
    }

    pub fn code(&self) -> &SecretSharingCode {
        self.code
    }

    /// Runs a session on a given source word with the given noise.
    pub fn session<S: NoiseSource + ?Sized>(
        &self,
        x: BpskWord,
        params: &ChannelParams,
        noise: &mut S,
        max_iter: usize,
        ws: &mut BpWorkspace,
    ) -> Result<SessionTranscript, SimError> {
        let code = self.code;
        let (y, z) = transmit(&x, params, noise)?;
        let y_quantized = quantize(&y);
        let s = syndrome(code, &y_quantized)?;
        let e_s = coset_leader(code, &s)?;
        let x0 = y_quantized.xor(&e_s);
        let key_dest = key_bits_unchecked(code, &x0)?;
        let llr = bp::source_llrs(&x, &e_s, params.beta_tilde())?;
        let r = bp::decode(
            &self.source,
            &llr,
            None,
            BpOptions {
                max_iter,
                early_stop: true,
            },
            ws,
            None,
        )?;
        let key_source = key_bits_unchecked(code, &r.word)?;
        Ok(SessionTranscript {
            x,
            y,
            z,
            y_quantized,
            syndrome: s,
            e_s,
            x0,
            x0_source: r.word,
            key_source,
            key_dest,
            source_converged: r.converged,
            source_iterations: r.iterations_used,
        })
    }

    /// Wiretapper's estimate of `X_0` for a code sharing this reconciler's
    /// parity-check matrix (possibly with a different key length).
    pub fn wiretap(
        &self,
        keyed: &SecretSharingCode,
        t: &SessionTranscript,
        params: &ChannelParams,
        max_iter: usize,
        ws: &mut BpWorkspace,
    ) -> Result<BpskWord, SimError> {
        let key = key_bits_unchecked(keyed, &t.x0)?;
        let llr = bp::wiretap_llrs(keyed, &t.z, &t.e_s, &key, params)?;
        let target = bp::wiretap_target(keyed, &key);
        let g = self.wiretap.as_ref().unwrap_or(&self.source);
        let r = bp::decode(
            g,
            &llr,
            target.as_deref(),
            BpOptions {
                max_iter,
                early_stop: true,
            },
            ws,
            None,
        )?;
        Ok(r.word)
    }
}

fn draw_session(
    rec: &Reconciler,
    params: &ChannelParams,
    seed: u64,
    index: u64,
    noise: NoiseMode,
    max_iter: usize,
    ws: &mut BpWorkspace,
) -> Result<SessionTranscript, SimError> {
    let mut rng = trial_rng(seed, index);
    let x = BpskWord::random(rec.code().n(), &mut rng);
    match noise {
        NoiseMode::Gaussian => rec.session(x, params, &mut GaussianNoise(&mut rng), max_iter, ws),
        NoiseMode::Zero => rec.session(x, params, &mut ZeroNoise, max_iter, ws),
    }
}

/// One session with a fresh uniformly random source word.
pub fn run_session(
    code: &SecretSharingCode,
    params: &ChannelParams,
    seed: u64,
) -> Result<SessionTranscript, SimError> {
    let rec = Reconciler::new(code);
    draw_session(
        &rec,
        params,
        seed,
        0,
        NoiseMode::Gaussian,
        DEFAULT_MAX_ITER,
        &mut BpWorkspace::new(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub eps_s: RateEstimate,
    pub eps_w: RateEstimate,
}

#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub trials: u64,
    pub seed: u64,
    pub max_iter: usize,
    pub noise: NoiseMode,
    pub exec: Execution,
}

impl SimOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            max_iter: DEFAULT_MAX_ITER,
            noise: NoiseMode::Gaussian,
            exec: Execution::Auto,
        }
    }
}

/// Frame error rates of the source (`eps_s`) and wiretapper (`eps_w`).
pub fn estimate_error_rates(
    code: &SecretSharingCode,
    params: &ChannelParams,
    trials: u64,
    seed: u64,
) -> Result<ErrorRates, SimError> {
    estimate_error_rates_with(code, params, &SimOptions::new(trials, seed))
}

pub fn estimate_error_rates_with(
    code: &SecretSharingCode,
    params: &ChannelParams,
    opts: &SimOptions,
) -> Result<ErrorRates, SimError> {
    if opts.trials == 0 {
        return Err(SimError::Invalid("trials must be positive".into()));
    }
    let rec = Reconciler::new(code);
    let outcomes = map_range(opts.exec, 0..opts.trials, BpWorkspace::new, |ws, i| {
        let t = draw_session(&rec, params, opts.seed, i, opts.noise, opts.max_iter, ws)?;
        let w = rec.wiretap(code, &t, params, opts.max_iter, ws)?;
        Ok::<_, SimError>((t.source_frame_error(), w != t.x0))
    });
    let (mut es, mut ew) = (0, 0);
    for o in outcomes {
        let (s, w) = o?;
        es += s as u64;
        ew += w as u64;
    }
    Ok(ErrorRates {
        eps_s: RateEstimate::new(es, opts.trials),
        eps_w: RateEstimate::new(ew, opts.trials),
    })
}

/// Upper bound on the leakage rate:
/// `C_w - (R_c - R_k) + R_k eps_s + (R_c - R_k) eps_w + 2/n`, floored at 0.
pub fn leakage_bound(r_c: f64, r_k: f64, eps_s: f64, eps_w: f64, c_w: f64, n: usize) -> f64 {
    let v = c_w - (r_c - r_k) + r_k * eps_s + (r_c - r_k) * eps_w + 2.0 / n as f64;
    v.max(0.0)
}

/// Sweep settings.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Frames per candidate point.
    pub trials: u64,
    /// Frames for points whose confidence interval straddles `eps_cap`.
    pub refine_trials: u64,
    pub eps_cap: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub exec: Execution,
    /// Frames per batch between early-stopping checks.
    pub batch: u64,
    pub noise: NoiseMode,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            trials: 2000,
            refine_trials: 10_000,
            eps_cap: 0.01,
            seed: 0,
            max_iter: DEFAULT_MAX_ITER,
            exec: Execution::Auto,
            batch: 64,
            noise: NoiseMode::Gaussian,
        }
    }
}

/// One evaluated `(k, beta_tilde)` candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub k: usize,
    pub r_k: f64,
    pub beta_tilde: f64,
    pub eps_s: RateEstimate,
    pub eps_w: RateEstimate,
    pub c_w: f64,
    pub r_l_bound: f64,
    pub feasible: bool,
    pub seed: u64,
}

impl TrajectoryPoint {
    pub fn trials(&self) -> u64 {
        self.eps_s.trials.max(self.eps_w.trials)
    }
}

/// Best point per key length, or `None` when no candidate was feasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub best: Vec<(usize, Option<TrajectoryPoint>)>,
    pub candidates: Vec<TrajectoryPoint>,
    pub code_rate: f64,
    pub n: usize,
}

impl Trajectory {
    /// Feasible best points in order of increasing `k`.
    pub fn points(&self) -> Vec<&TrajectoryPoint> {
        self.best.iter().filter_map(|(_, p)| p.as_ref()).collect()
    }
}

/// Default candidate grid: `count` points from the `beta_tilde` where
/// `C_s = R_c` up to `sqrt(snr_max)`.
pub fn default_beta_grid(code_rate: f64, snr_max: f64, count: usize) -> Vec<f64> {
    let hi = snr_max.sqrt();
    // bisection for C_s(beta) = code_rate; C_s is increasing
    let (mut a, mut b) = (0.0, hi);
    if cap_s(hi) <= code_rate {
        return vec![hi];
    }
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if cap_s(mid) < code_rate {
            a = mid;
        } else {
            b = mid;
        }
    }
    let lo = b;
    if count <= 1 {
        return vec![hi];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

struct KeyState {
    code: SecretSharingCode,
    errors: u64,
    trials: u64,
    active: bool,
}

/// Evaluates candidates from the highest `beta_tilde` downwards.
///
/// Sessions are shared across key lengths. A key length stops being simulated
/// at a candidate once the 95% Wilson lower bound of its `eps_w` exceeds the
/// cap; the descent stops once `eps_s` is shown infeasible the same way, since
/// `eps_s` does not decrease as `beta_tilde` is lowered. Intervals straddling
/// the cap after `trials` frames are extended to `refine_trials`.
pub fn sweep_trajectory(
    code: &SecretSharingCode,
    channel: &ChannelParams,
    k_values: &[usize],
    beta_grid: &[f64],
    cfg: &SweepConfig,
) -> Result<Trajectory, SimError> {
    if k_values.is_empty() || beta_grid.is_empty() {
        return Err(SimError::Invalid("empty k or beta grid".into()));
    }
    if cfg.trials == 0 || cfg.batch == 0 {
        return Err(SimError::Invalid(
            "trials and batch must be positive".into(),
        ));
    }
    let n = code.n();
    let r_c = code.code_rate();
    let mut grid: Vec<f64> = beta_grid.to_vec();
    for &b in &grid {
        channel.with_beta(b)?;
    }
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();

    let keyed: Vec<SecretSharingCode> = k_values
        .iter()
        .map(|&k| match code.key_map() {
            KeyMap::Systematic => code.clone().with_key_len(k).map_err(SimError::from),
            KeyMap::Syndrome { .. } if k == code.k() => Ok(code.clone()),
            KeyMap::Syndrome { .. } => Err(SimError::Invalid(format!(
                "concatenated code has fixed k = {}",
                code.k()
            ))),
        })
        .collect::<Result<_, _>>()?;
    let rec = Reconciler::new(code);
    let mut candidates = Vec::new();

    for &beta in &grid {
        let params = channel.with_beta(beta)?;
        let c_w = cap_w(beta, channel.alpha())?.value;
        let mut keys: Vec<KeyState> = keyed
            .iter()
            .map(|c| KeyState {
                code: c.clone(),
                errors: 0,
                trials: 0,
                active: true,
            })
            .collect();
        let (mut src_err, mut done) = (0u64, 0u64);
        let mut budget = cfg.trials;
        let mut source_infeasible = false;
        while done < budget {
            let end = (done + cfg.batch).min(budget);
            let active: Vec<usize> = (0..keys.len()).filter(|&i| keys[i].active).collect();
            let outcomes = map_range(cfg.exec, done..end, BpWorkspace::new, |ws, i| {
                let t = draw_session(&rec, &params, cfg.seed, i, cfg.noise, cfg.max_iter, ws)?;
                let mut w = Vec::with_capacity(active.len());
                for &ki in &active {
                    let est = rec.wiretap(&keys[ki].code, &t, &params, cfg.max_iter, ws)?;
                    w.push(est != t.x0);
                }
                Ok::<_, SimError>((t.source_frame_error(), w))
            });
            for o in outcomes {
                let (s, w) = o?;
                src_err += s as u64;
                for (j, &ki) in active.iter().enumerate() {
                    keys[ki].errors += w[j] as u64;
                    keys[ki].trials += 1;
                }
            }
            done = end;
            if RateEstimate::new(src_err, done).ci_low > cfg.eps_cap {
                source_infeasible = true;
                break;
            }
            for ks in keys.iter_mut().filter(|k| k.active) {
                if RateEstimate::new(ks.errors, ks.trials).ci_low > cfg.eps_cap {
                    ks.active = false;
                }
            }
            if keys.iter().all(|k| !k.active) {
                break;
            }
            if done == budget && budget < cfg.refine_trials {
                let straddles =
                    |e: RateEstimate| e.ci_low <= cfg.eps_cap && e.ci_high > cfg.eps_cap;
                let src = RateEstimate::new(src_err, done);
                if straddles(src)
                    || keys
                        .iter()
                        .any(|k| k.active && straddles(RateEstimate::new(k.errors, k.trials)))
                {
                    budget = cfg.refine_trials;
                }
            }
        }
        let eps_s = RateEstimate::new(src_err, done);
        for ks in &keys {
            let eps_w = RateEstimate::new(ks.errors, ks.trials);
            let r_k = ks.code.key_rate();
            let bound = leakage_bound(r_c, r_k, eps_s.rate, eps_w.rate, c_w, n);
            let feasible = eps_s.rate <= cfg.eps_cap && eps_w.rate <= cfg.eps_cap && bound <= r_k;
            candidates.push(TrajectoryPoint {
                k: ks.code.k(),
                r_k,
                beta_tilde: beta,
                eps_s,
                eps_w,
                c_w,
                r_l_bound: bound,
                feasible,
                seed: cfg.seed,
            });
        }
        if source_infeasible {
            break;
        }
    }

    let best = keyed
        .iter()
        .map(|c| {
            let b = candidates
                .iter()
                .filter(|p| p.k == c.k() && p.feasible)
                .min_by(|a, b| a.r_l_bound.total_cmp(&b.r_l_bound))
                .cloned();
            (c.k(), b)
        })
        .collect();
    Ok(Trajectory {
        best,
        candidates,
        code_rate: r_c,
        n,
    })
}
