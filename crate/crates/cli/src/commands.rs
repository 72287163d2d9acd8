use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use wiretap_ldpc::bounds::{ml_bound, select_asymptotic_params, BoundReport, EnsembleParams, Side};
use wiretap_ldpc::capacity::{
    cap_s, cap_w, relaxed_capacity_quantized, relaxed_capacity_unquantized,
};
use wiretap_ldpc::channel::{db_to_linear, linear_to_db, ChannelParams};
use wiretap_ldpc::density::DeGrid;
use wiretap_ldpc::exec::{map_slice, Execution};
use wiretap_ldpc::ldpc::{
    build_concatenated_subcode, remove_4cycles, sample_irregular, sample_near_regular,
    sample_regular, to_alist, triangularize, CodeBundle, DegreeDistribution, KeyMap,
    SecretSharingCode, TannerGraph,
};
use wiretap_ldpc::protocol::{
    estimate_error_rates_with, leakage_bound, sweep_trajectory, SimOptions, SweepConfig,
    Trajectory, TrajectoryPoint,
};
use wiretap_ldpc::search::{search, DesignChannels, SearchParams};

use crate::config::{CodeSource, ExperimentConfig};
use crate::output::{num, Emitter};

/// Seed offsets so the code, cycle removal and simulation streams differ.
const CODE_STREAM: u64 = 0x636f_6465;
const CYCLE_STREAM: u64 = 0x6379_636c;
const EXTRA_STREAM: u64 = 0x6578_7472;

pub fn channel(cfg: &ExperimentConfig) -> Result<ChannelParams> {
    let snr = db_to_linear(cfg.channel.snr_db);
    let alpha = db_to_linear(cfg.channel.alpha_db).sqrt();
    let p = match cfg.channel.beta_tilde {
        Some(b) => ChannelParams::new(snr, alpha, b)?,
        None => ChannelParams::at_full_power(snr, alpha)?,
    };
    Ok(p)
}

fn read_distribution(path: &Path) -> Result<DegreeDistribution> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DegreeDistribution::from_json(&text)
        .with_context(|| format!("parsing degree distribution {}", path.display()))
}

fn sample_graph(cfg: &ExperimentConfig) -> Result<TannerGraph> {
    let c = &cfg.code;
    let seed = cfg.seed ^ CODE_STREAM;
    let g = match &c.distribution {
        Some(p) => sample_irregular(c.n, &read_distribution(p)?, seed)?,
        None => sample_regular(c.n, c.dv, c.dc, seed)?,
    };
    Ok(if c.remove_4cycles {
        remove_4cycles(&g, cfg.seed ^ CYCLE_STREAM)?
    } else {
        g
    })
}

/// Builds or loads the code `C`, stacking the extra code when configured.
pub fn code(cfg: &ExperimentConfig) -> Result<SecretSharingCode> {
    let base = match cfg.code.source {
        CodeSource::Load => {
            let path = cfg.code.path.as_ref().context("code.path is required")?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            CodeBundle::from_json(&text)?.to_code()?
        }
        CodeSource::Sample => triangularize(&sample_graph(cfg)?)?,
    };
    match (cfg.code.extra, base.key_map()) {
        (Some(e), KeyMap::Systematic) => {
            let g = sample_near_regular(base.n(), e.dv, e.dc, cfg.seed ^ EXTRA_STREAM)?;
            Ok(build_concatenated_subcode(&base, &g)?)
        }
        _ => Ok(base),
    }
}

fn exec() -> Execution {
    Execution::Auto
}

pub fn cmd_code(cfg: &ExperimentConfig) -> Result<()> {
    let c = code(cfg)?;
    let mut out = Emitter::new(cfg, "code")?;
    out.raw("code.json", &CodeBundle::from_code(&c, cfg.seed).to_json())?;
    out.raw("code.alist", &to_alist(c.graph()))?;
    out.finish()?;
    eprintln!(
        "n = {}, l = {}, k = {}, gap = {}",
        c.n(),
        c.l(),
        c.k(),
        c.gap()
    );
    Ok(())
}

pub fn cmd_capacity(cfg: &ExperimentConfig) -> Result<()> {
    let c = &cfg.capacity;
    let mut snrs = Vec::new();
    let mut i = 0;
    loop {
        let s = c.snr_db_min + i as f64 * c.snr_db_step;
        if s > c.snr_db_max + 1e-9 {
            break;
        }
        snrs.push(s);
        i += 1;
    }
    let alpha = db_to_linear(cfg.channel.alpha_db).sqrt();
    let points: Vec<(f64, f64)> = snrs
        .iter()
        .flat_map(|&s| c.r_l.iter().map(move |&r| (s, r)))
        .collect();
    let rows = map_slice(exec(), &points, |&(s, r)| -> Result<Vec<String>> {
        let snr = db_to_linear(s);
        let b = relaxed_capacity_unquantized(r, snr, alpha)?;
        let bq = relaxed_capacity_quantized(r, snr, alpha)?;
        Ok(vec![
            num(s),
            num(r),
            num(b.value),
            num(bq.value),
            num(b.value - bq.value),
            num(b.argmax_beta_tilde),
            num(bq.argmax_beta_tilde),
        ])
    });
    let rows: Vec<Vec<String>> = rows.into_iter().collect::<Result<_>>()?;
    let mut out = Emitter::new(cfg, "capacity")?;
    out.csv(
        "capacity.csv",
        &[
            "snr_db",
            "r_l",
            "c_b",
            "c_bq",
            "gap",
            "beta_tilde_b",
            "beta_tilde_bq",
        ],
        &rows,
    )?;
    out.finish()?;
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    n: usize,
    l: usize,
    k: usize,
    code_rate: f64,
    key_rate: f64,
    snr_db: f64,
    alpha_db: f64,
    beta_tilde: f64,
    c_s: f64,
    c_w: f64,
    eps_s: wiretap_ldpc::stats::RateEstimate,
    eps_w: wiretap_ldpc::stats::RateEstimate,
    r_l_bound: f64,
}

fn keyed(code: &SecretSharingCode, k: usize) -> Result<SecretSharingCode> {
    match code.key_map() {
        KeyMap::Systematic => Ok(code.clone().with_key_len(k)?),
        KeyMap::Syndrome { .. } => Ok(code.clone()),
    }
}

pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<()> {
    let params = channel(cfg)?;
    let code = keyed(&code(cfg)?, cfg.simulate.k)?;
    let s = &cfg.simulate;
    let opts = SimOptions {
        trials: s.trials,
        seed: cfg.seed,
        max_iter: s.max_iter,
        noise: s.noise,
        exec: exec(),
    };
    let r = estimate_error_rates_with(&code, &params, &opts)?;
    let c_w = cap_w(params.beta_tilde(), params.alpha())?.value;
    let report = SimulateReport {
        n: code.n(),
        l: code.l(),
        k: code.k(),
        code_rate: code.code_rate(),
        key_rate: code.key_rate(),
        snr_db: cfg.channel.snr_db,
        alpha_db: cfg.channel.alpha_db,
        beta_tilde: params.beta_tilde(),
        c_s: cap_s(params.beta_tilde()),
        c_w,
        eps_s: r.eps_s,
        eps_w: r.eps_w,
        r_l_bound: leakage_bound(
            code.code_rate(),
            code.key_rate(),
            r.eps_s.rate,
            r.eps_w.rate,
            c_w,
            code.n(),
        ),
    };
    let mut out = Emitter::new(cfg, "simulate")?;
    out.json("simulate.json", "simulate", &report)?;
    out.finish()?;
    Ok(())
}

/// Candidate `beta_tilde` values: explicit, or `beta_count` steps of
/// `beta_step_db` (in `beta_tilde^2`) below the configured operating point.
pub fn beta_grid(cfg: &ExperimentConfig, params: &ChannelParams) -> Vec<f64> {
    let s = &cfg.sweep;
    if !s.beta_grid.is_empty() {
        return s.beta_grid.clone();
    }
    let top = linear_to_db(params.beta_tilde() * params.beta_tilde());
    (0..s.beta_count)
        .map(|i| {
            db_to_linear(top - i as f64 * s.beta_step_db)
                .sqrt()
                .min(params.beta_max())
        })
        .collect()
}

fn point_row(p: &TrajectoryPoint) -> Vec<String> {
    vec![
        p.k.to_string(),
        num(p.r_k),
        num(p.beta_tilde),
        num(linear_to_db(p.beta_tilde * p.beta_tilde)),
        p.eps_s.errors.to_string(),
        p.eps_s.trials.to_string(),
        num(p.eps_s.rate),
        num(p.eps_s.ci_high),
        p.eps_w.errors.to_string(),
        p.eps_w.trials.to_string(),
        num(p.eps_w.rate),
        num(p.eps_w.ci_high),
        num(p.c_w),
        num(p.r_l_bound),
        p.feasible.to_string(),
    ]
}

const POINT_HEADER: [&str; 15] = [
    "k",
    "r_k",
    "beta_tilde",
    "beta_tilde2_db",
    "eps_s_errors",
    "eps_s_trials",
    "eps_s",
    "eps_s_ci_high",
    "eps_w_errors",
    "eps_w_trials",
    "eps_w",
    "eps_w_ci_high",
    "c_w",
    "r_l_bound",
    "feasible",
];

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Trajectory> {
    let params = channel(cfg)?;
    let code = code(cfg)?;
    let s = &cfg.sweep;
    let k_values: Vec<usize> = match code.key_map() {
        KeyMap::Syndrome { .. } => vec![code.k()],
        KeyMap::Systematic if !s.k.is_empty() => s.k.clone(),
        KeyMap::Systematic => s
            .key_rates
            .iter()
            .map(|r| (r * code.n() as f64).round() as usize)
            .collect(),
    };
    let sc = SweepConfig {
        trials: s.trials,
        refine_trials: s.refine_trials,
        eps_cap: s.eps_cap,
        seed: cfg.seed,
        max_iter: s.max_iter,
        exec: exec(),
        batch: s.batch,
        noise: s.noise,
    };
    Ok(sweep_trajectory(
        &code,
        &params,
        &k_values,
        &beta_grid(cfg, &params),
        &sc,
    )?)
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<()> {
    let t = run_sweep(cfg)?;
    let mut out = Emitter::new(cfg, "sweep")?;
    let cand: Vec<_> = t.candidates.iter().map(point_row).collect();
    out.csv("sweep_candidates.csv", &POINT_HEADER, &cand)?;
    let best: Vec<_> = t.points().into_iter().map(point_row).collect();
    out.csv("trajectory.csv", &POINT_HEADER, &best)?;
    out.json("sweep.json", "sweep", &t)?;
    out.finish()?;
    for (k, p) in &t.best {
        match p {
            Some(p) => eprintln!(
                "k = {k}: (R_k, R_l) = ({:.4}, {:.4}) at beta_tilde = {:.4}",
                p.r_k, p.r_l_bound, p.beta_tilde
            ),
            None => eprintln!("k = {k}: no feasible beta_tilde"),
        }
    }
    Ok(())
}

pub fn cmd_design(cfg: &ExperimentConfig) -> Result<()> {
    let d = &cfg.design;
    let initial = match &d.initial {
        Some(p) => read_distribution(p)?,
        None => bail!("design.initial (initial degree distribution) is required"),
    };
    let params = channel(cfg)?;
    let grid = DeGrid::new(d.grid_span, d.grid_intervals)?;
    let channels = DesignChannels::new(&params, d.r_k, &grid)?;
    let sp = SearchParams {
        eps: d.eps,
        m_s: d.m_s,
        m_w: d.m_w,
        delta: d.delta,
        max_rounds: d.max_rounds,
        max_var_degree: d.max_var_degree,
        rho_step: d.rho_step,
        ..SearchParams::default()
    };
    let outcome = search(&initial, &channels, &grid, &sp, exec())?;
    let mut out = Emitter::new(cfg, "design")?;
    out.raw(
        "distribution.json",
        &(outcome.distribution.to_json() + "\n"),
    )?;
    let rows: Vec<_> = outcome
        .log
        .iter()
        .map(|e| {
            vec![
                e.round.to_string(),
                serde_json::to_value(e.step)
                    .map(|v| v.as_str().unwrap_or_default().to_string())
                    .unwrap_or_default(),
                num(e.rate),
                num(e.e_s),
                num(e.e_w),
                e.accepted.to_string(),
            ]
        })
        .collect();
    out.csv(
        "search_log.csv",
        &["round", "step", "rate", "e_s", "e_w", "accepted"],
        &rows,
    )?;
    out.json("design.json", "design", &outcome)?;
    out.finish()?;
    eprintln!(
        "design rate {:.5} after {} rounds (e_s = {:.3e}, e_w = {:.3e})",
        outcome.distribution.design_rate(),
        outcome.rounds,
        outcome.validation.e_s,
        outcome.validation.e_w
    );
    Ok(())
}

#[derive(Serialize)]
struct BoundsOutput {
    beta_tilde: f64,
    alpha: f64,
    c_s: f64,
    c_w: f64,
    selection: Option<wiretap_ldpc::bounds::AsymptoticChoice>,
    reports: Vec<BoundReport>,
}

pub fn cmd_bounds(cfg: &ExperimentConfig) -> Result<()> {
    let b = &cfg.bounds;
    let params = channel(cfg)?;
    let (beta, alpha) = (params.beta_tilde(), params.alpha());
    let c_s = cap_s(beta);
    let c_w = cap_w(beta, alpha)?.value;
    let (dv, dc, r_c, selection) = match b.epsilon {
        Some(eps) => {
            let r_c = b
                .r_c
                .context("bounds.r_c is required with bounds.epsilon")?;
            let ch = select_asymptotic_params(r_c, b.r_k, beta, alpha, eps, b.max_dv)?;
            (ch.d_v, ch.d_c, r_c, Some(ch))
        }
        None => (
            b.dv,
            b.dc,
            b.r_c.unwrap_or(1.0 - b.dv as f64 / b.dc as f64),
            None,
        ),
    };
    if r_c >= c_s {
        bail!("hypothesis R_c < C_s(beta_tilde) violated: R_c = {r_c}, C_s = {c_s}");
    }
    if r_c - b.r_k >= c_w {
        bail!(
            "hypothesis R_c - R_k < C_w(beta_tilde) violated: R_c - R_k = {}, C_w = {c_w}",
            r_c - b.r_k
        );
    }
    let mut reports = Vec::new();
    for &n in &b.n {
        let gamma0 = selection.map_or(0.25, |s| s.gamma);
        let ep = EnsembleParams::new(n, dv, dc, r_c, b.r_k, gamma0)?;
        for side in [Side::Wiretap, Side::Source] {
            reports.push(ml_bound(&ep, side, beta, alpha)?);
        }
    }
    let rows: Vec<_> = reports
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                format!("{:?}", r.side).to_lowercase(),
                num(r.log2_value),
                num(r.value),
                num(r.exponent_rate),
                num(r.exponent),
                num(r.alpha_term),
                num(r.gamma),
            ]
        })
        .collect();
    let mut out = Emitter::new(cfg, "bounds")?;
    out.csv(
        "bounds.csv",
        &[
            "n",
            "side",
            "log2_value",
            "value",
            "exponent_rate",
            "exponent",
            "alpha_term",
            "gamma",
        ],
        &rows,
    )?;
    out.json(
        "bounds.json",
        "bounds",
        &BoundsOutput {
            beta_tilde: beta,
            alpha,
            c_s,
            c_w,
            selection,
            reports,
        },
    )?;
    out.finish()?;
    Ok(())
}
