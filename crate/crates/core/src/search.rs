//! Linear-programming search for irregular degree distributions that raise the
//! code rate while both the source and the wiretapper decoders still reach a
//! target error probability under density evolution.

use std::collections::BTreeMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::density::{de_iterate, DeGrid, DeOptions, LlrDensity};
use crate::error::DesignError;
use crate::exec::{join, Execution};
use crate::ldpc::DegreeDistribution;

/// Message densities entering the two decoders.
#[derive(Debug, Clone)]
pub struct DesignChannels {
    pub source: LlrDensity,
    pub wiretap: LlrDensity,
}

impl DesignChannels {
    /// Source BSC and the wiretapper's mixture with `r_k` pinned mass.
    pub fn new(params: &ChannelParams, r_k: f64, grid: &DeGrid) -> Result<Self, DesignError> {
        Ok(Self {
            source: LlrDensity::bsc(params.crossover(), grid)?,
            wiretap: LlrDensity::wiretap(params, r_k, grid)?,
        })
    }
}

/// Per-iteration, per-degree error probabilities of one DE run.
///
/// `rows[l - 1][i]` is the error after `l` iterations when the last variable
/// update uses a single node degree `degrees[i]`; `errors[l]` is the actual
/// error after `l` iterations (`errors[0]` is the channel error).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationMatrix {
    pub degrees: Vec<u32>,
    pub rows: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
}

impl PerturbationMatrix {
    pub fn iterations(&self) -> usize {
        self.rows.len()
    }

    /// `sum_j rows[l - 1][j] lambda_j`.
    pub fn predict(&self, l: usize, lambda: &BTreeMap<u32, f64>) -> f64 {
        self.degrees
            .iter()
            .zip(&self.rows[l - 1])
            .map(|(d, a)| a * lambda.get(d).copied().unwrap_or(0.0))
            .sum()
    }

    fn from_trace(
        dist: &DegreeDistribution,
        channel: &LlrDensity,
        grid: &DeGrid,
        iterations: usize,
        max_degree: u32,
    ) -> Result<Self, DesignError> {
        if iterations == 0 {
            return Err(DesignError::Invalid(
                "iteration count must be positive".into(),
            ));
        }
        let t = de_iterate(
            dist,
            channel,
            grid,
            DeOptions {
                iterations,
                record_degree: max_degree,
                bit_error: false,
            },
        )?;
        let degrees: Vec<u32> = (2..=max_degree).collect();
        let rows = t
            .per_degree_error
            .iter()
            .map(|e| degrees.iter().map(|d| e[d]).collect())
            .collect();
        Ok(Self {
            degrees,
            rows,
            errors: t.message_error,
        })
    }
}

/// Builds the source (`A`) and wiretapper (`B`) matrices for degrees
/// `2..=max_degree` by replaying DE of `dist`.
pub fn build_perturbation_matrices(
    dist: &DegreeDistribution,
    channels: &DesignChannels,
    grid: &DeGrid,
    m_s: usize,
    m_w: usize,
    max_degree: u32,
    exec: Execution,
) -> Result<(PerturbationMatrix, PerturbationMatrix), DesignError> {
    if max_degree < dist.max_var_degree() || max_degree < 2 {
        return Err(DesignError::Invalid(format!(
            "max degree {max_degree} below the distribution's {}",
            dist.max_var_degree()
        )));
    }
    let (a, b) = join(
        exec,
        || PerturbationMatrix::from_trace(dist, &channels.source, grid, m_s, max_degree),
        || PerturbationMatrix::from_trace(dist, &channels.wiretap, grid, m_w, max_degree),
    );
    Ok((a?, b?))
}

fn add_band_constraints(
    lp: &mut Problem,
    vars: &[minilp::Variable],
    m: &PerturbationMatrix,
    delta: f64,
) {
    for l in 1..=m.iterations() {
        let (prev, cur) = (m.errors[l - 1], m.errors[l]);
        // rows are scaled by the previous error to keep the simplex well conditioned
        let scale = if prev > 0.0 { 1.0 / prev } else { 1.0 };
        let expr: Vec<(minilp::Variable, f64)> = vars
            .iter()
            .zip(&m.rows[l - 1])
            .map(|(&v, &a)| (v, a * scale))
            .collect();
        let band = (delta * (prev - cur)).max(0.0);
        lp.add_constraint(
            expr.as_slice(),
            ComparisonOp::Le,
            (cur + band).min(prev) * scale,
        );
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, (cur - band) * scale);
    }
}

/// Maximizes `sum_j lambda_j / j` over the linearized feasible region around
/// the distribution that produced `a` and `b`.
pub fn solve_lambda_lp(
    a: &PerturbationMatrix,
    b: &PerturbationMatrix,
    delta: f64,
) -> Result<BTreeMap<u32, f64>, DesignError> {
    if a.degrees != b.degrees {
        return Err(DesignError::Invalid(
            "matrices use different degree sets".into(),
        ));
    }
    if !(delta >= 0.0) {
        return Err(DesignError::Invalid(format!("delta={delta}")));
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = a
        .degrees
        .iter()
        .map(|&d| lp.add_var(1.0 / d as f64, (0.0, 1.0)))
        .collect();
    let ones: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    add_band_constraints(&mut lp, &vars, a, delta);
    add_band_constraints(&mut lp, &vars, b, delta);
    let sol = lp.solve().map_err(|e| match e {
        minilp::Error::Infeasible => DesignError::LpInfeasible,
        minilp::Error::Unbounded => DesignError::LpUnbounded,
    })?;
    let mut out: BTreeMap<u32, f64> = BTreeMap::new();
    for (&d, &v) in a.degrees.iter().zip(&vars) {
        let x = *sol.var_value(v);
        if x > 1e-12 {
            out.insert(d, x);
        }
    }
    let total: f64 = out.values().sum();
    out.values_mut().for_each(|x| *x /= total);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Target error probability after the last DE iteration.
    pub eps: f64,
    pub m_s: usize,
    pub m_w: usize,
    pub delta: f64,
    pub max_rounds: usize,
    /// Largest variable degree the LP may use; defaults to the initial maximum.
    pub max_var_degree: Option<u32>,
    /// Alternate with a check-degree line search.
    pub rho_step: bool,
    /// Bisection steps of the check-degree line search.
    pub rho_bisections: usize,
    /// Stop when the rate gain of a round falls below this.
    pub rate_tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            m_s: 100,
            m_w: 100,
            delta: 0.5,
            max_rounds: 50,
            max_var_degree: None,
            rho_step: true,
            rho_bisections: 8,
            rate_tol: 1e-6,
        }
    }
}

/// Outcome of validating a distribution by a fresh DE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub e_s: f64,
    pub e_w: f64,
    pub feasible: bool,
}

pub fn validate(
    dist: &DegreeDistribution,
    channels: &DesignChannels,
    grid: &DeGrid,
    params: &SearchParams,
    exec: Execution,
) -> Result<Validation, DesignError> {
    let run = |ch: &LlrDensity, it: usize| {
        de_iterate(
            dist,
            ch,
            grid,
            DeOptions {
                iterations: it,
                record_degree: 0,
                bit_error: false,
            },
        )
        .map(|t| t.final_error())
    };
    let (e_s, e_w) = join(
        exec,
        || run(&channels.source, params.m_s),
        || run(&channels.wiretap, params.m_w),
    );
    let (e_s, e_w) = (e_s?, e_w?);
    Ok(Validation {
        e_s,
        e_w,
        feasible: e_s <= params.eps && e_w <= params.eps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Initial,
    Lambda,
    Rho,
}

/// One line of the search log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchLogEntry {
    pub round: usize,
    pub step: Step,
    pub rate: f64,
    pub e_s: f64,
    pub e_w: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub distribution: DegreeDistribution,
    pub validation: Validation,
    pub rounds: usize,
    pub log: Vec<SearchLogEntry>,
}

/// Check distribution on degrees `d` and `d + 1` with `sum rho_i / i = s`.
pub fn two_degree_rho(s: f64) -> Result<BTreeMap<u32, f64>, DesignError> {
    if !(s > 0.0 && s <= 0.5) {
        return Err(DesignError::Invalid(format!(
            "rho integral {s} outside (0, 1/2]"
        )));
    }
    let d = (1.0 / s).floor().max(2.0);
    let (hi, lo) = (1.0 / d, 1.0 / (d + 1.0));
    let theta = ((s - lo) / (hi - lo)).clamp(0.0, 1.0);
    let d = d as u32;
    let mut rho = BTreeMap::new();
    if theta > 0.0 {
        rho.insert(d, theta);
    }
    if theta < 1.0 {
        rho.insert(d + 1, 1.0 - theta);
    }
    Ok(rho)
}

/// Lowers `sum rho_i / i` by bisection while DE stays feasible.
fn rho_line_search(
    dist: &DegreeDistribution,
    channels: &DesignChannels,
    grid: &DeGrid,
    params: &SearchParams,
    exec: Execution,
) -> Result<Option<(DegreeDistribution, Validation)>, DesignError> {
    let s0 = dist.rho_integral();
    // never go below the rate-1 limit of the current lambda
    let floor = (s0 * 0.5).max(1e-3);
    let (mut ok, mut bad) = (s0, floor);
    let mut best = None;
    let cand = |s: f64| -> Result<(DegreeDistribution, Validation), DesignError> {
        let d = dist.with_rho(two_degree_rho(s)?)?;
        let v = validate(&d, channels, grid, params, exec)?;
        Ok((d, v))
    };
    let (d_bad, v_bad) = cand(bad)?;
    if v_bad.feasible {
        return Ok(Some((d_bad, v_bad)));
    }
    for _ in 0..params.rho_bisections {
        let mid = 0.5 * (ok + bad);
        let (d, v) = cand(mid)?;
        if v.feasible {
            ok = mid;
            best = Some((d, v));
        } else {
            bad = mid;
        }
    }
    Ok(best)
}

/// Alternating lambda-LP / rho line-search rounds starting from `initial`.
///
/// Returns the highest-rate distribution whose fresh DE run meets `eps` on
/// both channels.
pub fn search(
    initial: &DegreeDistribution,
    channels: &DesignChannels,
    grid: &DeGrid,
    params: &SearchParams,
    exec: Execution,
) -> Result<SearchOutcome, DesignError> {
    let v0 = validate(initial, channels, grid, params, exec)?;
    if v0.e_s > params.eps {
        return Err(DesignError::InitialInfeasible("source"));
    }
    if v0.e_w > params.eps {
        return Err(DesignError::InitialInfeasible("wiretap"));
    }
    let max_degree = params
        .max_var_degree
        .unwrap_or(initial.max_var_degree())
        .max(initial.max_var_degree());
    let mut best = initial.clone();
    let mut best_v = v0;
    let mut log = vec![SearchLogEntry {
        round: 0,
        step: Step::Initial,
        rate: initial.design_rate(),
        e_s: v0.e_s,
        e_w: v0.e_w,
        accepted: true,
    }];
    let mut rounds = 0;
    for round in 1..=params.max_rounds {
        rounds = round;
        let start_rate = best.design_rate();
        let (a, b) = build_perturbation_matrices(
            &best, channels, grid, params.m_s, params.m_w, max_degree, exec,
        )?;
        let mut improved = false;
        match solve_lambda_lp(&a, &b, params.delta) {
            Ok(lambda) => {
                let cand = best.with_lambda(lambda)?;
                let v = validate(&cand, channels, grid, params, exec)?;
                let rate = cand.design_rate();
                let accepted = v.feasible && rate > best.design_rate();
                log.push(SearchLogEntry {
                    round,
                    step: Step::Lambda,
                    rate,
                    e_s: v.e_s,
                    e_w: v.e_w,
                    accepted,
                });
                if accepted {
                    improved = rate - start_rate > params.rate_tol;
                    best = cand;
                    best_v = v;
                } else if !v.feasible {
                    break;
                }
            }
            Err(DesignError::LpInfeasible) | Err(DesignError::LpUnbounded) => break,
            Err(e) => return Err(e),
        }
        if params.rho_step {
            if let Some((cand, v)) = rho_line_search(&best, channels, grid, params, exec)? {
                let rate = cand.design_rate();
                let accepted = rate > best.design_rate() + params.rate_tol;
                log.push(SearchLogEntry {
                    round,
                    step: Step::Rho,
                    rate,
                    e_s: v.e_s,
                    e_w: v.e_w,
                    accepted,
                });
                if accepted {
                    improved = true;
                    best = cand;
                    best_v = v;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(SearchOutcome {
        distribution: best,
        validation: best_v,
        rounds,
        log,
    })
}
