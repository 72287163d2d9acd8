//! Ensemble-average ML error bounds for regular `(d_v, d_c)` secret-sharing
//! code pairs: weight spectra, Bhattacharyya parameters, random-coding
//! exponents and the combined union / Shulman-Feder bound.
//!
//! Everything is assembled in the `log2` domain; probabilities are only
//! exponentiated when a report is built.

use serde::{Deserialize, Serialize};

use crate::capacity::h2;
use crate::channel::{normal_pdf, q_function};
use crate::error::BoundError;
use crate::quad::{gaussian_cutoff, integrate, QuadOptions};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

/// `log2 C(n, k)` via log-gamma.
pub fn log2_binomial(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    (libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0))
        / std::f64::consts::LN_2
}

/// `log2(2^a + 2^b)` without overflow.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

fn log2_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, log2_add)
}

/// `log2(1 + (1 - 2x)^d)`.
fn log2_one_plus_pow(x: f64, d: u32) -> f64 {
    let base = 1.0 - 2.0 * x;
    (base.powi(d as i32)).ln_1p() / std::f64::consts::LN_2
}

fn check_shape(n: u64, l: u64, d_v: u32, d_c: u32) -> Result<(), BoundError> {
    if n == 0 || d_v == 0 || d_c == 0 {
        return Err(BoundError::Invalid(format!(
            "n={n}, d_v={d_v}, d_c={d_c} must be positive"
        )));
    }
    if l > n {
        return Err(BoundError::Invalid(format!("l={l} exceeds n={n}")));
    }
    Ok(())
}

/// `log2` of the upper bound on `Pr(x in C | w(x) = m)` over the regular ensemble
/// with `n - l` checks. Returns `-inf` when the probability is exactly zero.
pub fn log2_weight_prob_bound(
    n: u64,
    l: u64,
    d_v: u32,
    d_c: u32,
    m: u64,
) -> Result<f64, BoundError> {
    check_shape(n, l, d_v, d_c)?;
    if m == 0 || m > n {
        return Err(BoundError::Invalid(format!("weight m={m} outside 1..={n}")));
    }
    let one_sided = |m: u64| -> f64 {
        if m == 0 {
            return 0.0;
        }
        if (m * d_v as u64) % 2 == 1 {
            return f64::NEG_INFINITY;
        }
        let r = (n - l) as f64;
        let inner = 0.5 * (1.0 + (1.0 - 2.0 * m as f64 / n as f64).powi(d_c as i32));
        let mut best = if inner <= 0.0 {
            f64::NEG_INFINITY
        } else {
            (r * d_c as f64 + 1.0).log2() + r * inner.log2()
        };
        let md = (m * d_v as u64) as f64;
        if md <= 2.0 * r {
            let b = log2_binomial(r, md / 2.0) + md * (md / (2.0 * r)).log2();
            best = best.min(b);
        }
        best.min(0.0)
    };
    let v = one_sided(m);
    if d_c % 2 == 0 {
        Ok(v.min(one_sided(n - m)))
    } else {
        Ok(v)
    }
}

/// Upper bound on `Pr(x in C | w(x) = m)`.
pub fn weight_prob_bound(n: u64, l: u64, d_v: u32, d_c: u32, m: u64) -> Result<f64, BoundError> {
    log2_weight_prob_bound(n, l, d_v, d_c, m).map(f64::exp2)
}

/// `log2((2^(l-k) - 1) / (2^l - 1))`.
pub fn log2_subspace_ratio(l: u64, k: u64) -> Result<f64, BoundError> {
    if k > l {
        return Err(BoundError::Invalid(format!("k={k} exceeds l={l}")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    if k == l {
        return Ok(f64::NEG_INFINITY);
    }
    // log2(2^a - 1) = a + log2(1 - 2^-a)
    let lg = |a: u64| a as f64 + (-(-(a as f64)).exp2()).ln_1p() / std::f64::consts::LN_2;
    Ok(lg(l - k) - lg(l))
}

/// Fraction of `(l-k)`-dimensional subspaces of `GF(2)^l` containing a fixed
/// nonzero vector.
pub fn subspace_ratio(l: u64, k: u64) -> Result<f64, BoundError> {
    log2_subspace_ratio(l, k).map(f64::exp2)
}

/// `log2` bounds on the average spectra `(S_m, T_m)` of `C` and `W`, where `W`
/// is a random `(l-k)`-dimensional subspace of `C`.
pub fn log2_spectra(
    n: u64,
    l: u64,
    k: u64,
    d_v: u32,
    d_c: u32,
    m: u64,
) -> Result<(f64, f64), BoundError> {
    let s = log2_binomial(n as f64, m as f64) + log2_weight_prob_bound(n, l, d_v, d_c, m)?;
    let t = log2_subspace_ratio(l, k)? + s;
    assert!(
        t <= s - k as f64 + 1e-9 || t == f64::NEG_INFINITY,
        "subspace average exceeds 2^-k S_m"
    );
    Ok((s, t))
}

/// `D_s = 2 sqrt(p (1 - p))` with `p = Q(beta_tilde)`.
pub fn bhattacharyya_source(beta_tilde: f64) -> f64 {
    let p = q_function(beta_tilde);
    bhattacharyya_bsc(p)
}

pub fn bhattacharyya_bsc(p: f64) -> f64 {
    2.0 * (p * (1.0 - p)).max(0.0).sqrt()
}

fn mixture(z: f64, g: f64, p: f64) -> (f64, f64) {
    let (a, b) = (normal_pdf(z - g), normal_pdf(z + g));
    ((1.0 - p) * a + p * b, p * a + (1.0 - p) * b)
}

/// `D_w = int sqrt(p(z | +1) p(z | -1)) dz` for the wiretapper's view of `Y~`.
pub fn bhattacharyya_wiretap(beta_tilde: f64, alpha: f64) -> Result<f64, BoundError> {
    if !(beta_tilde >= 0.0 && alpha >= 0.0) {
        return Err(BoundError::Invalid(format!(
            "beta_tilde={beta_tilde}, alpha={alpha}"
        )));
    }
    let p = q_function(beta_tilde);
    let g = alpha * beta_tilde;
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    let r = integrate(
        |z| {
            let (a, b) = mixture(z, g, p);
            (a * b).sqrt()
        },
        0.0,
        gaussian_cutoff(g),
        opts,
    )?;
    Ok((2.0 * r.value).min(1.0))
}

/// Which decoder a bound or exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Wiretap,
}

/// A binary-input symmetric channel given to the exponent routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelSpec {
    /// Hard-decision source channel, a BSC with crossover `p`.
    Bsc { p: f64 },
    /// The wiretapper's channel from `Y~` to `Z`.
    Wiretap { beta_tilde: f64, alpha: f64 },
}

impl ChannelSpec {
    pub fn for_side(side: Side, beta_tilde: f64, alpha: f64) -> Self {
        match side {
            Side::Source => ChannelSpec::Bsc {
                p: q_function(beta_tilde),
            },
            Side::Wiretap => ChannelSpec::Wiretap { beta_tilde, alpha },
        }
    }

    pub fn bhattacharyya(&self) -> Result<f64, BoundError> {
        match *self {
            ChannelSpec::Bsc { p } => Ok(bhattacharyya_bsc(p)),
            ChannelSpec::Wiretap { beta_tilde, alpha } => bhattacharyya_wiretap(beta_tilde, alpha),
        }
    }
}

/// Gallager's `E_0(rho)` with uniform input.
pub fn gallager_e0(channel: &ChannelSpec, rho: f64) -> Result<f64, BoundError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(BoundError::Invalid(format!("rho={rho} outside [0, 1]")));
    }
    let s = 1.0 / (1.0 + rho);
    match *channel {
        ChannelSpec::Bsc { p } => {
            let a = if p > 0.0 { p.powf(s) } else { 0.0 };
            let b = if p < 1.0 { (1.0 - p).powf(s) } else { 0.0 };
            Ok(rho - (1.0 + rho) * (a + b).log2())
        }
        ChannelSpec::Wiretap { beta_tilde, alpha } => {
            let p = q_function(beta_tilde);
            let g = alpha * beta_tilde;
            let r = integrate(
                |z| {
                    let (a, b) = mixture(z, g, p);
                    (0.5 * a.powf(s) + 0.5 * b.powf(s)).powf(1.0 + rho)
                },
                0.0,
                gaussian_cutoff(g),
                quad_opts(),
            )?;
            Ok(-(2.0 * r.value).log2())
        }
    }
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
fn golden_max<F: FnMut(f64) -> Result<f64, BoundError>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64), BoundError> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// `E_r(R) = max_{0 <= rho <= 1} E_0(rho) - rho R`. `E_0` is concave in `rho`.
pub fn random_coding_exponent(channel: &ChannelSpec, rate: f64) -> Result<f64, BoundError> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(BoundError::Invalid(format!("rate={rate}")));
    }
    let mut f = |rho: f64| gallager_e0(channel, rho).map(|e| e - rho * rate);
    let at_one = f(1.0)?;
    let (_, inner) = golden_max(&mut f, 0.0, 1.0, 1e-7)?;
    Ok(inner.max(at_one).max(0.0))
}

/// Shape, rates and the spectrum split point `gamma` of a regular ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: u64,
    pub d_v: u32,
    pub d_c: u32,
    pub r_c: f64,
    pub r_k: f64,
    pub gamma: f64,
    pub beta_bar: f64,
    pub k_tilde: f64,
}

/// `K~ = (6 / d_v) ln(d_v / (1 - R_c))`.
pub fn k_tilde(d_v: u32, r_c: f64) -> f64 {
    6.0 / d_v as f64 * (d_v as f64 / (1.0 - r_c)).ln()
}

/// `beta_bar = (2 (1 - R_c) / d_v) e^(-12 - K~)`.
pub fn beta_bar(d_v: u32, r_c: f64) -> f64 {
    2.0 * (1.0 - r_c) / d_v as f64 * (-12.0 - k_tilde(d_v, r_c)).exp()
}

impl EnsembleParams {
    pub fn new(
        n: u64,
        d_v: u32,
        d_c: u32,
        r_c: f64,
        r_k: f64,
        gamma: f64,
    ) -> Result<Self, BoundError> {
        if n == 0 || d_v == 0 || d_c <= d_v {
            return Err(BoundError::Invalid(format!("n={n}, d_v={d_v}, d_c={d_c}")));
        }
        if !(0.0..1.0).contains(&r_c) || !(0.0..=r_c).contains(&r_k) {
            return Err(BoundError::Invalid(format!("rates r_c={r_c}, r_k={r_k}")));
        }
        if ((d_v as f64 / d_c as f64) - (1.0 - r_c)).abs() > 1e-9 {
            return Err(BoundError::Invalid(format!(
                "d_v/d_c = {d_v}/{d_c} differs from 1 - r_c = {}",
                1.0 - r_c
            )));
        }
        let params = Self {
            n,
            d_v,
            d_c,
            r_c,
            r_k,
            gamma,
            beta_bar: beta_bar(d_v, r_c),
            k_tilde: k_tilde(d_v, r_c),
        };
        params.with_gamma(gamma)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self, BoundError> {
        if !(gamma > self.beta_bar && gamma < 0.5) {
            return Err(BoundError::Invalid(format!(
                "gamma={gamma} must lie in (beta_bar={}, 1/2)",
                self.beta_bar
            )));
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = n;
        self
    }

    /// Design dimension `l = round(n R_c)`.
    pub fn l(&self) -> u64 {
        (self.n as f64 * self.r_c).round() as u64
    }

    pub fn k(&self) -> u64 {
        (self.n as f64 * self.r_k).round() as u64
    }
}

/// One named component of a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub name: String,
    pub log2_value: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub side: Side,
    pub n: u64,
    pub gamma: f64,
    pub bhattacharyya: f64,
    /// Bound on the ensemble-average ML error probability.
    pub value: f64,
    pub log2_value: f64,
    pub terms: Vec<BoundTerm>,
    /// Argument of the random-coding exponent.
    pub exponent_rate: f64,
    pub exponent: f64,
    pub exponent_term: BoundTerm,
    /// `(1/n) log2 alpha`.
    pub alpha_term: f64,
}

fn term(name: &str, log2_value: f64) -> BoundTerm {
    BoundTerm {
        name: name.to_string(),
        log2_value,
        value: log2_value.exp2(),
    }
}

/// Log-spaced plus linear grid over `[lo, hi]`, then golden refinement around
/// the best grid point.
fn grid_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let mut xs = Vec::with_capacity(2 * points + 2);
    let half = points.max(2);
    let (llo, lhi) = (lo.max(1e-300).ln(), hi.ln());
    for i in 0..half {
        let t = i as f64 / (half - 1) as f64;
        xs.push((llo + t * (lhi - llo)).exp().clamp(lo, hi));
        xs.push(lo + t * (hi - lo));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let best = (0..xs.len())
        .max_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap();
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(xs.len() - 1)];
    let (x, v) = golden_max(|x| Ok(f(x)), a, b, 1e-12 * (1.0 + b.abs())).unwrap();
    if v > vals[best] {
        (x, v)
    } else {
        (xs[best], vals[best])
    }
}

/// `H2(x) + (1 - R_c)(log2[1 + (1 - 2x)^d_c] - 1)`, whose maximum over
/// `[beta_bar, gamma]` must be negative for the asymptotic argument.
pub fn spectrum_exponent(x: f64, r_c: f64, d_c: u32) -> f64 {
    h2(x) + (1.0 - r_c) * (log2_one_plus_pow(x, d_c) - 1.0)
}

/// `(1/n) log2 alpha` for either side.
fn alpha_term(p: &EnsembleParams, gamma: f64) -> f64 {
    let n = p.n as f64;
    let r = (p.n - p.l()) as f64;
    (1.0 + (r * p.d_c as f64 + 1.0).log2()) / n + (1.0 - p.r_c) * log2_one_plus_pow(gamma, p.d_c)
}

/// Bound terms for a fixed `gamma`; the Bhattacharyya parameter and the channel
/// are passed in so a gamma scan does not repeat the quadrature.
fn assemble(
    p: &EnsembleParams,
    side: Side,
    channel: &ChannelSpec,
    d: f64,
) -> Result<BoundReport, BoundError> {
    let n = p.n as f64;
    let (d_v, d_c) = (p.d_v as f64, p.d_c as f64);
    let gamma = p.gamma;
    let ld = d.log2();
    // 2^{-n R_k} only on the wiretap side
    let key = match side {
        Side::Wiretap => -(p.k() as f64),
        Side::Source => 0.0,
    };
    let prefix = match side {
        Side::Wiretap => "tau",
        Side::Source => "sigma",
    };
    let name = |i: u32| format!("{prefix}{i}");

    // small-weight term
    let t1 = if d >= 1.0 {
        f64::INFINITY
    } else if p.d_v % 2 == 0 {
        let h = d_v / 2.0;
        key + (1.0 - h) * n.log2() - h * (1.0 - p.r_c).log2() + ld - (1.0 - d).log2()
            + d_v * h.log2()
            - libm::lgamma(h + 1.0) / std::f64::consts::LN_2
    } else {
        key + (2.0 - d_v) * n.log2() - d_v * (1.0 - p.r_c).log2() + 2.0 * ld
            - (2.0 * (1.0 - d * d)).log2()
            + 2.0 * d_v * d_v.log2()
            - libm::lgamma(d_v + 1.0) / std::f64::consts::LN_2
    };

    // moderate-weight term
    let rows = match side {
        Side::Wiretap => (p.n - p.k()) as f64,
        Side::Source => (p.n - p.l()) as f64,
    };
    let g = |x: f64| x * ld + spectrum_exponent(x, p.r_c, p.d_c);
    let (_, gmax) = grid_max(g, p.beta_bar, gamma, 200);
    let t2 = n.log2() + (rows * d_c + 1.0).log2() + key + n * gmax;

    let mut terms = vec![term(&name(1), t1), term(&name(2), t2)];
    if p.d_c % 2 == 0 {
        let t3 = t2 + n * (1.0 - 2.0 * gamma) * ld;
        let t4 = t1 + n * (1.0 - 2.0 * p.beta_bar) * ld;
        let t5 = key + n * ld;
        terms.push(term(&name(3), t3));
        terms.push(term(&name(4), t4));
        terms.push(term(&name(5), t5));
    }

    let a_term = alpha_term(p, gamma);
    let exponent_rate = match side {
        Side::Wiretap => p.r_c - p.r_k + a_term,
        Side::Source => p.r_c + a_term,
    };
    let exponent = random_coding_exponent(channel, exponent_rate)?;
    let exponent_term = term("exponent", -n * exponent);
    let log2_value = log2_add(
        log2_sum(terms.iter().map(|t| t.log2_value)),
        exponent_term.log2_value,
    );
    Ok(BoundReport {
        side,
        n: p.n,
        gamma,
        bhattacharyya: d,
        value: log2_value.exp2(),
        log2_value,
        terms,
        exponent_rate,
        exponent,
        exponent_term,
        alpha_term: a_term,
    })
}

/// Bound at the `gamma` stored in `params`.
pub fn ml_bound_at_gamma(
    params: &EnsembleParams,
    side: Side,
    beta_tilde: f64,
    alpha: f64,
) -> Result<BoundReport, BoundError> {
    let channel = ChannelSpec::for_side(side, beta_tilde, alpha);
    let d = channel.bhattacharyya()?;
    assemble(params, side, &channel, d)
}

/// Number of `gamma` values tried by [`ml_bound`].
pub const GAMMA_GRID: usize = 50;

/// Bound on the ensemble-average ML error of the source (`C`) or wiretapper
/// (`W`) decoder, minimized over a grid of `gamma` in `(beta_bar, 1/2)`.
pub fn ml_bound(
    params: &EnsembleParams,
    side: Side,
    beta_tilde: f64,
    alpha: f64,
) -> Result<BoundReport, BoundError> {
    let channel = ChannelSpec::for_side(side, beta_tilde, alpha);
    let d = channel.bhattacharyya()?;
    let mut best: Option<BoundReport> = None;
    for i in 1..=GAMMA_GRID {
        let gamma = params.beta_bar + (0.5 - params.beta_bar) * i as f64 / (GAMMA_GRID + 1) as f64;
        let p = params.with_gamma(gamma)?;
        let r = assemble(&p, side, &channel, d)?;
        if best.as_ref().is_none_or(|b| r.log2_value < b.log2_value) {
            best = Some(r);
        }
    }
    Ok(best.expect("gamma grid is not empty"))
}

/// Degrees and split point meeting the asymptotic conditions for a given `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticChoice {
    pub d_v: u32,
    pub d_c: u32,
    pub r_c: f64,
    pub r_k: f64,
    pub gamma: f64,
    pub beta_bar: f64,
    pub k_tilde: f64,
    pub epsilon: f64,
    /// Maximum of [`spectrum_exponent`] over `[beta_bar, gamma]`.
    pub negativity_max: f64,
}

impl AsymptoticChoice {
    pub fn params(&self, n: u64) -> Result<EnsembleParams, BoundError> {
        EnsembleParams::new(n, self.d_v, self.d_c, self.r_c, self.r_k, self.gamma)
    }
}

/// Points in the x-grid used for the negativity check.
pub const NEGATIVITY_GRID: usize = 10_000;

/// Maximum of [`spectrum_exponent`] on a grid over `[lo, hi]`.
pub fn spectrum_exponent_max(lo: f64, hi: f64, r_c: f64, d_c: u32, points: usize) -> f64 {
    grid_max(|x| spectrum_exponent(x, r_c, d_c), lo, hi, points / 2).1
}

/// Smallest `d_v` (with `d_c = d_v / (1 - R_c)` integral) for which
/// `K~ < epsilon`, some `gamma > beta_bar` has `log2[1 + (1 - 2 gamma)^d_c] < epsilon`,
/// and the spectrum exponent stays negative on `[beta_bar, gamma]`.
pub fn select_asymptotic_params(
    r_c: f64,
    r_k: f64,
    beta_tilde: f64,
    alpha: f64,
    epsilon: f64,
    max_d_v: u32,
) -> Result<AsymptoticChoice, BoundError> {
    if !(epsilon > 0.0) || !(0.0..1.0).contains(&r_c) || !(0.0..=r_c).contains(&r_k) {
        return Err(BoundError::Invalid(format!(
            "r_c={r_c}, r_k={r_k}, epsilon={epsilon}"
        )));
    }
    let c_s = crate::capacity::cap_s(beta_tilde);
    if r_c >= c_s {
        return Err(BoundError::NoAdmissibleParams(format!(
            "R_c={r_c} is not below C_s={c_s}"
        )));
    }
    let c_w = crate::capacity::cap_w(beta_tilde, alpha)
        .map_err(|e| BoundError::Invalid(e.to_string()))?
        .value;
    if r_c - r_k >= c_w {
        return Err(BoundError::NoAdmissibleParams(format!(
            "R_c - R_k = {} is not below C_w={c_w}",
            r_c - r_k
        )));
    }
    for d_v in 1..=max_d_v {
        let dc = d_v as f64 / (1.0 - r_c);
        let d_c = dc.round();
        if (dc - d_c).abs() > 1e-9 || d_c <= d_v as f64 {
            continue;
        }
        let d_c = d_c as u32;
        let kt = k_tilde(d_v, r_c);
        if kt >= epsilon {
            continue;
        }
        let bb = beta_bar(d_v, r_c);
        // (1 - 2 gamma)^d_c < 2^epsilon - 1 gives the smallest admissible gamma
        let t = epsilon.exp2() - 1.0;
        let gamma = 0.5 * (1.0 - t.powf(1.0 / d_c as f64)) * (1.0 + 1e-9);
        if !(gamma > bb && gamma < 0.5) || log2_one_plus_pow(gamma, d_c) >= epsilon {
            continue;
        }
        let neg = spectrum_exponent_max(bb, gamma, r_c, d_c, NEGATIVITY_GRID);
        if neg < 0.0 {
            return Ok(AsymptoticChoice {
                d_v,
                d_c,
                r_c,
                r_k,
                gamma,
                beta_bar: bb,
                k_tilde: kt,
                epsilon,
                negativity_max: neg,
            });
        }
    }
    Err(BoundError::NoAdmissibleParams(format!(
        "no (d_v, d_c) with d_v <= {max_d_v}"
    )))
}
