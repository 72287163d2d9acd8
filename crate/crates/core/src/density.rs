//! Discretized density evolution for LDPC ensembles on symmetric channels.
//!
//! Densities live on the LLR grid `{i * delta : -M <= i <= M}`, `delta = S / M`,
//! plus atoms at `±inf`. Variable-node convolutions use the FFT and clip
//! overflow into the boundary bins; check-node combinations use an exact
//! quantized pairwise table of `a ⊞ b = 2 atanh(tanh(a/2) tanh(b/2))`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::channel::{q_function, wiretap_llr_raw, ChannelParams};
use crate::error::DesignError;
use crate::ldpc::DegreeDistribution;

pub const DEFAULT_LLR_SPAN: f64 = 25.0;
pub const DEFAULT_INTERVALS: usize = 1 << 13;

/// Grid geometry plus cached FFT plans and the check-node table.
pub struct DeGrid {
    half: usize,
    delta: f64,
    fft_len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `table[s][j - s]` = quantized `s ⊞ j` for `s <= j < window[s]`.
    table: Vec<Vec<u32>>,
    window: Vec<usize>,
}

impl std::fmt::Debug for DeGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeGrid")
            .field("half", &self.half)
            .field("delta", &self.delta)
            .finish()
    }
}

/// `a ⊞ b` for `a, b >= 0`, in a form that keeps precision for large inputs.
pub fn boxplus_mag(a: f64, b: f64) -> f64 {
    a.min(b) + (-(a + b)).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

impl DeGrid {
    /// Grid over `[-span, span]` split into `intervals` (even) intervals.
    pub fn new(span: f64, intervals: usize) -> Result<Self, DesignError> {
        if !(span.is_finite() && span > 0.0) || intervals < 4 || intervals % 2 != 0 {
            return Err(DesignError::Invalid(format!(
                "grid span {span}, intervals {intervals}"
            )));
        }
        let half = intervals / 2;
        let delta = span / half as f64;
        let fft_len = (4 * half).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(fft_len);
        let inv = planner.plan_fft_inverse(fft_len);
        let mut table = Vec::with_capacity(half + 1);
        let mut window = Vec::with_capacity(half + 1);
        table.push(Vec::new());
        window.push(0);
        for s in 1..=half {
            let a = s as f64 * delta;
            let mut row = Vec::new();
            let mut j = s;
            while j <= half {
                let t = (boxplus_mag(a, j as f64 * delta) / delta).round() as usize;
                if t >= s {
                    break;
                }
                row.push(t as u32);
                j += 1;
            }
            window.push(j);
            table.push(row);
        }
        Ok(Self {
            half,
            delta,
            fft_len,
            fwd,
            inv,
            table,
            window,
        })
    }

    pub fn default_grid() -> Self {
        Self::new(DEFAULT_LLR_SPAN, DEFAULT_INTERVALS).expect("default grid is valid")
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn bin_of(&self, llr: f64) -> usize {
        let i = (llr / self.delta).round();
        (i.clamp(-(self.half as f64), self.half as f64) + self.half as f64) as usize
    }

    /// Variable-node convolution of two densities.
    pub fn convolve(&self, a: &LlrDensity, b: &LlrDensity) -> LlrDensity {
        let fb = self.spectrum(b);
        self.convolve_spectrum(a, b, &fb)
    }

    fn spectrum(&self, d: &LlrDensity) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        for (i, &m) in d.mass.iter().enumerate() {
            buf[i].re = m;
        }
        self.fwd.process(&mut buf);
        buf
    }

    fn convolve_spectrum(&self, a: &LlrDensity, b: &LlrDensity, fb: &[Complex64]) -> LlrDensity {
        let m = self.half;
        let mut buf = self.spectrum(a);
        for (x, y) in buf.iter_mut().zip(fb) {
            *x *= y;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.fft_len as f64;
        let mut out = vec![0.0; 2 * m + 1];
        let top = a.mass[2 * m] * b.mass[2 * m];
        for (k, c) in buf.iter().enumerate().take((4 * m + 1).min(self.fft_len)) {
            let mut v = c.re * scale;
            if k == 0 && self.fft_len == 4 * m {
                // sum index 4m wraps onto 0
                v -= top;
            }
            let v = v.max(0.0);
            let idx = (k as isize - m as isize).clamp(0, 2 * m as isize) as usize;
            out[idx] += v;
        }
        if self.fft_len == 4 * m {
            out[2 * m] += top;
        }
        let (af, bf) = (a.finite_mass(), b.finite_mass());
        // clipping negative round-off adds mass; without this the excess
        // compounds over repeated high-degree convolutions
        renormalize(&mut out, af * bf);
        let mut r = LlrDensity {
            half: m,
            delta: self.delta,
            mass: out,
            pos_inf: a.pos_inf * (bf + b.pos_inf) + af * b.pos_inf,
            neg_inf: a.neg_inf * (bf + b.neg_inf) + af * b.neg_inf,
        };
        r.mass[m] += a.pos_inf * b.neg_inf + a.neg_inf * b.pos_inf;
        r
    }

    /// Check-node combination `a ⊞ b` of two densities.
    pub fn boxplus(&self, a: &LlrDensity, b: &LlrDensity) -> LlrDensity {
        let m = self.half;
        let split = |d: &LlrDensity| {
            let mut p = vec![0.0; m + 2];
            let mut n = vec![0.0; m + 2];
            for s in 1..=m {
                p[s] = d.mass[m + s];
                n[s] = d.mass[m - s];
            }
            p[m + 1] = d.pos_inf;
            n[m + 1] = d.neg_inf;
            (p, n)
        };
        let (ap, an) = split(a);
        let (bp, bn) = split(b);
        let suffix = |v: &[f64]| {
            let mut s = vec![0.0; m + 3];
            for i in (1..=m).rev() {
                s[i] = s[i + 1] + v[i];
            }
            s
        };
        let (sap, san, sbp, sbn) = (suffix(&ap), suffix(&an), suffix(&bp), suffix(&bn));
        let mut same = vec![0.0; m + 1];
        let mut diff = vec![0.0; m + 1];
        for s in 1..=m {
            let w = self.window[s];
            let row = &self.table[s];
            // a at s, b at j >= s
            let (p, q) = (ap[s], an[s]);
            if p != 0.0 || q != 0.0 {
                for (off, &t) in row.iter().enumerate() {
                    let j = s + off;
                    same[t as usize] += p * bp[j] + q * bn[j];
                    diff[t as usize] += p * bn[j] + q * bp[j];
                }
                same[s] += p * (sbp[w] + bp[m + 1]) + q * (sbn[w] + bn[m + 1]);
                diff[s] += p * (sbn[w] + bn[m + 1]) + q * (sbp[w] + bp[m + 1]);
            }
            // b at s, a at i > s
            let (p, q) = (bp[s], bn[s]);
            if p != 0.0 || q != 0.0 {
                for (off, &t) in row.iter().enumerate().skip(1) {
                    let i = s + off;
                    same[t as usize] += p * ap[i] + q * an[i];
                    diff[t as usize] += p * an[i] + q * ap[i];
                }
                let w2 = w.max(s + 1);
                same[s] += p * (sap[w2] + ap[m + 1]) + q * (san[w2] + an[m + 1]);
                diff[s] += p * (san[w2] + an[m + 1]) + q * (sap[w2] + ap[m + 1]);
            }
        }
        let mut out = vec![0.0; 2 * m + 1];
        out[m] = same[0] + diff[0];
        for t in 1..=m {
            out[m + t] = same[t];
            out[m - t] = diff[t];
        }
        // zero atoms absorb; inf ⊞ inf stays inf
        let (a0, b0) = (a.mass[m], b.mass[m]);
        out[m] += a0 * (b.total() - b0) + b0 * a.total();
        let inf = (a.pos_inf + a.neg_inf) * (b.pos_inf + b.neg_inf);
        renormalize(&mut out, a.total() * b.total() - inf);
        LlrDensity {
            half: m,
            delta: self.delta,
            mass: out,
            pos_inf: a.pos_inf * b.pos_inf + a.neg_inf * b.neg_inf,
            neg_inf: a.pos_inf * b.neg_inf + a.neg_inf * b.pos_inf,
        }
    }
}

fn renormalize(mass: &mut [f64], target: f64) {
    let sum: f64 = mass.iter().sum();
    if sum > 0.0 && target > 0.0 {
        let f = target / sum;
        mass.iter_mut().for_each(|x| *x *= f);
    }
}

/// Probability distribution of a message LLR (conditioned on bit 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrDensity {
    half: usize,
    delta: f64,
    mass: Vec<f64>,
    pos_inf: f64,
    neg_inf: f64,
}

impl LlrDensity {
    pub fn zero_llr(grid: &DeGrid) -> Self {
        let mut d = Self::empty(grid);
        d.mass[grid.half] = 1.0;
        d
    }

    fn empty(grid: &DeGrid) -> Self {
        Self {
            half: grid.half,
            delta: grid.delta,
            mass: vec![0.0; 2 * grid.half + 1],
            pos_inf: 0.0,
            neg_inf: 0.0,
        }
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64, grid: &DeGrid) -> Result<Self, DesignError> {
        if !(0.0..=0.5).contains(&p) {
            return Err(DesignError::Invalid(format!("crossover {p}")));
        }
        let mut d = Self::empty(grid);
        if p == 0.0 {
            d.pos_inf = 1.0;
            return Ok(d);
        }
        let l = ((1.0 - p) / p).ln();
        d.mass[grid.bin_of(l)] += 1.0 - p;
        d.mass[grid.bin_of(-l)] += p;
        Ok(d)
    }

    /// BPSK over AWGN with amplitude `beta` and unit noise: LLR ~ N(2b^2, 4b^2).
    pub fn bpsk_awgn(beta: f64, grid: &DeGrid) -> Result<Self, DesignError> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(DesignError::Invalid(format!("amplitude {beta}")));
        }
        if beta == 0.0 {
            return Ok(Self::zero_llr(grid));
        }
        let (mu, sd) = (2.0 * beta * beta, 2.0 * beta);
        Ok(Self::from_cdf(grid, |x| 1.0 - q_function((x - mu) / sd)))
    }

    /// Wiretapper's view of `Y~` (crossover `Q(beta)`, gain `alpha beta`), with a
    /// fraction `pinned` of positions known exactly.
    pub fn wiretap(
        params: &ChannelParams,
        pinned: f64,
        grid: &DeGrid,
    ) -> Result<Self, DesignError> {
        if !(0.0..=1.0).contains(&pinned) {
            return Err(DesignError::Invalid(format!("pinned fraction {pinned}")));
        }
        let g = params.wiretap_gain();
        let p = params.crossover();
        let mut d = if g == 0.0 || p >= 0.5 {
            Self::zero_llr(grid)
        } else {
            // the LLR is increasing in z; pull bin edges back to z by bisection
            let cap = ((1.0 - p) / p).ln();
            let z_of = |x: f64| -> f64 {
                if x >= cap {
                    return f64::INFINITY;
                }
                if x <= -cap {
                    return f64::NEG_INFINITY;
                }
                let (mut lo, mut hi) = (-1.0, 1.0);
                while wiretap_llr_raw(lo, g, p) > x {
                    lo *= 2.0;
                }
                while wiretap_llr_raw(hi, g, p) < x {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if wiretap_llr_raw(mid, g, p) < x {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            let zcdf = |z: f64| -> f64 {
                if z == f64::INFINITY {
                    1.0
                } else if z == f64::NEG_INFINITY {
                    0.0
                } else {
                    (1.0 - p) * (1.0 - q_function(z - g)) + p * (1.0 - q_function(z + g))
                }
            };
            Self::from_cdf(grid, |x| zcdf(z_of(x)))
        };
        d.scale(1.0 - pinned);
        d.pos_inf += pinned;
        Ok(d)
    }

    /// Bins a continuous distribution given its CDF; bin `i` collects
    /// `[(i - 1/2) delta, (i + 1/2) delta)`, boundary bins take the tails.
    fn from_cdf<F: Fn(f64) -> f64>(grid: &DeGrid, cdf: F) -> Self {
        let m = grid.half as isize;
        let mut d = Self::empty(grid);
        let mut prev = 0.0;
        for i in -m..=m {
            let upper = if i == m {
                1.0
            } else {
                cdf((i as f64 + 0.5) * grid.delta)
            };
            d.mass[(i + m) as usize] = (upper - prev).max(0.0);
            prev = upper.max(prev);
        }
        d
    }

    fn scale(&mut self, f: f64) {
        self.mass.iter_mut().for_each(|m| *m *= f);
        self.pos_inf *= f;
        self.neg_inf *= f;
    }

    /// Rescales the finite masses so the total is exactly 1.
    pub fn normalize(&mut self) {
        renormalize(&mut self.mass, 1.0 - self.pos_inf - self.neg_inf);
    }

    fn add_scaled(&mut self, other: &LlrDensity, f: f64) {
        for (a, b) in self.mass.iter_mut().zip(&other.mass) {
            *a += f * b;
        }
        self.pos_inf += f * other.pos_inf;
        self.neg_inf += f * other.neg_inf;
    }

    pub fn finite_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.finite_mass() + self.pos_inf + self.neg_inf
    }

    pub fn pos_inf(&self) -> f64 {
        self.pos_inf
    }

    /// Mass at each grid point, from `-M delta` to `M delta`.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// `P(L < 0) + P(L = 0) / 2`.
    pub fn error_probability(&self) -> f64 {
        let m = self.half;
        self.mass[..m].iter().sum::<f64>() + 0.5 * self.mass[m] + self.neg_inf
    }

    /// Mean of the finite part, `sum x P(x)`.
    pub fn finite_mean(&self) -> f64 {
        let m = self.half as f64;
        self.mass
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as f64 - m) * self.delta * p)
            .sum()
    }
}

/// Density evolution trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeTrace {
    /// `e(0..=L)`: error of the variable-to-check message, `e(0)` = channel.
    pub message_error: Vec<f64>,
    /// Error of the a-posteriori decision after each iteration (index 0 = channel).
    pub bit_error: Vec<f64>,
    /// `a[l-1][j]`: message error of a degree-`j` variable at iteration `l`
    /// (`err(channel ⊗ c_l^{⊗(j-1)})`), for every degree up to the maximum.
    pub per_degree_error: Vec<BTreeMap<u32, f64>>,
}

impl DeTrace {
    pub fn final_error(&self) -> f64 {
        *self.message_error.last().expect("non-empty trace")
    }
}

/// Options for [`de_iterate`].
#[derive(Debug, Clone, Copy)]
pub struct DeOptions {
    pub iterations: usize,
    /// Degrees up to this value are recorded in `per_degree_error` (at least
    /// the maximum degree of the distribution).
    pub record_degree: u32,
    /// Also compute the a-posteriori decision error.
    pub bit_error: bool,
}

/// Runs `opts.iterations` rounds of density evolution.
pub fn de_iterate(
    dist: &DegreeDistribution,
    channel: &LlrDensity,
    grid: &DeGrid,
    opts: DeOptions,
) -> Result<DeTrace, DesignError> {
    if channel.half != grid.half {
        return Err(DesignError::Invalid(
            "channel density built on a different grid".into(),
        ));
    }
    let dmax = dist.max_var_degree().max(opts.record_degree);
    let top = if opts.bit_error { dmax + 1 } else { dmax };
    let node_frac = dist.var_node_fractions();
    let mut msg = channel.clone();
    let mut message_error = vec![channel.error_probability()];
    let mut bit_error = vec![channel.error_probability()];
    let mut per_degree_error = Vec::with_capacity(opts.iterations);
    for _ in 0..opts.iterations {
        let mut c = check_output(dist, &msg, grid);
        // totals drift by round-off, and the drift is amplified by the degree
        // powers every iteration
        c.normalize();
        let fc = grid.spectrum(&c);
        let mut power = channel.clone();
        let mut next = LlrDensity::empty(grid);
        let mut errs = BTreeMap::new();
        let mut bit = 0.0;
        for j in 1..=top {
            if j > 1 {
                power = grid.convolve_spectrum(&power, &c, &fc);
            }
            if j <= dmax {
                errs.insert(j, power.error_probability());
                if let Some(&lam) = dist.lambda().get(&j) {
                    next.add_scaled(&power, lam);
                }
            }
            if opts.bit_error && j >= 2 {
                if let Some(&f) = node_frac.get(&(j - 1)) {
                    bit += f * power.error_probability();
                }
            }
        }
        next.normalize();
        msg = next;
        message_error.push(msg.error_probability());
        bit_error.push(if opts.bit_error { bit } else { f64::NAN });
        per_degree_error.push(errs);
    }
    Ok(DeTrace {
        message_error,
        bit_error,
        per_degree_error,
    })
}

/// Check-node output density `sum_d rho_d (m^{⊞(d-1)})`.
fn check_output(dist: &DegreeDistribution, m: &LlrDensity, grid: &DeGrid) -> LlrDensity {
    let dmax = dist.max_check_degree();
    let mut out = LlrDensity::empty(grid);
    // degree-1 checks force the bit to zero
    let mut acc = LlrDensity::empty(grid);
    acc.pos_inf = 1.0;
    for d in 1..=dmax {
        if d > 1 {
            acc = if d == 2 {
                m.clone()
            } else {
                grid.boxplus(&acc, m)
            };
        }
        if let Some(&r) = dist.rho().get(&d) {
            out.add_scaled(&acc, r);
        }
    }
    out
}

/// True if the message error falls to `eps` within `iterations`; stops early.
pub fn de_converges(
    dist: &DegreeDistribution,
    channel: &LlrDensity,
    grid: &DeGrid,
    iterations: usize,
    eps: f64,
) -> Result<bool, DesignError> {
    if channel.half != grid.half {
        return Err(DesignError::Invalid(
            "channel density built on a different grid".into(),
        ));
    }
    let mut msg = channel.clone();
    for _ in 0..iterations {
        if msg.error_probability() <= eps {
            return Ok(true);
        }
        let mut c = check_output(dist, &msg, grid);
        c.normalize();
        let fc = grid.spectrum(&c);
        let mut power = channel.clone();
        let mut next = LlrDensity::empty(grid);
        for j in 1..=dist.max_var_degree() {
            if j > 1 {
                power = grid.convolve_spectrum(&power, &c, &fc);
            }
            if let Some(&lam) = dist.lambda().get(&j) {
                next.add_scaled(&power, lam);
            }
        }
        next.normalize();
        msg = next;
    }
    Ok(msg.error_probability() <= eps)
}

/// Largest BSC crossover for which DE reaches `eps` in `iterations`, by bisection
/// to `tol`.
pub fn bsc_threshold(
    dist: &DegreeDistribution,
    grid: &DeGrid,
    iterations: usize,
    eps: f64,
    tol: f64,
) -> Result<f64, DesignError> {
    let (mut lo, mut hi) = (0.0, 0.5);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if de_converges(dist, &LlrDensity::bsc(mid, grid)?, grid, iterations, eps)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
