//! Monte Carlo and direct-evaluation oracles for the channel and capacity layers.

use rand::{Rng, RngExt};
use rand_distr::{Distribution, StandardNormal};

/// Mean and standard error of a sample stream.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
}

impl McEstimate {
    pub fn within(&self, x: f64, sigmas: f64, slack: f64) -> bool {
        (self.mean - x).abs() <= sigmas * self.std_err + slack
    }
}

fn accumulate(draws: u64, mut f: impl FnMut() -> f64) -> McEstimate {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let v = f();
        s += v;
        s2 += v * v;
    }
    let n = draws as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    McEstimate {
        mean,
        std_err: (var / n).sqrt(),
    }
}

fn gauss<R: Rng + ?Sized>(r: &mut R) -> f64 {
    StandardNormal.sample(r)
}

/// Binary entropy evaluated through natural logs.
pub fn h2_direct(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / std::f64::consts::LN_2
}

/// Upper normal tail by composite Simpson on `[x, x + 40]`.
pub fn q_simpson(x: f64) -> f64 {
    let steps = 400_000;
    let h = 40.0 / steps as f64;
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(x) + pdf(x + 40.0);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(x + i as f64 * h);
    }
    s * h / 3.0
}

/// Wiretapper LLR from the two mixture densities written out in full.
pub fn wiretap_llr_direct(z: f64, beta: f64, alpha: f64) -> f64 {
    let p = q_simpson(beta);
    let g = alpha * beta;
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let plus = (1.0 - p) * phi(z - g) + p * phi(z + g);
    let minus = p * phi(z - g) + (1.0 - p) * phi(z + g);
    (plus / minus).ln()
}

/// `I(Y~; Z) = 1 - E[h2(P(Y~ = +1 | Z))]` by simulation.
pub fn cap_w_mc<R: Rng + ?Sized>(beta: f64, alpha: f64, draws: u64, r: &mut R) -> McEstimate {
    let p = q_simpson(beta);
    let g = alpha * beta;
    accumulate(draws, || {
        let yq: f64 = if r.random::<bool>() { 1.0 } else { -1.0 };
        let x = if r.random::<f64>() < p { -yq } else { yq };
        let z = g * x + gauss(r);
        let fp =
            (1.0 - p) * (-0.5 * (z - g) * (z - g)).exp() + p * (-0.5 * (z + g) * (z + g)).exp();
        let fm =
            p * (-0.5 * (z - g) * (z - g)).exp() + (1.0 - p) * (-0.5 * (z + g) * (z + g)).exp();
        1.0 - h2_direct(fp / (fp + fm))
    })
}

/// `I(X; Y) - I(Y; Z) = H(X | Z) - H(X | Y, Z)` for the unquantized receiver,
/// from posterior entropies of simulated observations.
pub fn unquantized_gap_mc<R: Rng + ?Sized>(
    beta: f64,
    alpha: f64,
    draws: u64,
    r: &mut R,
) -> McEstimate {
    let post = |llr: f64| 1.0 / (1.0 + (-llr).exp());
    accumulate(draws, || {
        let x: f64 = if r.random::<bool>() { 1.0 } else { -1.0 };
        let y = beta * x + gauss(r);
        let z = alpha * beta * x + gauss(r);
        let lz = 2.0 * alpha * beta * z;
        let lyz = lz + 2.0 * beta * y;
        h2_direct(post(lz)) - h2_direct(post(lyz))
    })
}

/// Bhattacharyya parameter of the wiretapper's channel as `E[sqrt(f(Z|-1) / f(Z|+1))]`
/// under `Y~ = +1`.
pub fn bhattacharyya_wiretap_mc<R: Rng + ?Sized>(
    beta: f64,
    alpha: f64,
    draws: u64,
    r: &mut R,
) -> McEstimate {
    let p = q_simpson(beta);
    let g = alpha * beta;
    accumulate(draws, || {
        let x = if r.random::<f64>() < p { -1.0 } else { 1.0 };
        let z = g * x + gauss(r);
        let fp =
            (1.0 - p) * (-0.5 * (z - g) * (z - g)).exp() + p * (-0.5 * (z + g) * (z + g)).exp();
        let fm =
            p * (-0.5 * (z - g) * (z - g)).exp() + (1.0 - p) * (-0.5 * (z + g) * (z + g)).exp();
        (fm / fp).sqrt()
    })
}
