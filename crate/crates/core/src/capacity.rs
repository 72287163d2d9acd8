//! Secret-key capacities of the BPSK Gaussian wiretap model, with and without
//! hard-decision quantization at the legitimate receiver.

use serde::{Deserialize, Serialize};

use crate::channel::{normal_pdf, q_function};
use crate::error::{CapacityError, QuadError};
use crate::quad::{gaussian_cutoff, integrate, QuadOptions};

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> Result<f64, CapacityError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(CapacityError::InvalidProbability(p));
    }
    Ok(h2(p))
}

pub(crate) fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// A quadrature-based value with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// Capacity `1 - h2(Q(beta_tilde))` of the hard-decision source channel.
pub fn cap_s(beta_tilde: f64) -> f64 {
    1.0 - h2(q_function(beta_tilde))
}

/// Mutual information between the quantized output `Y~` and the wiretapper's `Z`.
pub fn cap_w(beta_tilde: f64, alpha: f64) -> Result<Estimate, CapacityError> {
    if !beta_tilde.is_finite() || beta_tilde < 0.0 {
        return Err(CapacityError::InvalidProbability(beta_tilde));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(crate::error::ChannelError::InvalidAlpha(alpha).into());
    }
    let q = q_function(beta_tilde);
    let g = alpha * beta_tilde;
    let r = integrate(
        |z| {
            let e = (-2.0 * g * z).exp();
            h2((q + (1.0 - q) * e) / (1.0 + e)) * (1.0 + e) * normal_pdf(z - g)
        },
        0.0,
        gaussian_cutoff(g),
        opts(),
    )?;
    Ok(Estimate {
        value: 1.0 - r.value,
        abs_error: r.abs_error,
    })
}

/// `J1 = H(X | Y)` for the unquantized BPSK-AWGN channel, so `1 - J1 = I(X; Y)`.
pub fn j1(beta_tilde: f64) -> Result<Estimate, CapacityError> {
    let b = beta_tilde;
    let r = integrate(
        |y| {
            let a = (-2.0 * b * y).exp();
            h2(1.0 / (1.0 + a)) * (1.0 + a) * normal_pdf(y - b)
        },
        0.0,
        gaussian_cutoff(b),
        opts(),
    )?;
    Ok(Estimate {
        value: r.value,
        abs_error: r.abs_error,
    })
}

/// `J2 = H(X | Y, Z)`; `J2 - J1 = I(X; Y) - I(Y; Z)`.
pub fn j2(beta_tilde: f64, alpha: f64) -> Result<Estimate, CapacityError> {
    let b = beta_tilde;
    let g = alpha * beta_tilde;
    let tz = gaussian_cutoff(g);
    let inner_opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 2000,
    };
    let mut inner_err = 0.0;
    let mut failure: Option<QuadError> = None;
    let outer = integrate(
        |y| {
            let a = (-2.0 * b * y).exp();
            let py = normal_pdf(y - b);
            match integrate(
                |z| {
                    let bb = (-2.0 * g * z).exp();
                    let w = (1.0 + a) * (1.0 + bb);
                    h2((1.0 + a * bb) / w) * w * normal_pdf(z - g)
                },
                0.0,
                tz,
                inner_opts,
            ) {
                Ok(r) => {
                    inner_err += r.abs_error * py;
                    r.value * py
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        gaussian_cutoff(b),
        opts(),
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(Estimate {
        value: outer.value,
        abs_error: outer.abs_error + inner_err,
    })
}

/// Maximized relaxed capacity with the maximizing `beta_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub value: f64,
    pub argmax_beta_tilde: f64,
    /// Quadrature error estimate at the maximizer.
    pub abs_error: f64,
}

const GRID: usize = 200;
const DENSE_GRID: usize = 2000;

/// Maximizes `f` on `[0, hi]`: a coarse grid, then golden-section refinement
/// around the best grid point. If the grid is not unimodal the coarse grid is
/// replaced by a dense one. Ties go to the smallest argument.
fn maximize<F>(mut f: F, hi: f64) -> Result<(f64, f64, f64), CapacityError>
where
    F: FnMut(f64) -> Result<Estimate, CapacityError>,
{
    if hi == 0.0 {
        let e = f(0.0)?;
        return Ok((e.value, 0.0, e.abs_error));
    }
    let scan = |f: &mut F, npts: usize| -> Result<Vec<(f64, Estimate)>, CapacityError> {
        (0..=npts)
            .map(|i| {
                let x = hi * i as f64 / npts as f64;
                f(x).map(|e| (x, e))
            })
            .collect()
    };
    let mut pts = scan(&mut f, GRID)?;
    if !unimodal(&pts) {
        pts = scan(&mut f, DENSE_GRID)?;
    }
    let mut best = 0;
    for (i, p) in pts.iter().enumerate() {
        if p.1.value > pts[best].1.value + 1e-13 {
            best = i;
        }
    }
    let lo = pts[best.saturating_sub(1)].0;
    let up = pts[(best + 1).min(pts.len() - 1)].0;
    let (mut bx, mut be) = (pts[best].0, pts[best].1);
    // golden section on [lo, up]
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, up);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > 1e-9 {
        if fc.value >= fd.value {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d)?;
        }
    }
    for (x, e) in [(c, fc), (d, fd)] {
        if e.value > be.value + 1e-13 {
            bx = x;
            be = e;
        }
    }
    Ok((be.value, bx, be.abs_error))
}

fn unimodal(pts: &[(f64, Estimate)]) -> bool {
    let tol = 1e-12;
    let mut descending = false;
    for w in pts.windows(2) {
        let d = w[1].1.value - w[0].1.value;
        if descending {
            if d > tol {
                return false;
            }
        } else if d < -tol {
            descending = true;
        }
    }
    true
}

fn check_inputs(r_l: f64, snr_max: f64, alpha: f64) -> Result<(), CapacityError> {
    if !r_l.is_finite() || r_l < 0.0 {
        return Err(CapacityError::InvalidLeakage(r_l));
    }
    crate::channel::ChannelParams::new(snr_max, alpha, 0.0)?;
    Ok(())
}

/// `C_bq(R_l)`: maximum over `beta_tilde <= sqrt(snr_max)` of
/// `min(C_s - C_w + R_l, C_s)` for the hard-decision receiver.
pub fn relaxed_capacity_quantized(
    r_l: f64,
    snr_max: f64,
    alpha: f64,
) -> Result<CapacityResult, CapacityError> {
    check_inputs(r_l, snr_max, alpha)?;
    let (value, arg, err) = maximize(
        |b| {
            let cs = cap_s(b);
            let cw = cap_w(b, alpha)?;
            Ok(Estimate {
                value: (cs - cw.value + r_l).min(cs),
                abs_error: cw.abs_error,
            })
        },
        snr_max.sqrt(),
    )?;
    Ok(CapacityResult {
        value,
        argmax_beta_tilde: arg,
        abs_error: err,
    })
}

/// `C_b(R_l)`: maximum over `beta_tilde` of `min(J2 + R_l, 1) - J1` for the
/// unquantized receiver.
pub fn relaxed_capacity_unquantized(
    r_l: f64,
    snr_max: f64,
    alpha: f64,
) -> Result<CapacityResult, CapacityError> {
    check_inputs(r_l, snr_max, alpha)?;
    let (value, arg, err) = maximize(
        |b| {
            let a = j1(b)?;
            let c = j2(b, alpha)?;
            Ok(Estimate {
                value: (c.value + r_l).min(1.0) - a.value,
                abs_error: a.abs_error + c.abs_error,
            })
        },
        snr_max.sqrt(),
    )?;
    Ok(CapacityResult {
        value,
        argmax_beta_tilde: arg,
        abs_error: err,
    })
}
