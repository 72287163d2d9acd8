//! BPSK-constrained Gaussian wiretap channel in noise-normalized units.
//!
//! Bits map to symbols as `0 -> +1`, `1 -> -1`. The legitimate receiver sees
//! `Y = beta_tilde * X + N` and the wiretapper `Z = alpha * beta_tilde * X + N'`
//! with independent standard Gaussian noise.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;

/// Channel parameters. `snr_max` is the linear power ceiling `P/sigma^2`,
/// `beta_tilde` must satisfy `0 <= beta_tilde <= sqrt(snr_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    snr_max: f64,
    alpha: f64,
    beta_tilde: f64,
}

impl ChannelParams {
    pub fn new(snr_max: f64, alpha: f64, beta_tilde: f64) -> Result<Self, ChannelError> {
        if !snr_max.is_finite() || snr_max < 0.0 {
            return Err(ChannelError::InvalidSnr(snr_max));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(ChannelError::InvalidAlpha(alpha));
        }
        let beta_max = snr_max.sqrt();
        // tolerate rounding when beta_tilde was derived from snr_max
        if !beta_tilde.is_finite() || beta_tilde < 0.0 || beta_tilde > beta_max * (1.0 + 1e-12) {
            return Err(ChannelError::InvalidBeta {
                beta_tilde,
                beta_max,
            });
        }
        Ok(Self {
            snr_max,
            alpha,
            beta_tilde: beta_tilde.min(beta_max),
        })
    }

    /// Parameters operating at full power, `beta_tilde = sqrt(snr_max)`.
    pub fn at_full_power(snr_max: f64, alpha: f64) -> Result<Self, ChannelError> {
        Self::new(snr_max, alpha, snr_max.max(0.0).sqrt())
    }

    pub fn with_beta(&self, beta_tilde: f64) -> Result<Self, ChannelError> {
        Self::new(self.snr_max, self.alpha, beta_tilde)
    }

    pub fn snr_max(&self) -> f64 {
        self.snr_max
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta_tilde(&self) -> f64 {
        self.beta_tilde
    }

    pub fn beta_max(&self) -> f64 {
        self.snr_max.sqrt()
    }

    /// Crossover probability of the hard-decision source channel.
    pub fn crossover(&self) -> f64 {
        q_function(self.beta_tilde)
    }

    /// Amplitude seen by the wiretapper, `alpha * beta_tilde`.
    pub fn wiretap_gain(&self) -> f64 {
        self.alpha * self.beta_tilde
    }
}

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Gaussian tail probability `Q(x) = P(N > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Binary word, one bit per byte (values 0 or 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BpskWord(Vec<u8>);

impl BpskWord {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Builds a word from bits; any nonzero byte is read as 1.
    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        Self(bits.into_iter().map(|b| (b != 0) as u8).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut bits = Vec::with_capacity(n);
        while bits.len() < n {
            let w = rng.next_u64();
            for i in 0..64.min(n - bits.len()) {
                bits.push(((w >> i) & 1) as u8);
            }
        }
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn bits_mut(&mut self) -> &mut [u8] {
        &mut self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    /// BPSK symbol of position `i`.
    pub fn symbol(&self, i: usize) -> f64 {
        1.0 - 2.0 * self.0[i] as f64
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b != 0).count()
    }

    pub fn xor(&self, other: &BpskWord) -> BpskWord {
        assert_eq!(self.len(), other.len(), "word length mismatch");
        BpskWord(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    pub fn xor_assign(&mut self, other: &BpskWord) {
        assert_eq!(self.len(), other.len(), "word length mismatch");
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// Real-valued channel output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealWord(pub Vec<f64>);

impl RealWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Source of standard Gaussian samples. Tests use [`ZeroNoise`] to obtain
/// deterministic outputs.
pub trait NoiseSource {
    fn next_gaussian(&mut self) -> f64;
}

pub struct GaussianNoise<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> NoiseSource for GaussianNoise<'_, R> {
    fn next_gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut *self.0)
    }
}

pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn next_gaussian(&mut self) -> f64 {
        0.0
    }
}

/// Sends `x` over both branches. Noise is drawn as `N_1, N'_1, N_2, N'_2, ...`.
pub fn transmit<S: NoiseSource + ?Sized>(
    x: &BpskWord,
    params: &ChannelParams,
    noise: &mut S,
) -> Result<(RealWord, RealWord), ChannelError> {
    if x.is_empty() {
        return Err(ChannelError::EmptyWord);
    }
    let b = params.beta_tilde();
    let ab = params.wiretap_gain();
    let mut y = Vec::with_capacity(x.len());
    let mut z = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let s = x.symbol(i);
        y.push(b * s + noise.next_gaussian());
        z.push(ab * s + noise.next_gaussian());
    }
    Ok((RealWord(y), RealWord(z)))
}

/// Hard decision `sgn(y)` with ties resolved to bit 0 (symbol +1).
pub fn quantize(y: &RealWord) -> BpskWord {
    BpskWord(y.0.iter().map(|&v| (v < 0.0) as u8).collect())
}

/// Crossover probability `Q(beta_tilde)` of the hard-decision channel.
pub fn source_crossover(params: &ChannelParams) -> f64 {
    params.crossover()
}

/// LLR `ln P(z | Y~ = +1) / P(z | Y~ = -1)` of the wiretapper's view of the
/// quantized symbol.
pub fn wiretap_llr(z: f64, params: &ChannelParams) -> f64 {
    wiretap_llr_raw(z, params.wiretap_gain(), params.crossover())
}

/// Same as [`wiretap_llr`] with explicit gain `alpha * beta_tilde` and crossover `p`.
///
/// Evaluated on `|z|` and sign-restored, so antisymmetry holds exactly.
pub fn wiretap_llr_raw(z: f64, gain: f64, p: f64) -> f64 {
    let t = 2.0 * gain * z.abs();
    let e = (-t).exp();
    let num = (1.0 - p) + p * e;
    let den = p + (1.0 - p) * e;
    let v = num.ln() - den.ln();
    if z < 0.0 {
        -v
    } else {
        v
    }
}
