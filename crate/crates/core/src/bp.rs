//! Flooding sum-product decoding with optional syndrome targets and pinned
//! (known) positions.

use crate::channel::{wiretap_llr, BpskWord, ChannelParams, RealWord};
use crate::error::DecodeError;
use crate::ldpc::{KeyMap, SecretSharingCode, TannerGraph};

/// Magnitude cap for all messages.
pub const LLR_MAX: f64 = 30.0;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Edge layout of a Tanner graph, check-major.
#[derive(Debug, Clone)]
pub struct DecoderGraph {
    n: usize,
    check_start: Vec<u32>,
    edge_var: Vec<u32>,
    var_start: Vec<u32>,
    var_edges: Vec<u32>,
}

impl DecoderGraph {
    pub fn new(g: &TannerGraph) -> Self {
        let n = g.n();
        let mut check_start = Vec::with_capacity(g.m() + 1);
        let mut edge_var = Vec::with_capacity(g.num_edges());
        check_start.push(0);
        for c in 0..g.m() {
            edge_var.extend_from_slice(g.check(c));
            check_start.push(edge_var.len() as u32);
        }
        let mut var_start = vec![0u32; n + 1];
        for &v in &edge_var {
            var_start[v as usize + 1] += 1;
        }
        for v in 0..n {
            var_start[v + 1] += var_start[v];
        }
        let mut fill = var_start.clone();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize] as usize] = e as u32;
            fill[v as usize] += 1;
        }
        Self {
            n,
            check_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.check_start.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Variable attached to edge `e` (edges are grouped by check).
    pub fn edge_var(&self) -> &[u32] {
        &self.edge_var
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BpOptions {
    pub max_iter: usize,
    /// Stop as soon as the hard decision satisfies every check.
    pub early_stop: bool,
}

impl Default for BpOptions {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            early_stop: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub word: BpskWord,
    pub converged: bool,
    pub iterations_used: usize,
    /// A-posteriori LLRs after the last iteration.
    pub posterior: Vec<f64>,
}

/// Reusable message buffers.
#[derive(Debug, Default, Clone)]
pub struct BpWorkspace {
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    post: Vec<f64>,
    hard: Vec<u8>,
    tbuf: Vec<f64>,
}

impl BpWorkspace {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Snapshot passed to a decoding observer after each iteration.
pub struct IterationView<'a> {
    pub iteration: usize,
    pub posterior: &'a [f64],
    /// Variable-to-check messages, indexed like [`DecoderGraph::edge_var`].
    pub v2c: &'a [f64],
}

#[inline]
fn clamp(x: f64) -> f64 {
    x.clamp(-LLR_MAX, LLR_MAX)
}

/// `tanh(|x| / 2)` computed through `expm1` to keep relative accuracy near 0.
#[inline]
fn half_tanh_abs(x: f64) -> f64 {
    let e = (-x.abs()).exp_m1();
    -e / (2.0 + e)
}

/// `2 atanh(p)` for `p` in `[0, 1)`.
#[inline]
fn two_atanh(p: f64) -> f64 {
    (2.0 * p / (1.0 - p)).ln_1p()
}

/// Runs sum-product decoding on `graph`.
///
/// `llr` are intrinsic LLRs (`ln P(0)/P(1)`); `±inf` pins a position. If
/// `target` is given, check `c` must have parity `target[c]`.
pub fn decode(
    graph: &DecoderGraph,
    llr: &[f64],
    target: Option<&[u8]>,
    opts: BpOptions,
    ws: &mut BpWorkspace,
    mut observer: Option<&mut dyn FnMut(&IterationView)>,
) -> Result<DecodeResult, DecodeError> {
    let n = graph.n;
    if llr.len() != n {
        return Err(DecodeError::LengthMismatch {
            expected: n,
            got: llr.len(),
        });
    }
    if let Some(i) = llr.iter().position(|x| x.is_nan()) {
        return Err(DecodeError::NonFiniteLlr(i));
    }
    if let Some(t) = target {
        if t.len() != graph.m() {
            return Err(DecodeError::LengthMismatch {
                expected: graph.m(),
                got: t.len(),
            });
        }
    }
    if opts.max_iter == 0 {
        return Err(DecodeError::ZeroIterations);
    }
    let ne = graph.num_edges();
    ws.v2c.clear();
    ws.v2c
        .extend(graph.edge_var.iter().map(|&v| clamp(llr[v as usize])));
    ws.c2v.clear();
    ws.c2v.resize(ne, 0.0);
    ws.post.clear();
    ws.post.extend_from_slice(llr);
    ws.hard.clear();
    ws.hard.extend(llr.iter().map(|&x| (x < 0.0) as u8));

    let satisfied = |hard: &[u8]| -> bool {
        (0..graph.m()).all(|c| {
            let (a, b) = (
                graph.check_start[c] as usize,
                graph.check_start[c + 1] as usize,
            );
            let par = graph.edge_var[a..b]
                .iter()
                .fold(0u8, |p, &v| p ^ hard[v as usize]);
            par == target.map_or(0, |t| t[c] & 1)
        })
    };

    let mut converged = opts.early_stop && satisfied(&ws.hard);
    let mut iters = 0;
    while !converged && iters < opts.max_iter {
        iters += 1;
        // check update
        for c in 0..graph.m() {
            let (a, b) = (
                graph.check_start[c] as usize,
                graph.check_start[c + 1] as usize,
            );
            let deg = b - a;
            let mut neg = target.is_some_and(|t| t[c] & 1 == 1);
            ws.tbuf.clear();
            for e in a..b {
                let m = ws.v2c[e];
                neg ^= m < 0.0;
                ws.tbuf.push(half_tanh_abs(m));
            }
            // prefix products in c2v, suffix folded in on the way back
            let mut pre = 1.0;
            for i in 0..deg {
                ws.c2v[a + i] = pre;
                pre *= ws.tbuf[i];
            }
            let mut suf = 1.0;
            for i in (0..deg).rev() {
                let prod = ws.c2v[a + i] * suf;
                suf *= ws.tbuf[i];
                let sign_flip = neg ^ (ws.v2c[a + i] < 0.0);
                let mag = two_atanh(prod).min(LLR_MAX);
                ws.c2v[a + i] = if sign_flip { -mag } else { mag };
            }
        }
        // variable update
        for v in 0..n {
            let (a, b) = (graph.var_start[v] as usize, graph.var_start[v + 1] as usize);
            let mut total = llr[v];
            for &e in &graph.var_edges[a..b] {
                total += ws.c2v[e as usize];
            }
            for &e in &graph.var_edges[a..b] {
                let e = e as usize;
                ws.v2c[e] = clamp(total - ws.c2v[e]);
            }
            ws.post[v] = total;
            ws.hard[v] = (total < 0.0) as u8;
        }
        if let Some(obs) = observer.as_deref_mut() {
            obs(&IterationView {
                iteration: iters,
                posterior: &ws.post,
                v2c: &ws.v2c,
            });
        }
        if opts.early_stop {
            converged = satisfied(&ws.hard);
        }
    }
    if !opts.early_stop {
        converged = satisfied(&ws.hard);
    }
    Ok(DecodeResult {
        word: BpskWord::from_bits(ws.hard.iter().copied()),
        converged,
        iterations_used: iters,
        posterior: ws.post.clone(),
    })
}

/// Intrinsic LLRs of the legitimate receiver: `r = x xor e_s` observed through
/// a BSC with crossover `Q(beta_tilde)`.
pub fn source_llrs(
    x_bits: &BpskWord,
    e_s: &BpskWord,
    beta_tilde: f64,
) -> Result<Vec<f64>, DecodeError> {
    if x_bits.len() != e_s.len() {
        return Err(DecodeError::LengthMismatch {
            expected: x_bits.len(),
            got: e_s.len(),
        });
    }
    let p = crate::channel::q_function(beta_tilde);
    let l = ((1.0 - p) / p).ln();
    Ok(x_bits
        .bits()
        .iter()
        .zip(e_s.bits())
        .map(|(&x, &e)| if x ^ e == 0 { l } else { -l })
        .collect())
}

/// Intrinsic LLRs of the wiretapper for `X_0 = Y~ xor e_s`, with key
/// positions pinned for the systematic key map.
pub fn wiretap_llrs(
    code: &SecretSharingCode,
    z: &RealWord,
    e_s: &BpskWord,
    key_bits: &[u8],
    params: &ChannelParams,
) -> Result<Vec<f64>, DecodeError> {
    let n = code.n();
    if z.len() != n {
        return Err(DecodeError::LengthMismatch {
            expected: n,
            got: z.len(),
        });
    }
    if e_s.len() != n {
        return Err(DecodeError::LengthMismatch {
            expected: n,
            got: e_s.len(),
        });
    }
    let mut llr: Vec<f64> = z
        .values()
        .iter()
        .zip(e_s.bits())
        .map(|(&zi, &e)| {
            let l = wiretap_llr(zi, params);
            if e == 0 {
                l
            } else {
                -l
            }
        })
        .collect();
    match code.key_map() {
        KeyMap::Systematic => {
            let pos = code.key_positions();
            if key_bits.len() != pos.len() {
                return Err(DecodeError::KeyLength {
                    expected: pos.len(),
                    got: key_bits.len(),
                });
            }
            for (&p, &b) in pos.iter().zip(key_bits) {
                llr[p as usize] = if b & 1 == 0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                };
            }
        }
        KeyMap::Syndrome { extra, .. } => {
            if key_bits.len() != extra.m() {
                return Err(DecodeError::KeyLength {
                    expected: extra.m(),
                    got: key_bits.len(),
                });
            }
        }
    }
    Ok(llr)
}

/// Decoder graph and syndrome target the wiretapper uses for `code`.
pub fn wiretap_target(code: &SecretSharingCode, key_bits: &[u8]) -> Option<Vec<u8>> {
    match code.key_map() {
        KeyMap::Systematic => None,
        KeyMap::Syndrome { stacked, extra } => {
            let mut t = vec![0u8; stacked.m() - extra.m()];
            t.extend_from_slice(key_bits);
            Some(t)
        }
    }
}

/// Legitimate receiver's estimate of `X_0` from its own word and `E_S`.
pub fn decode_source(
    code: &SecretSharingCode,
    x_bits: &BpskWord,
    e_s: &BpskWord,
    beta_tilde: f64,
    max_iter: usize,
) -> Result<DecodeResult, DecodeError> {
    if x_bits.len() != code.n() {
        return Err(DecodeError::LengthMismatch {
            expected: code.n(),
            got: x_bits.len(),
        });
    }
    let llr = source_llrs(x_bits, e_s, beta_tilde)?;
    let g = DecoderGraph::new(code.graph());
    decode(
        &g,
        &llr,
        None,
        BpOptions {
            max_iter,
            early_stop: true,
        },
        &mut BpWorkspace::new(),
        None,
    )
}

/// Wiretapper's estimate of `X_0` from `Z`, `E_S` and the true key.
pub fn decode_wiretapper(
    code: &SecretSharingCode,
    z: &RealWord,
    e_s: &BpskWord,
    key_bits: &[u8],
    params: &ChannelParams,
    max_iter: usize,
) -> Result<DecodeResult, DecodeError> {
    let llr = wiretap_llrs(code, z, e_s, key_bits, params)?;
    let target = wiretap_target(code, key_bits);
    let g = match code.key_map() {
        KeyMap::Systematic => DecoderGraph::new(code.graph()),
        KeyMap::Syndrome { stacked, .. } => DecoderGraph::new(stacked),
    };
    decode(
        &g,
        &llr,
        target.as_deref(),
        BpOptions {
            max_iter,
            early_stop: true,
        },
        &mut BpWorkspace::new(),
        None,
    )
}
