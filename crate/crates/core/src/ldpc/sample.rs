//! Random ensemble sampling by socket matching.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::degree::DegreeDistribution;
use super::graph::TannerGraph;
use crate::error::CodeError;

/// Samples a `(dv, dc)`-regular graph on `n` variables.
pub fn sample_regular(n: usize, dv: usize, dc: usize, seed: u64) -> Result<TannerGraph, CodeError> {
    if n == 0 || dv == 0 || dc == 0 {
        return Err(CodeError::InvalidDegrees(format!(
            "n = {n}, dv = {dv}, dc = {dc}"
        )));
    }
    if (n * dv) % dc != 0 {
        return Err(CodeError::InvalidDegrees(format!(
            "n * dv = {} not divisible by dc = {dc}",
            n * dv
        )));
    }
    let m = n * dv / dc;
    match_sockets(&vec![dv; n], &vec![dc; m], seed)
}

/// Like [`sample_regular`], but when `n * dv` is not a multiple of `dc` the
/// leftover sockets raise the degree of that many checks to `dc + 1`.
pub fn sample_near_regular(
    n: usize,
    dv: usize,
    dc: usize,
    seed: u64,
) -> Result<TannerGraph, CodeError> {
    if n == 0 || dv == 0 || dc == 0 || n * dv < dc {
        return Err(CodeError::InvalidDegrees(format!(
            "n = {n}, dv = {dv}, dc = {dc}"
        )));
    }
    let m = n * dv / dc;
    let extra = n * dv % dc;
    let mut check_deg = vec![dc; m];
    for d in check_deg.iter_mut().take(extra) {
        *d += 1;
    }
    match_sockets(&vec![dv; n], &check_deg, seed)
}

/// Samples a graph whose node-degree counts follow `dist` up to rounding:
/// every count is within one node of its exact value `n * L_i` (variables) or
/// `E * rho_i / i` (checks), with the total edge count matching on both sides.
pub fn sample_irregular(
    n: usize,
    dist: &DegreeDistribution,
    seed: u64,
) -> Result<TannerGraph, CodeError> {
    if n == 0 {
        return Err(CodeError::InvalidDegrees("n = 0".into()));
    }
    dist.validate()?;
    let (var_counts, check_counts) = degree_counts(n, dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut var_deg: Vec<usize> = expand(&var_counts);
    let mut check_deg: Vec<usize> = expand(&check_counts);
    var_deg.shuffle(&mut rng);
    check_deg.shuffle(&mut rng);
    match_sockets(&var_deg, &check_deg, seed ^ 0x9e37_79b9_7f4a_7c15)
}

fn expand(counts: &BTreeMap<u32, usize>) -> Vec<usize> {
    counts
        .iter()
        .flat_map(|(&d, &c)| std::iter::repeat(d as usize).take(c))
        .collect()
}

/// Per-degree node counts for a length-`n` code.
pub fn degree_counts(
    n: usize,
    dist: &DegreeDistribution,
) -> Result<(BTreeMap<u32, usize>, BTreeMap<u32, usize>), CodeError> {
    let vf = dist.var_node_fractions();
    let exact: Vec<(u32, f64)> = vf.iter().map(|(&d, &f)| (d, f * n as f64)).collect();
    let base = largest_remainder(&exact, n);
    if let Some(c) = check_counts_for(&base, dist) {
        return Ok((base, c));
    }
    // move one node between a rounded-up and a rounded-down degree
    let up: Vec<u32> = exact
        .iter()
        .filter(|(d, x)| base[d] as f64 > *x)
        .map(|p| p.0)
        .collect();
    let down: Vec<u32> = exact
        .iter()
        .filter(|(d, x)| (base[d] as f64) < *x)
        .map(|p| p.0)
        .collect();
    for &a in &up {
        for &b in &down {
            let mut alt = base.clone();
            *alt.get_mut(&a).expect("present") -= 1;
            *alt.get_mut(&b).expect("present") += 1;
            if let Some(c) = check_counts_for(&alt, dist) {
                return Ok((alt, c));
            }
        }
    }
    Err(CodeError::InfeasibleRounding(format!(
        "no check-degree rounding matches {} edges",
        base.iter().map(|(&d, &c)| d as usize * c).sum::<usize>()
    )))
}

fn largest_remainder(exact: &[(u32, f64)], total: usize) -> BTreeMap<u32, usize> {
    let mut counts: BTreeMap<u32, usize> = exact
        .iter()
        .map(|&(d, x)| (d, x.floor() as usize))
        .collect();
    let assigned: usize = counts.values().sum();
    let mut order: Vec<(u32, f64)> = exact.iter().map(|&(d, x)| (d, x - x.floor())).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (d, _) in order.into_iter().take(total.saturating_sub(assigned)) {
        *counts.get_mut(&d).expect("present") += 1;
    }
    counts
}

/// Chooses check counts `c_i in {floor(y_i), ceil(y_i)}` with `sum i c_i = E`
/// by subset sum over the degrees with fractional `y_i`.
fn check_counts_for(
    var_counts: &BTreeMap<u32, usize>,
    dist: &DegreeDistribution,
) -> Option<BTreeMap<u32, usize>> {
    let edges: usize = var_counts.iter().map(|(&d, &c)| d as usize * c).sum();
    let exact: Vec<(u32, f64)> = dist
        .rho()
        .iter()
        .map(|(&d, &f)| (d, edges as f64 * f / d as f64))
        .collect();
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    let mut floor_edges = 0usize;
    let mut frac_degrees = Vec::new();
    for &(d, y) in &exact {
        let mut f = y.floor();
        // treat values within rounding noise of an integer as integral
        if (y - y.round()).abs() < 1e-9 {
            f = y.round();
        } else {
            frac_degrees.push(d as usize);
        }
        counts.insert(d, f as usize);
        floor_edges += d as usize * f as usize;
    }
    if floor_edges > edges {
        return None;
    }
    let target = edges - floor_edges;
    // reach[s] = Some(index of last degree used) for reachable sums
    let mut reach: Vec<Option<Vec<usize>>> = vec![None; target + 1];
    reach[0] = Some(Vec::new());
    for &d in &frac_degrees {
        for s in (d..=target).rev() {
            if reach[s].is_none() {
                if let Some(prev) = &reach[s - d] {
                    let mut v = prev.clone();
                    v.push(d);
                    reach[s] = Some(v);
                }
            }
        }
    }
    let chosen = reach[target].take()?;
    for d in chosen {
        *counts.get_mut(&(d as u32)).expect("present") += 1;
    }
    Some(counts.into_iter().filter(|&(_, c)| c > 0).collect())
}

/// Connects variable and check sockets through a uniformly random permutation.
fn match_sockets(
    var_deg: &[usize],
    check_deg: &[usize],
    seed: u64,
) -> Result<TannerGraph, CodeError> {
    let ev: usize = var_deg.iter().sum();
    let ec: usize = check_deg.iter().sum();
    if ev != ec {
        return Err(CodeError::InfeasibleRounding(format!(
            "{ev} variable sockets vs {ec} check sockets"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check_sockets: Vec<u32> = Vec::with_capacity(ec);
    for (c, &d) in check_deg.iter().enumerate() {
        check_sockets.extend(std::iter::repeat(c as u32).take(d));
    }
    check_sockets.shuffle(&mut rng);
    let mut rows = vec![Vec::new(); check_deg.len()];
    let mut s = 0;
    for (v, &d) in var_deg.iter().enumerate() {
        for _ in 0..d {
            rows[check_sockets[s] as usize].push(v as u32);
            s += 1;
        }
    }
    TannerGraph::from_check_rows(var_deg.len(), rows)
}
