//! Length-4 cycle removal by degree-preserving edge swaps.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::TannerGraph;
use crate::error::CodeError;

const MAX_PASSES: usize = 60;
const PARTNER_TRIES: usize = 200;

struct Work {
    var_adj: Vec<Vec<u32>>,
    check_adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    mark: Vec<u32>,
    stamp: u32,
}

fn remove_one(list: &mut Vec<u32>, x: u32) {
    let pos = list.iter().position(|&y| y == x).expect("edge present");
    list.swap_remove(pos);
}

impl Work {
    fn new(g: &TannerGraph) -> Self {
        let mut edges = Vec::with_capacity(g.num_edges());
        for c in 0..g.m() {
            for &v in g.check(c) {
                edges.push((v, c as u32));
            }
        }
        Self {
            var_adj: (0..g.n()).map(|v| g.var(v).to_vec()).collect(),
            check_adj: g.checks().to_vec(),
            edges,
            mark: vec![0; g.n()],
            stamp: 0,
        }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// True if edge `(v, c)` is parallel to another edge or lies on a 4-cycle.
    fn is_bad(&mut self, v: u32, c: u32) -> bool {
        if self.var_adj[v as usize].iter().filter(|&&x| x == c).count() > 1 {
            return true;
        }
        let s = self.next_stamp();
        for &u in &self.check_adj[c as usize] {
            if u != v {
                self.mark[u as usize] = s;
            }
        }
        for &c2 in &self.var_adj[v as usize] {
            if c2 == c {
                continue;
            }
            for &u in &self.check_adj[c2 as usize] {
                if u != v && self.mark[u as usize] == s {
                    return true;
                }
            }
        }
        false
    }

    /// True if adding `(v, c)` creates neither a parallel edge nor a 4-cycle.
    fn can_add(&mut self, v: u32, c: u32) -> bool {
        if self.var_adj[v as usize].contains(&c) {
            return false;
        }
        let s = self.next_stamp();
        for &u in &self.check_adj[c as usize] {
            self.mark[u as usize] = s;
        }
        for &c2 in &self.var_adj[v as usize] {
            for &u in &self.check_adj[c2 as usize] {
                if u != v && self.mark[u as usize] == s {
                    return false;
                }
            }
        }
        true
    }

    fn add(&mut self, v: u32, c: u32) {
        self.var_adj[v as usize].push(c);
        self.check_adj[c as usize].push(v);
    }

    fn remove(&mut self, v: u32, c: u32) {
        remove_one(&mut self.var_adj[v as usize], c);
        remove_one(&mut self.check_adj[c as usize], v);
    }

    fn bad_edges(&mut self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| {
                let (v, c) = self.edges[i];
                self.is_bad(v, c)
            })
            .collect()
    }
}

/// Number of edges that are parallel to another edge or lie on a 4-cycle.
pub fn count_4cycle_edges(g: &TannerGraph) -> usize {
    Work::new(g).bad_edges().len()
}

/// Returns a graph with the same degree sequences and girth at least 6.
pub fn remove_4cycles(g: &TannerGraph, seed: u64) -> Result<TannerGraph, CodeError> {
    let mut w = Work::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ne = w.edges.len();
    for _ in 0..MAX_PASSES {
        let mut bad = w.bad_edges();
        if bad.is_empty() {
            return TannerGraph::from_check_rows(g.n(), w.check_adj);
        }
        bad.shuffle(&mut rng);
        for i in bad {
            let (v1, c1) = w.edges[i];
            if !w.is_bad(v1, c1) {
                continue;
            }
            for _ in 0..PARTNER_TRIES {
                let j = rng.random_range(0..ne);
                let (v2, c2) = w.edges[j];
                if j == i || v2 == v1 || c2 == c1 {
                    continue;
                }
                w.remove(v1, c1);
                w.remove(v2, c2);
                if w.can_add(v1, c2) {
                    w.add(v1, c2);
                    if w.can_add(v2, c1) {
                        w.add(v2, c1);
                        w.edges[i] = (v1, c2);
                        w.edges[j] = (v2, c1);
                        break;
                    }
                    w.remove(v1, c2);
                }
                w.add(v1, c1);
                w.add(v2, c2);
            }
        }
    }
    let remaining = w.bad_edges().len();
    if remaining == 0 {
        return TannerGraph::from_check_rows(g.n(), w.check_adj);
    }
    Err(CodeError::CycleRemoval(remaining))
}
