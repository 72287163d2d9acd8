use serde::{Deserialize, Serialize};

use crate::error::CodeError;

/// Bipartite Tanner graph of a parity-check matrix. Parallel edges are kept,
/// so the structure can hold multigraphs produced by socket matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TannerGraph {
    n: usize,
    check_adj: Vec<Vec<u32>>,
    var_adj: Vec<Vec<u32>>,
}

impl TannerGraph {
    /// Builds a graph from the variable lists of each check row.
    pub fn from_check_rows(n: usize, rows: Vec<Vec<u32>>) -> Result<Self, CodeError> {
        let mut var_adj = vec![Vec::new(); n];
        for (c, row) in rows.iter().enumerate() {
            for &v in row {
                if v as usize >= n {
                    return Err(CodeError::InvalidDegrees(format!(
                        "check {c} references variable {v} >= n = {n}"
                    )));
                }
                var_adj[v as usize].push(c as u32);
            }
        }
        let mut check_adj = rows;
        for r in &mut check_adj {
            r.sort_unstable();
        }
        for a in &mut var_adj {
            a.sort_unstable();
        }
        Ok(Self {
            n,
            check_adj,
            var_adj,
        })
    }

    pub fn from_edges(n: usize, m: usize, edges: &[(u32, u32)]) -> Result<Self, CodeError> {
        let mut rows = vec![Vec::new(); m];
        for &(v, c) in edges {
            if c as usize >= m {
                return Err(CodeError::InvalidDegrees(format!(
                    "check index {c} >= m = {m}"
                )));
            }
            rows[c as usize].push(v);
        }
        Self::from_check_rows(n, rows)
    }

    /// Builds a graph from a dense 0/1 matrix given row by row.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self, CodeError> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(CodeError::InvalidDegrees("ragged dense matrix".into()));
        }
        let sparse = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(i, _)| i as u32)
                    .collect()
            })
            .collect();
        Self::from_check_rows(n, sparse)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.check_adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.check_adj.iter().map(Vec::len).sum()
    }

    pub fn check(&self, c: usize) -> &[u32] {
        &self.check_adj[c]
    }

    pub fn var(&self, v: usize) -> &[u32] {
        &self.var_adj[v]
    }

    pub fn checks(&self) -> &[Vec<u32>] {
        &self.check_adj
    }

    pub fn var_degrees(&self) -> Vec<usize> {
        self.var_adj.iter().map(Vec::len).collect()
    }

    pub fn check_degrees(&self) -> Vec<usize> {
        self.check_adj.iter().map(Vec::len).collect()
    }

    /// `1 - m/n`, ignoring possible row dependencies.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.m() as f64 / self.n as f64
    }

    pub fn has_parallel_edges(&self) -> bool {
        self.check_adj
            .iter()
            .any(|r| r.windows(2).any(|w| w[0] == w[1]))
    }

    /// Appends the checks of `other` below those of `self`.
    pub fn stack(&self, other: &TannerGraph) -> Result<TannerGraph, CodeError> {
        if other.n != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let rows = self
            .check_adj
            .iter()
            .chain(&other.check_adj)
            .cloned()
            .collect();
        Self::from_check_rows(self.n, rows)
    }

    /// Syndrome `H w` of a word.
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>, CodeError> {
        if word.len() != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                got: word.len(),
            });
        }
        Ok(self
            .check_adj
            .iter()
            .map(|r| r.iter().fold(0u8, |acc, &v| acc ^ (word[v as usize] & 1)))
            .collect())
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        self.syndrome(word)
            .map(|s| s.iter().all(|&b| b == 0))
            .unwrap_or(false)
    }

    /// Dense row representation, for small graphs and tests.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.check_adj
            .iter()
            .map(|r| {
                let mut row = vec![0u8; self.n];
                for &v in r {
                    row[v as usize] ^= 1;
                }
                row
            })
            .collect()
    }
}
