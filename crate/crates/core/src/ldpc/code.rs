//! Systematic form of a parity-check matrix and the syndrome-based secret
//! sharing operations built on it.
//!
//! `triangularize` finds a column split `[A | B]` with `B` unit lower
//! triangular. Most rows are peeled greedily and keep their original sparse
//! support; the rows left over (the "gap") are eliminated densely over the
//! columns that were declared known during peeling. Words are always kept in
//! natural column order; the permutation is internal.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::graph::TannerGraph;
use crate::channel::BpskWord;
use crate::error::CodeError;
use crate::gf2::BitVec;

#[derive(Debug, Clone, PartialEq)]
enum Row {
    /// Original row support, natural coordinates.
    Sparse(Vec<u32>),
    /// Eliminated row over the known columns (compact coordinates).
    Dense(BitVec),
}

/// How the key is derived from the agreed codeword `X_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KeyMap {
    /// Key is the first `k` systematic bits.
    Systematic,
    /// Key is the syndrome of `X_0` under the extra checks `H'`; the subcode
    /// `W` is the null space of the stacked matrix `[H; H']`.
    Syndrome {
        extra: TannerGraph,
        stacked: TannerGraph,
    },
}

/// A code `C` in systematic form together with a key subspace `W ⊆ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecretSharingCode {
    graph: TannerGraph,
    rows: Vec<Row>,
    pivots: Vec<u32>,
    systematic: Vec<u32>,
    known: Vec<u32>,
    known_index: Vec<u32>,
    dropped_rows: Vec<u32>,
    k: usize,
    key_map: KeyMap,
}

const NOT_KNOWN: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq)]
enum ColState {
    Free,
    Pivot,
    Known,
}

/// Brings `graph` into systematic form. The returned code has key length 0.
pub fn triangularize(graph: &TannerGraph) -> Result<SecretSharingCode, CodeError> {
    let n = graph.n();
    let m = graph.m();
    // cancel parallel edges: they are zero over GF(2)
    let rows: Vec<Vec<u32>> = graph
        .checks()
        .iter()
        .map(|r| {
            let mut out: Vec<u32> = Vec::with_capacity(r.len());
            for &v in r {
                // rows are sorted, so duplicates are adjacent
                if out.last() == Some(&v) {
                    out.pop();
                } else {
                    out.push(v);
                }
            }
            out
        })
        .collect();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &v in row {
            col_rows[v as usize].push(r as u32);
        }
    }

    let mut col_state = vec![ColState::Free; n];
    let mut col_active: Vec<u32> = col_rows.iter().map(|c| c.len() as u32).collect();
    let mut weight: Vec<u32> = rows.iter().map(|r| r.len() as u32).collect();
    let mut active = vec![true; m];
    let mut peeled: Vec<(u32, u32)> = Vec::new(); // (row, pivot column)
    let mut gap: Vec<u32> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = BinaryHeap::with_capacity(m);

    let retire = |r: usize, active: &mut [bool], col_active: &mut [u32]| {
        active[r] = false;
        for &v in &rows[r] {
            col_active[v as usize] -= 1;
        }
    };
    for r in 0..m {
        if weight[r] == 0 {
            retire(r, &mut active, &mut col_active);
            gap.push(r as u32);
        } else {
            heap.push(Reverse((weight[r], r as u32)));
        }
    }

    let mut newly: Vec<u32> = Vec::new();
    while let Some(Reverse((w, r))) = heap.pop() {
        let r = r as usize;
        if !active[r] || weight[r] != w {
            continue;
        }
        let free: Vec<u32> = rows[r]
            .iter()
            .copied()
            .filter(|&v| col_state[v as usize] == ColState::Free)
            .collect();
        debug_assert_eq!(free.len(), w as usize);
        // pivot on the free column of lowest residual weight
        let pivot = *free
            .iter()
            .min_by_key(|&&v| (col_active[v as usize], v))
            .expect("row has free columns");
        newly.clear();
        for &v in &free {
            col_state[v as usize] = if v == pivot {
                ColState::Pivot
            } else {
                ColState::Known
            };
            newly.push(v);
        }
        retire(r, &mut active, &mut col_active);
        peeled.push((r as u32, pivot));
        for &v in &newly {
            for &r2 in &col_rows[v as usize] {
                let r2 = r2 as usize;
                if !active[r2] {
                    continue;
                }
                weight[r2] -= 1;
                if weight[r2] == 0 {
                    retire(r2, &mut active, &mut col_active);
                    gap.push(r2 as u32);
                } else {
                    heap.push(Reverse((weight[r2], r2 as u32)));
                }
            }
        }
    }
    for s in col_state.iter_mut() {
        if *s == ColState::Free {
            *s = ColState::Known;
        }
    }

    let known: Vec<u32> = (0..n as u32)
        .filter(|&v| col_state[v as usize] == ColState::Known)
        .collect();
    let mut known_index = vec![NOT_KNOWN; n];
    for (i, &v) in known.iter().enumerate() {
        known_index[v as usize] = i as u32;
    }

    // eliminate peeled pivots from the gap rows, latest pivot first. Gap rows
    // are handled in blocks, with one bit per row stored per column.
    const BLOCK: usize = 512;
    let mut echelon: Vec<(u32, BitVec)> = Vec::new();
    let mut dropped_rows = Vec::new();
    for block in gap.chunks(BLOCK) {
        let w = block.len().div_ceil(64);
        let mut cols = vec![0u64; n * w];
        for (j, &g) in block.iter().enumerate() {
            for &v in &rows[g as usize] {
                cols[v as usize * w + j / 64] ^= 1 << (j % 64);
            }
        }
        let mut src = vec![0u64; w];
        for &(tr, p) in peeled.iter().rev() {
            let p = p as usize;
            src.copy_from_slice(&cols[p * w..(p + 1) * w]);
            if src.iter().all(|&x| x == 0) {
                continue;
            }
            for &v in &rows[tr as usize] {
                let v = v as usize;
                for (d, s) in cols[v * w..(v + 1) * w].iter_mut().zip(&src) {
                    *d ^= s;
                }
            }
            debug_assert!(cols[p * w..(p + 1) * w].iter().all(|&x| x == 0));
        }
        for (j, &g) in block.iter().enumerate() {
            let (word, bit) = (j / 64, 1u64 << (j % 64));
            let mut compact = BitVec::zeros(known.len());
            for (i, &v) in known.iter().enumerate() {
                if cols[v as usize * w + word] & bit != 0 {
                    compact.set(i, true);
                }
            }
            for (pc, prow) in &echelon {
                if compact.get(*pc as usize) {
                    compact.xor_assign(prow);
                }
            }
            match compact.first_one() {
                Some(pc) => echelon.push((pc as u32, compact)),
                None => dropped_rows.push(g),
            }
        }
    }

    let mut is_gap_pivot = vec![false; known.len()];
    for (pc, _) in &echelon {
        is_gap_pivot[*pc as usize] = true;
    }
    let systematic: Vec<u32> = known
        .iter()
        .enumerate()
        .filter(|(i, _)| !is_gap_pivot[*i])
        .map(|(_, &v)| v)
        .collect();

    let mut out_rows = Vec::with_capacity(echelon.len() + peeled.len());
    let mut pivots = Vec::with_capacity(echelon.len() + peeled.len());
    for (pc, row) in echelon.into_iter().rev() {
        pivots.push(known[pc as usize]);
        out_rows.push(Row::Dense(row));
    }
    for &(r, p) in &peeled {
        pivots.push(p);
        out_rows.push(Row::Sparse(rows[r as usize].clone()));
    }
    Ok(SecretSharingCode {
        graph: graph.clone(),
        rows: out_rows,
        pivots,
        systematic,
        known,
        known_index,
        dropped_rows,
        k: 0,
        key_map: KeyMap::Systematic,
    })
}

impl SecretSharingCode {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Dimension of `C`.
    pub fn l(&self) -> usize {
        self.systematic.len()
    }

    /// Rank of the parity-check matrix, `n - l`.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Key length: `dim C - dim W`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn code_rate(&self) -> f64 {
        self.l() as f64 / self.n() as f64
    }

    pub fn key_rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    pub fn key_map(&self) -> &KeyMap {
        &self.key_map
    }

    /// Systematic columns in key order.
    pub fn systematic_positions(&self) -> &[u32] {
        &self.systematic
    }

    /// Parity columns; row `i` of the triangular part has its pivot at `pivots()[i]`.
    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    /// Column order `[systematic | pivots]`.
    pub fn column_perm(&self) -> Vec<u32> {
        self.systematic
            .iter()
            .chain(&self.pivots)
            .copied()
            .collect()
    }

    /// Original check rows found linearly dependent and dropped.
    pub fn dropped_rows(&self) -> &[u32] {
        &self.dropped_rows
    }

    /// Positions of the key bits for the systematic key map.
    pub fn key_positions(&self) -> &[u32] {
        match self.key_map {
            KeyMap::Systematic => &self.systematic[..self.k],
            KeyMap::Syndrome { .. } => &[],
        }
    }

    /// Sets the key length for the systematic key map.
    pub fn with_key_len(mut self, k: usize) -> Result<Self, CodeError> {
        if k > self.l() {
            return Err(CodeError::KeyTooLong { k, l: self.l() });
        }
        if !matches!(self.key_map, KeyMap::Systematic) {
            return Err(CodeError::Bundle(
                "key length of a concatenated code is fixed".into(),
            ));
        }
        self.k = k;
        Ok(self)
    }

    /// Number of parity rows that needed dense elimination.
    pub fn gap(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r, Row::Dense(_)))
            .count()
    }

    /// The reduced parity-check rows as dense 0/1 vectors in natural column
    /// order. Intended for small codes and tests.
    pub fn parity_rows_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut out = vec![0u8; self.n()];
                match row {
                    Row::Sparse(s) => s.iter().for_each(|&v| out[v as usize] ^= 1),
                    Row::Dense(b) => b.iter_ones().for_each(|i| out[self.known[i] as usize] = 1),
                }
                out
            })
            .collect()
    }

    fn known_part(&self, word: &[u8]) -> BitVec {
        let mut b = BitVec::zeros(self.known.len());
        for (i, &v) in self.known.iter().enumerate() {
            if word[v as usize] != 0 {
                b.set(i, true);
            }
        }
        b
    }

    fn check_len(&self, len: usize) -> Result<(), CodeError> {
        if len != self.n() {
            return Err(CodeError::LengthMismatch {
                expected: self.n(),
                got: len,
            });
        }
        Ok(())
    }
}

/// Syndrome under the reduced (full-rank) parity-check rows, length `n - l`.
pub fn syndrome(code: &SecretSharingCode, word: &BpskWord) -> Result<Vec<u8>, CodeError> {
    code.check_len(word.len())?;
    let bits = word.bits();
    let kp = code.known_part(bits);
    Ok(code
        .rows
        .iter()
        .map(|row| match row {
            Row::Sparse(s) => s.iter().fold(0u8, |a, &v| a ^ bits[v as usize]),
            Row::Dense(b) => b.dot(&kp) as u8,
        })
        .collect())
}

/// The unique word supported on the parity columns with syndrome `s`.
pub fn coset_leader(code: &SecretSharingCode, s: &[u8]) -> Result<BpskWord, CodeError> {
    if s.len() != code.rank() {
        return Err(CodeError::LengthMismatch {
            expected: code.rank(),
            got: s.len(),
        });
    }
    let mut e = vec![0u8; code.n()];
    let mut ek = BitVec::zeros(code.known.len());
    for (i, row) in code.rows.iter().enumerate() {
        let acc = match row {
            Row::Sparse(sp) => sp.iter().fold(0u8, |a, &v| a ^ e[v as usize]),
            Row::Dense(b) => b.dot(&ek) as u8,
        };
        let bit = (s[i] & 1) ^ acc;
        let p = code.pivots[i] as usize;
        e[p] = bit;
        let ki = code.known_index[p];
        if ki != NOT_KNOWN && bit == 1 {
            ek.set(ki as usize, true);
        }
    }
    Ok(BpskWord::from_bits(e))
}

/// Codeword with the given systematic part (length `l`, key order).
pub fn encode(code: &SecretSharingCode, systematic_bits: &[u8]) -> Result<BpskWord, CodeError> {
    if systematic_bits.len() != code.l() {
        return Err(CodeError::LengthMismatch {
            expected: code.l(),
            got: systematic_bits.len(),
        });
    }
    let mut x = BpskWord::zeros(code.n());
    for (&pos, &b) in code.systematic.iter().zip(systematic_bits) {
        x.bits_mut()[pos as usize] = b & 1;
    }
    let s = syndrome(code, &x)?;
    let e = coset_leader(code, &s)?;
    x.xor_assign(&e);
    Ok(x)
}

/// Key of a codeword; fails if the word is not in `C`.
pub fn extract_key(code: &SecretSharingCode, codeword: &BpskWord) -> Result<Vec<u8>, CodeError> {
    if syndrome(code, codeword)?.iter().any(|&b| b != 0) {
        return Err(CodeError::NotACodeword);
    }
    key_bits_unchecked(code, codeword)
}

/// Key bits read from any word, without checking membership in `C`.
pub fn key_bits_unchecked(code: &SecretSharingCode, word: &BpskWord) -> Result<Vec<u8>, CodeError> {
    code.check_len(word.len())?;
    match &code.key_map {
        KeyMap::Systematic => Ok(code
            .key_positions()
            .iter()
            .map(|&p| word.get(p as usize))
            .collect()),
        KeyMap::Syndrome { extra, .. } => extra.syndrome(word.bits()),
    }
}

/// Concatenated-code key: `W = null([H; H'])`, key = `H' X_0`. The key rate is
/// `rank([H; H']) - rank(H)` over `n`, while the key word carries one bit per
/// row of `H'`.
pub fn build_concatenated_subcode(
    code_c: &SecretSharingCode,
    code_c_prime: &TannerGraph,
) -> Result<SecretSharingCode, CodeError> {
    if !matches!(code_c.key_map, KeyMap::Systematic) {
        return Err(CodeError::Bundle(
            "base code must use a systematic key map".into(),
        ));
    }
    let stacked = code_c.graph.stack(code_c_prime)?;
    let full = triangularize(&stacked)?;
    let mut out = code_c.clone();
    out.k = full.rank() - code_c.rank();
    out.key_map = KeyMap::Syndrome {
        extra: code_c_prime.clone(),
        stacked,
    };
    Ok(out)
}
