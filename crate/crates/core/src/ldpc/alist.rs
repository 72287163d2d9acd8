//! MacKay alist format.

use std::fmt::Write as _;

use super::graph::TannerGraph;
use crate::error::CodeError;

pub fn to_alist(g: &TannerGraph) -> String {
    let vd = g.var_degrees();
    let cd = g.check_degrees();
    let mut s = String::new();
    let join = |it: &mut dyn Iterator<Item = usize>| {
        it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    writeln!(s, "{} {}", g.n(), g.m()).unwrap();
    writeln!(
        s,
        "{} {}",
        vd.iter().max().unwrap_or(&0),
        cd.iter().max().unwrap_or(&0)
    )
    .unwrap();
    writeln!(s, "{}", join(&mut vd.iter().copied())).unwrap();
    writeln!(s, "{}", join(&mut cd.iter().copied())).unwrap();
    for v in 0..g.n() {
        writeln!(s, "{}", join(&mut g.var(v).iter().map(|&c| c as usize + 1))).unwrap();
    }
    for c in 0..g.m() {
        writeln!(
            s,
            "{}",
            join(&mut g.check(c).iter().map(|&v| v as usize + 1))
        )
        .unwrap();
    }
    s
}

/// Parses an alist. Zero entries (padding) are ignored; the check lists must
/// agree with the variable lists.
pub fn from_alist(text: &str) -> Result<TannerGraph, CodeError> {
    let bad = |m: &str| CodeError::Alist(m.to_string());
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let nums = |lines: &mut dyn Iterator<Item = &str>| -> Result<Vec<usize>, CodeError> {
        let l = lines.next().ok_or_else(|| bad("unexpected end of input"))?;
        l.split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| bad(&format!("bad integer {t:?}")))
            })
            .collect()
    };
    let head = nums(&mut lines)?;
    if head.len() != 2 {
        return Err(bad("header must be `n m`"));
    }
    let (n, m) = (head[0], head[1]);
    nums(&mut lines)?;
    let vd = nums(&mut lines)?;
    let cd = nums(&mut lines)?;
    if vd.len() != n || cd.len() != m {
        return Err(bad("degree list lengths do not match n, m"));
    }
    let mut var_lists = Vec::with_capacity(n);
    for v in 0..n {
        let l: Vec<usize> = if vd[v] == 0 {
            Vec::new()
        } else {
            nums(&mut lines)?
        };
        let l: Vec<usize> = l.into_iter().filter(|&x| x != 0).collect();
        if l.len() != vd[v] {
            return Err(bad(&format!(
                "variable {v} lists {} checks, degree {}",
                l.len(),
                vd[v]
            )));
        }
        var_lists.push(l);
    }
    let mut rows = Vec::with_capacity(m);
    for c in 0..m {
        let l: Vec<usize> = if cd[c] == 0 {
            Vec::new()
        } else {
            nums(&mut lines)?
        };
        let l: Vec<u32> = l
            .into_iter()
            .filter(|&x| x != 0)
            .map(|x| x as u32 - 1)
            .collect();
        if l.len() != cd[c] {
            return Err(bad(&format!(
                "check {c} lists {} variables, degree {}",
                l.len(),
                cd[c]
            )));
        }
        rows.push(l);
    }
    for (v, l) in var_lists.iter().enumerate() {
        if l.iter().any(|&c| c == 0 || c > m) {
            return Err(bad(&format!(
                "variable {v} references a check outside 1..={m}"
            )));
        }
    }
    let g = TannerGraph::from_check_rows(n, rows).map_err(|e| bad(&e.to_string()))?;
    for (v, l) in var_lists.iter().enumerate() {
        let mut a: Vec<u32> = l.iter().map(|&c| c as u32 - 1).collect();
        a.sort_unstable();
        if a != g.var(v) {
            return Err(bad(&format!(
                "variable {v} adjacency disagrees with check lists"
            )));
        }
    }
    Ok(g)
}
