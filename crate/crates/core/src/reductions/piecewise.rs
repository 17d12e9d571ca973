//! Concave piecewise-linear profits as parallel capacitated segments.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ReductionError;
use crate::instance::{token_lines, EdgeSpec, Kind, ProblemInstance};
use crate::numeric::{int, uint, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseEdge {
    pub src: usize,
    pub dst: usize,
    pub price: u64,
    /// Slope on each segment, in fill order.
    pub slopes: Vec<i64>,
}

/// A BTP whose edge profits are concave piecewise-linear with a common
/// segment length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseInstance {
    pub supply: Vec<u64>,
    pub budget: Vec<u64>,
    pub seg_len: u64,
    pub edges: Vec<PiecewiseEdge>,
}

/// Split edge indices per original edge, in segment order.
///
/// Segments with negative slope are not materialized, so `segments[e]`
/// can be shorter than the profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    pub seg_len: u64,
    pub segments: Vec<Vec<usize>>,
}

impl PiecewiseInstance {
    pub fn check(&self) -> Result<(), ReductionError> {
        if self.seg_len == 0 {
            return Err(ReductionError::Invalid("segment length must be at least 1".into()));
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.slopes.is_empty() {
                return Err(ReductionError::Invalid(format!("edge {} has no segments", k + 1)));
            }
            if let Some(w) = e.slopes.windows(2).position(|w| w[0] < w[1]) {
                return Err(ReductionError::NotConcave { edge: k, segment: w + 1 });
            }
        }
        Ok(())
    }

    /// The piecewise profit of `f` units on edge `e`; `None` beyond the last breakpoint.
    pub fn edge_profit(&self, e: usize, f: &Rational) -> Option<Rational> {
        let l = uint(self.seg_len);
        let slopes = &self.edges[e].slopes;
        if f.is_negative() || *f > &l * uint(slopes.len() as u64) {
            return None;
        }
        let mut left = f.clone();
        let mut total = Rational::zero();
        for &c in slopes {
            let take = if left > l { l.clone() } else { left.clone() };
            total += int(c) * &take;
            left -= take;
        }
        Some(total)
    }

    /// `Σ_e profit_e(f_e)`; `None` if some flow is outside its profile's domain.
    pub fn objective(&self, flows: &[Rational]) -> Option<Rational> {
        let mut total = Rational::zero();
        for (e, f) in flows.iter().enumerate() {
            total += self.edge_profit(e, f)?;
        }
        Some(total)
    }
}

/// One capacitated edge per non-negative segment, tagged with its 1-based segment number.
pub fn split_piecewise(pw: &PiecewiseInstance) -> Result<(ProblemInstance, EdgeMap), ReductionError> {
    pw.check()?;
    let mut edges = Vec::new();
    let mut segments = Vec::with_capacity(pw.edges.len());
    for e in &pw.edges {
        let mut ids = Vec::new();
        for (k, &c) in e.slopes.iter().enumerate() {
            if c < 0 {
                break;
            }
            let mut spec = EdgeSpec::new(e.src, e.dst, c as u64, e.price).with_capacity(pw.seg_len);
            spec.segment = Some(k as u32 + 1);
            ids.push(edges.len());
            edges.push(spec);
        }
        segments.push(ids);
    }
    let inst = ProblemInstance { kind: Kind::Bts, supply: pw.supply.clone(), budget: pw.budget.clone(), edges };
    let report = inst.validate();
    if !report.is_ok() {
        return Err(ReductionError::Invalid(report.to_string()));
    }
    Ok((inst, EdgeMap { seg_len: pw.seg_len, segments }))
}

/// Refills each original edge's segments in order, keeping its total flow.
///
/// This is the fixed point of moving `min(l − f_z1, f_z2)` from a later
/// segment `z2` to an earlier, unfilled one `z1`.
pub fn normalize(flows: &[Rational], map: &EdgeMap) -> Vec<Rational> {
    let l = uint(map.seg_len);
    let mut out = flows.to_vec();
    for ids in &map.segments {
        let mut left: Rational = ids.iter().map(|&k| &flows[k]).sum();
        for &k in ids {
            let take = if left > l { l.clone() } else { left.clone() };
            left -= &take;
            out[k] = take;
        }
    }
    out
}

/// First `(edge, z1, z2)` with `f_z1 < l` and `f_z2 > 0`, if any.
pub fn fill_order_violation(flows: &[Rational], map: &EdgeMap) -> Option<(usize, usize, usize)> {
    let l = uint(map.seg_len);
    for (e, ids) in map.segments.iter().enumerate() {
        for (z1, &a) in ids.iter().enumerate() {
            if flows[a] >= l {
                continue;
            }
            if let Some(z2) = ids.iter().skip(z1 + 1).position(|&b| flows[b].is_positive()) {
                return Some((e, z1, z1 + 1 + z2));
            }
        }
    }
    None
}

/// Per-original-edge flows `f_ij = Σ_k f_ijk`.
pub fn reassemble(flows: &[Rational], map: &EdgeMap) -> Result<Vec<Rational>, ReductionError> {
    if let Some((edge, first, later)) = fill_order_violation(flows, map) {
        return Err(ReductionError::FillOrder { edge, first, later });
    }
    Ok(map.segments.iter().map(|ids| ids.iter().map(|&k| &flows[k]).sum()).collect())
}

/// Parses `p pw <n> <m> <E>` files whose edge lines read `e <i> <j> <p> pw <l> <c1> <c2> ...`.
pub fn parse_piecewise(text: &str) -> Result<PiecewiseInstance, ReductionError> {
    let syntax = |line: usize, reason: String| ReductionError::Syntax { line, reason };
    let mut lines = token_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing header".into()))?;
    if header.len() != 5 || header[0] != "p" || header[1] != "pw" {
        return Err(syntax(hline, "header must be 'p pw <n> <m> <E>'".into()));
    }
    let count = |line: usize, tok: &str| tok.parse::<usize>().map_err(|_| syntax(line, format!("bad count '{tok}'")));
    let (n, m, e_count) = (count(hline, header[2])?, count(hline, header[3])?, count(hline, header[4])?);
    let idx = |line: usize, tok: &str, len: usize| match tok.parse::<usize>() {
        Ok(k) if (1..=len).contains(&k) => Ok(k - 1),
        _ => Err(syntax(line, format!("bad index '{tok}'"))),
    };
    let mut supply = vec![None; n];
    let mut budget = vec![None; m];
    let mut edges = Vec::new();
    let mut seg_len = None;
    for (line, toks) in lines {
        let amount = |tok: &str| tok.parse::<u64>().map_err(|_| syntax(line, format!("bad number '{tok}'")));
        match toks[0] {
            "s" | "t" if toks.len() == 3 => {
                let slots = if toks[0] == "s" { &mut supply } else { &mut budget };
                let k = idx(line, toks[1], slots.len())?;
                if slots[k].replace(amount(toks[2])?).is_some() {
                    return Err(syntax(line, format!("index {} listed twice", k + 1)));
                }
            }
            "e" if toks.len() >= 7 && toks[4] == "pw" => {
                let l = amount(toks[5])?;
                if *seg_len.get_or_insert(l) != l {
                    return Err(syntax(line, "all edges must share one segment length".into()));
                }
                let slopes = toks[6..]
                    .iter()
                    .map(|t| t.parse::<i64>().map_err(|_| syntax(line, format!("bad slope '{t}'"))))
                    .collect::<Result<_, _>>()?;
                edges.push(PiecewiseEdge { src: idx(line, toks[1], n)?, dst: idx(line, toks[2], m)?, price: amount(toks[3])?, slopes });
            }
            "e" => return Err(syntax(line, "edge line needs 'e <i> <j> <p> pw <l> <c1> ...'".into())),
            other => return Err(syntax(line, format!("unexpected line '{other}'"))),
        }
    }
    if edges.len() != e_count {
        return Err(syntax(hline, format!("header declares {e_count} edges, found {}", edges.len())));
    }
    let fill = |v: Vec<Option<u64>>, what: &str| -> Result<Vec<u64>, ReductionError> {
        v.into_iter().enumerate().map(|(k, x)| x.ok_or_else(|| syntax(hline, format!("{what} {} has no line", k + 1)))).collect()
    };
    let pw = PiecewiseInstance { supply: fill(supply, "source")?, budget: fill(budget, "sink")?, seg_len: seg_len.unwrap_or(1), edges };
    pw.check()?;
    Ok(pw)
}

pub fn serialize_piecewise(pw: &PiecewiseInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p pw {} {} {}", pw.supply.len(), pw.budget.len(), pw.edges.len());
    for (i, a) in pw.supply.iter().enumerate() {
        let _ = writeln!(out, "s {} {a}", i + 1);
    }
    for (j, b) in pw.budget.iter().enumerate() {
        let _ = writeln!(out, "t {} {b}", j + 1);
    }
    for e in &pw.edges {
        let _ = write!(out, "e {} {} {} pw {}", e.src + 1, e.dst + 1, e.price, pw.seg_len);
        for c in &e.slopes {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

/// Random concave profiles with at most `max_segments` segments per edge.
pub fn random_piecewise(seed: u64, n: usize, m: usize, max_segments: usize) -> PiecewiseInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seg_len = rng.gen_range(1..=4);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if (edges.is_empty() && i + 1 == n && j + 1 == m) || rng.gen_bool(0.7) {
                let count = rng.gen_range(1..=max_segments.max(1));
                let mut c = rng.gen_range(0..=20i64);
                let mut slopes = vec![c];
                for _ in 1..count {
                    c -= rng.gen_range(0..=6);
                    slopes.push(c.max(0));
                }
                edges.push(PiecewiseEdge { src: i, dst: j, price: rng.gen_range(1..=5), slopes });
            }
        }
    }
    PiecewiseInstance {
        supply: (0..n).map(|_| rng.gen_range(1..=20)).collect(),
        budget: (0..m).map(|_| rng.gen_range(1..=40)).collect(),
        seg_len,
        edges,
    }
}

/// A random flow on the split instance that respects segment capacities but
/// not necessarily the fill order.
pub fn random_split_flow(rng: &mut impl Rng, map: &EdgeMap, edges: usize) -> Vec<Rational> {
    let mut flows = vec![Rational::zero(); edges];
    for ids in &map.segments {
        for &k in ids {
            if rng.gen_bool(0.6) {
                let den = rng.gen_range(1..=4i64);
                let num = rng.gen_range(0..=map.seg_len as i64 * den);
                flows[k] = Rational::new(num.into(), den.into());
            }
        }
    }
    flows
}
