//! Line-oriented solution format.
//!
//! ```text
//! solution v1
//! status terminated
//! mode exact
//! epsilon 1/4
//! primal 15/1
//! dual 15/1
//! gap 0/1
//! flow 1 1 1 5/1
//! alpha 1 9/4
//! beta 1 3/8
//! stat iterations 1
//! certificate passed
//! ...
//! end
//! ```
//!
//! Indices are 1-based; `flow` lines carry `<edge> <source> <sink> <value>`.
//! Field order is fixed so output is byte-stable.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bts::{Abort, Solution};
use crate::certify::{Certificate, Duals};
use crate::instance::{token_lines, NumericMode, ProblemInstance};
use crate::numeric::{fmt_fraction, parse_fraction, Rational};

/// Writes the certificate block shared by `solve` and `verify` output.
pub fn write_certificate(out: &mut String, cert: &Certificate) {
    let yn = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(out, "certificate {}", if cert.passed { "passed" } else { "failed" });
    let _ = writeln!(out, "rigorous {}", yn(cert.rigorous));
    let _ = writeln!(out, "primal_feasible {}", yn(cert.primal_feasible));
    let _ = writeln!(out, "dual_feasible {}", yn(cert.dual_feasible));
    let _ = writeln!(out, "cs_source {}", fmt_fraction(&cert.cs.source));
    let _ = writeln!(out, "cs_sink {}", fmt_fraction(&cert.cs.sink));
    let _ = writeln!(out, "cs_edge {}", fmt_fraction(&cert.cs.edge));
    let _ = writeln!(out, "cs_flow_excess {}", fmt_fraction(&cert.cs.flow_excess));
    let d = &cert.decomposition;
    let _ = writeln!(
        out,
        "decomposition {} {} {} {} {}",
        fmt_fraction(&d.d1),
        fmt_fraction(&d.d2),
        fmt_fraction(&d.d3),
        fmt_fraction(&d.d4),
        if d.holds { "holds" } else { "broken" }
    );
    for (e, g) in &cert.gamma {
        let _ = writeln!(out, "gamma {} {}", e + 1, fmt_fraction(g));
    }
    for v in &cert.primal_violations {
        let _ = writeln!(out, "violation {v}");
    }
    for v in &cert.dual_violations {
        let _ = writeln!(out, "violation {v}");
    }
    for v in &cert.cs_violations {
        let _ = writeln!(out, "violation {v}");
    }
}

pub fn status_of(sol: &Solution) -> &'static str {
    match sol.abort {
        None => "terminated",
        Some(Abort::MaxPhases) => "max-phases",
        Some(Abort::Stalled) => "stalled",
    }
}

pub fn serialize(inst: &ProblemInstance, sol: &Solution) -> String {
    let mut out = String::new();
    let cert = &sol.certificate;
    out.push_str("solution v1\n");
    let _ = writeln!(out, "kind {}", inst.kind.tag());
    let _ = writeln!(out, "status {}", status_of(sol));
    let mode = match sol.mode {
        NumericMode::ExactRational => "exact".to_string(),
        NumericMode::Float64 { eta } => format!("float {eta:e}"),
    };
    let _ = writeln!(out, "mode {mode}");
    let _ = writeln!(out, "epsilon {}", fmt_fraction(&sol.epsilon));
    let _ = writeln!(out, "primal {}", fmt_fraction(&cert.primal_value));
    let _ = writeln!(out, "dual {}", fmt_fraction(&cert.dual_value));
    let _ = writeln!(out, "gap {}", cert.gap_ratio);
    for (k, (e, f)) in inst.edges.iter().zip(&sol.flows).enumerate() {
        let _ = writeln!(out, "flow {} {} {} {}", k + 1, e.src + 1, e.dst + 1, fmt_fraction(f));
    }
    for (i, a) in sol.duals.alpha.iter().enumerate() {
        let _ = writeln!(out, "alpha {} {}", i + 1, fmt_fraction(a));
    }
    for (j, b) in sol.duals.beta.iter().enumerate() {
        let _ = writeln!(out, "beta {} {}", j + 1, fmt_fraction(b));
    }
    for (name, v) in sol.stats.to_map() {
        let _ = writeln!(out, "stat {name} {v}");
    }
    write_certificate(&mut out, cert);
    out.push_str("end\n");
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolutionError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("solution does not match instance: {0}")]
    Mismatch(String),
}

fn syntax(line: usize, reason: impl Into<String>) -> SolutionError {
    SolutionError::Syntax { line, reason: reason.into() }
}

/// The parts of a solution file that `verify` needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSolution {
    pub epsilon: Option<Rational>,
    pub flows: Vec<Rational>,
    /// Absent in oracle output.
    pub duals: Option<Duals>,
}

/// Parses a solution file against its instance; endpoint or count mismatches are errors.
pub fn parse(text: &str, inst: &ProblemInstance) -> Result<ParsedSolution, SolutionError> {
    let ends: Vec<(usize, usize)> = inst.edges.iter().map(|e| (e.src, e.dst)).collect();
    parse_for(text, inst.n(), inst.m(), &ends)
}

/// Same as `parse` for any bipartite instance given by its edge endpoints.
pub fn parse_for(text: &str, n: usize, m: usize, ends: &[(usize, usize)]) -> Result<ParsedSolution, SolutionError> {
    let mut lines = token_lines(text);
    match lines.next() {
        Some((_, t)) if t == ["solution", "v1"] => {}
        Some((l, _)) => return Err(syntax(l, "expected 'solution v1' header")),
        None => return Err(syntax(1, "empty solution file")),
    }
    let ne = ends.len();
    let mut flows: Vec<Option<Rational>> = vec![None; ne];
    let mut alpha: Vec<Option<Rational>> = vec![None; n];
    let mut beta: Vec<Option<Rational>> = vec![None; m];
    let mut epsilon = None;
    let frac = |line: usize, tok: &str| parse_fraction(tok).ok_or_else(|| syntax(line, format!("bad number '{tok}'")));
    let idx = |line: usize, tok: &str, len: usize, what: &str| -> Result<usize, SolutionError> {
        match tok.parse::<usize>() {
            Ok(k) if k >= 1 && k <= len => Ok(k - 1),
            Ok(k) => Err(SolutionError::Mismatch(format!("line {line}: {what} {k} out of range"))),
            Err(_) => Err(syntax(line, format!("bad {what} index '{tok}'"))),
        }
    };
    for (line, toks) in lines {
        match (toks[0], toks.len()) {
            ("epsilon", 2) => epsilon = Some(frac(line, toks[1])?),
            ("flow", 5) => {
                let e = idx(line, toks[1], ne, "edge")?;
                let (i, j) = (idx(line, toks[2], n, "source")?, idx(line, toks[3], m, "sink")?);
                if ends[e] != (i, j) {
                    return Err(SolutionError::Mismatch(format!("line {line}: edge {} does not join {} and {}", e + 1, i + 1, j + 1)));
                }
                if flows[e].replace(frac(line, toks[4])?).is_some() {
                    return Err(syntax(line, format!("edge {} listed twice", e + 1)));
                }
            }
            ("alpha", 3) => alpha[idx(line, toks[1], n, "source")?] = Some(frac(line, toks[2])?),
            ("beta", 3) => beta[idx(line, toks[1], m, "sink")?] = Some(frac(line, toks[2])?),
            ("flow" | "alpha" | "beta" | "epsilon", _) => return Err(syntax(line, format!("malformed '{}' line", toks[0]))),
            ("end", _) => break,
            _ => {}
        }
    }
    let missing = |v: &[Option<Rational>]| v.iter().filter(|x| x.is_none()).count();
    if missing(&flows) > 0 {
        return Err(SolutionError::Mismatch(format!("{} flow values missing", missing(&flows))));
    }
    let flows = flows.into_iter().flatten().collect();
    let duals = match (missing(&alpha), missing(&beta)) {
        (0, 0) => Some(Duals { alpha: alpha.into_iter().flatten().collect(), beta: beta.into_iter().flatten().collect() }),
        (a, b) if a == n && b == m => None,
        (a, b) => return Err(SolutionError::Mismatch(format!("{} dual values missing", a + b))),
    };
    Ok(ParsedSolution { epsilon, flows, duals })
}

/// Oracle output: the solve format without duals, statistics or certificate.
pub fn serialize_optimum(kind: &str, value: &Rational, ends: &[(usize, usize)], flows: &[Rational]) -> String {
    let mut out = String::new();
    out.push_str("solution v1\n");
    let _ = writeln!(out, "kind {kind}");
    out.push_str("status optimal\nmode exact\n");
    let _ = writeln!(out, "primal {}", fmt_fraction(value));
    for (k, ((i, j), f)) in ends.iter().zip(flows).enumerate() {
        let _ = writeln!(out, "flow {} {} {} {}", k + 1, i + 1, j + 1, fmt_fraction(f));
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bts::solve;
    use crate::instance::{parse as parse_instance, SolverConfig};
    use crate::numeric::ratio;

    const INST: &str = "p bts 2 1 2\ns 1 10\ns 2 10\nt 1 10\ne 1 1 2 1 u=3\ne 2 1 5 2\n";

    #[test]
    fn round_trip() {
        let inst = parse_instance(INST).unwrap();
        let sol = solve(&inst, &SolverConfig::new(ratio(1, 4))).unwrap();
        let text = serialize(&inst, &sol);
        assert!(text.starts_with("solution v1\nkind bts\nstatus terminated\nmode exact\nepsilon 1/4\n"));
        let back = parse(&text, &inst).unwrap();
        assert_eq!(back.flows, sol.flows);
        assert_eq!(back.duals, Some(sol.duals.clone()));
        assert_eq!(back.epsilon, Some(ratio(1, 4)));
        assert_eq!(serialize(&inst, &sol), text);
    }

    #[test]
    fn rejects_wrong_instance() {
        let inst = parse_instance(INST).unwrap();
        let sol = solve(&inst, &SolverConfig::new(ratio(1, 4))).unwrap();
        let text = serialize(&inst, &sol);
        let other = parse_instance("p btp 1 1 1\ns 1 1\nt 1 1\ne 1 1 1 1\n").unwrap();
        assert!(matches!(parse(&text, &other), Err(SolutionError::Mismatch(_))));
        assert!(matches!(parse("garbage", &inst), Err(SolutionError::Syntax { .. })));
    }

    #[test]
    fn oracle_output_has_no_duals() {
        let inst = parse_instance(INST).unwrap();
        let ends: Vec<_> = inst.edges.iter().map(|e| (e.src, e.dst)).collect();
        let text = serialize_optimum("bts", &ratio(5, 1), &ends, &[ratio(1, 1), ratio(2, 1)]);
        let back = parse(&text, &inst).unwrap();
        assert_eq!(back.duals, None);
        assert_eq!(back.flows, vec![ratio(1, 1), ratio(2, 1)]);
    }
}
