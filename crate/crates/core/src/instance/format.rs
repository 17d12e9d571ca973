use std::fmt::Write as _;

use thiserror::Error;

use super::{EdgeSpec, Kind, ProblemInstance, ValidationReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
}

pub(crate) fn syntax(line: usize, reason: impl Into<String>) -> InstanceError {
    InstanceError::Syntax { line, reason: reason.into() }
}

/// Non-empty lines with `#` comments stripped, as `(1-based line, tokens)`.
pub(crate) fn token_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((k + 1, toks))
    })
}

pub(crate) fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, InstanceError> {
    tok.parse::<T>().map_err(|_| syntax(line, format!("bad {what} '{tok}'")))
}

pub(crate) fn index(line: usize, tok: &str, what: &str) -> Result<usize, InstanceError> {
    let k: usize = num(line, tok, what)?;
    if k == 0 {
        return Err(syntax(line, format!("{what} indices are 1-based")));
    }
    Ok(k - 1)
}

/// Parses the line-oriented instance format and validates the result.
pub fn parse(text: &str) -> Result<ProblemInstance, InstanceError> {
    let mut lines = token_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
    if header.len() != 5 || header[0] != "p" {
        return Err(syntax(hline, "header must be 'p <btp|bts> <n> <m> <E>'"));
    }
    let kind = match header[1] {
        "btp" => Kind::Btp,
        "bts" => Kind::Bts,
        other => return Err(syntax(hline, format!("unknown problem kind '{other}'"))),
    };
    let n: usize = num(hline, header[2], "source count")?;
    let m: usize = num(hline, header[3], "sink count")?;
    let e_count: usize = num(hline, header[4], "edge count")?;

    let mut supply: Vec<Option<u64>> = vec![None; n];
    let mut budget: Vec<Option<u64>> = vec![None; m];
    let mut edges = Vec::with_capacity(e_count);
    for (line, toks) in lines {
        match toks[0] {
            "s" | "t" => {
                if toks.len() != 3 {
                    return Err(syntax(line, format!("'{}' line needs an index and a value", toks[0])));
                }
                let (slots, what) = if toks[0] == "s" { (&mut supply, "source") } else { (&mut budget, "sink") };
                let k = index(line, toks[1], what)?;
                if k >= slots.len() {
                    return Err(syntax(line, format!("{what} {} out of range", k + 1)));
                }
                if slots[k].is_some() {
                    return Err(syntax(line, format!("{what} {} listed twice", k + 1)));
                }
                slots[k] = Some(num(line, toks[2], "amount")?);
            }
            "e" => edges.push(parse_edge(line, &toks, kind)?),
            other => return Err(syntax(line, format!("unknown line type '{other}'"))),
        }
    }
    if edges.len() != e_count {
        return Err(syntax(hline, format!("header declares {e_count} edges, found {}", edges.len())));
    }
    let supply = collect_slots(supply, "source", hline)?;
    let budget = collect_slots(budget, "sink", hline)?;
    let inst = ProblemInstance { kind, supply, budget, edges };
    let report = inst.validate();
    if report.is_ok() {
        Ok(inst)
    } else {
        Err(InstanceError::Invalid(report))
    }
}

fn collect_slots(slots: Vec<Option<u64>>, what: &str, hline: usize) -> Result<Vec<u64>, InstanceError> {
    slots
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| syntax(hline, format!("{what} {} has no line", k + 1))))
        .collect()
}

fn parse_edge(line: usize, toks: &[&str], kind: Kind) -> Result<EdgeSpec, InstanceError> {
    if toks.len() < 5 {
        return Err(syntax(line, "edge line needs 'e <i> <j> <c> <p> [<u>]'"));
    }
    let mut edge = EdgeSpec::new(
        index(line, toks[1], "source")?,
        index(line, toks[2], "sink")?,
        num(line, toks[3], "profit")?,
        num(line, toks[4], "price")?,
    );
    for tok in &toks[5..] {
        if let Some(seg) = tok.strip_prefix("seg=") {
            edge.segment = Some(num(line, seg, "segment")?);
        } else {
            if kind == Kind::Btp {
                return Err(syntax(line, "capacities are only allowed in bts instances"));
            }
            if edge.capacity.is_some() {
                return Err(syntax(line, "capacity given twice"));
            }
            let raw = tok.strip_prefix("u=").unwrap_or(tok);
            edge.capacity = Some(num(line, raw, "capacity")?);
        }
    }
    Ok(edge)
}

/// Canonical text form; `parse(serialize(x)) == x` for valid instances.
pub fn serialize(inst: &ProblemInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p {} {} {} {}", inst.kind.tag(), inst.n(), inst.m(), inst.edges.len());
    for (i, a) in inst.supply.iter().enumerate() {
        let _ = writeln!(out, "s {} {}", i + 1, a);
    }
    for (j, b) in inst.budget.iter().enumerate() {
        let _ = writeln!(out, "t {} {}", j + 1, b);
    }
    for e in &inst.edges {
        let _ = write!(out, "e {} {} {} {}", e.src + 1, e.dst + 1, e.profit, e.price);
        if let Some(u) = e.capacity {
            let _ = write!(out, " {u}");
        }
        if let Some(k) = e.segment {
            let _ = write!(out, " seg={k}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Violation;

    #[test]
    fn parses_minimal_instance() {
        let inst = parse("p btp 1 1 1\ns 1 5\nt 1 10\ne 1 1 3 2\n").unwrap();
        assert_eq!(inst.supply, vec![5]);
        assert_eq!(inst.budget, vec![10]);
        assert_eq!(inst.edges, vec![EdgeSpec::new(0, 0, 3, 2)]);
    }

    #[test]
    fn edge_count_mismatch_is_an_error() {
        let err = parse("p btp 1 1 2\ns 1 5\nt 1 10\ne 1 1 3 2\n").unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { line: 1, .. }), "{err}");
    }

    #[test]
    fn capacity_with_prefix() {
        let inst = parse("p bts 1 1 1\ns 1 5\nt 1 10\ne 1 1 3 2 u=4\n").unwrap();
        assert_eq!(inst.kind, Kind::Bts);
        assert_eq!(inst.edges[0].capacity, Some(4));
        assert_eq!(serialize(&inst), "p bts 1 1 1\ns 1 5\nt 1 10\ne 1 1 3 2 4\n");
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header next\np btp 1 1 1\n\ns 1 5 # supply\nt 1 10\ne 1 1 3 2\n";
        assert!(parse(text).is_ok());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("p btp 1 1 1\ns 1 5\nt 1 x\ne 1 1 3 2\n").unwrap_err();
        assert_eq!(err, syntax(3, "bad amount 'x'"));
        let err = parse("p btp 1 1 1\ns 1 5\nt 1 10\ne 1 1 3 2 4\n").unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { line: 4, .. }));
    }

    #[test]
    fn validation_failures_surface() {
        let err = parse("p btp 1 1 1\ns 1 5\nt 1 10\ne 1 1 3 0\n").unwrap_err();
        match err {
            InstanceError::Invalid(r) => assert_eq!(r.violations, vec![Violation::ZeroPrice { edge: 0 }]),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn segment_tags_allow_parallel_edges() {
        let text = "p bts 1 1 2\ns 1 5\nt 1 10\ne 1 1 5 1 2 seg=1\ne 1 1 3 1 2 seg=2\n";
        let inst = parse(text).unwrap();
        assert_eq!(serialize(&inst), text);
    }
}
