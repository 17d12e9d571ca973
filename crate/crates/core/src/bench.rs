//! Benchmark runs with complexity-counter checks.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::bts::solve;
use crate::certify::GapRatio;
use crate::instance::{diagnostics, generate, GenSpec, Kind, NumericMode, ProblemInstance, SolverConfig};
use crate::numeric::{fmt_fraction, Rational};
use crate::solution::status_of;

/// Soft per-phase operation budget `4 (n² + n log₂ m)`.
pub fn ops_soft_bound(n: usize, m: usize) -> f64 {
    let n = n as f64;
    4.0 * (n * n + n * (m.max(1) as f64).log2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub label: String,
    pub repeat: u32,
    pub n: usize,
    pub m: usize,
    pub edges: usize,
    pub epsilon: Rational,
    pub mode: NumericMode,
    pub wall_ms: f64,
    pub status: &'static str,
    pub phases: u64,
    pub beta_rises: u64,
    /// `m ⌈log_{1+ε} U⌉`; `None` when no edge has positive profit.
    pub rise_bound: Option<u64>,
    pub operations: u64,
    pub ops_per_phase: f64,
    pub ops_bound: f64,
    pub gap_ratio: GapRatio,
    pub certificate: bool,
    pub error: Option<String>,
}

impl BenchRow {
    /// β-rises within the bound; with no bound, no rise may happen.
    pub fn rises_ok(&self) -> bool {
        self.rise_bound.map_or(self.beta_rises == 0, |b| self.beta_rises <= b)
    }

    pub fn ops_ok(&self) -> bool {
        self.ops_per_phase <= self.ops_bound
    }

    pub fn gap_ok(&self) -> bool {
        match &self.gap_ratio {
            GapRatio::Finite(g) => *g <= self.epsilon,
            GapRatio::Vacuous => true,
            GapRatio::Undefined => false,
        }
    }

    /// Hard checks: no error, certificate passed, gap within ε and rises within bound.
    pub fn hard_ok(&self) -> bool {
        self.error.is_none() && self.certificate && self.gap_ok() && self.rises_ok()
    }

    /// One `key=value` record; `wall_ms` is the only non-deterministic field.
    pub fn record(&self) -> String {
        let mode = match self.mode {
            NumericMode::ExactRational => "exact",
            NumericMode::Float64 { .. } => "float",
        };
        let bound = self.rise_bound.map_or_else(|| "none".to_string(), |b| b.to_string());
        let mut out = format!(
            "label={} repeat={} n={} m={} edges={} epsilon={} mode={mode} wall_ms={:.3} status={} phases={} beta_rises={} rise_bound={bound} \
             rises_ok={} operations={} ops_per_phase={:.2} ops_bound={:.2} ops_ok={} gap_ratio={} certificate={}",
            self.label,
            self.repeat,
            self.n,
            self.m,
            self.edges,
            fmt_fraction(&self.epsilon),
            self.wall_ms,
            self.status,
            self.phases,
            self.beta_rises,
            self.rises_ok(),
            self.operations,
            self.ops_per_phase,
            self.ops_bound,
            self.ops_ok(),
            self.gap_ratio,
            if self.certificate { "passed" } else { "failed" },
        );
        if let Some(e) = &self.error {
            let _ = write!(out, " error=\"{}\"", e.replace('"', "'"));
        }
        out
    }
}

pub fn bench_one(label: &str, repeat: u32, inst: &ProblemInstance, epsilon: &Rational, mode: NumericMode) -> BenchRow {
    let mut cfg = SolverConfig::new(epsilon.clone());
    cfg.numeric_mode = mode;
    let mut row = BenchRow {
        label: label.to_string(),
        repeat,
        n: inst.n(),
        m: inst.m(),
        edges: inst.edges.len(),
        epsilon: epsilon.clone(),
        mode,
        wall_ms: 0.0,
        status: "error",
        phases: 0,
        beta_rises: 0,
        rise_bound: diagnostics(inst, epsilon).ok().map(|d| d.beta_rise_bound),
        operations: 0,
        ops_per_phase: 0.0,
        ops_bound: ops_soft_bound(inst.n(), inst.m()),
        gap_ratio: GapRatio::Undefined,
        certificate: false,
        error: None,
    };
    let start = Instant::now();
    let result = solve(inst, &cfg);
    row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(sol) => {
            row.status = status_of(&sol);
            row.phases = sol.stats.phases();
            row.beta_rises = sol.stats.total_beta_rises();
            row.operations = sol.stats.operations;
            row.ops_per_phase = sol.stats.charge_per_phase();
            row.gap_ratio = sol.certificate.gap_ratio.clone();
            row.certificate = sol.certificate.passed;
            if !sol.terminated {
                row.error = Some(format!("run stopped early ({})", row.status));
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Every (instance, ε, repeat) combination, solved in parallel; rows come back in input order.
pub fn run_bench(jobs: &[(String, ProblemInstance)], epsilons: &[Rational], repeat: u32, mode: NumericMode) -> Vec<BenchRow> {
    let mut tasks = Vec::new();
    for (label, inst) in jobs {
        for eps in epsilons {
            for r in 0..repeat.max(1) {
                tasks.push((label, inst, eps, r));
            }
        }
    }
    tasks.par_iter().map(|(label, inst, eps, r)| bench_one(label, *r, inst, eps, mode)).collect()
}

pub fn text_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:>3} {:>4} {:>4} {:>5} {:>6} {:>10} {:>9} {:>7} {:>8} {:>10} {:>10} {:>12} {:>5}",
        "label", "rep", "n", "m", "edges", "eps", "wall_ms", "status", "rises", "bound", "ops/phase", "ops_bound", "gap", "cert"
    );
    for r in rows {
        let bound = r.rise_bound.map_or_else(|| "-".to_string(), |b| b.to_string());
        let gap = match &r.gap_ratio {
            GapRatio::Finite(g) => format!("{:.6}", num_traits::ToPrimitive::to_f64(g).unwrap_or(f64::NAN)),
            other => other.to_string(),
        };
        let _ = writeln!(
            out,
            "{:<24} {:>3} {:>4} {:>4} {:>5} {:>6} {:>10.3} {:>9} {:>7} {:>8} {:>10.2} {:>10.2} {:>12} {:>5}",
            r.label,
            r.repeat,
            r.n,
            r.m,
            r.edges,
            fmt_fraction(&r.epsilon),
            r.wall_ms,
            r.status,
            r.beta_rises,
            bound,
            r.ops_per_phase,
            r.ops_bound,
            gap,
            if r.certificate { "ok" } else { "FAIL" }
        );
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("bad generator spec '{0}': {1}")]
    Bad(String, String),
}

/// Parses `seeds=1..20,n=10,m=10,density=0.5,kind=bts,cap=0.5` into one spec per seed.
///
/// `seeds` is `a..b` (exclusive) or a single seed; missing keys keep generator defaults.
pub fn parse_gen_plan(text: &str) -> Result<Vec<GenSpec>, PlanError> {
    let bad = |why: &str| PlanError::Bad(text.to_string(), why.to_string());
    let mut seeds = 0..1u64;
    let mut base = GenSpec::new(0, 5, 5, 0.5);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let int = |v: &str| v.parse::<u64>().map_err(|_| bad(&format!("bad value for {key}")));
        let real = |v: &str| v.parse::<f64>().map_err(|_| bad(&format!("bad value for {key}")));
        match key {
            "seeds" | "seed" => {
                seeds = match value.split_once("..") {
                    Some((a, b)) => int(a)?..int(b)?,
                    None => int(value)?..int(value)? + 1,
                }
            }
            "n" => base.n = int(value)? as usize,
            "m" => base.m = int(value)? as usize,
            "density" => base.density = real(value)?,
            "kind" => {
                base.kind = match value {
                    "btp" => Kind::Btp,
                    "bts" => Kind::Bts,
                    _ => return Err(bad("kind must be btp or bts")),
                }
            }
            "cap" => base.capacity_prob = real(value)?,
            "max_edges" => base.max_edges = Some(int(value)? as usize),
            _ => return Err(bad(&format!("unknown key {key}"))),
        }
    }
    if seeds.is_empty() {
        return Err(bad("empty seed range"));
    }
    Ok(seeds.map(|seed| GenSpec { seed, ..base.clone() }).collect())
}

/// Generated jobs labelled `gen-<kind>-<n>x<m>-s<seed>`.
pub fn generated_jobs(specs: &[GenSpec]) -> Result<Vec<(String, ProblemInstance)>, String> {
    specs
        .iter()
        .map(|s| {
            let inst = generate(s).map_err(|e| format!("seed {}: {e}", s.seed))?;
            Ok((format!("gen-{}-{}x{}-s{}", s.kind.tag(), s.n, s.m, s.seed), inst))
        })
        .collect()
}
