//! Instance transforms: piecewise-linear profits to BTS, generalized flow to
//! an equality-constrained min-cost BTP, and the M-shift to max-profit.

mod gflow;
mod piecewise;

pub use gflow::{
    gflow_to_btp, map_flow_back, map_flow_forward, mincost_to_maxprofit, parse_gflow, parse_rational, random_gflow, serialize_gflow,
    serialize_rational, Arc, BtpViolation, GenFlowInstance, GenFlowViolation, Mapper, Objective, RationalBtp, RationalEdge,
    HEURISTIC_BRIDGE,
};
pub use piecewise::{
    fill_order_violation, normalize, parse_piecewise, random_piecewise, random_split_flow, reassemble, serialize_piecewise,
    split_piecewise, EdgeMap, PiecewiseEdge, PiecewiseInstance,
};

use thiserror::Error;

use crate::numeric::{fmt_fraction, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("edge {} is not concave at segment {}", edge + 1, segment + 1)]
    NotConcave { edge: usize, segment: usize },
    #[error("edge {} violates fill order: segment {} is not full but segment {} carries flow", edge + 1, first + 1, later + 1)]
    FillOrder { edge: usize, first: usize, later: usize },
    #[error("infeasible flow: {}", .0.join("; "))]
    Infeasible(Vec<String>),
    #[error("M must exceed the largest cost {}", fmt_fraction(max))]
    ShiftTooSmall { max: Rational },
}
