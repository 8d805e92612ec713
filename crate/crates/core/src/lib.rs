//! Exact truncated q-series over the integers and over `Z/2^k`, with
//! builders for Pochhammer symbols, eta and theta functions, a small
//! expression language, partition-count oracles and congruence checks.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod builders;
pub mod congruence;
pub mod dissection;
pub mod expr;
pub mod named;
pub mod partitions;
pub mod report;
pub mod series;

pub use congruence::{ClaimKind, CongruenceCheck, Offset, PrimeCondition};
pub use builders::{Length, PochhammerFactor, SignedMonomial, ThetaAtom};
pub use expr::{eval_qexpr, parse_qexpr, Evaluator, QExpr};
pub use named::{named_series, NamedSeries, SeriesName};
pub use report::{FirstFailure, Params, Status, VerificationReport};
pub use series::{Ring, RingElement, SeriesError, TruncatedSeries};
