//! Just-in-time scheduling with interval balance checks, a home-building
//! detail-requirement cascade, and a budgeted correction loop.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balance;
pub mod cli;
pub mod fixtures;
pub mod homebuilding;
pub mod improve;
pub mod instance;
pub mod jit;
pub mod model;
pub mod report;
