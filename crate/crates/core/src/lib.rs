#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod cli;
pub mod engine;
pub mod indicators;
pub mod market_data;
pub mod metrics;
pub mod strategies;
