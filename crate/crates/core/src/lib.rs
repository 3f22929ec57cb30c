// `!(x > 0.0)` style tests are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod descriptors;
pub mod energy;
pub mod evaluation;
pub mod geometry;
pub mod graph;
pub mod pipeline;
pub mod shapes;
pub mod solver;
pub mod transfer;
