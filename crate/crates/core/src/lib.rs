// `!(x > 0.0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constellation;
pub mod curve;
pub mod emi_analytic;
pub mod emi_mst;
pub mod error;
pub mod exec;
pub mod keyhole_channel;
pub mod rng;
pub mod scalar_info;
pub mod simulate;
pub mod specfun;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
