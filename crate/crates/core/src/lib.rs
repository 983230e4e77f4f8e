#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod cv;
pub mod dataprep;
pub mod dist;
pub mod enet;
pub mod error;
pub mod inference;
pub mod linalg;
pub mod rng;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
pub use linalg::Matrix;
