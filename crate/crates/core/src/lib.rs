//! Periodic traveling water waves with vorticity on deep water.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod continuation;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod nekrasov;
pub mod physics;
pub mod pipeline;
pub mod quadrature;
pub mod shear_flow;
pub mod strip;
pub mod sturm_liouville;
pub mod vorticity;

pub use error::{Error, Result};
