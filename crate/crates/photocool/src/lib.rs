//! File formats, parallel ensembles and the command-line front end for
//! [`photocool_core`].

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dataset;
pub mod ensemble;
pub mod report;
pub mod spectrum_io;
pub mod table1;
pub mod trajectory_io;
pub mod welch;
