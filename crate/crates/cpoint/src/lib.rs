//! File formats, model bundles, the command-line driver and the HTTP service.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod api;
pub mod bundle;
mod error;
pub mod filter;
pub mod formats;
pub mod service;

pub use api::{By, FrontierView, SelectRequest, SelectionView};
pub use bundle::{Inputs, ModelBundle};
pub use error::{Error, ErrorBody};
