//! Mean-variance portfolio selection core.
//!
//! Pure computation without IO: a revised simplex with QR basis updates, a
//! complementarity-based parametric quadratic program that traces the
//! critical line, efficient-frontier queries, return-moment estimation
//! (including lognormal option legs) and a compiler for the model
//! description language.
#![no_std]
// `!(a > b)` deliberately treats NaN as failing the comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod numerics;
pub mod moments;
pub mod simplex;
pub mod qp;
pub mod frontier;
pub mod mdl;
