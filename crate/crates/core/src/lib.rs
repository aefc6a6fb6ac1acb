// `!(x <= tol)` guards are written that way so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod linalg;
pub mod modring;
pub mod schwinger;
pub mod wk;
pub mod metaplectic;
pub mod hwgroup;
pub mod qosc;
pub mod sl2r;
pub mod aawigner;
pub mod parse;
pub mod config;
