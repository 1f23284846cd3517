//! Exact Casselman-Shalika values for unitary Shalika models of GU(2,2),
//! checked against the degree-5 standard L-factor through the unramified
//! zeta series.

pub mod cli;
pub mod exactalg;
pub mod lfactor;
pub mod rootdata;
pub mod satake;
pub mod selftest;
pub mod shalika;
pub mod structure;
pub mod theta;
pub mod weylchar;
