//! Desk-scale computations around Tsirelson-type spaces and linear dimension
//! reduction.
//!
//! The crate is organised by capability:
//!
//! * [`seqvec`]: exact finitely supported sequences over the rationals.
//! * [`tsirelson`]: exact evaluation of the Tsirelson norm, its
//!   2-convexification and Johnson's modified variants, with tree
//!   certificates and brute-force oracles.
//! * [`gauss`]: type-2 / cotype-2 ratio estimation, the Kwapień product bound
//!   and the Carathéodory cone reduction.
//! * [`jl`]: Gaussian random projections, distortion measurement, the Walsh
//!   point sets and the embedding-to-type mechanism experiment.
//! * [`growth`]: log*, the Ackermann hierarchy, inverse Ackermann variants and
//!   the recursive Euclidean-distortion bound.
//! * [`flatsearch`]: cutting-plane search for flat vectors and the cotype
//!   certificates derived from them.
//! * [`cli`]: the `banach-gauge` command line front end.
//!
//! The runnable programs under `examples/` walk through each capability.

pub mod cli;
pub mod error;
pub mod flatsearch;
pub mod gauss;
pub mod growth;
pub mod jl;
pub mod seed;
pub mod seqvec;
pub mod tsirelson;

pub use error::{Error, Result};
pub use seqvec::{FinVec, IndexSet, Rat};
