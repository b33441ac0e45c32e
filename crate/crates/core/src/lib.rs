//! Exact algebra for the K(2)-local sphere at the prime 3.
//!
//! The crate is layered bottom-up:
//!
//! * [`padic`]: `Z/3^N` residues and the Witt vectors `W(F_9)` truncated at `3^N`.
//! * [`group`]: the maximal order `O_2`, the extended stabilizer group `G_2`,
//!   finite subgroup closure and the reduced determinant.
//! * [`honda`]: an exact-rational construction of the Honda formal group law
//!   and the action of `O_2` on it by power series.
//! * [`e1`]: the `E_1`-page of the finite resolution spectral sequence.
//! * [`d1`]: the `d_1` differential on the adapted generators.
//! * [`f3`] and [`e2`]: sparse linear algebra over `F_3` and `E_2` homology.
//! * [`chart`]: cohomology presentations, the rational homotopy chart and
//!   chromatic splitting reports.
//! * [`config`] and [`pipeline`]: run configuration and the verification gates
//!   driven by the `k2local` binary.
#![allow(clippy::needless_range_loop)]

pub mod chart;
pub mod config;
pub mod d1;
pub mod e1;
pub mod e2;
pub mod error;
pub mod f3;
pub mod group;
pub mod honda;
pub mod padic;
pub mod pipeline;

pub use error::{Error, Result};

/// Version string folded into content-addressed report names.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
