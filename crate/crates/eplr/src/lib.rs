//! Extrapolated polynomial lattice rules over F_b.
//!
//! The crate builds generating vectors for polynomial lattice rules by
//! fast component-by-component search against a computable worst-case
//! error criterion, combines chains of consecutive-size rules by
//! Richardson extrapolation into higher-order quadratures, and provides
//! the circulant fast QMC matrix-vector product.
//!
//! With the default `parallel` feature the data-parallel inner loops
//! (point generation, QMC sums, kernel grids, convergence sweeps) run on
//! rayon; disabling it falls back to equivalent sequential code with
//! identical results.

pub mod bernoulli;
pub mod bounds;
pub mod cbc;
pub mod error;
pub mod extrapolation;
pub mod fft;
pub mod gf;
pub mod kernel;
pub mod matvec;
pub mod par;
pub mod points;
pub mod quadrature;
pub mod reference;
pub mod rulefile;
pub mod weights;

pub use error::{Error, Result};
