//! Exact two-dimensional Walsh–Fourier analysis.
//!
//! Functions on `I = [0, 1)` and `I²` are piecewise constant on dyadic cells and
//! stored as integers over one denominator, so kernels, means, integrals and
//! maximal-kernel estimates are computed with no rounding at all.

pub mod dyadic;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod lab;
pub mod ops;
pub mod rational;
pub mod region;
pub mod transform;

pub use dyadic::{DyadicInterval, DyadicPoint, Nat};
pub use error::{Error, Result};
pub use grid::{AbsMax, AbsMax1D, AbsMax2D, Grid, Grid1D, Grid2D};
pub use rational::Rational;
pub use region::{integrate, CellRange, Region, Region1D, Region2D};
pub use transform::{fwht_forward, fwht_inverse, xor_convolve, Spectrum, Spectrum1D, Spectrum2D};
