//! Numerical laboratory for the variational ideal quantum fluid model.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covariant;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod madelung;
pub mod output;
pub mod potentials;
pub mod scalar;
pub mod scenario;
pub mod schrodinger;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{convolve, derivative, integrate, parseval_integral, ComplexField, Field, Grid};
pub use scalar::Real;
pub use madelung::{Solver, State, Trajectory};
pub use potentials::PhysParams;

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type ComplexField64 = ComplexField<f64>;
pub type State64 = State<f64>;
pub type Solver64 = Solver<f64>;
pub type Params64 = PhysParams<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
pub type State32 = State<f32>;
pub type Solver32 = Solver<f32>;
pub type Params32 = PhysParams<f32>;
