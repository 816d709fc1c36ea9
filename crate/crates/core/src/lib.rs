//! Riemann–Liouville fractional operators on uniform grids, the space of
//! states with `L^p` fractional velocity, and a direct-method solver for
//! fractional Euler–Lagrange equations, with numerical checkers for the
//! operator identities, embedding inequalities and Lagrangian hypotheses.

pub mod cli;
pub mod config;
pub mod error;
pub mod fracops;
pub mod functional;
pub mod grid;
pub mod lagrangian;
pub mod solver;
pub mod space;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{FracOrder, Grid, SampledFunction, Side};
pub use space::{ProblemParams, VelocityField};
